"""Shared word-limit checks used by gateway rules across the pipelines.

Keywords (affinity types, aspect keywords, evidence key concepts, hot-spot
keywords) target 1-2 words; a third word is tolerated with a warning because
short label phrases routinely run to three words, but four or more is a hard
violation.
"""

from __future__ import annotations

from typing import Optional

from .text import word_count

KEYWORD_TARGET_MAX_WORDS = 2
KEYWORD_HARD_MAX_WORDS = 3


def over_limit(label: str, text: str, limit: int) -> Optional[str]:
    """Violation message when ``text`` exceeds ``limit`` words, else None."""
    count = word_count(text)
    if count > limit:
        return f"{label} has {count} words (limit {limit}): {text!r}"
    return None


def empty_or_blank(label: str, text: str) -> Optional[str]:
    if word_count(text) == 0:
        return f"{label} is empty"
    return None


def keyword_violation(label: str, text: str) -> Optional[str]:
    """Hard failure: empty keyword or more than three words."""
    count = word_count(text)
    if count == 0:
        return f"{label} is empty"
    if count > KEYWORD_HARD_MAX_WORDS:
        return f"{label} has {count} words (hard limit {KEYWORD_HARD_MAX_WORDS}): {text!r}"
    return None


def keyword_warning(label: str, text: str) -> Optional[str]:
    """Soft notice: a three-word keyword is accepted but outside the 1-2 target."""
    count = word_count(text)
    if count == KEYWORD_HARD_MAX_WORDS:
        return f"{label} has {count} words (target 1-{KEYWORD_TARGET_MAX_WORDS}): {text!r}"
    return None
