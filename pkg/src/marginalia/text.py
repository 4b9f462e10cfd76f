"""Pure text helpers backing every word-limit and verbatim-grounding check.

A "word" is a maximal run of non-whitespace characters, so hyphenated
compounds count as one word and the count is stable under whitespace noise.
Verbatim matching normalizes line endings (CRLF to LF) and nothing else:
no case folding, no whitespace collapsing.
"""

from __future__ import annotations

from .errors import DomainError


def normalize_newlines(text: str) -> str:
    """Normalize CRLF line endings to LF; all other bytes pass through."""
    return text.replace("\r\n", "\n")


def word_count(text: str) -> int:
    """Number of maximal non-whitespace runs in ``text``."""
    return len(text.split())


def verbatim_contains(haystack: str, needle: str) -> bool:
    """True iff ``needle`` occurs byte-exact in ``haystack`` after newline
    normalization of both sides.

    Raises:
        DomainError: if ``needle`` is empty.
    """
    if needle == "":
        raise DomainError("verbatim needle must be non-empty")
    return normalize_newlines(needle) in normalize_newlines(haystack)
