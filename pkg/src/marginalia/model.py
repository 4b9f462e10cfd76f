"""Shared domain types and the pure classification helpers used by every
pipeline.

All types are immutable value objects once constructed; they are safe to
share across threads without locking.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import DomainError
from .text import normalize_newlines, word_count


class RelevanceBand(str, Enum):
    HIGH = "high"
    MEDIUM = "medium"
    LOW = "low"


class DiscussionStyle(str, Enum):
    SIMILARITY = "similarity"
    CONTRASTIVE = "contrastive"
    COMPLEMENTARY = "complementary"


class Visibility(str, Enum):
    PRIVATE = "private"
    PUBLIC = "public"


#: UI color implied by each relevance band.
BAND_COLORS = {
    RelevanceBand.HIGH: "green",
    RelevanceBand.MEDIUM: "yellow",
    RelevanceBand.LOW: "red",
}

#: UI color implied by each discussion style.
STYLE_COLORS = {
    DiscussionStyle.SIMILARITY: "green",
    DiscussionStyle.CONTRASTIVE: "yellow",
    DiscussionStyle.COMPLEMENTARY: "orange",
}


def classify_relevance(score: float) -> RelevanceBand:
    """Partition a relevance score in [0, 1] into high / medium / low.

    Boundaries: high iff score > 0.7, medium iff 0.4 <= score <= 0.7,
    low iff score < 0.4. Both 0.4 and 0.7 land in medium.

    Raises:
        DomainError: if score is NaN or outside [0, 1].
    """
    if isinstance(score, bool) or not isinstance(score, (int, float)):
        raise DomainError(f"relevance score must be a number, got {type(score).__name__}")
    if math.isnan(score) or score < 0.0 or score > 1.0:
        raise DomainError(f"relevance score {score!r} outside [0, 1]")
    if score > 0.7:
        return RelevanceBand.HIGH
    if score >= 0.4:
        return RelevanceBand.MEDIUM
    return RelevanceBand.LOW


def band_color(band: RelevanceBand) -> str:
    return BAND_COLORS[band]


def style_color(style: DiscussionStyle) -> str:
    return STYLE_COLORS[style]


@dataclass(frozen=True)
class Paragraph:
    """One blank-line-delimited block of a material, the anchoring unit for
    posts, chunks, and hot spots."""

    index: int
    text: str

    def __post_init__(self):
        if self.index < 0:
            raise DomainError(f"paragraph index {self.index} is negative")
        if not self.text:
            raise DomainError("paragraph text must be non-empty")

    @property
    def word_count(self) -> int:
        return word_count(self.text)


@dataclass(frozen=True)
class Material:
    """The immutable source text, paragraph-indexed; ground truth for all
    verbatim checks.

    Invariant: joining paragraph texts with blank-line separators reproduces
    ``raw_text`` exactly (parse_material constructs materials in this
    canonical form).
    """

    id: str
    title: str
    paragraphs: tuple[Paragraph, ...]
    raw_text: str

    def __post_init__(self):
        if not self.raw_text:
            raise DomainError("material raw_text must be non-empty")
        if self.raw_text != normalize_newlines(self.raw_text):
            raise DomainError("material raw_text must be LF-normalized")
        for i, para in enumerate(self.paragraphs):
            if para.index != i:
                raise DomainError(f"paragraph at position {i} carries index {para.index}")
        joined = "\n\n".join(p.text for p in self.paragraphs)
        if joined != self.raw_text:
            raise DomainError("paragraphs do not reproduce raw_text when joined")

    def paragraph(self, index: int) -> Paragraph:
        if not 0 <= index < len(self.paragraphs):
            raise DomainError(f"paragraph index {index} out of range for material {self.id}")
        return self.paragraphs[index]


@dataclass(frozen=True)
class Post:
    """A discussion cell anchored to one paragraph of a material.

    ``created_at`` is a server-assigned logical timestamp, strictly monotonic
    per material, which makes every tie-break deterministic. ``merged_from``
    records provenance when the post was produced by merging.
    """

    id: str
    author: str
    material_id: str
    anchor_paragraph: int
    content: str
    visibility: Visibility
    created_at: int
    parent: Optional[str] = None
    merged_from: tuple[str, ...] = ()
    highlight_range: Optional[tuple[int, int]] = None  # display metadata only

    def __post_init__(self):
        if not self.content:
            raise DomainError("post content must be non-empty")
        if self.anchor_paragraph < 0:
            raise DomainError("anchor_paragraph must be non-negative")

    @property
    def is_reply(self) -> bool:
        return self.parent is not None


class EventKind(str, Enum):
    VIEW = "view"
    POST = "post"
    REPLY = "reply"
    MERGE = "merge"
    ORDER = "order"
    SUMMARIZE = "summarize"
    PAIR_ANALYSIS = "pair_analysis"
    BLEND = "blend"
    REPORT = "report"


#: Kinds that involve a second user; ``peer`` is present exactly for these.
PEERED_KINDS = frozenset({EventKind.REPLY, EventKind.PAIR_ANALYSIS, EventKind.BLEND})


@dataclass(frozen=True)
class EngagementEvent:
    """A logged user action feeding the learning report."""

    user: str
    kind: EventKind
    material_id: str
    timestamp: int
    paragraph: Optional[int] = None
    peer: Optional[str] = None

    def __post_init__(self):
        if (self.peer is not None) != (self.kind in PEERED_KINDS):
            raise DomainError(
                f"peer must be present iff kind is one of "
                f"{sorted(k.value for k in PEERED_KINDS)}; got kind={self.kind.value} "
                f"peer={self.peer!r}"
            )
