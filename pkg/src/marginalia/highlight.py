"""Pairwise keyword highlighting under the three discussion styles.

The provider scores how promising a pair of posts is under each style
(percentages summing to 100) and anchors each non-zero style with short
verbatim quotes from both posts. Quotes that fail the verbatim check force
a regeneration; there is no fuzzy matching.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from pydantic import BaseModel, Field

from .errors import DomainError
from .gateway import Gateway, ValidationRule
from .model import DiscussionStyle, Post, style_color
from .text import verbatim_contains, word_count

MAX_QUOTE_WORDS = 3
MAX_ASPECT_WORDS = 10

#: Slack for fractional provider output: anything further from 100 than this
#: is a genuine constraint violation, not rounding noise.
_SUM_TOLERANCE = 1.0

_STYLE_ORDER = (
    DiscussionStyle.SIMILARITY,
    DiscussionStyle.CONTRASTIVE,
    DiscussionStyle.COMPLEMENTARY,
)


class HighlightModel(BaseModel):
    style: DiscussionStyle
    quote_a: str
    quote_b: str
    aspect: str


class PairResponse(BaseModel):
    similarity_pct: float = Field(ge=0)
    contrastive_pct: float = Field(ge=0)
    complementary_pct: float = Field(ge=0)
    highlights: list[HighlightModel] = Field(default_factory=list)

    def raw_percentages(self) -> tuple[float, float, float]:
        return (self.similarity_pct, self.contrastive_pct, self.complementary_pct)


def round_to_100(values: tuple[float, float, float]) -> tuple[int, int, int]:
    """Largest-remainder rounding of near-100 percentages to integers that
    sum to exactly 100.

    Raises:
        ValueError: the inputs are further than the tolerance from 100.
    """
    total = sum(values)
    if abs(total - 100.0) >= _SUM_TOLERANCE:
        raise ValueError(f"percentages sum to {total}, expected 100")
    floors = [int(v) for v in values]
    remainders = [v - f for v, f in zip(values, floors)]
    shortfall = 100 - sum(floors)
    # distribute leftover units to the largest remainders; ties go to the
    # earlier style in the fixed order
    order = sorted(range(3), key=lambda i: (-remainders[i], i))
    for i in range(shortfall):
        floors[order[i % 3]] += 1
    if sum(floors) != 100:
        raise ValueError(f"percentages {values} cannot be rounded to a 100 total")
    return tuple(floors)  # type: ignore[return-value]


@dataclass(frozen=True)
class StyleDistribution:
    """Integer percentages per discussion style, summing to exactly 100."""

    similarity_pct: int
    contrastive_pct: int
    complementary_pct: int

    def __post_init__(self):
        parts = (self.similarity_pct, self.contrastive_pct, self.complementary_pct)
        if any(p < 0 for p in parts):
            raise DomainError("percentages must be non-negative")
        if sum(parts) != 100:
            raise DomainError(f"percentages sum to {sum(parts)}, expected 100")

    def pct(self, style: DiscussionStyle) -> int:
        return {
            DiscussionStyle.SIMILARITY: self.similarity_pct,
            DiscussionStyle.CONTRASTIVE: self.contrastive_pct,
            DiscussionStyle.COMPLEMENTARY: self.complementary_pct,
        }[style]


@dataclass(frozen=True)
class KeywordHighlight:
    """A pair of short verbatim quotes bridging two posts under one style."""

    style: DiscussionStyle
    quote_a: str
    quote_b: str
    aspect: str

    @property
    def color(self) -> str:
        return style_color(self.style)


@dataclass(frozen=True)
class PairAnalysis:
    post_a_id: str
    post_b_id: str
    distribution: StyleDistribution
    highlights: tuple[KeywordHighlight, ...]

    def __post_init__(self):
        by_style = {style: 0 for style in _STYLE_ORDER}
        for h in self.highlights:
            by_style[h.style] += 1
        for style in _STYLE_ORDER:
            pct = self.distribution.pct(style)
            if pct == 0 and by_style[style] > 0:
                raise DomainError(f"zero-percentage style {style.value} carries highlights")
            if pct > 0 and by_style[style] == 0:
                raise DomainError(f"non-zero style {style.value} has no highlight")


def _pair_rules(post_a: Post, post_b: Post) -> list[ValidationRule]:
    def distribution_sum(response: PairResponse) -> Optional[str]:
        try:
            round_to_100(response.raw_percentages())
        except ValueError as exc:
            return str(exc)
        return None

    def quote_words(response: PairResponse) -> Optional[str]:
        for h in response.highlights:
            for label, quote in (("quote_a", h.quote_a), ("quote_b", h.quote_b)):
                count = word_count(quote)
                if not 1 <= count <= MAX_QUOTE_WORDS:
                    return f"{label} has {count} words (expected 1-{MAX_QUOTE_WORDS}): {quote!r}"
        return None

    def quote_verbatim(response: PairResponse) -> Optional[str]:
        for h in response.highlights:
            if not verbatim_contains(post_a.content, h.quote_a):
                return f"quote_a not verbatim in first post: {h.quote_a!r}"
            if not verbatim_contains(post_b.content, h.quote_b):
                return f"quote_b not verbatim in second post: {h.quote_b!r}"
        return None

    def aspect_words(response: PairResponse) -> Optional[str]:
        for h in response.highlights:
            count = word_count(h.aspect)
            if not 1 <= count <= MAX_ASPECT_WORDS:
                return f"aspect has {count} words (expected 1-{MAX_ASPECT_WORDS}): {h.aspect!r}"
        return None

    def style_coupling(response: PairResponse) -> Optional[str]:
        try:
            rounded = round_to_100(response.raw_percentages())
        except ValueError:
            return None  # distribution_sum already reports this
        counts = {style: 0 for style in _STYLE_ORDER}
        for h in response.highlights:
            counts[h.style] += 1
        for style, pct in zip(_STYLE_ORDER, rounded):
            if pct == 0 and counts[style] > 0:
                return f"style {style.value} has 0% but {counts[style]} highlight(s)"
            if pct > 0 and counts[style] == 0:
                return f"style {style.value} has {pct}% but no highlight"
        return None

    return [
        ValidationRule("distribution_sum", distribution_sum, "percentages total 100"),
        ValidationRule("quote_words", quote_words, f"quotes are 1-{MAX_QUOTE_WORDS} words"),
        ValidationRule("quote_verbatim", quote_verbatim, "quotes verbatim in their posts"),
        ValidationRule("aspect_words", aspect_words, f"aspects are 1-{MAX_ASPECT_WORDS} words"),
        ValidationRule("style_highlight_coupling", style_coupling, "highlights iff non-zero"),
    ]


def analyze_pair(post_a: Post, post_b: Post, gateway: Gateway) -> PairAnalysis:
    """Analyze two distinct posts of one material; quotes are drawn from the
    top-level contents only (replies are out of scope by contract)."""
    if post_a.id == post_b.id:
        raise DomainError("pair analysis requires two distinct posts")
    if post_a.material_id != post_b.material_id:
        raise DomainError("pair analysis requires posts on the same material")
    result = gateway.complete_structured(
        "keyword_highlighting",
        {"card1_content": post_a.content, "card2_content": post_b.content},
        PairResponse,
        _pair_rules(post_a, post_b),
    )
    rounded = round_to_100(result.value.raw_percentages())
    return PairAnalysis(
        post_a_id=post_a.id,
        post_b_id=post_b.id,
        distribution=StyleDistribution(*rounded),
        highlights=tuple(
            KeywordHighlight(
                style=h.style, quote_a=h.quote_a, quote_b=h.quote_b, aspect=h.aspect
            )
            for h in result.value.highlights
        ),
    )
