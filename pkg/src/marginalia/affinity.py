"""Conceptual affinity navigation: relate a primary post to the other
visible posts, produce typed/banded entries and the display ordering.

Scores come from the completion provider, not from embedding similarity;
out-of-range scores are rejected (forcing a regeneration) rather than
clamped, so provider drift surfaces instead of being papered over.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from pydantic import BaseModel, Field

from .constraints import keyword_violation, keyword_warning
from .errors import ConsistencyError, DomainError, ProviderError
from .gateway import Gateway, GatewayResult, ValidationRule
from .model import Post, RelevanceBand, classify_relevance
from .providers import EmbeddingProvider
from .retrieval import cosine

NO_AFFINITY = "none"

#: Generic type label for entries scored by the embedding fallback; the
#: provider is what names real conceptual bridges.
FALLBACK_AFFINITY_TYPE = "Semantic Similarity"
FALLBACK_WARNING = "affinity_fallback: provider unavailable, scores from embedding similarity"


class AffinityItemModel(BaseModel):
    post_id: str
    affinity_type: str
    relevance_score: float
    theme: Optional[str] = None
    percentage: Optional[float] = None


class AffinityResponse(BaseModel):
    entries: list[AffinityItemModel] = Field(default_factory=list)


@dataclass(frozen=True)
class AffinityEntry:
    """One judged relationship between the primary post and another post.

    ``theme`` and ``percentage`` are advisory metadata; the 0-1 score is
    canonical and ``band`` is always derived from it.
    """

    post_id: str
    affinity_type: str
    relevance_score: float
    band: RelevanceBand
    theme: Optional[str] = None
    percentage: Optional[float] = None
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.band != classify_relevance(self.relevance_score):
            raise DomainError("band must equal classify_relevance(relevance_score)")
        if self.affinity_type != NO_AFFINITY:
            violation = keyword_violation("affinity type", self.affinity_type)
            if violation:
                raise DomainError(violation)
        elif self.band != RelevanceBand.LOW:
            raise DomainError('affinity type "none" requires a low-band score')

    @property
    def is_none(self) -> bool:
        return self.affinity_type == NO_AFFINITY


@dataclass(frozen=True)
class AffinityOrdering:
    """Display order for one primary post; the primary itself is rendered
    first, separately, and never appears in ``ordered``."""

    primary_post_id: str
    ordered: tuple[AffinityEntry, ...] = field(default_factory=tuple)


def _affinity_rules(candidate_ids: Sequence[str]) -> list[ValidationRule]:
    expected = list(candidate_ids)

    def covers(response: AffinityResponse) -> Optional[str]:
        got = [e.post_id for e in response.entries]
        if sorted(got) != sorted(expected):
            return f"entries cover {got!r}, expected exactly {expected!r}"
        return None

    def score_range(response: AffinityResponse) -> Optional[str]:
        for entry in response.entries:
            if not 0.0 <= entry.relevance_score <= 1.0:
                return f"relevance_score {entry.relevance_score} for {entry.post_id} outside [0, 1]"
        return None

    def type_words(response: AffinityResponse) -> Optional[str]:
        for entry in response.entries:
            if entry.affinity_type == NO_AFFINITY:
                continue
            violation = keyword_violation("affinity_type", entry.affinity_type)
            if violation:
                return violation
        return None

    def none_is_low(response: AffinityResponse) -> Optional[str]:
        for entry in response.entries:
            if entry.affinity_type == NO_AFFINITY and entry.relevance_score >= 0.4:
                return (
                    f'affinity_type "none" for {entry.post_id} carries score '
                    f"{entry.relevance_score}, expected below 0.4"
                )
        return None

    def type_words_target(response: AffinityResponse) -> Optional[str]:
        notes = [
            keyword_warning("affinity_type", e.affinity_type)
            for e in response.entries
            if e.affinity_type != NO_AFFINITY
        ]
        notes = [n for n in notes if n]
        return "; ".join(notes) if notes else None

    return [
        ValidationRule("entries_cover", covers, "one entry per candidate, ids matching"),
        ValidationRule("score_range", score_range, "scores live in [0, 1]"),
        ValidationRule("affinity_type_words", type_words, "types are 1-3 words or none"),
        ValidationRule("none_implies_low", none_is_low, 'type "none" means low relevance'),
        ValidationRule(
            "affinity_type_words_target",
            type_words_target,
            "types should be 1-2 words",
            severity="warning",
        ),
    ]


def _render_card(post: Post) -> str:
    return f"id: {post.id}\ncontent: {post.content}"


def analyze_affinity(
    primary: Post,
    candidates: Sequence[Post],
    gateway: Gateway,
    *,
    embedder: EmbeddingProvider | None = None,
) -> list[AffinityEntry]:
    """Judge each candidate's relationship to the primary post.

    Returns one entry per candidate (response order). An empty candidate
    list short-circuits to an empty result without a provider call. When the
    provider is unreachable and an embedder is supplied, entries fall back
    to embedding similarity with a generic type, flagged in their warnings;
    validation failures are never silently downgraded this way.
    """
    if any(c.id == primary.id for c in candidates):
        raise DomainError("primary post must not appear among candidates")
    if any(c.material_id != primary.material_id for c in candidates):
        raise DomainError("all posts must share a material")
    if not candidates:
        return []

    try:
        result: GatewayResult[AffinityResponse] = gateway.complete_structured(
            "affinity",
            {
                "primary_card": _render_card(primary),
                "cards": "\n\n".join(_render_card(c) for c in candidates),
            },
            AffinityResponse,
            _affinity_rules([c.id for c in candidates]),
        )
    except ProviderError:
        if embedder is None:
            raise
        return _similarity_fallback(primary, candidates, embedder)
    entries = []
    for item in result.value.entries:
        warning = (
            keyword_warning("affinity type", item.affinity_type)
            if item.affinity_type != NO_AFFINITY
            else None
        )
        entries.append(
            AffinityEntry(
                post_id=item.post_id,
                affinity_type=item.affinity_type,
                relevance_score=item.relevance_score,
                band=classify_relevance(item.relevance_score),
                theme=item.theme,
                percentage=item.percentage,
                warnings=(warning,) if warning else (),
            )
        )
    return entries


def _similarity_fallback(
    primary: Post, candidates: Sequence[Post], embedder: EmbeddingProvider
) -> list[AffinityEntry]:
    primary_vec = embedder.embed(primary.content)
    entries = []
    for candidate in candidates:
        score = max(0.0, min(1.0, cosine(primary_vec, embedder.embed(candidate.content))))
        entries.append(
            AffinityEntry(
                post_id=candidate.id,
                affinity_type=FALLBACK_AFFINITY_TYPE,
                relevance_score=score,
                band=classify_relevance(score),
                warnings=(FALLBACK_WARNING,),
            )
        )
    return entries


def order_posts(
    primary: Post, entries: Sequence[AffinityEntry], posts_by_id: Mapping[str, Post]
) -> AffinityOrdering:
    """Sort entries for display: relevance descending, ties by creation time
    then post id, with "none" entries after typed ones at equal score.

    Raises:
        ConsistencyError: an entry references a post missing from
            ``posts_by_id``.
    """
    for entry in entries:
        if entry.post_id not in posts_by_id:
            raise ConsistencyError(f"entry references unknown post {entry.post_id!r}")
    ordered = sorted(
        entries,
        key=lambda e: (
            -e.relevance_score,
            e.is_none,
            posts_by_id[e.post_id].created_at,
            e.post_id,
        ),
    )
    return AffinityOrdering(primary_post_id=primary.id, ordered=tuple(ordered))
