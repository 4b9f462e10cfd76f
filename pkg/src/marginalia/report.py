"""Personalized learning report: class-wide hot spots, self-reading
reflection, peer-interaction distribution, and inspiring-question history.

All computations read a consistent snapshot of discussion state and change
nothing; the engagement score per paragraph counts the user's posts,
replies, and blend events anchored there (reading views carry a
configurable weight, 0 by default).
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from pydantic import BaseModel

from .constraints import keyword_violation, keyword_warning
from .errors import DomainError
from .gateway import Gateway, ValidationRule
from .model import DiscussionStyle, EngagementEvent, EventKind, Material, Post
from .text import word_count

DEFAULT_HOT_SPOT_MIN_POSTS = 2
HOT_SPOT_CAP = 5
MAX_NOTE_WORDS = 30
SUMMARY_PREFIX = "You discussed"
SUGGESTION_PREFIX = "You could"

_ENGAGEMENT_KINDS = (EventKind.POST, EventKind.REPLY, EventKind.BLEND)


class HotSpotKeywordModel(BaseModel):
    paragraph_index: int
    keyword: str


class OverviewResponse(BaseModel):
    hot_spots: list[HotSpotKeywordModel]


class AnalysisResponse(BaseModel):
    keywords: list[str]
    summary: str
    suggestion: str


@dataclass(frozen=True)
class HotSpot:
    paragraph_index: int
    keyword: str
    class_post_count: int
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.class_post_count < 1:
            raise DomainError("hot spot requires a positive post count")


@dataclass(frozen=True)
class EngagedRegion:
    """One frequently engaged paragraph with the user's own comment refs."""

    paragraph_index: int
    theme: str
    post_ids: tuple[str, ...]
    summary: str  # starts "You discussed", at most 30 words
    suggestion: str  # starts "You could", at most 30 words
    keywords: tuple[str, ...] = ()


@dataclass(frozen=True)
class ReadingReflection:
    engaged: tuple[EngagedRegion, ...]
    underexplored: tuple[int, ...]

    def __post_init__(self):
        engaged_indices = {r.paragraph_index for r in self.engaged}
        if engaged_indices & set(self.underexplored):
            raise DomainError("engaged and underexplored paragraphs must be disjoint")


@dataclass(frozen=True)
class PeerSlice:
    peer: str
    interaction_count: int
    share_pct: float
    summary: str
    suggestion: str
    keywords: tuple[str, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.interaction_count < 1:
            raise DomainError("peer slice requires at least one interaction")


@dataclass(frozen=True)
class QuestionRef:
    """A previously generated inspiring question, kept for review."""

    text: str
    style: DiscussionStyle
    word_count: int
    asked_at: int


@dataclass(frozen=True)
class LearningReport:
    user: str
    material_id: str
    hot_spots: tuple[HotSpot, ...]
    reflection: ReadingReflection
    peer_slices: tuple[PeerSlice, ...]
    question_history: tuple[QuestionRef, ...]
    generated_at: int

    def __post_init__(self):
        if len(self.hot_spots) > HOT_SPOT_CAP:
            raise DomainError(f"at most {HOT_SPOT_CAP} hot spots")
        ranked = sorted(
            self.hot_spots, key=lambda h: (-h.class_post_count, h.paragraph_index)
        )
        if list(ranked) != list(self.hot_spots):
            raise DomainError("hot spots must be sorted by count desc, paragraph asc")


def _analysis_rules() -> list[ValidationRule]:
    def keywords_count(response: AnalysisResponse) -> Optional[str]:
        n = len(response.keywords)
        if not 1 <= n <= 3:
            return f"{n} keywords, expected 1-3"
        if any(word_count(k) == 0 for k in response.keywords):
            return "empty keyword"
        return None

    def summary_shape(response: AnalysisResponse) -> Optional[str]:
        if not response.summary.startswith(SUMMARY_PREFIX):
            return f'summary must start with "{SUMMARY_PREFIX}": {response.summary!r}'
        count = word_count(response.summary)
        if count > MAX_NOTE_WORDS:
            return f"summary has {count} words (limit {MAX_NOTE_WORDS})"
        return None

    def suggestion_shape(response: AnalysisResponse) -> Optional[str]:
        if not response.suggestion.startswith(SUGGESTION_PREFIX):
            return f'suggestion must start with "{SUGGESTION_PREFIX}": {response.suggestion!r}'
        count = word_count(response.suggestion)
        if count > MAX_NOTE_WORDS:
            return f"suggestion has {count} words (limit {MAX_NOTE_WORDS})"
        return None

    return [
        ValidationRule("keywords_count", keywords_count, "1-3 keywords"),
        ValidationRule("summary_shape", summary_shape, "You discussed..., <=30 words"),
        ValidationRule("suggestion_shape", suggestion_shape, "You could..., <=30 words"),
    ]


def count_public_posts_per_paragraph(all_public_posts: Sequence[Post]) -> Counter:
    """Class-wide discussion density: public posts and replies per paragraph."""
    return Counter(post.anchor_paragraph for post in all_public_posts)


def compute_hot_spots(
    all_public_posts: Sequence[Post],
    material: Material,
    gateway: Gateway,
    *,
    min_posts: int = DEFAULT_HOT_SPOT_MIN_POSTS,
    cap: int = HOT_SPOT_CAP,
) -> list[HotSpot]:
    """Paragraphs whose public post count reaches the threshold, keyworded
    via the discussion-overview template; top ``cap`` by count."""
    counts = count_public_posts_per_paragraph(all_public_posts)
    hot = sorted(
        ((index, n) for index, n in counts.items() if n >= min_posts),
        key=lambda pair: (-pair[1], pair[0]),
    )[:cap]
    if not hot:
        return []

    posts_by_paragraph: dict[int, list[Post]] = {}
    for post in all_public_posts:
        posts_by_paragraph.setdefault(post.anchor_paragraph, []).append(post)
    sections = []
    for index, n in hot:
        lines = [f"hotSpot paragraph {index} ({n} posts):"]
        lines += [
            f"- {p.author}: {p.content}"
            for p in sorted(posts_by_paragraph[index], key=lambda p: p.created_at)
        ]
        sections.append("\n".join(lines))

    expected = [index for index, _ in hot]

    def covers(response: OverviewResponse) -> Optional[str]:
        got = [h.paragraph_index for h in response.hot_spots]
        if sorted(got) != sorted(expected):
            return f"hot spot keywords cover {got!r}, expected exactly {expected!r}"
        return None

    def keyword_words(response: OverviewResponse) -> Optional[str]:
        for spot in response.hot_spots:
            violation = keyword_violation("hot spot keyword", spot.keyword)
            if violation:
                return violation
        return None

    result = gateway.complete_structured(
        "discussion_overview",
        {
            "article": f"{material.title}\n\n{material.raw_text}",
            "discussions": "\n\n".join(sections),
            "comments": "(aggregate class view; no single user)",
        },
        OverviewResponse,
        [
            ValidationRule("hot_spots_cover", covers, "one keyword per hot spot"),
            ValidationRule("hot_spot_keyword_words", keyword_words, "keywords 1-3 words"),
        ],
    )
    keyword_by_index = {h.paragraph_index: h.keyword for h in result.value.hot_spots}
    spots = []
    for index, n in hot:
        keyword = keyword_by_index[index]
        warning = keyword_warning("hot spot keyword", keyword)
        spots.append(
            HotSpot(
                paragraph_index=index,
                keyword=keyword,
                class_post_count=n,
                warnings=(warning,) if warning else (),
            )
        )
    return spots


def engagement_scores(
    user_events: Sequence[EngagementEvent], *, view_weight: int = 0
) -> Counter:
    """Per-paragraph engagement: posts, replies, and blends count 1 each;
    views count ``view_weight``."""
    scores: Counter = Counter()
    for event in user_events:
        if event.paragraph is None:
            continue
        if event.kind in _ENGAGEMENT_KINDS:
            scores[event.paragraph] += 1
        elif event.kind is EventKind.VIEW and view_weight:
            scores[event.paragraph] += view_weight
    return scores


def compute_reading_reflection(
    user_events: Sequence[EngagementEvent],
    user_posts: Sequence[Post],
    material: Material,
    gateway: Gateway,
    *,
    view_weight: int = 0,
) -> ReadingReflection:
    """Split the material into engaged and underexplored paragraphs for one
    user; engaged paragraphs get a theme, comment refs, and a suggestion."""
    users = {e.user for e in user_events}
    if len(users) > 1:
        raise DomainError(f"events must belong to a single user, got {sorted(users)}")
    scores = engagement_scores(user_events, view_weight=view_weight)
    engaged_indices = sorted(i for i, s in scores.items() if s >= 1)
    underexplored = tuple(
        p.index for p in material.paragraphs if p.index not in set(engaged_indices)
    )

    posts_by_paragraph: dict[int, list[Post]] = {}
    for post in user_posts:
        posts_by_paragraph.setdefault(post.anchor_paragraph, []).append(post)

    regions = []
    rules = _analysis_rules()
    for index in engaged_indices:
        own = sorted(posts_by_paragraph.get(index, []), key=lambda p: p.created_at)
        comment = "\n".join(p.content for p in own) or "(engagement without a stored comment)"
        result = gateway.complete_structured(
            "discussion_analysis",
            {
                "comment": comment,
                "paragraph_index": index,
                "paragraph_text": material.paragraph(index).text,
            },
            AnalysisResponse,
            rules,
        )
        regions.append(
            EngagedRegion(
                paragraph_index=index,
                theme=result.value.keywords[0],
                post_ids=tuple(p.id for p in own),
                summary=result.value.summary,
                suggestion=result.value.suggestion,
                keywords=tuple(result.value.keywords),
            )
        )
    return ReadingReflection(engaged=tuple(regions), underexplored=underexplored)


def compute_peer_distribution(
    user: str,
    interactions: Sequence[EngagementEvent],
    gateway: Gateway,
    *,
    exchange_texts: Mapping[str, str] | None = None,
) -> list[PeerSlice]:
    """One slice per distinct peer the user interacted with; shares sum to
    100. Self-interactions (replies to own posts) are not peer exchanges."""
    counts: Counter = Counter()
    for event in interactions:
        if event.kind not in (EventKind.REPLY, EventKind.PAIR_ANALYSIS, EventKind.BLEND):
            raise DomainError(f"not a peer interaction event: {event.kind.value}")
        if event.peer and event.peer != user:
            counts[event.peer] += 1
    if not counts:
        return []
    total = sum(counts.values())
    rules = _analysis_rules()
    slices = []
    for peer, n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        context = (exchange_texts or {}).get(peer, "")
        result = gateway.complete_structured(
            "discussion_analysis",
            {
                "comment": context or f"({n} recorded interactions, content unavailable)",
                "paragraph_index": -1,
                "paragraph_text": f"(cross-paragraph exchange with {peer})",
            },
            AnalysisResponse,
            rules,
        )
        slices.append(
            PeerSlice(
                peer=peer,
                interaction_count=n,
                share_pct=n / total * 100.0,
                summary=result.value.summary,
                suggestion=result.value.suggestion,
                keywords=tuple(result.value.keywords),
            )
        )
    return slices


def assemble_report(
    user: str,
    material: Material,
    gateway: Gateway,
    *,
    all_public_posts: Sequence[Post],
    user_posts: Sequence[Post],
    user_events: Sequence[EngagementEvent],
    question_history: Sequence[QuestionRef],
    generated_at: int,
    hot_spot_min_posts: int = DEFAULT_HOT_SPOT_MIN_POSTS,
    view_weight: int = 0,
    exchange_texts: Mapping[str, str] | None = None,
) -> LearningReport:
    """Compose the full report from a consistent snapshot; newest questions
    first."""
    peer_events = [
        e
        for e in user_events
        if e.kind in (EventKind.REPLY, EventKind.PAIR_ANALYSIS, EventKind.BLEND)
    ]
    return LearningReport(
        user=user,
        material_id=material.id,
        hot_spots=tuple(
            compute_hot_spots(
                all_public_posts, material, gateway, min_posts=hot_spot_min_posts
            )
        ),
        reflection=compute_reading_reflection(
            user_events, user_posts, material, gateway, view_weight=view_weight
        ),
        peer_slices=tuple(
            compute_peer_distribution(
                user, peer_events, gateway, exchange_texts=exchange_texts
            )
        ),
        question_history=tuple(
            sorted(question_history, key=lambda q: -q.asked_at)
        ),
        generated_at=generated_at,
    )
