"""Conceptual blending with evidence anchoring.

Flow: extract three aspects from each post, bridge a selected aspect pair
with a style-aligned inspiring question, then ground the blend in exactly
three verbatim excerpts of the material retrieved over the closed-corpus
index. Excerpts that are not verbatim in the material are rejected and
regenerated; if every retry keeps fabricating, the top retrieved chunks are
emitted directly so grounding never degrades.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from pydantic import BaseModel

from .constraints import keyword_violation, keyword_warning, over_limit
from .errors import DomainError, GatewayValidationError, ProviderError, StateError
from .gateway import Gateway, ValidationRule
from .ingestion import Chunk, locate_paragraphs
from .model import DiscussionStyle, Material, Post
from .providers import EmbeddingProvider
from .retrieval import VectorIndex, embed, top_k
from .text import verbatim_contains, word_count

ASPECTS_PER_POST = 3
MAX_DESCRIPTION_WORDS = 20
EVIDENCE_COUNT = 3
DEFAULT_RETRIEVAL_K = 5

QUESTION_HARD_MIN_WORDS = 10
QUESTION_HARD_MAX_WORDS = 40
QUESTION_TARGET_MIN_WORDS = 20
QUESTION_TARGET_MAX_WORDS = 30

#: Fixed display colors assigned by evidence position.
EVIDENCE_COLORS = ("#4e79a7", "#e15759", "#59a14f")

_EVIDENCE_TASK = (
    "Select the three excerpts that best support the discussion question and "
    "copy each one exactly."
)
_FALLBACK_TASK = (
    "Key concepts only: for each of the three excerpts above, provide a key "
    "concept and a connection note, keeping each excerpt exactly as given."
)


class AspectModel(BaseModel):
    keyword: str
    description: str
    source_span: str


class AspectsResponse(BaseModel):
    aspects_a: list[AspectModel]
    aspects_b: list[AspectModel]


class QuestionResponse(BaseModel):
    question: str


class EvidenceItemModel(BaseModel):
    key_concept: str
    excerpt: str
    connection: str


class EvidenceResponse(BaseModel):
    evidence: list[EvidenceItemModel]


@dataclass(frozen=True)
class Aspect:
    """A keyword plus description, grounded by a verbatim span of its post."""

    keyword: str
    description: str
    source_span: str
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class AspectSet:
    post_id: str
    aspects: tuple[Aspect, ...]

    def __post_init__(self):
        if len(self.aspects) != ASPECTS_PER_POST:
            raise DomainError(f"aspect set must hold exactly {ASPECTS_PER_POST} aspects")
        keywords = [a.keyword for a in self.aspects]
        if len(set(keywords)) != len(keywords):
            raise DomainError(f"aspect keywords must be pairwise distinct: {keywords!r}")


@dataclass(frozen=True)
class BlendSelection:
    """One aspect from each of two distinct posts, plus the chosen style."""

    post_a_id: str
    aspect_a: Aspect
    post_b_id: str
    aspect_b: Aspect
    style: DiscussionStyle

    def __post_init__(self):
        if self.post_a_id == self.post_b_id:
            raise DomainError("blend selection requires aspects from distinct posts")


@dataclass(frozen=True)
class InspiringQuestion:
    text: str
    style: DiscussionStyle
    word_count: int
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.word_count != word_count(self.text):
            raise DomainError("stored word_count must match the text")
        if not QUESTION_HARD_MIN_WORDS <= self.word_count <= QUESTION_HARD_MAX_WORDS:
            raise DomainError(
                f"question has {self.word_count} words, outside hard bounds "
                f"{QUESTION_HARD_MIN_WORDS}-{QUESTION_HARD_MAX_WORDS}"
            )


@dataclass(frozen=True)
class EvidenceBlock:
    """A verbatim excerpt of the material with a short concept label."""

    key_concept: str
    excerpt: str
    paragraph_indices: tuple[int, ...]
    connection: str
    color: str = EVIDENCE_COLORS[0]
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class BlendArtifact:
    selection: BlendSelection
    question: InspiringQuestion
    evidence: tuple[EvidenceBlock, ...]

    def __post_init__(self):
        if len(self.evidence) != EVIDENCE_COUNT:
            raise DomainError(f"blend requires exactly {EVIDENCE_COUNT} evidence blocks")


def _aspect_rules(post_a: Post, post_b: Post) -> list[ValidationRule]:
    def count(response: AspectsResponse) -> Optional[str]:
        for label, items in (("aspects_a", response.aspects_a), ("aspects_b", response.aspects_b)):
            if len(items) != ASPECTS_PER_POST:
                return f"{label} has {len(items)} aspects, expected {ASPECTS_PER_POST}"
        return None

    def distinct(response: AspectsResponse) -> Optional[str]:
        for label, items in (("aspects_a", response.aspects_a), ("aspects_b", response.aspects_b)):
            keywords = [a.keyword for a in items]
            if len(set(keywords)) != len(keywords):
                return f"{label} keywords not pairwise distinct: {keywords!r}"
        return None

    def keyword_words(response: AspectsResponse) -> Optional[str]:
        for aspect in response.aspects_a + response.aspects_b:
            violation = keyword_violation("aspect keyword", aspect.keyword)
            if violation:
                return violation
        return None

    def description_words(response: AspectsResponse) -> Optional[str]:
        for aspect in response.aspects_a + response.aspects_b:
            violation = over_limit("aspect description", aspect.description, MAX_DESCRIPTION_WORDS)
            if violation:
                return violation
        return None

    def span_verbatim(response: AspectsResponse) -> Optional[str]:
        for post, items in ((post_a, response.aspects_a), (post_b, response.aspects_b)):
            for aspect in items:
                if not aspect.source_span or not verbatim_contains(post.content, aspect.source_span):
                    return (
                        f"source_span for keyword {aspect.keyword!r} not verbatim "
                        f"in post {post.id}: {aspect.source_span!r}"
                    )
        return None

    return [
        ValidationRule("aspect_count", count, f"exactly {ASPECTS_PER_POST} aspects per post"),
        ValidationRule("aspect_keyword_distinct", distinct, "keywords pairwise distinct"),
        ValidationRule("aspect_keyword_words", keyword_words, "keywords are 1-3 words"),
        ValidationRule(
            "aspect_description_words",
            description_words,
            f"descriptions at most {MAX_DESCRIPTION_WORDS} words",
        ),
        ValidationRule("aspect_span_verbatim", span_verbatim, "spans verbatim in posts"),
    ]


def _to_aspect(model: AspectModel) -> Aspect:
    warning = keyword_warning("aspect keyword", model.keyword)
    return Aspect(
        keyword=model.keyword,
        description=model.description,
        source_span=model.source_span,
        warnings=(warning,) if warning else (),
    )


def extract_aspects(
    post_a: Post, post_b: Post, material: Material, gateway: Gateway
) -> tuple[AspectSet, AspectSet]:
    """Extract three grounded aspects from each post."""
    if post_a.id == post_b.id:
        raise DomainError("aspect extraction requires two distinct posts")
    result = gateway.complete_structured(
        "aspect_extraction",
        {
            "article": f"{material.title}\n\n{material.raw_text}",
            "card1_content": post_a.content,
            "card2_content": post_b.content,
        },
        AspectsResponse,
        _aspect_rules(post_a, post_b),
    )
    return (
        AspectSet(post_id=post_a.id, aspects=tuple(_to_aspect(a) for a in result.value.aspects_a)),
        AspectSet(post_id=post_b.id, aspects=tuple(_to_aspect(a) for a in result.value.aspects_b)),
    )


def _question_rules() -> list[ValidationRule]:
    def hard_bounds(response: QuestionResponse) -> Optional[str]:
        count = word_count(response.question)
        if not QUESTION_HARD_MIN_WORDS <= count <= QUESTION_HARD_MAX_WORDS:
            return (
                f"question has {count} words, outside hard bounds "
                f"{QUESTION_HARD_MIN_WORDS}-{QUESTION_HARD_MAX_WORDS}"
            )
        return None

    def target_band(response: QuestionResponse) -> Optional[str]:
        count = word_count(response.question)
        if not QUESTION_TARGET_MIN_WORDS <= count <= QUESTION_TARGET_MAX_WORDS:
            return (
                f"question has {count} words, outside the "
                f"{QUESTION_TARGET_MIN_WORDS}-{QUESTION_TARGET_MAX_WORDS} target"
            )
        return None

    return [
        ValidationRule("question_words", hard_bounds, "hard word bounds"),
        ValidationRule("question_words_target", target_band, "target band", severity="warning"),
    ]


def generate_question(
    selection: BlendSelection, post_a: Post, post_b: Post, gateway: Gateway
) -> InspiringQuestion:
    """Generate the style-aligned question bridging the selected aspects.

    A question inside the hard 10-40 word bounds is accepted; outside the
    20-30 target it carries a warning.
    """
    result = gateway.complete_structured(
        "inspiring_question",
        {
            "style": selection.style.value,
            "keyword_a": selection.aspect_a.keyword,
            "description_a": selection.aspect_a.description,
            "keyword_b": selection.aspect_b.keyword,
            "description_b": selection.aspect_b.description,
            "content_a": post_a.content,
            "content_b": post_b.content,
        },
        QuestionResponse,
        _question_rules(),
    )
    text = result.value.question
    return InspiringQuestion(
        text=text,
        style=selection.style,
        word_count=word_count(text),
        warnings=result.warnings,
    )


def _evidence_rules(material: Material) -> list[ValidationRule]:
    def count(response: EvidenceResponse) -> Optional[str]:
        if len(response.evidence) != EVIDENCE_COUNT:
            return f"{len(response.evidence)} evidence blocks, expected {EVIDENCE_COUNT}"
        return None

    def concept_words(response: EvidenceResponse) -> Optional[str]:
        for item in response.evidence:
            violation = keyword_violation("key_concept", item.key_concept)
            if violation:
                return violation
        return None

    def excerpt_verbatim(response: EvidenceResponse) -> Optional[str]:
        for item in response.evidence:
            if not item.excerpt or not verbatim_contains(material.raw_text, item.excerpt):
                return f"excerpt not verbatim in material: {item.excerpt[:80]!r}"
        return None

    return [
        ValidationRule("evidence_count", count, f"exactly {EVIDENCE_COUNT} blocks"),
        ValidationRule("concept_words", concept_words, "key concepts are 1-3 words"),
        ValidationRule("excerpt_verbatim", excerpt_verbatim, "excerpts verbatim in material"),
    ]


def _blocks_from_response(
    response: EvidenceResponse, material: Material, extra_warnings: tuple[str, ...] = ()
) -> list[EvidenceBlock]:
    blocks = []
    for position, item in enumerate(response.evidence):
        warning = keyword_warning("key concept", item.key_concept)
        blocks.append(
            EvidenceBlock(
                key_concept=item.key_concept,
                excerpt=item.excerpt,
                paragraph_indices=locate_paragraphs(material, item.excerpt),
                connection=item.connection,
                color=EVIDENCE_COLORS[position % len(EVIDENCE_COLORS)],
                warnings=((warning,) if warning else ()) + extra_warnings,
            )
        )
    return blocks


def _render_chunks(chunks: Sequence[Chunk]) -> str:
    return "\n\n".join(f"[excerpt {i + 1}]\n{c.text}" for i, c in enumerate(chunks))


def _fallback_concept(chunk: Chunk) -> str:
    return " ".join(chunk.text.split()[:2])


def retrieve_evidence(
    selection: BlendSelection,
    question: InspiringQuestion,
    index: VectorIndex,
    material: Material,
    gateway: Gateway,
    *,
    chunks: Sequence[Chunk],
    embedder: EmbeddingProvider,
    k: int = DEFAULT_RETRIEVAL_K,
) -> list[EvidenceBlock]:
    """Retrieve and verify exactly three verbatim evidence blocks.

    The query concatenates the selected aspect keywords and descriptions with
    the question text; the top-k chunks are offered to the provider for
    selection. If the provider keeps producing out-of-corpus excerpts, the
    top three retrieved chunks are emitted directly (labelled via a
    concepts-only provider call, or from the chunk text as a last resort).
    """
    if len(index) == 0:
        raise StateError(f"no index entries for material {material.id!r}")
    by_id = {c.chunk_id: c for c in chunks}
    query_text = " ".join(
        [
            selection.aspect_a.keyword,
            selection.aspect_a.description,
            selection.aspect_b.keyword,
            selection.aspect_b.description,
            question.text,
        ]
    )
    results = top_k(index, embed(query_text, embedder), k)
    retrieved = [by_id[r.chunk_id] for r in results if r.chunk_id in by_id]
    if len(retrieved) != len(results):
        missing = [r.chunk_id for r in results if r.chunk_id not in by_id]
        raise StateError(f"index entries without chunks: {missing!r}")

    try:
        result = gateway.complete_structured(
            "evidence",
            {
                "question": question.text,
                "chunks": _render_chunks(retrieved),
                "task": _EVIDENCE_TASK,
            },
            EvidenceResponse,
            _evidence_rules(material),
        )
        return _blocks_from_response(result.value, material)
    except GatewayValidationError as failure:
        return _fallback_evidence(retrieved, material, gateway, failure)


def _fallback_evidence(
    retrieved: Sequence[Chunk],
    material: Material,
    gateway: Gateway,
    failure: GatewayValidationError,
) -> list[EvidenceBlock]:
    top = list(retrieved[:EVIDENCE_COUNT])
    if len(top) < EVIDENCE_COUNT:
        raise StateError(
            f"material has only {len(top)} retrievable chunks; "
            f"{EVIDENCE_COUNT} are required for evidence"
        ) from failure
    note = f"evidence_fallback: provider kept violating {failure.rule_id!r}"
    try:
        result = gateway.complete_structured(
            "evidence",
            {
                "question": note,
                "chunks": _render_chunks(top),
                "task": _FALLBACK_TASK,
            },
            EvidenceResponse,
            _evidence_rules(material),
        )
        labelled = result.value
        if [item.excerpt for item in labelled.evidence] == [c.text for c in top]:
            return _blocks_from_response(labelled, material, extra_warnings=(note,))
    except (GatewayValidationError, ProviderError):
        pass
    # last resort: the chunks themselves, labelled from their own text
    blocks = []
    for position, chunk in enumerate(top):
        blocks.append(
            EvidenceBlock(
                key_concept=_fallback_concept(chunk),
                excerpt=chunk.text,
                paragraph_indices=locate_paragraphs(material, chunk.text),
                connection="Retrieved as directly relevant to the discussion question.",
                color=EVIDENCE_COLORS[position % len(EVIDENCE_COLORS)],
                warnings=(note,),
            )
        )
    return blocks


def make_blend_artifact(
    selection: BlendSelection, question: InspiringQuestion, evidence: Sequence[EvidenceBlock]
) -> BlendArtifact:
    return BlendArtifact(selection=selection, question=question, evidence=tuple(evidence))
