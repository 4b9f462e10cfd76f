"""marginalia: a material-grounded asynchronous discussion service.

Students read a paragraph-indexed material, anchor posts to it in private
mode, go public to see peers, and lean on five provider-backed pipelines:
affinity ordering, bullet summaries, pairwise keyword highlighting,
conceptual blending with verbatim evidence, and a personalized learning
report. A deterministic stub provider keeps everything offline-testable.
"""

from .affinity import AffinityEntry, AffinityOrdering, analyze_affinity, order_posts
from .blend import (
    Aspect,
    AspectSet,
    BlendArtifact,
    BlendSelection,
    EvidenceBlock,
    InspiringQuestion,
    extract_aspects,
    generate_question,
    make_blend_artifact,
    retrieve_evidence,
)
from .errors import MarginaliaError
from .gateway import Gateway, GatewayResult, ValidationRule, complete_structured
from .highlight import (
    KeywordHighlight,
    PairAnalysis,
    StyleDistribution,
    analyze_pair,
)
from .ingestion import Chunk, chunk_material, parse_material
from .model import (
    DiscussionStyle,
    EngagementEvent,
    EventKind,
    Material,
    Paragraph,
    Post,
    RelevanceBand,
    Visibility,
    classify_relevance,
)
from .prompts import TEMPLATES, PromptTemplate, render_prompt
from .providers import (
    ProviderConfig,
    Script,
    StubChatProvider,
    StubEmbedder,
    build_provider,
    stub_respond,
)
from .report import (
    HotSpot,
    LearningReport,
    PeerSlice,
    ReadingReflection,
    assemble_report,
    compute_hot_spots,
    compute_peer_distribution,
    compute_reading_reflection,
)
from .retrieval import SearchResult, VectorIndex, build_index, cosine, embed, top_k
from .summarize import Summary, regenerate, summarize_post, summarize_thread
from .text import normalize_newlines, verbatim_contains, word_count

__version__ = "0.1.0"

__all__ = [
    "AffinityEntry",
    "AffinityOrdering",
    "Aspect",
    "AspectSet",
    "BlendArtifact",
    "BlendSelection",
    "Chunk",
    "DiscussionStyle",
    "EngagementEvent",
    "EvidenceBlock",
    "EventKind",
    "Gateway",
    "GatewayResult",
    "HotSpot",
    "InspiringQuestion",
    "KeywordHighlight",
    "LearningReport",
    "MarginaliaError",
    "Material",
    "Paragraph",
    "PairAnalysis",
    "PeerSlice",
    "Post",
    "PromptTemplate",
    "ProviderConfig",
    "ReadingReflection",
    "RelevanceBand",
    "Script",
    "SearchResult",
    "StubChatProvider",
    "StubEmbedder",
    "StyleDistribution",
    "Summary",
    "TEMPLATES",
    "ValidationRule",
    "VectorIndex",
    "Visibility",
    "analyze_affinity",
    "analyze_pair",
    "assemble_report",
    "build_index",
    "build_provider",
    "chunk_material",
    "classify_relevance",
    "complete_structured",
    "compute_hot_spots",
    "compute_peer_distribution",
    "compute_reading_reflection",
    "cosine",
    "embed",
    "extract_aspects",
    "generate_question",
    "make_blend_artifact",
    "normalize_newlines",
    "order_posts",
    "parse_material",
    "regenerate",
    "render_prompt",
    "retrieve_evidence",
    "stub_respond",
    "summarize_post",
    "summarize_thread",
    "top_k",
    "verbatim_contains",
    "word_count",
]
