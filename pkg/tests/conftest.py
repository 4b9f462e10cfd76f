"""Shared fixtures: a climate-policy reading, canned posts, and stub-script
builders used across the pipeline tests."""

from __future__ import annotations

import json

import pytest

from marginalia.gateway import Gateway
from marginalia.ingestion import parse_material
from marginalia.model import Post, Visibility
from marginalia.providers import StubChatProvider

CLIMATE_TITLE = "Climate Cooperation and Its Obstacles"

CLIMATE_TEXT = """\
International climate policy asks nations to give up short-term advantages for a shared long-term good. Most agreements begin with voluntary pledges, and most pledges fall short of what models say is required.

Economic nationalism complicates every round of negotiation. Governments that protect domestic industries with tariffs and subsidies treat emission limits as a competitive handicap, and they resist commitments that rivals might evade.

Game theorists describe the standoff as a prisoner's dilemma. Each country gains the most by letting others cut emissions first, yet when every government reasons this way, collective restraint collapses and all parties end up worse off.

International frameworks try to escape the trap by changing the payoffs. Treaties that combine monitoring, border adjustments, and graduated sanctions make defection visible and expensive, which shifts the rational strategy toward cooperation.

Carbon pricing is the most direct lever. A predictable price on emissions lets firms plan long-term investments, and revenue recycling can soften the burden on households that spend a large share of income on energy.

Technology transfer gives poorer economies a route into the bargain. When cleaner production methods travel across borders at low cost, the choice between growth and restraint becomes less stark, and wider coalitions become possible.
"""

ALEX_CONTENT = (
    "Economic nationalism will sink any climate deal that ignores domestic "
    "politics. Tariffs feel safe to voters even when they slow decarbonization "
    "everywhere."
)
ALEX_CONTENT_2 = (
    "A carbon price only works if it survives elections. Credibility over "
    "decades matters more than the number in year one."
)
AMY_CONTENT = (
    "The prisoner's dilemma framing explains why pledges stall. Everyone waits "
    "for someone else to move first, so no one moves at all."
)
BEN_CONTENT = (
    "Voluntary pledges look like progress reports, not commitments. I want to "
    "know who enforces anything here."
)

INSPIRING_QUESTION_TEXT = (
    "How can international frameworks address both the prisoner's dilemma and "
    "economic nationalism to foster climate cooperation?"
)

EVIDENCE_EXCERPTS = [
    "Each country gains the most by letting others cut emissions first, yet "
    "when every government reasons this way, collective restraint collapses "
    "and all parties end up worse off.",
    "Governments that protect domestic industries with tariffs and subsidies "
    "treat emission limits as a competitive handicap, and they resist "
    "commitments that rivals might evade.",
    "Treaties that combine monitoring, border adjustments, and graduated "
    "sanctions make defection visible and expensive, which shifts the "
    "rational strategy toward cooperation.",
]


def j(**fields) -> str:
    """A stub response: JSON text for the given fields."""
    return json.dumps(fields)


def words(n: int, prefix: str = "w") -> str:
    """A deterministic text of exactly ``n`` words."""
    return " ".join(f"{prefix}{i}" for i in range(1, n + 1))


def make_gateway(script) -> Gateway:
    return Gateway(StubChatProvider(script))


def make_post(
    post_id: str,
    content: str,
    *,
    author: str = "alex",
    material_id: str = "m1",
    anchor: int = 0,
    created_at: int = 1,
    visibility: Visibility = Visibility.PUBLIC,
    parent: str | None = None,
) -> Post:
    return Post(
        id=post_id,
        author=author,
        material_id=material_id,
        anchor_paragraph=anchor,
        content=content,
        visibility=visibility,
        created_at=created_at,
        parent=parent,
    )


@pytest.fixture
def climate_material():
    return parse_material(CLIMATE_TEXT, CLIMATE_TITLE, material_id="m1")


@pytest.fixture
def alex_post():
    return make_post("m1-p0001", ALEX_CONTENT, author="alex", anchor=1, created_at=1)


@pytest.fixture
def amy_post():
    return make_post("m1-p0002", AMY_CONTENT, author="amy", anchor=2, created_at=2)


def evidence_response(excerpts=None, concepts=("Collective Action", "Trade Politics", "Treaty Design")) -> str:
    excerpts = excerpts or EVIDENCE_EXCERPTS
    return j(
        evidence=[
            {
                "key_concept": concept,
                "excerpt": excerpt,
                "connection": "Grounds the question in the reading.",
            }
            for concept, excerpt in zip(concepts, excerpts)
        ]
    )


def analysis_response(
    keywords=("tariffs",),
    summary="You discussed the tension between tariffs and cooperation",
    suggestion="You could ask how border adjustments change incentives",
) -> str:
    return j(keywords=list(keywords), summary=summary, suggestion=suggestion)


def scenario_script(amy_id: str, ben_id: str, alex2_id: str) -> dict:
    """A full stub script for the end-to-end walkthrough: ordering around
    Alex's first post, summarizing Amy's, pairing, blending, reporting."""
    return {
        "affinity": j(
            entries=[
                {"post_id": amy_id, "affinity_type": "Economic Theory Application",
                 "relevance_score": 0.9, "theme": "incentives"},
                {"post_id": ben_id, "affinity_type": "Policy Critique",
                 "relevance_score": 0.55},
                {"post_id": alex2_id, "affinity_type": "none", "relevance_score": 0.1},
            ]
        ),
        "summarization": j(
            bullets=[
                "Pledges stall because every country waits for others to move first.",
                "Strategic waiting is the core failure mode, not bad faith.",
            ]
        ),
        "keyword_highlighting": j(
            similarity_pct=20,
            contrastive_pct=30,
            complementary_pct=50,
            highlights=[
                {"style": "similarity", "quote_a": "climate deal",
                 "quote_b": "pledges stall", "aspect": "both doubt current pledges"},
                {"style": "contrastive", "quote_a": "Tariffs feel safe",
                 "quote_b": "move first", "aspect": "protection versus first-mover risk"},
                {"style": "complementary", "quote_a": "Economic nationalism",
                 "quote_b": "prisoner's dilemma", "aspect": "politics completes the game theory"},
            ],
        ),
        "aspect_extraction": j(
            aspects_a=[
                {"keyword": "Economic Nationalism",
                 "description": "Domestic protection instincts override climate commitments",
                 "source_span": "Economic nationalism will sink any climate deal"},
                {"keyword": "Voter Politics",
                 "description": "Tariffs read as safety to electorates",
                 "source_span": "Tariffs feel safe to voters"},
                {"keyword": "Decarbonization Drag",
                 "description": "Protection slows the global transition",
                 "source_span": "slow decarbonization everywhere"},
            ],
            aspects_b=[
                {"keyword": "Game Theory Dynamics",
                 "description": "Strategic waiting explains stalled pledges",
                 "source_span": "prisoner's dilemma framing"},
                {"keyword": "First Mover",
                 "description": "Nobody wants to cut emissions first",
                 "source_span": "Everyone waits for someone else to move first"},
                {"keyword": "Stalled Pledges",
                 "description": "Commitments freeze without enforcement",
                 "source_span": "pledges stall"},
            ],
        ),
        "inspiring_question": j(question=INSPIRING_QUESTION_TEXT),
        "evidence": evidence_response(),
        "discussion_overview": {
            "hotSpot paragraph 2": j(
                hot_spots=[{"paragraph_index": 2, "keyword": "game theory"}]
            ),
        },
        "discussion_analysis": {
            "Paragraph index: 1": analysis_response(
                keywords=("nationalism",),
                summary="You discussed how economic nationalism undermines climate deals",
                suggestion="You could compare tariff politics across two countries",
            ),
            "Paragraph index: 2": analysis_response(
                keywords=("dilemma",),
                summary="You discussed the prisoner's dilemma behind stalled pledges",
                suggestion="You could propose a payoff change that rewards moving first",
            ),
            "Paragraph index: 4": analysis_response(
                keywords=("pricing",),
                summary="You discussed carbon pricing credibility across election cycles",
                suggestion="You could outline a price floor that survives politics",
            ),
            "exchange with amy": analysis_response(
                keywords=("game theory",),
                summary="You discussed game theory and nationalism with Amy",
                suggestion="You could blend her framing with your tariff argument",
            ),
            "exchange with ben": analysis_response(
                keywords=("enforcement",),
                summary="You discussed enforcement worries with Ben",
                suggestion="You could ask Ben which sanctions he finds credible",
            ),
        },
    }
