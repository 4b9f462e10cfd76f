"""Conceptual blending: aspects from two posts, a style-aligned inspiring
question, and three evidence blocks that must be verbatim in the material.

The scripted question is 16 words; it is accepted (hard bounds are 10-40)
but carries a warning because it misses the 20-30 word target band. The
scripted evidence is copied verbatim from the reading, so the grounding
check passes; an out-of-corpus excerpt would force a retry and eventually
the fallback to raw retrieved chunks.
"""

import json

from marginalia import (
    Aspect,
    BlendSelection,
    DiscussionStyle,
    Gateway,
    StubChatProvider,
    StubEmbedder,
    build_index,
    chunk_material,
    generate_question,
    parse_material,
    retrieve_evidence,
)
from marginalia.model import Post, Visibility

READING = """\
Economic nationalism complicates every round of negotiation. Governments that protect domestic industries with tariffs and subsidies treat emission limits as a competitive handicap, and they resist commitments that rivals might evade.

Game theorists describe the standoff as a prisoner's dilemma. Each country gains the most by letting others cut emissions first, yet when every government reasons this way, collective restraint collapses and all parties end up worse off.

International frameworks try to escape the trap by changing the payoffs. Treaties that combine monitoring, border adjustments, and graduated sanctions make defection visible and expensive, which shifts the rational strategy toward cooperation.
"""

material = parse_material(READING, "Climate Cooperation", material_id="demo")
chunks = chunk_material(material, 200)
embedder = StubEmbedder()
index = build_index(material.id, chunks, embedder)

alex = Post(id="pA", author="alex", material_id="demo", anchor_paragraph=0,
            content="Economic nationalism will sink any climate deal.",
            visibility=Visibility.PUBLIC, created_at=1)
amy = Post(id="pB", author="amy", material_id="demo", anchor_paragraph=1,
           content="The prisoner's dilemma framing explains why pledges stall.",
           visibility=Visibility.PUBLIC, created_at=2)

selection = BlendSelection(
    post_a_id=alex.id,
    aspect_a=Aspect("Economic Nationalism", "Protection instincts override climate goals",
                    "Economic nationalism"),
    post_b_id=amy.id,
    aspect_b=Aspect("Game Theory Dynamics", "Strategic waiting explains stalled pledges",
                    "prisoner's dilemma"),
    style=DiscussionStyle.COMPLEMENTARY,
)

question_text = ("How can international frameworks address both the prisoner's dilemma "
                 "and economic nationalism to foster climate cooperation?")
script = {
    "inspiring_question": json.dumps({"question": question_text}),
    "evidence": json.dumps({
        "evidence": [
            {"key_concept": "Collective Action",
             "excerpt": "Each country gains the most by letting others cut emissions first, "
                        "yet when every government reasons this way, collective restraint "
                        "collapses and all parties end up worse off.",
             "connection": "Names the payoff structure the question asks about."},
            {"key_concept": "Trade Politics",
             "excerpt": "Governments that protect domestic industries with tariffs and "
                        "subsidies treat emission limits as a competitive handicap, and they "
                        "resist commitments that rivals might evade.",
             "connection": "Shows why nationalism resists restraint."},
            {"key_concept": "Treaty Design",
             "excerpt": "Treaties that combine monitoring, border adjustments, and graduated "
                        "sanctions make defection visible and expensive, which shifts the "
                        "rational strategy toward cooperation.",
             "connection": "A concrete payoff-changing mechanism."},
        ]
    }),
}
gateway = Gateway(StubChatProvider(script))

question = generate_question(selection, alex, amy, gateway)
print(f"inspiring question ({question.word_count} words, style={question.style.value}):")
print(f"  {question.text}")
for warning in question.warnings:
    print(f"  ! {warning}")

blocks = retrieve_evidence(
    selection, question, index, material, gateway, chunks=chunks, embedder=embedder
)
print("\nevidence blocks (every excerpt verbatim in the reading):")
for block in blocks:
    print(f"  [{block.color}] {block.key_concept} (paragraphs {list(block.paragraph_indices)})")
    print(f"      {block.excerpt[:74]}...")
