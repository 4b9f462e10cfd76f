"""Drag-hover pair analysis: style percentages that sum to exactly 100 and
short verbatim quote anchors in both posts.

Try corrupting a quote below (e.g. change "prisoner's dilemma" to a phrase
that is not in Amy's post) and the gateway will reject every attempt and
raise, naming the quote_verbatim rule: there is no fuzzy matching.
"""

import json

from marginalia import StubChatProvider, Gateway, Visibility, analyze_pair
from marginalia.model import Post

alex = Post(
    id="pA", author="alex", material_id="demo", anchor_paragraph=1,
    content="Economic nationalism will sink any climate deal that ignores "
            "domestic politics. Tariffs feel safe to voters.",
    visibility=Visibility.PUBLIC, created_at=1,
)
amy = Post(
    id="pB", author="amy", material_id="demo", anchor_paragraph=2,
    content="The prisoner's dilemma framing explains why pledges stall. "
            "Everyone waits for someone else to move first.",
    visibility=Visibility.PUBLIC, created_at=2,
)

script = {
    "keyword_highlighting": json.dumps({
        "similarity_pct": 20.0,
        "contrastive_pct": 30.0,
        "complementary_pct": 50.0,
        "highlights": [
            {"style": "similarity", "quote_a": "climate deal", "quote_b": "pledges stall",
             "aspect": "both doubt current pledges"},
            {"style": "contrastive", "quote_a": "Tariffs feel safe", "quote_b": "move first",
             "aspect": "protection versus first-mover risk"},
            {"style": "complementary", "quote_a": "Economic nationalism",
             "quote_b": "prisoner's dilemma", "aspect": "politics completes the game theory"},
        ],
    })
}

analysis = analyze_pair(alex, amy, Gateway(StubChatProvider(script)))
dist = analysis.distribution
print(f"distribution: similarity {dist.similarity_pct}% / "
      f"contrastive {dist.contrastive_pct}% / complementary {dist.complementary_pct}%")
print("highlights (all quotes verbatim in their posts):")
for h in analysis.highlights:
    print(f"  [{h.color:6}] {h.style.value:13} {h.quote_a!r} <-> {h.quote_b!r}  ({h.aspect})")
