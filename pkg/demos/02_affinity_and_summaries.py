"""Affinity ordering and bullet summaries against a scripted stub provider.

The stub script plays the provider's role: each template gets a canned JSON
response, and the gateway validates it exactly as it would validate live
output (scores in range, affinity types 1-2 words with a 3-word tolerance,
1-3 bullets of at most 30 words).
"""

import json

from marginalia import (
    Gateway,
    StubChatProvider,
    Visibility,
    analyze_affinity,
    order_posts,
    summarize_post,
)
from marginalia.model import Post


def post(pid, author, content, anchor, t):
    return Post(
        id=pid, author=author, material_id="demo", anchor_paragraph=anchor,
        content=content, visibility=Visibility.PUBLIC, created_at=t,
    )


primary = post("p1", "alex", "Economic nationalism will sink any climate deal "
               "that ignores domestic politics.", 1, 1)
candidates = [
    post("p2", "amy", "The prisoner's dilemma framing explains why pledges stall.", 2, 2),
    post("p3", "ben", "Voluntary pledges look like progress reports, not commitments.", 0, 3),
    post("p4", "cat", "I mostly skimmed this week, nothing to add.", 0, 4),
]

script = {
    "affinity": json.dumps({
        "entries": [
            {"post_id": "p2", "affinity_type": "Economic Theory Application",
             "relevance_score": 0.9, "theme": "incentive design"},
            {"post_id": "p3", "affinity_type": "Policy Critique", "relevance_score": 0.55},
            {"post_id": "p4", "affinity_type": "none", "relevance_score": 0.05},
        ]
    }),
    "summarization": json.dumps({
        "bullets": [
            "Pledges stall because every country waits for others to move first.",
            "Strategic waiting, not bad faith, is the core failure mode.",
        ]
    }),
}
gateway = Gateway(StubChatProvider(script))

entries = analyze_affinity(primary, candidates, gateway)
ordering = order_posts(primary, entries, {c.id: c for c in candidates})
print(f"ordering around {ordering.primary_post_id} (pinned first):")
for entry in ordering.ordered:
    flags = f"  ! {entry.warnings[0]}" if entry.warnings else ""
    print(f"  {entry.relevance_score:.2f} [{entry.band.value:6}] "
          f"{entry.post_id}: {entry.affinity_type}{flags}")

summary = summarize_post(candidates[0], include_replies=False, gateway=gateway)
print(f"\nsummary of {summary.target_post_id}:")
for bullet in summary.bullets:
    print(f"  - {bullet}")
