"""The whole service in one sitting: private reading, the Show Public gate,
every pipeline, and the personalized learning report.

Run it, then read the printed report: hot spots need two public posts on a
paragraph, the reflection partitions every paragraph into engaged or
underexplored, and peer shares always sum to 100.
"""

import json

from marginalia import Gateway, StubChatProvider
from marginalia.errors import GatingError
from marginalia.service import MemoryStore, ServiceCore
from marginalia.service.http import report_json

READING = """\
International climate policy asks nations to give up short-term advantages for a shared long-term good. Most agreements begin with voluntary pledges, and most pledges fall short of what models say is required.

Economic nationalism complicates every round of negotiation. Governments that protect domestic industries with tariffs and subsidies treat emission limits as a competitive handicap, and they resist commitments that rivals might evade.

Game theorists describe the standoff as a prisoner's dilemma. Each country gains the most by letting others cut emissions first, yet when every government reasons this way, collective restraint collapses and all parties end up worse off.
"""

provider = StubChatProvider({})
core = ServiceCore(store=MemoryStore(), gateway=Gateway(provider))
material = core.ingest_material("Climate Cooperation", READING)
alex = core.provision_user("alex")
core.provision_user("amy", "tok-amy")

amy_post = core.seed_posts(material.id, [{
    "author": "amy", "anchor_paragraph": 2, "visibility": "public",
    "content": "The prisoner's dilemma framing explains why pledges stall.",
}])[0]

print("Alex reads privately; Amy's public post is hidden from him:")
print(f"  visible to alex: {[p.id for p in core.list_visible_posts(alex, material.id)]}")

first = core.create_post(alex, material.id, 1, "Economic nationalism will sink any deal.")
try:
    core.show_public(alex, material.id)
except GatingError as exc:
    print(f"  gate holds: {exc.message}")

core.create_post(alex, material.id, 2, "Payoff design matters more than pledges.")
state = core.show_public(alex, material.id)
print(f"  after two annotations the gate opens: mode={state['mode']}")
print(f"  visible now: {[p.id for p in core.list_visible_posts(alex, material.id)]}")

provider.script.update({
    "discussion_overview": json.dumps({"hot_spots": [
        {"paragraph_index": 2, "keyword": "game theory"}]}),
    "discussion_analysis": json.dumps({
        "keywords": ["dilemma"],
        "summary": "You discussed strategic waiting and payoff design",
        "suggestion": "You could propose a mechanism that rewards moving first",
    }),
})

reply = core.create_post(alex, material.id, None, "Exactly my worry about payoffs.",
                         parent=amy_post.id)
print(f"\nAlex replied to Amy at paragraph {reply.anchor_paragraph}")

report = core.generate_report(alex, material.id)
print("\nlearning report:")
print(json.dumps(report_json(report), indent=2, sort_keys=True))
