"""Stub-backed server for the frontend integration tests.

Seeds the walkthrough scenario (Amy and Ben public, Alex public after two
private annotations, replies giving a 3:1 peer split) and serves the API on
the given port with fixed tokens tok-alex / tok-amy / tok-ben.
"""

import json
import sys
from pathlib import Path

import uvicorn

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "tests"))

from conftest import (  # noqa: E402
    ALEX_CONTENT,
    ALEX_CONTENT_2,
    AMY_CONTENT,
    BEN_CONTENT,
    CLIMATE_TEXT,
    CLIMATE_TITLE,
    scenario_script,
)

from marginalia.gateway import Gateway  # noqa: E402
from marginalia.providers import StubChatProvider  # noqa: E402
from marginalia.service import MemoryStore, ServiceCore, create_app  # noqa: E402


def build_core() -> ServiceCore:
    provider = StubChatProvider({})
    core = ServiceCore(store=MemoryStore(), gateway=Gateway(provider))
    material = core.ingest_material(CLIMATE_TITLE, CLIMATE_TEXT)
    for user in ("alex", "amy", "ben"):
        core.provision_user(user, f"tok-{user}")
    amy_post, ben_post = core.seed_posts(
        material.id,
        [
            {"author": "amy", "anchor_paragraph": 2, "content": AMY_CONTENT,
             "visibility": "public"},
            {"author": "ben", "anchor_paragraph": 0, "content": BEN_CONTENT,
             "visibility": "public"},
        ],
    )
    core.create_post("tok-alex", material.id, 1, ALEX_CONTENT)
    alex2 = core.create_post("tok-alex", material.id, 4, ALEX_CONTENT_2)
    core.show_public("tok-alex", material.id)
    provider.script.update(
        scenario_script(amy_id=amy_post.id, ben_id=ben_post.id, alex2_id=alex2.id)
    )
    # peer counts alex->amy 3, alex->ben 1 (shares 75/25)
    for i in range(3):
        core.create_post("tok-alex", material.id, None, f"reply to amy {i}",
                         parent=amy_post.id)
    core.create_post("tok-alex", material.id, None, "reply to ben", parent=ben_post.id)
    # the replies above make paragraphs 2 and 0 hot (counts 4 and 2) and
    # pull paragraph 0 into alex's engaged set
    provider.script["discussion_overview"] = json.dumps(
        {
            "hot_spots": [
                {"paragraph_index": 2, "keyword": "game theory"},
                {"paragraph_index": 0, "keyword": "pledges"},
            ]
        }
    )
    analysis = dict(provider.script["discussion_analysis"])
    analysis["Paragraph index: 0"] = json.dumps(
        {
            "keywords": ["pledges"],
            "summary": "You discussed enforcement gaps behind voluntary pledges",
            "suggestion": "You could ask which sanctions would actually bind",
        }
    )
    provider.script["discussion_analysis"] = analysis
    print(json.dumps({"material_id": material.id, "amy_post": amy_post.id}), flush=True)
    return core


if __name__ == "__main__":
    port = int(sys.argv[1]) if len(sys.argv) > 1 else 8765
    app = create_app(build_core())
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
