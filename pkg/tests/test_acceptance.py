"""Acceptance suite: one test per release criterion, each printing a
pass/fail line. Runs entirely offline against the stub provider."""

from __future__ import annotations

import json
import random
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager

import numpy as np
import pytest

from marginalia.blend import Aspect, BlendSelection, InspiringQuestion, retrieve_evidence
from marginalia.errors import GatingError, GatewayValidationError
from marginalia.gateway import Gateway
from marginalia.highlight import analyze_pair
from marginalia.ingestion import chunk_material, parse_material
from marginalia.model import (
    DiscussionStyle,
    EngagementEvent,
    EventKind,
    RelevanceBand,
    Visibility,
    classify_relevance,
)
from marginalia.providers import StubChatProvider, StubEmbedder
from marginalia.retrieval import build_index, top_k
from marginalia.service import MemoryStore, ServiceCore
from marginalia.service.http import (
    artifact_json,
    ordering_json,
    pair_json,
    question_json,
    report_json,
    summary_json,
)
from marginalia.summarize import summarize_post
from marginalia.text import verbatim_contains, word_count

from .conftest import (
    ALEX_CONTENT,
    ALEX_CONTENT_2,
    AMY_CONTENT,
    BEN_CONTENT,
    CLIMATE_TEXT,
    CLIMATE_TITLE,
    INSPIRING_QUESTION_TEXT,
    analysis_response,
    evidence_response,
    j,
    make_gateway,
    make_post,
    scenario_script,
    words,
)


@contextmanager
def criterion(name: str, budget_s: float | None = None):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        if budget_s is not None and elapsed >= budget_s:
            raise AssertionError(f"{name}: took {elapsed:.2f}s, budget {budget_s}s")
    except BaseException:
        print(f"[ACCEPTANCE] {name}: FAIL", file=sys.__stdout__)
        raise
    print(
        f"[ACCEPTANCE] {name}: PASS ({time.perf_counter() - start:.2f}s)",
        file=sys.__stdout__,
    )


def test_relevance_banding():
    """10,000 sampled scores plus the boundary values partition exactly."""
    with criterion("relevance-banding", budget_s=1.0):
        rng = random.Random(20240901)
        scores = [rng.random() for _ in range(10_000)] + [0.4, 0.7, 0.39999, 0.0, 1.0]
        for score in scores:
            band = classify_relevance(score)
            expected = (
                RelevanceBand.HIGH
                if score > 0.7
                else RelevanceBand.MEDIUM
                if score >= 0.4
                else RelevanceBand.LOW
            )
            assert band is expected, f"score {score!r}: {band} != {expected}"
        assert classify_relevance(0.7) is RelevanceBand.MEDIUM
        assert classify_relevance(0.4) is RelevanceBand.MEDIUM
        assert classify_relevance(0.39999) is RelevanceBand.LOW


def test_retrieval_oracle():
    """top_k over 200 stub-embedded chunks matches exhaustive scan exactly."""
    with criterion("retrieval-oracle", budget_s=1.0):
        rng = random.Random(7)
        embedder = StubEmbedder()
        vocabulary = [f"token{i}" for i in range(400)]

        def random_text():
            return " ".join(rng.choices(vocabulary, k=rng.randint(5, 30)))

        entries = tuple(
            (f"c{i:03d}", embedder.embed(random_text())) for i in range(200)
        )
        from marginalia.retrieval import VectorIndex

        index = VectorIndex(material_id="m", dimension=64, entries=entries)
        for _ in range(50):
            query = embedder.embed(random_text())
            oracle_scores = []
            for chunk_id, vec in entries:
                score = float(
                    np.clip(
                        np.dot(query, vec)
                        / (np.linalg.norm(query) * np.linalg.norm(vec)),
                        -1.0,
                        1.0,
                    )
                )
                oracle_scores.append((chunk_id, score))
            oracle_scores.sort(key=lambda pair: (-pair[1], pair[0]))
            for k in (1, 3, 5):
                got = [(r.chunk_id, r.score) for r in top_k(index, query, k)]
                assert got == oracle_scores[:k]


@pytest.fixture(scope="module")
def grounding_setup():
    material = parse_material(CLIMATE_TEXT, CLIMATE_TITLE, material_id="m1")
    chunks = chunk_material(material, 60)
    embedder = StubEmbedder()
    index = build_index(material.id, chunks, embedder)
    return material, chunks, index, embedder


def test_evidence_grounding(grounding_setup):
    """500 scripted blend runs, 20% fabricated excerpts: every accepted
    artifact is fully verbatim; every fabrication forces retry or failure."""
    with criterion("evidence-grounding", budget_s=10.0):
        material, chunks, index, embedder = grounding_setup
        rng = random.Random(424242)
        selection = BlendSelection(
            post_a_id="pA",
            aspect_a=Aspect("Economic Nationalism", "protection versus climate",
                            "Economic nationalism"),
            post_b_id="pB",
            aspect_b=Aspect("Game Theory", "strategic waiting", "prisoner's dilemma"),
            style=DiscussionStyle.COMPLEMENTARY,
        )
        question = InspiringQuestion(
            text=INSPIRING_QUESTION_TEXT,
            style=DiscussionStyle.COMPLEMENTARY,
            word_count=word_count(INSPIRING_QUESTION_TEXT),
        )
        genuine_pool = [c.text for c in chunks]
        fabricated_runs = 0
        retried_runs = 0
        for run in range(500):
            excerpts = []
            fabricated = False
            for slot in range(3):
                if rng.random() < 0.2:
                    excerpts.append(f"fabricated claim {run}-{slot} not in the corpus")
                    fabricated = True
                else:
                    excerpts.append(rng.choice(genuine_pool))
            response = evidence_response(excerpts=excerpts)
            if fabricated:
                fabricated_runs += 1
                recovery = rng.random() < 0.5
                script = {
                    "evidence": [response, evidence_response(
                        excerpts=rng.sample(genuine_pool, 3))]
                    if recovery
                    else {"Select the three excerpts": response},
                }
            else:
                script = {"evidence": response}
            provider = StubChatProvider(script)
            blocks = retrieve_evidence(
                selection, question, index, material, Gateway(provider),
                chunks=chunks, embedder=embedder,
            )
            assert len(blocks) == 3
            for block in blocks:
                assert verbatim_contains(material.raw_text, block.excerpt)
            if fabricated:
                assert provider.calls >= 2  # the bad output forced a regeneration
                retried_runs += 1
        assert fabricated_runs > 50  # the fuzz actually exercised fabrication
        assert retried_runs == fabricated_runs


def test_highlight_constraints():
    """500 scripted pair analyses: sums exactly 100, 1-3-word verbatim
    quotes, zero-percentage styles carry no highlights."""
    with criterion("highlight-constraints", budget_s=10.0):
        rng = random.Random(9090)
        post_a = make_post("pA", ALEX_CONTENT, author="alex", anchor=1, created_at=1)
        post_b = make_post("pB", AMY_CONTENT, author="amy", anchor=2, created_at=2)

        def random_quote(content: str) -> str:
            tokens = content.split()
            n = rng.randint(1, 3)
            start = rng.randrange(0, len(tokens) - n + 1)
            return " ".join(tokens[start : start + n])

        def random_distribution():
            # occasionally fractional, always summing to 100
            a = rng.randint(0, 100)
            b = rng.randint(0, 100 - a)
            c = 100 - a - b
            if rng.random() < 0.3:
                delta = rng.uniform(0, min(0.9, a + 0.0, c + 0.9)) if a > 0 else 0.0
                return (a - delta, b + delta / 2, c + delta / 2)
            return (a, b, c)

        def response_for(dist):
            rounded_styles = []
            from marginalia.highlight import round_to_100

            rounded = round_to_100(dist)
            highlights = []
            for style, pct in zip(("similarity", "contrastive", "complementary"), rounded):
                if pct > 0:
                    for _ in range(rng.randint(1, 2)):
                        highlights.append(
                            {
                                "style": style,
                                "quote_a": random_quote(post_a.content),
                                "quote_b": random_quote(post_b.content),
                                "aspect": words(rng.randint(1, 10), prefix="aspect"),
                            }
                        )
            return j(
                similarity_pct=dist[0], contrastive_pct=dist[1],
                complementary_pct=dist[2], highlights=highlights,
            )

        enforced_rejections = 0
        for run in range(500):
            dist = random_distribution()
            good = response_for(dist)
            if run % 5 == 0:
                # a sum-violating first attempt must be retried away
                bad = j(similarity_pct=50, contrastive_pct=30, complementary_pct=30,
                        highlights=json.loads(good)["highlights"])
                provider = StubChatProvider({"keyword_highlighting": [bad, good]})
                enforced_rejections += 1
            else:
                provider = StubChatProvider({"keyword_highlighting": good})
            analysis = analyze_pair(post_a, post_b, Gateway(provider))
            dist_out = analysis.distribution
            total = (
                dist_out.similarity_pct
                + dist_out.contrastive_pct
                + dist_out.complementary_pct
            )
            assert total == 100
            by_style = {s: 0 for s in DiscussionStyle}
            for h in analysis.highlights:
                count = word_count(h.quote_a)
                assert 1 <= count <= 3
                count = word_count(h.quote_b)
                assert 1 <= count <= 3
                assert verbatim_contains(post_a.content, h.quote_a)
                assert verbatim_contains(post_b.content, h.quote_b)
                by_style[h.style] += 1
            for style in DiscussionStyle:
                if dist_out.pct(style) == 0:
                    assert by_style[style] == 0
                else:
                    assert by_style[style] >= 1
            if run % 5 == 0:
                assert provider.calls == 2
        assert enforced_rejections == 100


def test_word_limit_validators():
    """Boundary outputs accept/reject exactly; the 3-word keyword is a
    warning, not an error."""
    with criterion("word-limit-validators"):
        post = make_post("p0", ALEX_CONTENT, anchor=1)

        # bullets: 30 words accepted, 31 rejected; 3 bullets accepted, 4 rejected
        ok = summarize_post(post, False, make_gateway({"summarization": j(bullets=[words(30)])}))
        assert word_count(ok.bullets[0]) == 30
        with pytest.raises(GatewayValidationError) as excinfo:
            summarize_post(post, False, make_gateway({"summarization": j(bullets=[words(31)])}))
        assert excinfo.value.rule_id == "bullet_words"
        ok = summarize_post(
            post, False, make_gateway({"summarization": j(bullets=["a", "b", "c"])})
        )
        assert len(ok.bullets) == 3
        with pytest.raises(GatewayValidationError) as excinfo:
            summarize_post(
                post, False, make_gateway({"summarization": j(bullets=["a", "b", "c", "d"])})
            )
        assert excinfo.value.rule_id == "bullets_count"

        # aspect descriptions: 20 accepted, 21 rejected; keywords: 2 clean,
        # 3 warned, 4 rejected
        from marginalia.blend import extract_aspects

        material = parse_material(CLIMATE_TEXT, CLIMATE_TITLE, material_id="m1")
        post_b = make_post("pB", AMY_CONTENT, author="amy", anchor=2, created_at=2)

        def aspects_with(keyword="Two Words", description=None):
            description = description if description is not None else words(20)
            aspects_a = [
                {"keyword": keyword, "description": description,
                 "source_span": "Economic nationalism"},
                {"keyword": "Voter Politics", "description": "short",
                 "source_span": "Tariffs feel safe"},
                {"keyword": "Third Keyword", "description": "short",
                 "source_span": "slow decarbonization"},
            ]
            aspects_b = [
                {"keyword": "Game Theory", "description": "short",
                 "source_span": "prisoner's dilemma"},
                {"keyword": "First Mover", "description": "short",
                 "source_span": "move first"},
                {"keyword": "Stalled Pledges", "description": "short",
                 "source_span": "pledges stall"},
            ]
            return j(aspects_a=aspects_a, aspects_b=aspects_b)

        set_a, _ = extract_aspects(
            post, post_b, material,
            make_gateway({"aspect_extraction": aspects_with(description=words(20))}),
        )
        assert word_count(set_a.aspects[0].description) == 20
        assert set_a.aspects[0].warnings == ()  # 2-word keyword is clean

        with pytest.raises(GatewayValidationError) as excinfo:
            extract_aspects(
                post, post_b, material,
                make_gateway({"aspect_extraction": aspects_with(description=words(21))}),
            )
        assert excinfo.value.rule_id == "aspect_description_words"

        set_a, _ = extract_aspects(
            post, post_b, material,
            make_gateway({"aspect_extraction": aspects_with(keyword="Three Word Keyword")}),
        )
        assert set_a.aspects[0].warnings and "3 words" in set_a.aspects[0].warnings[0]

        with pytest.raises(GatewayValidationError) as excinfo:
            extract_aspects(
                post, post_b, material,
                make_gateway({"aspect_extraction": aspects_with(keyword="A Four Word Keyword")}),
            )
        assert excinfo.value.rule_id == "aspect_keyword_words"


def test_visibility_and_gating_fuzz():
    """6 simulated users, 200 random actions: private posts never leak,
    gating enforces the two-post minimum, modes are monotonic."""
    with criterion("visibility-and-gating"):
        rng = random.Random(31337)
        core = ServiceCore(store=MemoryStore(), gateway=make_gateway({}))
        material = core.ingest_material(CLIMATE_TITLE, CLIMATE_TEXT)
        users = [f"user{i}" for i in range(6)]
        tokens = {u: core.provision_user(u, f"tok-{u}") for u in users}
        modes: dict[str, list[str]] = {u: ["private"] for u in users}
        violations = []

        def private_counts(user):
            return core.get_state(tokens[user], material.id)["private_post_count"]

        def check_invariants():
            for viewer in users:
                seen = core.list_visible_posts(tokens[viewer], material.id)
                for post in seen:
                    if post.author != viewer and post.visibility is not Visibility.PUBLIC:
                        violations.append((viewer, post.id))
            for user in users:
                mode = core.get_state(tokens[user], material.id)["mode"]
                if modes[user][-1] != mode:
                    modes[user].append(mode)

        for step in range(200):
            user = rng.choice(users)
            action = rng.choice(["post", "reply", "show_public", "merge", "list"])
            if action == "post":
                core.create_post(
                    tokens[user], material.id, rng.randrange(6), f"post {step} by {user}"
                )
            elif action == "reply":
                visible = core.list_visible_posts(tokens[user], material.id)
                if visible:
                    parent = rng.choice(visible)
                    core.create_post(
                        tokens[user], material.id, None, f"reply {step}", parent=parent.id
                    )
            elif action == "show_public":
                count = private_counts(user)
                state = core.get_state(tokens[user], material.id)
                if state["mode"] == "private" and count < 2:
                    with pytest.raises(GatingError):
                        core.show_public(tokens[user], material.id)
                else:
                    core.show_public(tokens[user], material.id)
            elif action == "merge":
                own = [
                    p
                    for p in core.list_visible_posts(tokens[user], material.id)
                    if p.author == user and p.parent is None
                ]
                if len(own) >= 2:
                    pair = rng.sample(own, 2)
                    core.merge_posts(tokens[user], [p.id for p in pair])
            else:
                core.list_visible_posts(tokens[user], material.id)
            check_invariants()

        assert violations == []
        for user in users:
            assert modes[user] in (["private"], ["private", "public"])


def test_report_consistency():
    """Constructed fixture: hot spots [p2, p0] with exact counts, peer
    shares {75, 25}, engaged/underexplored partitioning all paragraphs."""
    with criterion("report-consistency"):
        # eight paragraphs so paragraph 7 exists
        text = "\n\n".join(
            f"Paragraph number {i} talks about topic {i} in some depth." for i in range(8)
        )
        material = parse_material(text, "Eight paragraphs", material_id="m8")
        from marginalia.report import (
            assemble_report,
            compute_hot_spots,
            compute_peer_distribution,
        )

        posts = []
        for paragraph, count in ((2, 5), (0, 3), (7, 1)):
            for i in range(count):
                posts.append(
                    make_post(
                        f"m8-p{paragraph}-{i}", f"public post {i} at {paragraph}",
                        author=f"user{i}", material_id="m8", anchor=paragraph,
                        created_at=len(posts) + 1,
                    )
                )
        gateway = make_gateway(
            {
                "discussion_overview": j(
                    hot_spots=[
                        {"paragraph_index": 2, "keyword": "hot two"},
                        {"paragraph_index": 0, "keyword": "hot zero"},
                    ]
                ),
                "discussion_analysis": {
                    "exchange with Amy": analysis_response(keywords=("amy",)),
                    "exchange with Ben": analysis_response(keywords=("ben",)),
                    "Paragraph index:": analysis_response(keywords=("own",)),
                },
            }
        )
        spots = compute_hot_spots(posts, material, gateway, min_posts=2)
        assert [(s.paragraph_index, s.class_post_count) for s in spots] == [(2, 5), (0, 3)]

        def peer_event(peer, kind, timestamp):
            return EngagementEvent(
                user="alex", kind=kind, material_id="m8", timestamp=timestamp,
                paragraph=2, peer=peer,
            )

        interactions = [
            peer_event("Amy", EventKind.REPLY, 1),
            peer_event("Amy", EventKind.PAIR_ANALYSIS, 2),
            peer_event("Amy", EventKind.BLEND, 3),
            peer_event("Ben", EventKind.REPLY, 4),
        ]
        slices = compute_peer_distribution("alex", interactions, gateway)
        assert [(s.peer, s.share_pct) for s in slices] == [("Amy", 75.0), ("Ben", 25.0)]
        assert sum(s.share_pct for s in slices) == 100.0

        user_posts = [
            make_post("m8-own-2", "alex on p2", material_id="m8", anchor=2, created_at=50)
        ]
        user_events = [
            EngagementEvent(user="alex", kind=EventKind.POST, material_id="m8",
                            timestamp=50, paragraph=2)
        ] + interactions
        report = assemble_report(
            "alex", material, gateway,
            all_public_posts=posts, user_posts=user_posts, user_events=user_events,
            question_history=[], generated_at=99,
        )
        engaged = {r.paragraph_index for r in report.reflection.engaged}
        underexplored = set(report.reflection.underexplored)
        assert engaged | underexplored == set(range(8))
        assert engaged & underexplored == set()


def scenario_outputs() -> dict:
    """The end-to-end walkthrough, returning every pipeline output as JSON."""
    provider = StubChatProvider({})
    core = ServiceCore(store=MemoryStore(), gateway=Gateway(provider))
    material = core.ingest_material(CLIMATE_TITLE, CLIMATE_TEXT)
    tokens = {u: core.provision_user(u, f"tok-{u}") for u in ("alex", "amy", "ben")}
    seeded = core.seed_posts(
        material.id,
        [
            {"author": "amy", "anchor_paragraph": 2, "content": AMY_CONTENT,
             "visibility": "public"},
            {"author": "ben", "anchor_paragraph": 0, "content": BEN_CONTENT,
             "visibility": "public"},
        ],
    )
    amy_post, ben_post = seeded

    # Alex reads privately and annotates twice, then goes public
    alex1 = core.create_post(tokens["alex"], material.id, 1, ALEX_CONTENT)
    alex2 = core.create_post(tokens["alex"], material.id, 4, ALEX_CONTENT_2)
    core.show_public(tokens["alex"], material.id)
    provider.script.update(
        scenario_script(amy_id=amy_post.id, ben_id=ben_post.id, alex2_id=alex2.id)
    )

    ordering = core.pipeline_order(tokens["alex"], material.id, alex1.id)
    summary = core.pipeline_summary(tokens["alex"], amy_post.id)
    pair = core.pipeline_pair(tokens["alex"], alex1.id, amy_post.id)
    set_a, set_b = core.pipeline_aspects(tokens["alex"], alex1.id, amy_post.id)
    aspect_a = {"keyword": set_a.aspects[0].keyword,
                "description": set_a.aspects[0].description,
                "source_span": set_a.aspects[0].source_span}
    aspect_b = {"keyword": set_b.aspects[0].keyword,
                "description": set_b.aspects[0].description,
                "source_span": set_b.aspects[0].source_span}
    question = core.pipeline_question(
        tokens["alex"], alex1.id, amy_post.id, "complementary", aspect_a, aspect_b
    )
    artifact = core.pipeline_evidence(
        tokens["alex"], alex1.id, amy_post.id, "complementary",
        aspect_a, aspect_b, question.text,
    )
    report = core.generate_report(tokens["alex"], material.id)
    return {
        "ordering": ordering_json(ordering),
        "summary": summary_json(summary),
        "pair": pair_json(pair),
        "question": question_json(question),
        "artifact": artifact_json(artifact),
        "report": report_json(report),
        "material_raw": material.raw_text,
        "amy_content": amy_post.content,
        "alex_content": alex1.content,
    }


def test_scenario_replay():
    """The example walkthrough: affinity type, verbatim pair highlights, the
    canonical 16-word question accepted with a target warning, three
    verbatim evidence blocks, and the question in the report history —
    byte-identical across two fresh runs."""
    with criterion("scenario-replay", budget_s=5.0):
        outputs = scenario_outputs()

        entries = outputs["ordering"]["entries"]
        assert entries[0]["affinity_type"] == "Economic Theory Application"
        assert entries[0]["band"] == "high" and entries[0]["color"] == "green"
        assert entries[0]["warnings"]  # 3-word affinity type flagged

        assert 1 <= len(outputs["summary"]["bullets"]) <= 3

        for highlight in outputs["pair"]["highlights"]:
            assert verbatim_contains(outputs["alex_content"], highlight["quote_a"])
            assert verbatim_contains(outputs["amy_content"], highlight["quote_b"])
        assert any(
            h["quote_b"] == "prisoner's dilemma" for h in outputs["pair"]["highlights"]
        )

        question = outputs["question"]
        assert question["text"] == INSPIRING_QUESTION_TEXT
        assert question["word_count"] == 16
        assert any("question_words_target" in w for w in question["warnings"])

        evidence = outputs["artifact"]["evidence"]
        assert len(evidence) == 3
        for block in evidence:
            assert verbatim_contains(outputs["material_raw"], block["excerpt"])

        history = [q["text"] for q in outputs["report"]["question_history"]]
        assert history == [INSPIRING_QUESTION_TEXT]

        # byte-determinism across fresh runs
        second = scenario_outputs()
        first_bytes = json.dumps(outputs, sort_keys=True).encode()
        second_bytes = json.dumps(second, sort_keys=True).encode()
        assert first_bytes == second_bytes


def test_concurrency():
    """100 concurrent replies to one parent across 8 workers all persist
    exactly once."""
    with criterion("concurrency", budget_s=5.0):
        core = ServiceCore(store=MemoryStore(), gateway=make_gateway({}))
        material = core.ingest_material(CLIMATE_TITLE, CLIMATE_TEXT)
        parent = core.seed_posts(
            material.id,
            [{"author": "amy", "anchor_paragraph": 0, "content": AMY_CONTENT,
              "visibility": "public"}],
        )[0]
        tokens = []
        for i in range(8):
            token = core.provision_user(f"worker{i}", f"tok-worker{i}")
            core.create_post(token, material.id, 0, "first private note")
            core.create_post(token, material.id, 1, "second private note")
            core.show_public(token, material.id)
            tokens.append(token)

        def reply(i: int):
            return core.create_post(
                tokens[i % 8], material.id, None, f"reply {i}", parent=parent.id
            )

        with ThreadPoolExecutor(max_workers=8) as pool:
            posts = list(pool.map(reply, range(100)))

        ids = {p.id for p in posts}
        assert len(ids) == 100
        listed = core.list_visible_posts(tokens[0], material.id)
        children = [p for p in listed if p.parent == parent.id]
        assert len(children) == 100
        assert {p.id for p in children} == ids
        assert len({p.created_at for p in children}) == 100
