"""The multi-user service core: sessions, material lifecycle, post
lifecycle with private/public gating, and orchestration of every pipeline.

All persisted mutations go through version-checked compare-and-update with
bounded retry; provider calls never run while holding a store write. Posts
and events draw their ids and logical timestamps from one per-material
allocator record, so every ordering decision is deterministic.
"""

from __future__ import annotations

import secrets
import threading
import time
from typing import Optional, Sequence

from .. import affinity as affinity_mod
from .. import blend as blend_mod
from .. import highlight as highlight_mod
from .. import report as report_mod
from .. import summarize as summarize_mod
from ..errors import (
    AuthorizationError,
    DomainError,
    GatingError,
    NotFoundError,
    SessionError,
    StateError,
    ValidationError,
)
from ..gateway import Gateway
from ..ingestion import Chunk, chunk_material, parse_material
from ..model import (
    EngagementEvent,
    EventKind,
    Material,
    Paragraph,
    Post,
    Visibility,
)
from ..providers import EmbeddingProvider, StubEmbedder
from ..retrieval import VectorIndex, build_index, index_from_dict, index_to_dict
from .config import ServiceConfig
from .store import DocumentStore, MemoryStore, update_record

GLOBAL_SEQ_KEY = "seq:@global"


class ServiceCore:
    def __init__(
        self,
        store: DocumentStore | None = None,
        gateway: Gateway | None = None,
        embedder: EmbeddingProvider | None = None,
        config: ServiceConfig | None = None,
    ):
        self.store = store if store is not None else MemoryStore()
        self.config = config or ServiceConfig()
        self.gateway = gateway if gateway is not None else Gateway(provider=_NoProvider())
        self.embedder = embedder or StubEmbedder(self.config.embed_dim)
        self._cache_lock = threading.Lock()
        self._affinity_cache: dict = {}
        self._pair_cache: dict = {}
        self._summary_cache: dict = {}

    # ----- users and sessions -------------------------------------------

    def provision_user(self, user_id: str, token: Optional[str] = None) -> str:
        """Create (or re-key) a user and return their session token."""
        if not user_id or "/" in user_id or ":" in user_id:
            raise ValidationError(f"invalid user id {user_id!r}")
        token = token or secrets.token_hex(16)
        self.store.put(
            f"user:{user_id}",
            {"user": user_id, "token": token},
            self._version(f"user:{user_id}"),
        )
        self.store.put(
            f"token:{token}",
            {"user": user_id, "expires_at": time.time() + self.config.session_ttl_s},
            self._version(f"token:{token}"),
        )
        return token

    def _version(self, key: str) -> Optional[int]:
        record = self.store.get(key)
        return None if record is None else record.version

    def authenticate(self, token: Optional[str]) -> str:
        if not token:
            raise SessionError("missing session token")
        record = self.store.get(f"token:{token}")
        if record is None:
            raise SessionError("unknown session token")
        if record.payload["expires_at"] < time.time():
            raise SessionError("session expired")
        return record.payload["user"]

    # ----- materials ------------------------------------------------------

    def ingest_material(self, title: str, text: str) -> Material:
        """Parse, chunk, embed, and persist a new material."""
        seq = update_record(
            self.store,
            GLOBAL_SEQ_KEY,
            initial=lambda: {"next_material": 2},
            mutate=lambda p: {**p, "next_material": p["next_material"] + 1},
        )
        material_id = f"m{seq.payload['next_material'] - 1}"
        material = parse_material(text, title, material_id=material_id)
        chunks = chunk_material(material, self.config.max_chunk_words)
        index = build_index(material_id, chunks, self.embedder)
        self.store.put(
            f"material:{material_id}",
            {
                "id": material_id,
                "title": title,
                "raw_text": material.raw_text,
                "paragraphs": [{"index": p.index, "text": p.text} for p in material.paragraphs],
            },
            None,
        )
        self.store.put(
            f"chunks:{material_id}",
            {
                "chunks": [
                    {
                        "chunk_id": c.chunk_id,
                        "paragraph_indices": list(c.paragraph_indices),
                        "text": c.text,
                    }
                    for c in chunks
                ]
            },
            None,
        )
        self.store.put(f"index:{material_id}", index_to_dict(index), None)
        self.store.put(
            f"seq:{material_id}",
            {"clock": 0, "next_post": 1, "next_event": 1, "next_question": 1, "next_blend": 1},
            None,
        )
        return material

    def get_material(self, material_id: str) -> Material:
        record = self.store.get(f"material:{material_id}")
        if record is None:
            raise NotFoundError(f"unknown material {material_id!r}")
        return Material(
            id=record.payload["id"],
            title=record.payload["title"],
            paragraphs=tuple(
                Paragraph(index=p["index"], text=p["text"])
                for p in record.payload["paragraphs"]
            ),
            raw_text=record.payload["raw_text"],
        )

    def view_material(self, token: str, material_id: str, paragraph: Optional[int] = None) -> Material:
        """Material fetch for reading; records a view engagement event."""
        user = self.authenticate(token)
        material = self.get_material(material_id)
        if paragraph is not None and not 0 <= paragraph < len(material.paragraphs):
            raise ValidationError(f"paragraph {paragraph} out of range")
        self._append_event(user, EventKind.VIEW, material_id, paragraph=paragraph)
        return material

    def _chunks(self, material_id: str) -> list[Chunk]:
        record = self.store.get(f"chunks:{material_id}")
        if record is None:
            raise StateError(f"material {material_id!r} has no chunks")
        return [
            Chunk(
                chunk_id=c["chunk_id"],
                material_id=material_id,
                paragraph_indices=tuple(c["paragraph_indices"]),
                text=c["text"],
            )
            for c in record.payload["chunks"]
        ]

    def _index(self, material_id: str) -> VectorIndex:
        record = self.store.get(f"index:{material_id}")
        if record is None:
            raise StateError(f"material {material_id!r} has no vector index")
        return index_from_dict(record.payload)

    # ----- allocator ------------------------------------------------------

    def _allocate(self, material_id: str, **counters: bool) -> dict:
        """Atomically bump the material clock plus any requested counters.

        Returns the allocated values: ``timestamp`` plus one entry per
        requested counter name.
        """
        key = f"seq:{material_id}"
        if self.store.get(key) is None:
            raise NotFoundError(f"unknown material {material_id!r}")

        def mutate(payload: dict) -> dict:
            payload = dict(payload)
            payload["clock"] += 1
            for name in counters:
                payload[name] += 1
            return payload

        record = update_record(self.store, key, initial=dict, mutate=mutate)
        allocated = {"timestamp": record.payload["clock"]}
        for name in counters:
            allocated[name] = record.payload[name] - 1
        return allocated

    # ----- user/material state -------------------------------------------

    def get_state(self, token: str, material_id: str) -> dict:
        user = self.authenticate(token)
        self.get_material(material_id)
        return self._state_payload(user, material_id)

    def _state_payload(self, user: str, material_id: str) -> dict:
        record = self.store.get(f"state:{material_id}:{user}")
        if record is None:
            return {
                "user": user,
                "material_id": material_id,
                "mode": Visibility.PRIVATE.value,
                "private_post_count": 0,
                "version": 0,
            }
        return {**record.payload, "version": record.version}

    def _mode(self, user: str, material_id: str) -> Visibility:
        return Visibility(self._state_payload(user, material_id)["mode"])

    def show_public(self, token: str, material_id: str) -> dict:
        """One-way transition to public mode, gated on the private post
        count; calling again once public is a no-op success."""
        user = self.authenticate(token)
        self.get_material(material_id)
        state = self._state_payload(user, material_id)
        if state["mode"] == Visibility.PUBLIC.value:
            return state
        needed = self.config.min_private_posts
        have = state["private_post_count"]
        if have < needed:
            raise GatingError(
                f"Show Public requires {needed} private posts; "
                f"{needed - have} more needed",
                detail={"required": needed, "have": have, "missing": needed - have},
            )
        new_state = update_record(
            self.store,
            f"state:{material_id}:{user}",
            initial=lambda: {
                "user": user,
                "material_id": material_id,
                "mode": Visibility.PUBLIC.value,
                "private_post_count": have,
            },
            mutate=lambda p: {**p, "mode": Visibility.PUBLIC.value},
        )
        self._publish_private_posts(user, material_id)
        return {**new_state.payload, "version": new_state.version}

    def _publish_private_posts(self, user: str, material_id: str) -> None:
        """Flip the user's prior private top-level posts to public."""
        for key in self.store.keys(f"post:{material_id}-"):
            record = self.store.get(key)
            payload = record.payload
            if (
                payload["author"] == user
                and payload["visibility"] == Visibility.PRIVATE.value
                and payload["parent"] is None
            ):
                update_record(
                    self.store,
                    key,
                    initial=lambda payload=payload: payload,
                    mutate=lambda p: {**p, "visibility": Visibility.PUBLIC.value},
                )

    # ----- posts ----------------------------------------------------------

    def _post_payload(self, post_id: str) -> dict:
        record = self.store.get(f"post:{post_id}")
        if record is None:
            raise NotFoundError(f"unknown post {post_id!r}")
        return record.payload

    def _to_post(self, payload: dict) -> Post:
        return Post(
            id=payload["id"],
            author=payload["author"],
            material_id=payload["material_id"],
            anchor_paragraph=payload["anchor_paragraph"],
            content=payload["content"],
            visibility=Visibility(payload["visibility"]),
            created_at=payload["created_at"],
            parent=payload["parent"],
            merged_from=tuple(payload["merged_from"]),
            highlight_range=(
                tuple(payload["highlight_range"]) if payload.get("highlight_range") else None
            ),
        )

    def _material_post_payloads(self, material_id: str, include_archived: bool = False) -> list[dict]:
        payloads = []
        for key in self.store.keys(f"post:{material_id}-"):
            payload = self.store.get(key).payload
            if payload.get("archived") and not include_archived:
                continue
            payloads.append(payload)
        return payloads

    def _is_visible(self, payload: dict, user: str, mode: Visibility) -> bool:
        if payload["author"] == user:
            return True
        return (
            payload["visibility"] == Visibility.PUBLIC.value and mode == Visibility.PUBLIC
        )

    def create_post(
        self,
        token: str,
        material_id: str,
        anchor_paragraph: Optional[int],
        content: str,
        parent: Optional[str] = None,
        highlight_range: Optional[tuple[int, int]] = None,
    ) -> Post:
        """Create a post or reply; visibility snapshots the author's current
        mode. Replies inherit the parent's anchor paragraph."""
        user = self.authenticate(token)
        material = self.get_material(material_id)
        if not content or not content.strip():
            raise ValidationError("post content must be non-empty")
        mode = self._mode(user, material_id)

        peer: Optional[str] = None
        if parent is not None:
            parent_payload = self._post_payload(parent)
            if parent_payload["material_id"] != material_id:
                raise ValidationError("reply parent belongs to a different material")
            if parent_payload.get("archived"):
                raise ValidationError("cannot reply to an archived post")
            if not self._is_visible(parent_payload, user, mode):
                raise AuthorizationError("cannot reply to a post you cannot see")
            anchor_paragraph = parent_payload["anchor_paragraph"]
            peer = parent_payload["author"]
        if anchor_paragraph is None or not 0 <= anchor_paragraph < len(material.paragraphs):
            raise ValidationError(
                f"anchor paragraph {anchor_paragraph!r} out of range for material "
                f"{material_id!r} ({len(material.paragraphs)} paragraphs)"
            )
        if highlight_range is not None:
            start, end = highlight_range
            if not 0 <= start < end <= len(material.paragraph(anchor_paragraph).text):
                raise ValidationError("highlight range out of bounds for the paragraph")

        allocated = self._allocate(material_id, next_post=True, next_event=True)
        post_id = f"{material_id}-p{allocated['next_post']:04d}"
        visibility = Visibility.PUBLIC if mode == Visibility.PUBLIC else Visibility.PRIVATE
        payload = {
            "id": post_id,
            "author": user,
            "material_id": material_id,
            "anchor_paragraph": anchor_paragraph,
            "content": content,
            "visibility": visibility.value,
            "created_at": allocated["timestamp"],
            "parent": parent,
            "merged_from": [],
            "highlight_range": list(highlight_range) if highlight_range else None,
            "archived": False,
        }
        self.store.put(f"post:{post_id}", payload, None)
        if parent is None and visibility == Visibility.PRIVATE:
            update_record(
                self.store,
                f"state:{material_id}:{user}",
                initial=lambda: {
                    "user": user,
                    "material_id": material_id,
                    "mode": Visibility.PRIVATE.value,
                    "private_post_count": 1,
                },
                mutate=lambda p: {**p, "private_post_count": p["private_post_count"] + 1},
            )
        self._record_event(
            user,
            EventKind.REPLY if parent else EventKind.POST,
            material_id,
            allocated["next_event"],
            allocated["timestamp"],
            paragraph=anchor_paragraph,
            peer=peer,
        )
        return self._to_post(payload)

    def list_visible_posts(self, token: str, material_id: str) -> list[Post]:
        """The caller's own posts plus, once they are public, everyone
        else's public posts; archived merge sources never appear."""
        user = self.authenticate(token)
        self.get_material(material_id)
        mode = self._mode(user, material_id)
        posts = [
            self._to_post(p)
            for p in self._material_post_payloads(material_id)
            if self._is_visible(p, user, mode)
        ]
        posts.sort(key=lambda p: (p.anchor_paragraph, p.created_at))
        return posts

    def merge_posts(self, token: str, post_ids: Sequence[str]) -> Post:
        """Merge the caller's own top-level posts into one, blank-line
        joined in creation order; sources are archived but retained."""
        user = self.authenticate(token)
        if len(post_ids) < 2:
            raise ValidationError("merging requires at least two posts")
        if len(set(post_ids)) != len(post_ids):
            raise ValidationError("duplicate post ids in merge set")
        payloads = [self._post_payload(pid) for pid in post_ids]
        material_ids = {p["material_id"] for p in payloads}
        if len(material_ids) != 1:
            raise ValidationError("merged posts must share a material")
        for payload in payloads:
            if payload["author"] != user:
                raise AuthorizationError("can only merge your own posts")
            if payload["parent"] is not None:
                raise ValidationError("replies cannot be merged")
            if payload.get("archived"):
                raise ValidationError("archived posts cannot be merged")
        material_id = material_ids.pop()
        ordered = sorted(payloads, key=lambda p: p["created_at"])
        mode = self._mode(user, material_id)

        allocated = self._allocate(material_id, next_post=True, next_event=True)
        post_id = f"{material_id}-p{allocated['next_post']:04d}"
        merged = {
            "id": post_id,
            "author": user,
            "material_id": material_id,
            "anchor_paragraph": ordered[0]["anchor_paragraph"],
            "content": "\n\n".join(p["content"] for p in ordered),
            "visibility": (
                Visibility.PUBLIC.value if mode == Visibility.PUBLIC else Visibility.PRIVATE.value
            ),
            "created_at": allocated["timestamp"],
            "parent": None,
            "merged_from": [p["id"] for p in ordered],
            "highlight_range": None,
            "archived": False,
        }
        self.store.put(f"post:{post_id}", merged, None)
        for payload in ordered:
            update_record(
                self.store,
                f"post:{payload['id']}",
                initial=lambda payload=payload: payload,
                mutate=lambda p: {**p, "archived": True},
            )
        self._record_event(
            user,
            EventKind.MERGE,
            material_id,
            allocated["next_event"],
            allocated["timestamp"],
            paragraph=merged["anchor_paragraph"],
        )
        return self._to_post(merged)

    # ----- events ---------------------------------------------------------

    def _append_event(
        self,
        user: str,
        kind: EventKind,
        material_id: str,
        paragraph: Optional[int] = None,
        peer: Optional[str] = None,
    ) -> EngagementEvent:
        allocated = self._allocate(material_id, next_event=True)
        return self._record_event(
            user, kind, material_id, allocated["next_event"], allocated["timestamp"],
            paragraph=paragraph, peer=peer,
        )

    def _record_event(
        self,
        user: str,
        kind: EventKind,
        material_id: str,
        event_n: int,
        timestamp: int,
        paragraph: Optional[int] = None,
        peer: Optional[str] = None,
    ) -> EngagementEvent:
        event = EngagementEvent(
            user=user,
            kind=kind,
            material_id=material_id,
            timestamp=timestamp,
            paragraph=paragraph,
            peer=peer,
        )
        self.store.put(
            f"event:{material_id}:{event_n:06d}",
            {
                "user": user,
                "kind": kind.value,
                "material_id": material_id,
                "paragraph": paragraph,
                "peer": peer,
                "timestamp": timestamp,
            },
            None,
        )
        return event

    def _events(self, material_id: str) -> list[EngagementEvent]:
        events = []
        for key in self.store.keys(f"event:{material_id}:"):
            payload = self.store.get(key).payload
            events.append(
                EngagementEvent(
                    user=payload["user"],
                    kind=EventKind(payload["kind"]),
                    material_id=payload["material_id"],
                    timestamp=payload["timestamp"],
                    paragraph=payload["paragraph"],
                    peer=payload["peer"],
                )
            )
        events.sort(key=lambda e: e.timestamp)
        return events

    # ----- pipeline helpers -------------------------------------------------

    def _require_visible(self, user: str, post_id: str) -> Post:
        payload = self._post_payload(post_id)
        mode = self._mode(user, payload["material_id"])
        if not self._is_visible(payload, user, mode):
            raise AuthorizationError(f"post {post_id!r} is not visible to you")
        return self._to_post(payload)

    def _content_version(self, material_id: str) -> int:
        record = self.store.get(f"seq:{material_id}")
        return 0 if record is None else record.payload["next_post"]

    def _visible_posts_of(self, user: str, material_id: str) -> list[Post]:
        mode = self._mode(user, material_id)
        return [
            self._to_post(p)
            for p in self._material_post_payloads(material_id)
            if self._is_visible(p, user, mode)
        ]

    def _visible_descendants(self, user: str, root: Post) -> list[Post]:
        posts = self._visible_posts_of(user, root.material_id)
        children: dict[str, list[Post]] = {}
        for post in posts:
            if post.parent is not None:
                children.setdefault(post.parent, []).append(post)
        collected: list[Post] = []

        def walk(post_id: str) -> None:
            for child in sorted(children.get(post_id, ()), key=lambda p: p.created_at):
                collected.append(child)
                walk(child.id)

        walk(root.id)
        return collected

    def _other_author(self, user: str, *posts: Post) -> str:
        for post in posts:
            if post.author != user:
                return post.author
        return user

    # ----- pipelines --------------------------------------------------------

    def pipeline_order(self, token: str, material_id: str, post_id: str):
        """Affinity-order every other visible top-level post around the
        primary; results are cached until any new post arrives."""
        user = self.authenticate(token)
        primary = self._require_visible(user, post_id)
        if primary.material_id != material_id:
            raise ValidationError("post does not belong to the named material")
        candidates = [
            p
            for p in self._visible_posts_of(user, material_id)
            if p.id != primary.id and p.parent is None
        ]
        candidates.sort(key=lambda p: p.created_at)
        cache_key = (
            "order",
            post_id,
            tuple(c.id for c in candidates),
            self._content_version(material_id),
        )
        with self._cache_lock:
            cached = self._affinity_cache.get(cache_key)
        if cached is None:
            entries = affinity_mod.analyze_affinity(
                primary, candidates, self.gateway, embedder=self.embedder
            )
            with self._cache_lock:
                self._affinity_cache[cache_key] = entries
        else:
            entries = cached
        posts_by_id = {c.id: c for c in candidates}
        ordering = affinity_mod.order_posts(primary, entries, posts_by_id)
        self._append_event(
            user, EventKind.ORDER, material_id, paragraph=primary.anchor_paragraph
        )
        return ordering

    def pipeline_summary(
        self, token: str, post_id: str, include_replies: bool = False, regenerate: bool = False
    ):
        user = self.authenticate(token)
        post = self._require_visible(user, post_id)
        descendants = self._visible_descendants(user, post) if include_replies else []
        subtree = tuple(d.id for d in descendants)
        cache_key = ("summary", post_id, include_replies, subtree)
        with self._cache_lock:
            previous = self._summary_cache.get(cache_key)
        if regenerate and previous is not None:
            summary = summarize_mod.regenerate(previous, post, self.gateway, descendants)
        elif previous is not None and not regenerate:
            summary = previous
        else:
            summary = summarize_mod.summarize_post(
                post, include_replies, self.gateway, descendants
            )
        with self._cache_lock:
            self._summary_cache[cache_key] = summary
        self._append_event(
            user, EventKind.SUMMARIZE, post.material_id, paragraph=post.anchor_paragraph
        )
        return summary

    def pipeline_pair(self, token: str, post_a_id: str, post_b_id: str):
        user = self.authenticate(token)
        post_a = self._require_visible(user, post_a_id)
        post_b = self._require_visible(user, post_b_id)
        cache_key = (
            "pair",
            post_a_id,
            post_b_id,
            self._content_version(post_a.material_id),
        )
        with self._cache_lock:
            cached = self._pair_cache.get(cache_key)
        if cached is None:
            cached = highlight_mod.analyze_pair(post_a, post_b, self.gateway)
            with self._cache_lock:
                self._pair_cache[cache_key] = cached
        self._append_event(
            user,
            EventKind.PAIR_ANALYSIS,
            post_a.material_id,
            paragraph=post_a.anchor_paragraph,
            peer=self._other_author(user, post_b, post_a),
        )
        return cached

    def pipeline_aspects(self, token: str, post_a_id: str, post_b_id: str):
        user = self.authenticate(token)
        post_a = self._require_visible(user, post_a_id)
        post_b = self._require_visible(user, post_b_id)
        material = self.get_material(post_a.material_id)
        aspects = blend_mod.extract_aspects(post_a, post_b, material, self.gateway)
        self._append_event(
            user,
            EventKind.BLEND,
            post_a.material_id,
            paragraph=post_a.anchor_paragraph,
            peer=self._other_author(user, post_b, post_a),
        )
        return aspects

    def _build_selection(
        self, user: str, post_a_id: str, post_b_id: str, style: str, aspect_a: dict, aspect_b: dict
    ) -> tuple[blend_mod.BlendSelection, Post, Post]:
        post_a = self._require_visible(user, post_a_id)
        post_b = self._require_visible(user, post_b_id)
        selection = blend_mod.BlendSelection(
            post_a_id=post_a.id,
            aspect_a=_aspect_from(aspect_a),
            post_b_id=post_b.id,
            aspect_b=_aspect_from(aspect_b),
            style=_parse_style(style),
        )
        from ..text import verbatim_contains

        for post, aspect in ((post_a, selection.aspect_a), (post_b, selection.aspect_b)):
            if not aspect.source_span or not verbatim_contains(post.content, aspect.source_span):
                raise ValidationError(
                    f"aspect span {aspect.source_span!r} is not verbatim in post {post.id}"
                )
        return selection, post_a, post_b

    def pipeline_question(
        self, token: str, post_a_id: str, post_b_id: str, style: str, aspect_a: dict, aspect_b: dict
    ):
        user = self.authenticate(token)
        selection, post_a, post_b = self._build_selection(
            user, post_a_id, post_b_id, style, aspect_a, aspect_b
        )
        question = blend_mod.generate_question(selection, post_a, post_b, self.gateway)
        allocated = self._allocate(post_a.material_id, next_question=True, next_event=True)
        self.store.put(
            f"question:{post_a.material_id}:{allocated['next_question']:06d}",
            {
                "user": user,
                "text": question.text,
                "style": question.style.value,
                "word_count": question.word_count,
                "asked_at": allocated["timestamp"],
            },
            None,
        )
        self._record_event(
            user,
            EventKind.BLEND,
            post_a.material_id,
            allocated["next_event"],
            allocated["timestamp"],
            paragraph=post_a.anchor_paragraph,
            peer=self._other_author(user, post_b, post_a),
        )
        return question

    def pipeline_evidence(
        self,
        token: str,
        post_a_id: str,
        post_b_id: str,
        style: str,
        aspect_a: dict,
        aspect_b: dict,
        question_text: str,
    ):
        user = self.authenticate(token)
        selection, post_a, post_b = self._build_selection(
            user, post_a_id, post_b_id, style, aspect_a, aspect_b
        )
        from ..text import word_count as wc

        question = blend_mod.InspiringQuestion(
            text=question_text, style=selection.style, word_count=wc(question_text)
        )
        material = self.get_material(post_a.material_id)
        evidence = blend_mod.retrieve_evidence(
            selection,
            question,
            self._index(material.id),
            material,
            self.gateway,
            chunks=self._chunks(material.id),
            embedder=self.embedder,
            k=self.config.retrieval_k,
        )
        artifact = blend_mod.make_blend_artifact(selection, question, evidence)
        allocated = self._allocate(material.id, next_blend=True, next_event=True)
        self.store.put(
            f"blend:{material.id}:{allocated['next_blend']:06d}",
            {
                "user": user,
                "post_a": post_a.id,
                "post_b": post_b.id,
                "style": selection.style.value,
                "question": question.text,
                "evidence": [
                    {
                        "key_concept": b.key_concept,
                        "excerpt": b.excerpt,
                        "paragraph_indices": list(b.paragraph_indices),
                        "connection": b.connection,
                        "color": b.color,
                        "warnings": list(b.warnings),
                    }
                    for b in artifact.evidence
                ],
                "created_at": allocated["timestamp"],
            },
            None,
        )
        self._record_event(
            user,
            EventKind.BLEND,
            material.id,
            allocated["next_event"],
            allocated["timestamp"],
            paragraph=post_a.anchor_paragraph,
            peer=self._other_author(user, post_b, post_a),
        )
        return artifact

    # ----- report -----------------------------------------------------------

    def _question_history(self, user: str, material_id: str) -> list[report_mod.QuestionRef]:
        refs = []
        for key in self.store.keys(f"question:{material_id}:"):
            payload = self.store.get(key).payload
            if payload["user"] != user:
                continue
            refs.append(
                report_mod.QuestionRef(
                    text=payload["text"],
                    style=_parse_style(payload["style"]),
                    word_count=payload["word_count"],
                    asked_at=payload["asked_at"],
                )
            )
        return refs

    def _exchange_texts(self, user: str, material_id: str) -> dict[str, str]:
        """Textual context per peer for the report prompts: the contents the
        user and each peer exchanged through replies."""
        payloads = self._material_post_payloads(material_id, include_archived=True)
        by_id = {p["id"]: p for p in payloads}
        exchanges: dict[str, list[str]] = {}
        for payload in payloads:
            if payload["parent"] is None:
                continue
            parent = by_id.get(payload["parent"])
            if parent is None:
                continue
            if payload["author"] == user and parent["author"] != user:
                exchanges.setdefault(parent["author"], []).append(
                    f"You replied to {parent['author']}: {payload['content']}"
                )
            elif parent["author"] == user and payload["author"] != user:
                exchanges.setdefault(payload["author"], []).append(
                    f"{payload['author']} replied to you: {payload['content']}"
                )
        return {peer: "\n".join(lines) for peer, lines in exchanges.items()}

    def generate_report(self, token: str, material_id: str) -> report_mod.LearningReport:
        """Assemble the personalized report from a snapshot, then log the
        report event (the only state change)."""
        user = self.authenticate(token)
        material = self.get_material(material_id)
        all_payloads = self._material_post_payloads(material_id)
        public_posts = [
            self._to_post(p)
            for p in all_payloads
            if p["visibility"] == Visibility.PUBLIC.value
        ]
        user_posts = [self._to_post(p) for p in all_payloads if p["author"] == user]
        user_events = [e for e in self._events(material_id) if e.user == user]
        generated_at = self._allocate(material_id)["timestamp"]
        learning_report = report_mod.assemble_report(
            user,
            material,
            self.gateway,
            all_public_posts=public_posts,
            user_posts=user_posts,
            user_events=user_events,
            question_history=self._question_history(user, material_id),
            generated_at=generated_at,
            hot_spot_min_posts=self.config.hot_spot_min_posts,
            view_weight=self.config.view_weight,
            exchange_texts=self._exchange_texts(user, material_id),
        )
        self._append_event(user, EventKind.REPORT, material_id)
        return learning_report

    # ----- fixtures -----------------------------------------------------------

    def seed_posts(self, material_id: str, fixtures: Sequence[dict]) -> list[Post]:
        """Admin seeding of scripted posts. Each fixture holds author,
        anchor_paragraph, content, visibility, and optionally parent (the
        index of an earlier fixture). Authors are provisioned as needed;
        seeding a public post forces its author's mode to public."""
        self.get_material(material_id)
        created: list[Post] = []
        for fixture in fixtures:
            author = fixture["author"]
            if self.store.get(f"user:{author}") is None:
                self.provision_user(author)
            visibility = Visibility(fixture.get("visibility", "public"))
            parent_id = None
            anchor = fixture.get("anchor_paragraph", 0)
            peer = None
            if fixture.get("parent") is not None:
                parent_post = created[fixture["parent"]]
                parent_id = parent_post.id
                anchor = parent_post.anchor_paragraph
                peer = parent_post.author
            allocated = self._allocate(material_id, next_post=True, next_event=True)
            post_id = f"{material_id}-p{allocated['next_post']:04d}"
            payload = {
                "id": post_id,
                "author": author,
                "material_id": material_id,
                "anchor_paragraph": anchor,
                "content": fixture["content"],
                "visibility": visibility.value,
                "created_at": allocated["timestamp"],
                "parent": parent_id,
                "merged_from": [],
                "highlight_range": None,
                "archived": False,
            }
            self.store.put(f"post:{post_id}", payload, None)
            if visibility == Visibility.PUBLIC:
                update_record(
                    self.store,
                    f"state:{material_id}:{author}",
                    initial=lambda author=author: {
                        "user": author,
                        "material_id": material_id,
                        "mode": Visibility.PUBLIC.value,
                        "private_post_count": 0,
                    },
                    mutate=lambda p: {**p, "mode": Visibility.PUBLIC.value},
                )
            self._record_event(
                author,
                EventKind.REPLY if parent_id else EventKind.POST,
                material_id,
                allocated["next_event"],
                allocated["timestamp"],
                paragraph=anchor,
                peer=peer,
            )
            created.append(self._to_post(payload))
        return created


def _aspect_from(payload: dict):
    try:
        return blend_mod.Aspect(
            keyword=payload["keyword"],
            description=payload["description"],
            source_span=payload["source_span"],
        )
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed aspect payload: {exc}") from exc


def _parse_style(style: str):
    from ..model import DiscussionStyle

    try:
        return DiscussionStyle(style)
    except ValueError as exc:
        raise ValidationError(f"unknown discussion style {style!r}") from exc


class _NoProvider:
    def complete(self, prompt: str) -> str:
        raise DomainError("service was constructed without a completion provider")
