"""Service configuration, overridable from the environment."""

from __future__ import annotations

import os
from dataclasses import dataclass

from ..ingestion import DEFAULT_MAX_CHUNK_WORDS


@dataclass(frozen=True)
class ServiceConfig:
    min_private_posts: int = 2  # private posts required before Show Public
    hot_spot_min_posts: int = 2
    max_chunk_words: int = DEFAULT_MAX_CHUNK_WORDS
    retrieval_k: int = 5
    embed_dim: int = 64
    view_weight: int = 0  # weight of reading views in the engagement score
    session_ttl_s: float = 180 * 24 * 3600.0

    @classmethod
    def from_env(cls, env=None) -> "ServiceConfig":
        env = os.environ if env is None else env

        def read_int(name: str, default: int) -> int:
            raw = env.get(f"MARGINALIA_{name}")
            return int(raw) if raw else default

        return cls(
            min_private_posts=read_int("MIN_PRIVATE_POSTS", cls.min_private_posts),
            hot_spot_min_posts=read_int("HOT_SPOT_MIN_POSTS", cls.hot_spot_min_posts),
            max_chunk_words=read_int("MAX_CHUNK_WORDS", cls.max_chunk_words),
            retrieval_k=read_int("RETRIEVAL_K", cls.retrieval_k),
            embed_dim=read_int("EMBED_DIM", cls.embed_dim),
            view_weight=read_int("VIEW_WEIGHT", cls.view_weight),
        )
