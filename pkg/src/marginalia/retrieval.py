"""Closed-corpus vector retrieval.

One index per material, covering exactly that material's chunks; queries are
answered by exhaustive cosine scan (a few hundred entries at most, so
approximate structures would be pointless complexity). Indexes are immutable
after build; a rebuild replaces the whole index.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DomainError, StateError
from .ingestion import Chunk
from .providers import EmbeddingProvider


@dataclass(frozen=True)
class SearchResult:
    chunk_id: str
    score: float  # cosine similarity in [-1, 1]


@dataclass(frozen=True)
class VectorIndex:
    material_id: str
    dimension: int
    entries: tuple[tuple[str, np.ndarray], ...]  # (chunk_id, vector), ids unique

    def __post_init__(self):
        seen = set()
        for chunk_id, vec in self.entries:
            if chunk_id in seen:
                raise DomainError(f"duplicate chunk_id {chunk_id!r} in index")
            seen.add(chunk_id)
            if vec.shape != (self.dimension,):
                raise DomainError(
                    f"vector for {chunk_id!r} has shape {vec.shape}, "
                    f"expected ({self.dimension},)"
                )
            if not np.all(np.isfinite(vec)):
                raise DomainError(f"vector for {chunk_id!r} has non-finite entries")

    def __len__(self) -> int:
        return len(self.entries)


def embed(text: str, provider: EmbeddingProvider) -> np.ndarray:
    """Embed ``text`` into the provider's declared dimension."""
    vec = provider.embed(text)
    if vec.shape != (provider.dimension,):
        raise DomainError(
            f"provider returned shape {vec.shape}, expected ({provider.dimension},)"
        )
    return vec


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity, clipped into [-1, 1] against rounding drift.

    Raises:
        DomainError: dimension mismatch or zero-norm input.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = np.linalg.norm(a)
    norm_b = np.linalg.norm(b)
    if norm_a == 0.0 or norm_b == 0.0:
        raise DomainError("cosine undefined for zero-norm vector")
    return float(np.clip(np.dot(a, b) / (norm_a * norm_b), -1.0, 1.0))


def top_k(index: VectorIndex, query: np.ndarray, k: int) -> list[SearchResult]:
    """The ``min(k, len(index))`` entries most similar to ``query``.

    Exhaustive scan, sorted by score descending with ties broken by
    ascending chunk_id, so results are fully reproducible.

    Raises:
        DomainError: k < 1 or query dimension mismatch.
        StateError: empty index.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if len(index) == 0:
        raise StateError(f"index for material {index.material_id!r} is empty")
    scored = [
        SearchResult(chunk_id=chunk_id, score=cosine(query, vec))
        for chunk_id, vec in index.entries
    ]
    scored.sort(key=lambda r: (-r.score, r.chunk_id))
    return scored[: min(k, len(scored))]


def build_index(
    material_id: str, chunks: list[Chunk], provider: EmbeddingProvider
) -> VectorIndex:
    """Embed every chunk and assemble the closed-corpus index."""
    entries = tuple((chunk.chunk_id, embed(chunk.text, provider)) for chunk in chunks)
    return VectorIndex(
        material_id=material_id, dimension=provider.dimension, entries=entries
    )


def index_to_dict(index: VectorIndex) -> dict:
    return {
        "material_id": index.material_id,
        "dimension": index.dimension,
        "entries": [
            {"chunk_id": cid, "values": vec.tolist()} for cid, vec in index.entries
        ],
    }


def index_from_dict(payload: dict) -> VectorIndex:
    return VectorIndex(
        material_id=payload["material_id"],
        dimension=payload["dimension"],
        entries=tuple(
            (entry["chunk_id"], np.asarray(entry["values"], dtype=np.float64))
            for entry in payload["entries"]
        ),
    )


def save_index(index: VectorIndex, path: str | Path) -> None:
    """Persist as JSON; float round-tripping is lossless via repr."""
    Path(path).write_text(json.dumps(index_to_dict(index)), encoding="utf-8")


def load_index(path: str | Path) -> VectorIndex:
    return index_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
