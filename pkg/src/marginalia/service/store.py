"""Pluggable document store with optimistic versioning.

Writes carry the version the writer read; a mismatch raises
VersionConflictError and the caller retries its read-modify-write. The
in-memory store backs tests, the file store backs deployment (one JSON file
per record, atomic replace). Both are safe for concurrent use from threads
within one process.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Protocol

from ..errors import StateError, VersionConflictError

#: Bound for read-modify-write retries; contention on the tiny allocator
#: records resolves in a handful of attempts even under heavy threading.
CAS_RETRY_LIMIT = 10_000


@dataclass(frozen=True)
class StoredRecord:
    key: str
    payload: dict
    version: int


class DocumentStore(Protocol):
    def get(self, key: str) -> Optional[StoredRecord]: ...

    def put(self, key: str, payload: dict, expected_version: Optional[int]) -> StoredRecord:
        """Insert (expected_version None) or replace at the expected version.

        Raises VersionConflictError when the stored version differs (or the
        record already exists on insert / is missing on replace).
        """
        ...

    def keys(self, prefix: str = "") -> list[str]: ...


class MemoryStore:
    def __init__(self):
        self._records: dict[str, StoredRecord] = {}
        self._lock = threading.Lock()

    def get(self, key: str) -> Optional[StoredRecord]:
        with self._lock:
            return self._records.get(key)

    def put(self, key: str, payload: dict, expected_version: Optional[int]) -> StoredRecord:
        with self._lock:
            current = self._records.get(key)
            _check_version(key, current, expected_version)
            record = StoredRecord(
                key=key,
                payload=payload,
                version=1 if current is None else current.version + 1,
            )
            self._records[key] = record
            return record

    def keys(self, prefix: str = "") -> list[str]:
        with self._lock:
            return sorted(k for k in self._records if k.startswith(prefix))


class FileStore:
    """One JSON file per record under ``root``; writes go through a
    temp-file-and-replace so readers never observe partial records."""

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, key: str) -> Path:
        if "/" in key or key in (".", ".."):
            raise StateError(f"invalid record key {key!r}")
        return self.root / f"{key}.json"

    def _read(self, key: str) -> Optional[StoredRecord]:
        path = self._path(key)
        if not path.exists():
            return None
        data = json.loads(path.read_text(encoding="utf-8"))
        return StoredRecord(key=key, payload=data["payload"], version=data["version"])

    def get(self, key: str) -> Optional[StoredRecord]:
        with self._lock:
            return self._read(key)

    def put(self, key: str, payload: dict, expected_version: Optional[int]) -> StoredRecord:
        with self._lock:
            current = self._read(key)
            _check_version(key, current, expected_version)
            version = 1 if current is None else current.version + 1
            path = self._path(key)
            fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
            try:
                with os.fdopen(fd, "w", encoding="utf-8") as handle:
                    json.dump({"payload": payload, "version": version}, handle)
                os.replace(tmp, path)
            finally:
                if os.path.exists(tmp):
                    os.unlink(tmp)
            return StoredRecord(key=key, payload=payload, version=version)

    def keys(self, prefix: str = "") -> list[str]:
        with self._lock:
            return sorted(
                p.stem for p in self.root.glob("*.json") if p.stem.startswith(prefix)
            )


def _check_version(
    key: str, current: Optional[StoredRecord], expected_version: Optional[int]
) -> None:
    if expected_version is None:
        if current is not None:
            raise VersionConflictError(
                f"record {key!r} already exists at version {current.version}"
            )
    elif current is None:
        raise VersionConflictError(f"record {key!r} vanished (expected v{expected_version})")
    elif current.version != expected_version:
        raise VersionConflictError(
            f"record {key!r} is at v{current.version}, writer expected v{expected_version}"
        )


def update_record(
    store: DocumentStore,
    key: str,
    initial: Callable[[], dict],
    mutate: Callable[[dict], dict],
    *,
    retries: int = CAS_RETRY_LIMIT,
) -> StoredRecord:
    """Read-modify-write with bounded retry on version conflicts.

    ``initial`` builds the payload when the record does not exist yet;
    ``mutate`` maps the current payload to the new one (pure; it may be
    called several times).
    """
    for _ in range(retries):
        current = store.get(key)
        try:
            if current is None:
                return store.put(key, initial(), None)
            return store.put(key, mutate(dict(current.payload)), current.version)
        except VersionConflictError:
            continue
    raise VersionConflictError(f"update of {key!r} still conflicted after {retries} retries")
