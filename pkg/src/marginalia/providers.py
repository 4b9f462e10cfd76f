"""Completion and embedding providers.

The stub providers are fully deterministic and keep the whole system
offline-testable; the live adapters are the only code aware of the HTTP
wire shape of a vendor chat-completion or embedding endpoint.
"""

from __future__ import annotations

import os
import zlib
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Protocol, Union

import numpy as np

from .errors import DomainError, ProviderError, StubScriptError
from .prompts import fingerprint_template, parse_nonce

#: A script entry is one of:
#:   str                      -> returned for every nonce (repeats forever)
#:   sequence of str          -> indexed by regeneration nonce; exhausting it
#:                               is a stub error
#:   mapping of marker -> one of the above; the first marker (longest first)
#:                               found as a substring of the prompt selects
#:                               the nested entry
ScriptEntry = Union[str, Sequence[str], Mapping[str, Union[str, Sequence[str]]]]
Script = Mapping[str, ScriptEntry]


@dataclass(frozen=True)
class ProviderConfig:
    """Configuration for the completion provider behind the gateway."""

    provider_kind: str = "stub"  # "stub" | "live"
    model_name: str = "stub-model"
    endpoint: str | None = None
    credential_env: str | None = None  # env var holding the API key (live only)
    max_retries: int = 2
    timeout_s: float = 30.0
    options: Mapping[str, Any] = field(default_factory=dict)  # decoding params, opaque

    def __post_init__(self):
        if self.provider_kind not in ("stub", "live"):
            raise DomainError(f"unknown provider_kind {self.provider_kind!r}")
        if self.provider_kind == "live" and not self.endpoint:
            raise DomainError("live provider requires an endpoint")
        if self.max_retries < 0:
            raise DomainError("max_retries must be non-negative")


class ChatProvider(Protocol):
    def complete(self, prompt: str) -> str: ...


def stub_respond(prompt: str, script: Script) -> str:
    """Deterministic scripted response for a rendered prompt.

    The prompt's template fingerprint selects the script entry; the
    regeneration nonce embedded in the prompt selects the variant.

    Raises:
        StubScriptError: unrecognized template, missing entry, no matching
            marker, or variant list exhausted.
    """
    template_id = fingerprint_template(prompt)
    if template_id is None:
        raise StubScriptError("prompt matches no known template fingerprint")
    if template_id not in script:
        raise StubScriptError(f"no script entry for template {template_id!r}")
    entry: ScriptEntry = script[template_id]

    if isinstance(entry, Mapping):
        for marker in sorted(entry, key=lambda k: (-len(k), k)):
            if marker in prompt:
                entry = entry[marker]
                break
        else:
            raise StubScriptError(
                f"no script marker matched the prompt for template {template_id!r}"
            )

    if isinstance(entry, str):
        return entry
    nonce = parse_nonce(prompt)
    variants = list(entry)
    if nonce >= len(variants):
        raise StubScriptError(
            f"script for template {template_id!r} exhausted: "
            f"nonce {nonce} but only {len(variants)} variant(s)"
        )
    return variants[nonce]


class StubChatProvider:
    """Offline provider: identical prompt and script give identical output."""

    def __init__(self, script: Script):
        self.script = dict(script)
        self.calls = 0

    def complete(self, prompt: str) -> str:
        self.calls += 1
        return stub_respond(prompt, self.script)


class LiveChatProvider:
    """Adapter for a vendor-agnostic HTTP chat-completion endpoint."""

    def __init__(self, config: ProviderConfig, client=None):
        if config.provider_kind != "live":
            raise DomainError("LiveChatProvider requires a live ProviderConfig")
        self.config = config
        self._client = client  # injected in tests; lazily built otherwise

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.config.credential_env:
            key = os.environ.get(self.config.credential_env)
            if not key:
                raise ProviderError(
                    f"credential env var {self.config.credential_env!r} is unset"
                )
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _post(self, payload: dict) -> dict:
        import httpx

        client = self._client
        try:
            if client is None:
                response = httpx.post(
                    self.config.endpoint,
                    json=payload,
                    headers=self._headers(),
                    timeout=self.config.timeout_s,
                )
            else:
                response = client.post(
                    self.config.endpoint, json=payload, headers=self._headers()
                )
            response.raise_for_status()
            return response.json()
        except ProviderError:
            raise
        except Exception as exc:  # timeout, transport, HTTP status, bad JSON
            raise ProviderError(f"chat completion request failed: {exc}") from exc

    def complete(self, prompt: str) -> str:
        payload = {
            "model": self.config.model_name,
            "messages": [{"role": "user", "content": prompt}],
            **dict(self.config.options),
        }
        data = self._post(payload)
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"malformed chat completion response: {data!r}") from exc


def build_provider(config: ProviderConfig, script: Script | None = None) -> ChatProvider:
    """Construct the provider for a config; the live path is never touched
    when ``provider_kind`` is stub."""
    if config.provider_kind == "stub":
        return StubChatProvider(script or {})
    return LiveChatProvider(config)


class EmbeddingProvider(Protocol):
    @property
    def dimension(self) -> int: ...

    def embed(self, text: str) -> np.ndarray: ...


_TOKEN_MASK = 0xFFFFFFFF


class StubEmbedder:
    """Deterministic token-hash histogram embedder, L2-normalized.

    Tokens are lowercased alphanumeric runs hashed with crc32 into ``dim``
    buckets, so identical text always embeds identically across processes.
    """

    def __init__(self, dim: int = 64):
        if dim < 2:
            raise DomainError("embedding dimension must be >= 2")
        self._dim = dim

    @property
    def dimension(self) -> int:
        return self._dim

    def embed(self, text: str) -> np.ndarray:
        if not text or not text.strip():
            raise DomainError("cannot embed empty text")
        vec = np.zeros(self._dim, dtype=np.float64)
        tokens = _tokenize(text)
        if not tokens:
            tokens = [text]  # symbol-only text: hash it whole
        for token in tokens:
            bucket = (zlib.crc32(token.encode("utf-8")) & _TOKEN_MASK) % self._dim
            vec[bucket] += 1.0
        return vec / np.linalg.norm(vec)


def _tokenize(text: str) -> list[str]:
    import re

    return re.findall(r"[a-z0-9']+", text.lower())


class LiveEmbedder:
    """Adapter for an HTTP embedding endpoint returning one vector per input."""

    def __init__(self, config: ProviderConfig, dimension: int, client=None):
        self.config = config
        self._dim = dimension
        self._client = client

    @property
    def dimension(self) -> int:
        return self._dim

    def embed(self, text: str) -> np.ndarray:
        if not text or not text.strip():
            raise DomainError("cannot embed empty text")
        import httpx

        payload = {"model": self.config.model_name, "input": text}
        try:
            if self._client is None:
                response = httpx.post(
                    self.config.endpoint, json=payload, timeout=self.config.timeout_s
                )
            else:
                response = self._client.post(self.config.endpoint, json=payload)
            response.raise_for_status()
            values = response.json()["data"][0]["embedding"]
        except Exception as exc:
            raise ProviderError(f"embedding request failed: {exc}") from exc
        vec = np.asarray(values, dtype=np.float64)
        if vec.shape != (self._dim,):
            raise ProviderError(
                f"embedding has dimension {vec.shape}, expected ({self._dim},)"
            )
        return vec
