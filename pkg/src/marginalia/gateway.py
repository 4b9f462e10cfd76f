"""Structured completion gateway: render, call, validate, retry.

Every value leaving this module has passed its schema and every declared
error-severity rule, so downstream code may assume the documented output
constraints hold. Warning-severity rules never trigger a retry; their
messages ride along on the result.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Any, Callable, Generic, Optional, Sequence, TypeVar

from pydantic import BaseModel, ValidationError as PydanticValidationError

from .errors import GatewayValidationError
from .prompts import render_prompt, with_nonce
from .providers import ChatProvider, ProviderConfig

T = TypeVar("T", bound=BaseModel)

SCHEMA_RULE_ID = "schema"

_FENCE_RE = re.compile(r"^```[a-zA-Z0-9_-]*\n(.*)\n```$", re.DOTALL)


@dataclass(frozen=True)
class ValidationRule:
    """A pure, deterministic predicate over a parsed response.

    ``check`` returns None when satisfied, or a human-readable violation
    message. Rules with severity "error" force a regeneration; "warning"
    rules only annotate the result.
    """

    rule_id: str
    check: Callable[[Any], Optional[str]]
    description: str = ""
    severity: str = "error"  # "error" | "warning"

    def __post_init__(self):
        if self.severity not in ("error", "warning"):
            raise ValueError(f"unknown rule severity {self.severity!r}")


@dataclass(frozen=True)
class GatewayResult(Generic[T]):
    value: T
    warnings: tuple[str, ...] = ()
    attempts: int = 1
    raw_output: str = ""


def extract_json(raw: str) -> str:
    """Peel an optional markdown code fence off a raw model response."""
    stripped = raw.strip()
    fenced = _FENCE_RE.match(stripped)
    return fenced.group(1) if fenced else stripped


class Gateway:
    """Binds a completion provider to template rendering and validation."""

    def __init__(self, provider: ChatProvider, config: ProviderConfig | None = None):
        self.provider = provider
        self.config = config or ProviderConfig()

    def complete_structured(
        self,
        template_id: str,
        bindings: dict[str, object],
        schema: type[T],
        rules: Sequence[ValidationRule] = (),
        *,
        nonce: int = 0,
    ) -> GatewayResult[T]:
        """Call the provider until its output parses against ``schema`` and
        satisfies every error rule, retrying up to ``max_retries`` extra
        times with an advancing regeneration nonce.

        Raises:
            GatewayValidationError: all attempts failed; carries the last
                raw output and the first failing rule id.
            NotFoundError / BindingError: template problems, raised eagerly.
            ProviderError: transport or scripting failure, not retried.
        """
        prompt = render_prompt(template_id, bindings)
        attempts = self.config.max_retries + 1
        last_raw = ""
        first_failure: tuple[str, str] | None = None
        for attempt in range(attempts):
            raw = self.provider.complete(with_nonce(prompt, nonce + attempt))
            last_raw = raw
            parsed, failure = _parse(raw, schema)
            if failure is None:
                failure = _first_error(parsed, rules)
            if failure is None:
                return GatewayResult(
                    value=parsed,
                    warnings=_warnings(parsed, rules),
                    attempts=attempt + 1,
                    raw_output=raw,
                )
            if first_failure is None:
                first_failure = failure
        rule_id, message = first_failure
        raise GatewayValidationError(
            rule_id=rule_id,
            message=f"output still violates rule {rule_id!r} after {attempts} attempts: {message}",
            raw_output=last_raw,
            attempts=attempts,
        )


def _parse(raw: str, schema: type[T]) -> tuple[Optional[T], Optional[tuple[str, str]]]:
    try:
        payload = json.loads(extract_json(raw))
    except json.JSONDecodeError as exc:
        return None, (SCHEMA_RULE_ID, f"response is not valid JSON: {exc}")
    try:
        return schema.model_validate(payload), None
    except PydanticValidationError as exc:
        return None, (SCHEMA_RULE_ID, f"response does not match schema: {exc}")


def _first_error(parsed: T, rules: Sequence[ValidationRule]) -> Optional[tuple[str, str]]:
    for rule in rules:
        if rule.severity != "error":
            continue
        message = rule.check(parsed)
        if message is not None:
            return rule.rule_id, message
    return None


def _warnings(parsed: T, rules: Sequence[ValidationRule]) -> tuple[str, ...]:
    collected = []
    for rule in rules:
        if rule.severity != "warning":
            continue
        message = rule.check(parsed)
        if message is not None:
            collected.append(f"{rule.rule_id}: {message}")
    return tuple(collected)


def complete_structured(
    template_id: str,
    bindings: dict[str, object],
    schema: type[T],
    rules: Sequence[ValidationRule],
    config: ProviderConfig,
    *,
    script=None,
    nonce: int = 0,
) -> GatewayResult[T]:
    """One-shot convenience: build the provider from config and complete."""
    from .providers import build_provider

    return Gateway(build_provider(config, script), config).complete_structured(
        template_id, bindings, schema, rules, nonce=nonce
    )
