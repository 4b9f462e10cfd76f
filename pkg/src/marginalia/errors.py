"""Exception hierarchy shared by every module.

Each error carries a stable machine-readable ``code`` so the HTTP layer can
emit a uniform ``{code, message, detail}`` envelope without inspecting types.
"""

from __future__ import annotations

from typing import Any


class MarginaliaError(Exception):
    code = "internal_error"
    http_status = 500

    def __init__(self, message: str, detail: Any = None):
        super().__init__(message)
        self.message = message
        self.detail = detail

    def envelope(self) -> dict:
        return {"code": self.code, "message": self.message, "detail": self.detail}


class DomainError(MarginaliaError):
    """A value violates a domain precondition (range, shape, identity)."""

    code = "domain_error"
    http_status = 400


class ValidationError(MarginaliaError):
    """A request payload failed service-side validation."""

    code = "validation_error"
    http_status = 400


class IngestionError(MarginaliaError):
    code = "ingestion_error"
    http_status = 400


class NotFoundError(MarginaliaError):
    code = "not_found"
    http_status = 404


class BindingError(MarginaliaError):
    """A prompt placeholder was left unbound; names the placeholder."""

    code = "binding_error"
    http_status = 400

    def __init__(self, placeholder: str, template_id: str):
        super().__init__(
            f"missing binding {placeholder!r} for template {template_id!r}",
            detail={"placeholder": placeholder, "template_id": template_id},
        )
        self.placeholder = placeholder
        self.template_id = template_id


class ProviderError(MarginaliaError):
    """Transport, timeout, or other failure reaching a completion provider."""

    code = "provider_error"
    http_status = 502


class StubScriptError(ProviderError):
    """The stub provider has no scripted response for a prompt."""

    code = "stub_error"


class GatewayValidationError(MarginaliaError):
    """Provider output kept violating validation rules after all retries.

    Carries the last raw output and the first failing rule id for debugging.
    """

    code = "gateway_validation_error"
    http_status = 502

    def __init__(self, rule_id: str, message: str, raw_output: str, attempts: int):
        super().__init__(
            message,
            detail={"rule_id": rule_id, "attempts": attempts, "raw_output": raw_output},
        )
        self.rule_id = rule_id
        self.raw_output = raw_output
        self.attempts = attempts


class ConsistencyError(MarginaliaError):
    """Cross-referenced entities disagree (e.g. an entry names an unknown post)."""

    code = "consistency_error"
    http_status = 409


class StateError(MarginaliaError):
    """An operation ran against missing or unready state (e.g. empty index)."""

    code = "state_error"
    http_status = 409


class SessionError(MarginaliaError):
    code = "session_invalid"
    http_status = 401


class AuthorizationError(MarginaliaError):
    code = "authorization_error"
    http_status = 403


class GatingError(MarginaliaError):
    """Public-mode transition refused; detail carries the remaining deficit."""

    code = "gating_error"
    http_status = 409


class VersionConflictError(MarginaliaError):
    """Optimistic write lost the race: supplied version != stored version."""

    code = "version_conflict"
    http_status = 409
