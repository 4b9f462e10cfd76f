import pytest
from pydantic import BaseModel

from marginalia.errors import GatewayValidationError, StubScriptError
from marginalia.gateway import Gateway, ValidationRule, extract_json
from marginalia.providers import ProviderConfig, StubChatProvider
from marginalia.summarize import SUMMARY_RULES, SummaryResponse

from .conftest import j, words


def make_gateway(script, max_retries=2):
    return Gateway(StubChatProvider(script), ProviderConfig(max_retries=max_retries))


class TestCompleteStructured:
    def test_valid_first_attempt_returned_unchanged(self):
        gateway = make_gateway({"summarization": j(bullets=["a short bullet"])})
        result = gateway.complete_structured(
            "summarization", {"content": "x"}, SummaryResponse, SUMMARY_RULES
        )
        assert result.value.bullets == ["a short bullet"]
        assert result.attempts == 1
        assert result.warnings == ()

    def test_retries_until_word_limit_satisfied(self):
        # stub scripted to violate the 30-word bullet limit twice, then pass
        gateway = make_gateway(
            {
                "summarization": [
                    j(bullets=[words(31)]),
                    j(bullets=[words(31)]),
                    j(bullets=[words(12)]),
                ]
            }
        )
        result = gateway.complete_structured(
            "summarization", {"content": "x"}, SummaryResponse, SUMMARY_RULES
        )
        assert result.attempts == 3
        assert result.value.bullets == [words(12)]

    def test_persistent_violation_names_rule_and_carries_raw(self):
        bad = j(bullets=[words(31)])
        gateway = make_gateway({"summarization": bad})
        with pytest.raises(GatewayValidationError) as excinfo:
            gateway.complete_structured(
                "summarization", {"content": "x"}, SummaryResponse, SUMMARY_RULES
            )
        assert excinfo.value.rule_id == "bullet_words"
        assert excinfo.value.attempts == 3
        assert excinfo.value.raw_output == bad

    def test_schema_failure_is_retried_then_reported(self):
        gateway = make_gateway({"summarization": "not json at all"})
        with pytest.raises(GatewayValidationError) as excinfo:
            gateway.complete_structured(
                "summarization", {"content": "x"}, SummaryResponse, SUMMARY_RULES
            )
        assert excinfo.value.rule_id == "schema"

    def test_schema_then_valid(self):
        gateway = make_gateway(
            {"summarization": ['{"bullets": "wrong type"}', j(bullets=["fine"])]}
        )
        result = gateway.complete_structured(
            "summarization", {"content": "x"}, SummaryResponse, SUMMARY_RULES
        )
        assert result.attempts == 2

    def test_script_exhaustion_surfaces_as_provider_error(self):
        gateway = make_gateway({"summarization": [j(bullets=[words(31)])]})
        with pytest.raises(StubScriptError):
            gateway.complete_structured(
                "summarization", {"content": "x"}, SummaryResponse, SUMMARY_RULES
            )

    def test_zero_retries_config(self):
        gateway = make_gateway({"summarization": j(bullets=[words(31)])}, max_retries=0)
        with pytest.raises(GatewayValidationError) as excinfo:
            gateway.complete_structured(
                "summarization", {"content": "x"}, SummaryResponse, SUMMARY_RULES
            )
        assert excinfo.value.attempts == 1

    def test_warning_rules_annotate_without_retry(self):
        class Anything(BaseModel):
            bullets: list[str]

        noticed = ValidationRule(
            "always_warn", lambda v: "advisory note", severity="warning"
        )
        gateway = make_gateway({"summarization": j(bullets=["ok"])})
        result = gateway.complete_structured(
            "summarization", {"content": "x"}, Anything, [noticed]
        )
        assert result.attempts == 1
        assert result.warnings == ("always_warn: advisory note",)

    def test_markdown_fences_tolerated(self):
        fenced = "```json\n" + j(bullets=["fenced bullet"]) + "\n```"
        gateway = make_gateway({"summarization": fenced})
        result = gateway.complete_structured(
            "summarization", {"content": "x"}, SummaryResponse, SUMMARY_RULES
        )
        assert result.value.bullets == ["fenced bullet"]


def test_extract_json_passthrough():
    assert extract_json('  {"a": 1} ') == '{"a": 1}'
    assert extract_json('```json\n{"a": 1}\n```') == '{"a": 1}'
    assert extract_json('```\n{"a": 1}\n```') == '{"a": 1}'
