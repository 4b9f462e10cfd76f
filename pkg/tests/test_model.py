import pytest
from hypothesis import given
from hypothesis import strategies as st

from marginalia.errors import DomainError
from marginalia.model import (
    EngagementEvent,
    EventKind,
    Material,
    Paragraph,
    RelevanceBand,
    band_color,
    classify_relevance,
)


class TestClassifyRelevance:
    def test_above_threshold_is_high(self):
        assert classify_relevance(0.8) is RelevanceBand.HIGH

    def test_upper_bound_inclusive_medium(self):
        assert classify_relevance(0.7) is RelevanceBand.MEDIUM

    def test_lower_bound_inclusive_medium(self):
        assert classify_relevance(0.4) is RelevanceBand.MEDIUM

    def test_just_below_band_is_low(self):
        assert classify_relevance(0.39) is RelevanceBand.LOW
        assert classify_relevance(0.39999) is RelevanceBand.LOW

    @pytest.mark.parametrize("score", [-0.01, 1.01, float("nan"), 2.0])
    def test_out_of_range_rejected(self, score):
        with pytest.raises(DomainError):
            classify_relevance(score)

    @given(st.floats(min_value=0.0, max_value=1.0, allow_nan=False))
    def test_partitions_unit_interval(self, score):
        band = classify_relevance(score)
        if score > 0.7:
            assert band is RelevanceBand.HIGH
        elif score >= 0.4:
            assert band is RelevanceBand.MEDIUM
        else:
            assert band is RelevanceBand.LOW

    def test_band_colors(self):
        assert band_color(RelevanceBand.HIGH) == "green"
        assert band_color(RelevanceBand.MEDIUM) == "yellow"
        assert band_color(RelevanceBand.LOW) == "red"


class TestMaterial:
    def test_join_invariant_enforced(self):
        with pytest.raises(DomainError):
            Material(
                id="m1",
                title="t",
                paragraphs=(Paragraph(0, "alpha"), Paragraph(1, "beta")),
                raw_text="alpha\n\n\nbeta",
            )

    def test_contiguous_indices_enforced(self):
        with pytest.raises(DomainError):
            Material(
                id="m1",
                title="t",
                paragraphs=(Paragraph(0, "alpha"), Paragraph(2, "beta")),
                raw_text="alpha\n\nbeta",
            )

    def test_empty_rejected(self):
        with pytest.raises(DomainError):
            Material(id="m1", title="t", paragraphs=(), raw_text="")

    def test_paragraph_lookup_bounds(self):
        material = Material(
            id="m1", title="t", paragraphs=(Paragraph(0, "alpha"),), raw_text="alpha"
        )
        assert material.paragraph(0).text == "alpha"
        with pytest.raises(DomainError):
            material.paragraph(1)


class TestEngagementEvent:
    def test_peer_required_for_reply(self):
        with pytest.raises(DomainError):
            EngagementEvent(user="u", kind=EventKind.REPLY, material_id="m", timestamp=1)

    def test_peer_forbidden_for_post(self):
        with pytest.raises(DomainError):
            EngagementEvent(
                user="u", kind=EventKind.POST, material_id="m", timestamp=1, peer="v"
            )

    @pytest.mark.parametrize("kind", [EventKind.REPLY, EventKind.PAIR_ANALYSIS, EventKind.BLEND])
    def test_peered_kinds_accept_peer(self, kind):
        event = EngagementEvent(
            user="u", kind=kind, material_id="m", timestamp=1, paragraph=0, peer="v"
        )
        assert event.peer == "v"
