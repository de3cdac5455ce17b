import itertools
import json
from dataclasses import replace

import pytest

from swarmarch.decision import (
    EXTERNAL,
    FALLBACK,
    CommQuality,
    FailureProbability,
    MissionContext,
    RecommendationSource,
    Scenario,
    SizeClass,
    Status,
    classify_size,
    context_document,
    decide,
    export_rule_table,
    parse_context,
    parse_recommendation,
    recommend,
    recommendation_document,
    rule_table_document,
)
from swarmarch.model import ArchitectureKind, EnergyModelParams

CEN, HIE, HOL = (
    ArchitectureKind.CENTRALIZED,
    ArchitectureKind.HIERARCHICAL,
    ArchitectureKind.HOLONIC,
)

# The twelve policy rows, frozen here independently of the implementation.
TABLE_ROWS = [
    (Scenario.SEARCH_AND_RESCUE, "small", "good", "low", CEN),
    (Scenario.SEARCH_AND_RESCUE, "large", "low", "high", HOL),
    (Scenario.LARGE_AREA_MAPPING, "small", "good", "low", HIE),
    (Scenario.LARGE_AREA_MAPPING, "large", "moderate", "moderate", HOL),
    (Scenario.EMERGENCY_SUPPLY_DELIVERY, "medium", "good", "low", HIE),
    (Scenario.EMERGENCY_SUPPLY_DELIVERY, "large", "low", "high", HOL),
    (Scenario.POST_DISASTER_ASSESSMENT, "medium", "good", "low", HIE),
    (Scenario.POST_DISASTER_ASSESSMENT, "large", "low", "high", HOL),
    (Status.CRITICAL_FAILURE, "small", "low", "high", HIE),
    (Status.IDLE_STATE, "small", "good", "low", CEN),
    (Status.SPREAD_OUT, "medium", "moderate", "moderate", HIE),
    (Status.OVERLOAD, "large", "low", "high", HOL),
]


def make_context(subject, size, comm, failure):
    return MissionContext(
        scenario=subject if isinstance(subject, Scenario) else None,
        status=subject if isinstance(subject, Status) else None,
        size_class=SizeClass(size),
        comm_quality=CommQuality(comm),
        failure_probability=FailureProbability(failure),
    )


def all_contexts():
    subjects = list(Scenario) + list(Status)
    for subject, size, comm, failure in itertools.product(
        subjects, SizeClass, CommQuality, FailureProbability
    ):
        yield make_context(subject, size.value, comm.value, failure.value)


TABLE_KEYS = {
    (subject, SizeClass(size), CommQuality(comm), FailureProbability(failure))
    for subject, size, comm, failure, _ in TABLE_ROWS
}


def in_table(ctx):
    subject = ctx.scenario if ctx.scenario is not None else ctx.status
    return (subject, ctx.size_class, ctx.comm_quality, ctx.failure_probability) in TABLE_KEYS


class TestRuleTableFidelity:
    @pytest.mark.parametrize("subject,size,comm,failure,expected", TABLE_ROWS)
    def test_row(self, subject, size, comm, failure, expected):
        rec = recommend(make_context(subject, size, comm, failure))
        assert rec.architecture is expected
        assert rec.matched_rule != FALLBACK
        assert rec.source is RecommendationSource.RULE_TABLE

    def test_matched_rule_marker_iff_table_row(self):
        for ctx in all_contexts():
            rec = recommend(ctx)
            assert (rec.matched_rule == FALLBACK) == (not in_table(ctx))


class TestTotalityAndFallback:
    def test_totality_over_all_combinations(self):
        contexts = list(all_contexts())
        assert len(contexts) == 8 * 3 * 3 * 3  # 216 combinations
        for ctx in contexts:
            rec = recommend(ctx)
            assert rec.architecture in ArchitectureKind
            assert rec.rationale

    def test_fallback_medium_mapping_goes_hierarchical(self):
        ctx = make_context(Scenario.LARGE_AREA_MAPPING, "medium", "good", "low")
        assert not in_table(ctx)
        rec = recommend(ctx)
        assert rec.architecture is HIE
        assert rec.matched_rule == FALLBACK

    def test_fallback_chain_order(self):
        # failure beats comm beats size
        assert recommend(make_context(Scenario.SEARCH_AND_RESCUE, "small", "good", "high")).architecture is HOL
        assert recommend(make_context(Scenario.SEARCH_AND_RESCUE, "small", "low", "low")).architecture is HOL
        assert recommend(make_context(Scenario.SEARCH_AND_RESCUE, "large", "good", "low")).architecture is HOL
        assert recommend(make_context(Scenario.SEARCH_AND_RESCUE, "medium", "good", "moderate")).architecture is HIE
        assert recommend(make_context(Scenario.SEARCH_AND_RESCUE, "small", "moderate", "moderate")).architecture is CEN

    def test_risk_monotonicity_on_fallback_chain(self):
        # raising failure probability to high never moves a non-table
        # context away from holonic
        for ctx in all_contexts():
            raised = replace(ctx, failure_probability=FailureProbability.HIGH)
            if in_table(raised):
                continue
            assert recommend(raised).architecture is HOL
            if recommend(ctx).architecture is HOL:
                assert recommend(raised).architecture is HOL


class TestClassifySize:
    def test_boundaries(self):
        params = EnergyModelParams()
        assert classify_size(13, params) is SizeClass.SMALL
        assert classify_size(14, params) is SizeClass.MEDIUM
        assert classify_size(41, params) is SizeClass.MEDIUM
        assert classify_size(42, params) is SizeClass.LARGE
        assert classify_size(100, params) is SizeClass.LARGE
        assert classify_size(0, params) is SizeClass.SMALL

    def test_negative_size_rejected(self):
        with pytest.raises(ValueError):
            classify_size(-1, EnergyModelParams())


class TestMissionContext:
    def test_requires_exactly_one_subject(self):
        with pytest.raises(ValueError):
            MissionContext(
                size_class=SizeClass.SMALL,
                comm_quality=CommQuality.GOOD,
                failure_probability=FailureProbability.LOW,
            )
        with pytest.raises(ValueError):
            MissionContext(
                scenario=Scenario.SEARCH_AND_RESCUE,
                status=Status.OVERLOAD,
                size_class=SizeClass.SMALL,
                comm_quality=CommQuality.GOOD,
                failure_probability=FailureProbability.LOW,
            )

    def test_document_round_trip(self):
        for ctx in all_contexts():
            assert parse_context(context_document(ctx)) == ctx


class StubBackend:
    def __init__(self, reply=None, error=None):
        self.reply = reply
        self.error = error
        self.calls = 0

    def propose(self, ctx):
        self.calls += 1
        if self.error is not None:
            raise self.error
        return self.reply


class TestDecide:
    def test_no_backend_is_rule_table(self):
        for ctx in list(all_contexts())[:20]:
            assert decide(ctx) == recommend(ctx)

    def test_wellformed_external_reply_accepted(self):
        ctx = make_context(Scenario.SEARCH_AND_RESCUE, "large", "low", "high")
        rec = decide(ctx, StubBackend(reply="holonic"))
        assert rec.architecture is HOL
        assert rec.source is RecommendationSource.EXTERNAL_MODEL
        assert rec.matched_rule == EXTERNAL

    def test_reply_normalization(self):
        ctx = make_context(Status.OVERLOAD, "large", "low", "high")
        rec = decide(ctx, StubBackend(reply="  HOLONIC \n"))
        assert rec.architecture is HOL
        assert rec.source is RecommendationSource.EXTERNAL_MODEL

    @pytest.mark.parametrize("reply", ["quantum", "", "holonic centralized", "42"])
    def test_schema_violation_falls_back(self, reply):
        ctx = make_context(Scenario.SEARCH_AND_RESCUE, "small", "good", "low")
        rec = decide(ctx, StubBackend(reply=reply))
        assert rec.architecture is recommend(ctx).architecture
        assert rec.source is RecommendationSource.RULE_TABLE
        assert "schema" in rec.rationale

    def test_failing_backend_extensionally_equals_recommend(self):
        backend = StubBackend(error=TimeoutError("deadline exceeded"))
        for ctx in all_contexts():
            rec = decide(ctx, backend)
            base = recommend(ctx)
            assert rec.architecture is base.architecture
            assert rec.matched_rule == base.matched_rule
            assert rec.source is RecommendationSource.RULE_TABLE


class TestRuleExport:
    def test_document_has_twelve_rows_and_chain(self):
        doc = rule_table_document()
        assert len(doc["rows"]) == 12
        assert len(doc["fallback_chain"]) == 5

    def test_export_file_matches_frozen_rows(self, tmp_path):
        path = tmp_path / "rules.json"
        export_rule_table(path)
        doc = json.loads(path.read_text())
        exported = {
            (row["subject"], row["size_class"], row["comm_quality"],
             row["failure_probability"]): row["architecture"]
            for row in doc["rows"]
        }
        for subject, size, comm, failure, arch in TABLE_ROWS:
            assert exported[(subject.value, size, comm, failure)] == arch.value

    def test_recommendation_document_round_trip(self):
        for ctx in list(all_contexts())[:30]:
            rec = recommend(ctx)
            assert parse_recommendation(recommendation_document(rec)) == rec
