import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simready.bench import (
    BenchReport,
    DEFAULT_KINEMATICS_WEIGHTS,
    DIMENSIONS,
    JudgeResponse,
    aggregate_kinematics,
    aggregate_report,
    alignment_from_tables,
    grade_to_score,
    human_alignment,
    load_judge_responses,
    method_summary_csv,
    parse_score_csv,
    report_csv,
    report_text,
    response_from_mapping,
    response_to_mapping,
    validate_judge,
)
from simready.errors import InvalidInputError

from asset_builders import simple_asset


def full_response(asset_id="a0", **overrides):
    fields = dict(
        asset_id=asset_id, clip=0.8, consistency_3d=70.0, visual_quality=4,
        judged_max_dim_m=1.8, freefall=60.0, waterdrop=58.0, affordance=71.0,
        prior_part=82.0, revealed_entity=74.0, global_coherence=81.0,
        description=39.0,
    )
    fields.update(overrides)
    return JudgeResponse(**fields)


class TestValidateJudge:
    def test_well_formed(self):
        assert validate_judge(full_response()) == []

    def test_grade_out_of_range(self):
        violations = validate_judge(full_response(visual_quality=6))
        assert any("visual_quality" in v for v in violations)

    def test_missing_kinematics_block(self):
        r = full_response(prior_part=None, revealed_entity=None,
                          global_coherence=None)
        violations = validate_judge(r, required_dimensions=("kinematics",))
        assert len(violations) == 3
        assert all("kinematics" in v for v in violations)

    def test_not_required_not_flagged(self):
        r = full_response(prior_part=None, revealed_entity=None,
                          global_coherence=None)
        assert validate_judge(r, required_dimensions=("geometry",)) == []

    def test_clip_range(self):
        violations = validate_judge(full_response(clip=1.4))
        assert any("clip" in v for v in violations)

    def test_nonpositive_dimension(self):
        violations = validate_judge(full_response(judged_max_dim_m=0.0))
        assert any("judged_max_dim_m" in v for v in violations)


class TestWireFormat:
    def test_round_trip(self):
        r = full_response()
        assert response_from_mapping(response_to_mapping(r)) == r

    def test_version_required(self):
        with pytest.raises(InvalidInputError):
            response_from_mapping({"asset_id": "x"})

    def test_file_with_array(self, tmp_path):
        payload = [response_to_mapping(full_response("a")),
                   response_to_mapping(full_response("b"))]
        p = tmp_path / "batch.json"
        p.write_text(json.dumps(payload))
        loaded = load_judge_responses(p)
        assert [r.asset_id for r in loaded] == ["a", "b"]


class TestAggregateKinematics:
    def test_equal_weights(self):
        assert aggregate_kinematics((80.0, 70.0, 90.0), (1.0, 1.0, 1.0)) == 80.0

    def test_default_style_weights(self):
        assert aggregate_kinematics((80.0, 70.0, 90.0), (0.4, 0.2, 0.4)) == 82.0

    def test_single_weight(self):
        assert aggregate_kinematics((80.0, 70.0, 90.0), (1.0, 0.0, 0.0)) == 80.0

    def test_zero_weights_rejected(self):
        with pytest.raises(InvalidInputError):
            aggregate_kinematics((1.0, 2.0, 3.0), (0.0, 0.0, 0.0))

    @settings(max_examples=40, deadline=None)
    @given(st.tuples(*[st.floats(0.0, 100.0, allow_nan=False)] * 3),
           st.tuples(*[st.floats(0.01, 10.0, allow_nan=False)] * 3),
           st.floats(0.1, 50.0, allow_nan=False))
    def test_weight_rescaling_invariance(self, scores, weights, c):
        base = aggregate_kinematics(scores, weights)
        scaled = aggregate_kinematics(scores, tuple(c * w for w in weights))
        assert scaled == pytest.approx(base, rel=1e-12)


class TestGradeMapping:
    def test_levels(self):
        assert [grade_to_score(g) for g in (1, 2, 3, 4, 5)] == \
            [0.0, 25.0, 50.0, 75.0, 100.0]

    def test_bad_grade(self):
        with pytest.raises(InvalidInputError):
            grade_to_score(0)


class TestAggregateReport:
    def asset_for(self, response):
        # judged dimension equal to asset max dimension -> scale score 100
        return simple_asset(scale_m=(1.2, 0.6, response.judged_max_dim_m))

    def test_perfect_scores(self):
        r = full_response(clip=0.9, consistency_3d=100.0, visual_quality=5,
                          freefall=100.0, waterdrop=100.0, affordance=100.0,
                          prior_part=100.0, revealed_entity=100.0,
                          global_coherence=100.0, description=100.0,
                          judged_max_dim_m=1.8)
        asset = simple_asset(scale_m=(1.2, 0.6, 1.8))
        report = aggregate_report([r], {"a0": asset})
        row = report.per_asset["a0"]
        for dim in DIMENSIONS:
            if dim == "clip":
                assert row[dim] == 0.9
            else:
                assert row[dim] == 100.0

    def test_two_assets_mean(self):
        r1 = full_response("a", affordance=60.0)
        r2 = full_response("b", affordance=80.0)
        assets = {"a": self.asset_for(r1), "b": self.asset_for(r2)}
        report = aggregate_report([r1, r2], assets)
        assert report.means["affordance"] == 70.0

    def test_unmatched_asset_id(self):
        r = full_response("ghost")
        with pytest.raises(InvalidInputError):
            aggregate_report([r], {"a0": self.asset_for(r)})

    def test_spreadsheet_oracle_batch(self):
        responses = [
            full_response("a1", clip=0.5, consistency_3d=50.0,
                          visual_quality=1, judged_max_dim_m=2.0,
                          freefall=10.0, waterdrop=30.0, affordance=40.0,
                          prior_part=60.0, revealed_entity=50.0,
                          global_coherence=70.0, description=20.0),
            full_response("a2", clip=0.7, consistency_3d=60.0,
                          visual_quality=3, judged_max_dim_m=1.0,
                          freefall=50.0, waterdrop=70.0, affordance=80.0,
                          prior_part=90.0, revealed_entity=80.0,
                          global_coherence=100.0, description=60.0),
        ]
        assets = {
            "a1": simple_asset(scale_m=(2.0, 1.0, 1.0)),  # judged 2.0 -> 100
            "a2": simple_asset(scale_m=(3.0, 1.0, 1.0)),  # judged 1.0 vs 3.0 -> 50
        }
        report = aggregate_report(responses, assets, weights=(0.4, 0.2, 0.4))
        # hand-computed rows
        assert report.per_asset["a1"]["visual_quality"] == 0.0
        assert report.per_asset["a1"]["material"] == 20.0
        assert report.per_asset["a1"]["kinematics"] == pytest.approx(62.0)
        assert report.per_asset["a1"]["scale"] == 100.0
        assert report.per_asset["a2"]["material"] == 60.0
        assert report.per_asset["a2"]["kinematics"] == pytest.approx(92.0)
        assert report.per_asset["a2"]["scale"] == 50.0
        assert report.means["scale"] == 75.0
        assert report.means["material"] == 40.0
        assert report.means["kinematics"] == pytest.approx(77.0)

    def test_order_invariance(self):
        r1, r2 = full_response("a"), full_response("b", affordance=10.0)
        assets = {"a": self.asset_for(r1), "b": self.asset_for(r2)}
        fwd = aggregate_report([r1, r2], assets)
        rev = aggregate_report([r2, r1], assets)
        assert fwd.means == rev.means
        assert fwd.per_asset == rev.per_asset

    def test_means_within_extremes(self):
        r1 = full_response("a", description=10.0)
        r2 = full_response("b", description=90.0)
        assets = {"a": self.asset_for(r1), "b": self.asset_for(r2)}
        report = aggregate_report([r1, r2], assets)
        for dim in DIMENSIONS:
            values = [row[dim] for row in report.per_asset.values()]
            assert min(values) <= report.means[dim] <= max(values)

    def test_invalid_response_rejected(self):
        r = full_response(clip=2.0)
        with pytest.raises(InvalidInputError):
            aggregate_report([r], {"a0": self.asset_for(r)})


class TestHumanAlignment:
    def test_identical_rankings(self):
        rho, r = human_alignment([1.0, 2.0, 3.0], [10.0, 20.0, 30.0])
        assert rho == 1.0
        assert r == pytest.approx(1.0, abs=1e-12)

    def test_reversed_rankings(self):
        rho, r = human_alignment([1.0, 2.0, 3.0], [9.0, 5.0, 1.0])
        assert rho == -1.0
        assert r <= 0.0

    def test_five_methods_two_swaps(self):
        bench = [1.0, 2.0, 3.0, 4.0, 5.0]
        human = [2.0, 1.0, 3.0, 5.0, 4.0]
        rho, _ = human_alignment(bench, human)
        assert rho == pytest.approx(0.8, abs=1e-12)


class TestTables:
    def make_report(self):
        r1, r2 = full_response("a"), full_response("b", description=50.0)
        assets = {
            "a": simple_asset(scale_m=(1.2, 0.6, 1.8)),
            "b": simple_asset(scale_m=(1.2, 0.6, 1.8)),
        }
        return aggregate_report([r1, r2], assets)

    def test_csv_layout(self):
        lines = report_csv(self.make_report()).strip().splitlines()
        assert lines[0] == "asset_id," + ",".join(DIMENSIONS)
        assert lines[1].startswith("a,")
        assert lines[-1].startswith("mean,")

    def test_text_records_weights(self):
        text = report_text(self.make_report())
        assert "kinematics weights" in text

    def test_summary_round_trips_through_parser(self):
        report = self.make_report()
        table = parse_score_csv(method_summary_csv(report, "ours"))
        assert table["kinematics"]["ours"] == pytest.approx(
            report.means["kinematics"], rel=1e-5)

    def test_alignment_from_tables(self):
        bench_rows = ["method,dimension,score"]
        human_rows = ["method,dimension,score"]
        bench_scores = [1.0, 2.0, 3.0, 4.0, 5.0]
        human_scores = [2.0, 1.0, 3.0, 5.0, 4.0]
        for i, (b, h) in enumerate(zip(bench_scores, human_scores)):
            bench_rows.append(f"m{i},geometry,{b}")
            human_rows.append(f"m{i},geometry,{h}")
        result = alignment_from_tables(
            parse_score_csv("\n".join(bench_rows)),
            parse_score_csv("\n".join(human_rows)))
        rho, r = result["geometry"]
        assert rho == pytest.approx(0.8, abs=1e-12)
        assert -1.0 <= r <= 1.0

    def test_weights_recorded_normalized(self):
        report = aggregate_report(
            [full_response()], {"a0": simple_asset(scale_m=(1.2, 0.6, 1.8))},
            weights=(4.0, 2.0, 4.0))
        assert report.kinematics_weights == pytest.approx(
            DEFAULT_KINEMATICS_WEIGHTS)
