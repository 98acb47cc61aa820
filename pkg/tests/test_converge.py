from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motzkinlab import (
    BoundaryMeasure,
    DistTable,
    RejectedInputError,
    theorem1_ladder,
    theorem2_ladder,
    tv_distance,
    xi_pmf,
)


def test_tv_examples():
    p = DistTable.from_mapping({(0,): F(1)})
    q = DistTable.from_mapping({(0,): F(1, 2), (1,): F(1, 2)})
    r = DistTable.from_mapping({(2,): F(1)})
    assert tv_distance(p, p) == 0
    assert tv_distance(p, r) == 1
    assert tv_distance(p, q) == F(1, 2)


@st.composite
def small_tables(draw):
    size = draw(st.integers(1, 4))
    support = draw(
        st.lists(st.integers(0, 5), min_size=size, max_size=size, unique=True)
    )
    masses = draw(
        st.lists(st.integers(1, 9), min_size=size, max_size=size)
    )
    total = sum(masses)
    return DistTable.from_mapping(
        {(s,): F(m, total) for s, m in zip(support, masses)}
    )


@settings(max_examples=60, deadline=None)
@given(small_tables(), small_tables(), small_tables())
def test_tv_is_a_metric(p, q, r):
    assert tv_distance(p, q) == tv_distance(q, p)
    assert 0 <= tv_distance(p, q) <= 1
    assert tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r)
    assert (tv_distance(p, q) == 0) == (p == q)


def test_degenerate_left_boundary_gives_zero_tv(delta0):
    report = theorem1_ladder(1, delta0, BoundaryMeasure.finite(1, 1), 0, [2, 3, 5])
    assert all(row.tv_left == 0 for row in report.rows)


def test_theorem1_ladder_decreases():
    ones = BoundaryMeasure.finite(1, 1)
    report = theorem1_ladder(1, ones, ones, 1, [4, 8, 16])
    assert all(report.verdicts.values())
    # symmetric model: both sides coincide exactly
    assert all(row.tv_left == row.tv_right for row in report.rows)


def test_theorem1_hypotheses_enforced():
    ones = BoundaryMeasure.finite(1, 1)
    with pytest.raises(RejectedInputError):
        theorem1_ladder(0, ones, ones, 1, [4, 8])
    with pytest.raises(RejectedInputError):
        theorem1_ladder(1, BoundaryMeasure.geometric(2), ones, 1, [4, 8])
    with pytest.raises(RejectedInputError):
        theorem1_ladder(1, ones, ones, 1, [8, 4])


def test_theorem1_geometric_boundaries():
    report = theorem1_ladder(
        1,
        BoundaryMeasure.geometric(F(1, 3)),
        BoundaryMeasure.geometric(F(1, 2)),
        1,
        [4, 8, 16],
    )
    assert all(report.verdicts.values())


def test_theorem2_ladder(delta0):
    report = theorem2_ladder(1, delta0, 2, 1, [12, 24, 48], tightness_cap=10)
    assert all(report.verdicts.values())
    assert report.extra_label == "tightness"
    for row in report.rows:
        assert 0 <= row.extra <= 1


def test_theorem2_critical_ratio_matches_critical_kernel(delta0):
    # at ratio one the tilted chain is the critical chain and the ladder
    # is still well defined and decreasing
    report = theorem2_ladder(1, delta0, 1, 1, [4, 8, 16])
    assert report.verdicts["tv_left_strictly_decreasing"]
    assert report.verdicts["tv_increments_strictly_decreasing"]


def test_theorem2_increment_column_targets_xi(delta0):
    from motzkinlab import ModelSpec, WeightConfig, right_fdd_law

    spec = ModelSpec(
        weights=WeightConfig.constant(1),
        alpha=delta0,
        beta=BoundaryMeasure.geometric(2),
        length=40,
    )
    anchored = right_fdd_law(spec, 1, anchored=True)
    assert tv_distance(anchored, xi_pmf(2, 1)) < F(1, 1000)


def test_theorem2_hypotheses_enforced(delta0):
    with pytest.raises(RejectedInputError):
        theorem2_ladder(1, delta0, F(1, 2), 1, [4, 8])
    with pytest.raises(RejectedInputError):
        theorem2_ladder(0, delta0, 2, 1, [4, 8])
    with pytest.raises(RejectedInputError):
        theorem2_ladder(1, BoundaryMeasure.geometric(F(2, 3)), 2, 1, [4, 8])


def test_report_serialization(delta0):
    report = theorem2_ladder(1, delta0, 2, 1, [4, 8])
    obj = report.to_json_obj()
    assert obj["kind"] == "geometric-end-regime"
    assert len(obj["rows"]) == 2
    assert obj["rows"][0]["tv_left"]["exact"]
    csv_text = report.to_csv_text()
    lines = csv_text.strip().split("\n")
    assert lines[0] == "L,tv_left,tv_right,tightness"
    assert len(lines) == 3
