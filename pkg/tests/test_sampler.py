import io
from fractions import Fraction as F

import pytest

from motzkinlab import (
    BoundaryMeasure,
    ModelSpec,
    MotzkinPath,
    RejectedInputError,
    WeightConfig,
    build_backward_table,
    empirical_fdd,
    end_weighted_sums,
    left_fdd_law,
    read_binary,
    sample_path,
    sample_paths,
    tv_distance,
    write_binary,
)
from motzkinlab.sampler import CounterStream, _PathDrawPlan


def test_backward_boundary_row(unit_weights, delta0):
    spec = ModelSpec(weights=unit_weights, alpha=delta0, beta=delta0, length=3)
    table = build_backward_table(spec)
    assert table.rows[3][0] == 1
    assert all(v == 0 for v in table.rows[3][1:])


def test_backward_matches_engine_sums(delta0):
    weights = WeightConfig.constant(F(1, 2))
    beta = BoundaryMeasure.finite(1, 0, 2)
    for length in range(1, 7):
        spec = ModelSpec(
            weights=weights, alpha=BoundaryMeasure.finite(1, 1), beta=beta, length=length
        )
        table = build_backward_table(spec)
        cap = table.start_cap()
        sums = end_weighted_sums(weights, beta, length, cap)
        assert table.rows[0][: cap + 1] == sums


def test_backward_free_region_pattern():
    # far from the floor, with unit geometric end weights every step
    # contributes the full trinomial factor 2 + sigma
    sigma = F(1)
    spec = ModelSpec(
        weights=WeightConfig.constant(sigma),
        alpha=BoundaryMeasure.finite(*([0] * 8 + [1])),
        beta=BoundaryMeasure.geometric(1),
        length=4,
    )
    table = build_backward_table(spec)
    for k in range(5):
        remaining = 4 - k
        for n in range(4, 9):
            assert table.rows[k][n] == (2 + sigma) ** remaining


def test_conditional_rows_sum_to_one(unit_weights):
    spec = ModelSpec(
        weights=unit_weights,
        alpha=BoundaryMeasure.finite(1, 1),
        beta=BoundaryMeasure.finite(1, 1),
        length=5,
    )
    table = build_backward_table(spec)
    for k in range(spec.length):
        for n in range(table.start_cap() + k + 1):
            if table.rows[k][n] == 0:
                continue
            mass = F(0)
            if n >= 1:
                mass += spec.weights.down_at(n) * table.rows[k + 1][n - 1]
            mass += spec.weights.level_at(n) * table.rows[k + 1][n]
            if n + 1 <= table.bound:
                mass += spec.weights.up_at(n) * table.rows[k + 1][n + 1]
            assert mass == table.rows[k][n]


def test_single_admissible_path(delta0):
    spec = ModelSpec(
        weights=WeightConfig.constant(F(1, 3)), alpha=delta0, beta=delta0, length=1
    )
    table = build_backward_table(spec)
    for i in range(20):
        assert sample_path(table, delta0, 42, i).heights == (0, 0)


def test_sampler_law_exact_by_symbolic_product(unit_weights):
    # multiply the exact conditional probabilities along every admissible
    # path and compare with the path law atom by atom
    from conftest import brute_path_law, iter_paths

    alpha = BoundaryMeasure.finite(1, 2)
    spec = ModelSpec(
        weights=unit_weights, alpha=alpha, beta=BoundaryMeasure.finite(1, 1), length=4
    )
    table = build_backward_table(spec)
    plan = _PathDrawPlan(table, alpha)
    start_total = sum(
        alpha.weight(m) * table.rows[0][m] for m in range(table.start_cap() + 1)
    )
    law = brute_path_law(spec)
    for m0 in range(2):
        for heights in iter_paths(4, m0):
            prob = alpha.weight(m0) * table.rows[0][m0] / start_total
            for k in range(4):
                here, nxt = heights[k], heights[k + 1]
                if table.rows[k][here] == 0:
                    prob = F(0)
                    break
                if nxt == here - 1:
                    w = spec.weights.down_at(here)
                elif nxt == here:
                    w = spec.weights.level_at(here)
                else:
                    w = spec.weights.up_at(here)
                prob *= w * table.rows[k + 1][nxt] / table.rows[k][here]
            assert prob == law.get(heights, F(0))


def test_two_path_frequencies(unit_weights, delta0):
    spec = ModelSpec(weights=unit_weights, alpha=delta0, beta=delta0, length=2)
    table = build_backward_table(spec)
    paths = sample_paths(table, delta0, 2024, 20000)
    count_up = sum(1 for p in paths if p.heights == (0, 1, 0))
    assert all(p.heights in ((0, 0, 0), (0, 1, 0)) for p in paths)
    # exact probability 1/2; 3 binomial standard errors ~ 0.0106
    assert abs(count_up / 20000 - 0.5) < 0.011


def test_determinism_and_stream_separation(unit_weights, delta0):
    spec = ModelSpec(
        weights=unit_weights, alpha=delta0, beta=BoundaryMeasure.geometric(1), length=16
    )
    table = build_backward_table(spec)
    a = sample_path(table, delta0, 99, 7)
    b = sample_path(table, delta0, 99, 7)
    assert a == b
    many = sample_paths(table, delta0, 99, 50)
    assert len(set(many)) > 1


def test_counter_stream_reproducible():
    s1 = CounterStream(b"tag:", 1, 2)
    s2 = CounterStream(b"tag:", 1, 2)
    assert [s1.bits(64) for _ in range(4)] == [s2.bits(64) for _ in range(4)]
    s3 = CounterStream(b"tag:", 1, 3)
    assert s3.bits(256) != CounterStream(b"tag:", 1, 2).bits(256)


def test_empirical_fdd(unit_weights, delta0):
    single = [MotzkinPath((0, 1, 1))]
    table = empirical_fdd(single, (0, 2))
    assert table.prob((0, 1)) == 1
    with pytest.raises(RejectedInputError):
        empirical_fdd([], (0,))
    with pytest.raises(RejectedInputError):
        empirical_fdd(single, (5,))
    paths = [MotzkinPath((0, 1, 1)), MotzkinPath((0, 0, 1)), MotzkinPath((0, 1, 0))]
    freq = empirical_fdd(paths, (1,))
    assert freq.prob((1,)) == F(2, 3)
    assert sum(freq.probs) == 1


def test_empirical_close_to_exact(unit_weights):
    ones = BoundaryMeasure.finite(1, 1)
    spec = ModelSpec(weights=unit_weights, alpha=ones, beta=ones, length=16)
    table = build_backward_table(spec)
    paths = sample_paths(table, ones, 5, 20000)
    exact = left_fdd_law(spec, 1)
    assert tv_distance(empirical_fdd(paths, (0, 1)), exact) < F(2, 100)


def test_binary_round_trip(unit_weights, delta0):
    spec = ModelSpec(weights=unit_weights, alpha=delta0, beta=delta0, length=6)
    table = build_backward_table(spec)
    paths = sample_paths(table, delta0, 11, 37)
    buf = io.BytesIO()
    write_binary(paths, buf)
    buf.seek(0)
    assert read_binary(buf) == paths
    assert buf.getvalue()[:8] == (6).to_bytes(4, "little") + (37).to_bytes(4, "little")
