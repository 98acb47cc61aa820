"""Total-variation ladders tying exact finite-length laws to their limit
chains.

The limit theorems are rate-free, so these diagnostics assert orderings
along dyadic length ladders rather than rates: every row is an exact
rational computed from the engine and the limit chains, hence
reproducible bit for bit; drift detection against golden values replaces
rate assumptions.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .engine import (
    DEFAULT_TAIL_EPS,
    DistTable,
    left_fdd_law,
    prefix_with_endpoint_law,
    right_fdd_law,
)
from .limit_chains import (
    BoundaryKernel,
    QDeformed,
    SizeBiased,
    chain_fdd_law,
    initial_law,
    xi_walk_law,
)
from .model import (
    BoundaryMeasure,
    ModelSpec,
    RationalLike,
    RejectedInputError,
    WeightConfig,
    as_fraction,
)

_ZERO = Fraction(0)


def tv_distance(p: DistTable, q: DistTable) -> Fraction:
    """Total variation distance, exactly: half the l1 distance over the
    union of supports, counting each table's truncated tail as an atom of
    its own (so two truncations of the same law differ by at most the
    tail bound)."""
    keys = set(p.support) | set(q.support)
    total = sum((abs(p.prob(k) - q.prob(k)) for k in keys), _ZERO)
    total += abs(p.tail - q.tail)
    return total / 2


@dataclass(frozen=True)
class LadderRow:
    length: int
    tv_left: Fraction
    tv_right: Fraction
    extra: Fraction


@dataclass(frozen=True)
class LadderReport:
    """Rows of exact diagnostics along a length ladder.

    ``extra`` holds the third column: the end-point independence gap for
    the finite-moment regime, the bounded-end-height probability for the
    geometric regime.  Verdicts record strict-decrease orderings.
    """

    kind: str
    params: dict
    extra_label: str
    rows: tuple[LadderRow, ...]
    verdicts: dict[str, bool]

    def to_json_obj(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "extra_label": self.extra_label,
            "rows": [
                {
                    "L": row.length,
                    "tv_left": {"float": float(row.tv_left), "exact": str(row.tv_left)},
                    "tv_right": {"float": float(row.tv_right), "exact": str(row.tv_right)},
                    self.extra_label: {"float": float(row.extra), "exact": str(row.extra)},
                }
                for row in self.rows
            ],
            "verdicts": self.verdicts,
        }

    def to_csv_text(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["L", "tv_left", "tv_right", self.extra_label])
        for row in self.rows:
            writer.writerow(
                [row.length, float(row.tv_left), float(row.tv_right), float(row.extra)]
            )
        return buf.getvalue()


def _strictly_decreasing(values: Sequence[Fraction]) -> bool:
    return all(a > b for a, b in zip(values, values[1:]))


def _check_first_moment(measure: BoundaryMeasure, name: str) -> None:
    if measure.is_geometric and measure.ratio >= 1:
        raise RejectedInputError(
            f"{name} must have a finite first moment (geometric ratio < 1)"
        )


def theorem1_ladder(
    sigma: RationalLike,
    alpha: BoundaryMeasure,
    beta: BoundaryMeasure,
    k: int,
    lengths: Sequence[int],
    tail_eps: Fraction = DEFAULT_TAIL_EPS,
) -> LadderReport:
    """Finite-first-moment regime diagnostics.

    Per length: total variation between the exact law of the first k+1
    heights and the critical chain started size-biased from alpha; the
    same from the end point (plain reversed heights) against the chain
    started size-biased from beta; and the independence gap, the distance
    between the exact joint law of the two end heights and the product of
    the two limit marginals.
    """
    sigma = as_fraction(sigma)
    if sigma <= 0:
        raise RejectedInputError("this regime requires sigma > 0")
    _check_first_moment(alpha, "alpha")
    _check_first_moment(beta, "beta")
    if k < 0:
        raise RejectedInputError("k must be non-negative")
    if list(lengths) != sorted(set(lengths)) or not lengths:
        raise RejectedInputError("lengths must be strictly increasing and non-empty")
    if lengths[0] < max(k, 1):
        raise RejectedInputError("shortest length must cover k")

    weights = WeightConfig.constant(sigma)
    kernel = BoundaryKernel.critical(sigma)
    init_left = initial_law(SizeBiased(alpha), tail_eps=tail_eps)
    init_right = initial_law(SizeBiased(beta), tail_eps=tail_eps)
    limit_left = chain_fdd_law(kernel, init_left, k)
    limit_right = chain_fdd_law(kernel, init_right, k)
    limit_pair = init_left.product(init_right)

    rows = []
    for length in lengths:
        spec = ModelSpec(weights=weights, alpha=alpha, beta=beta, length=length)
        tv_left = tv_distance(left_fdd_law(spec, k, tail_eps), limit_left)
        tv_right = tv_distance(
            right_fdd_law(spec, k, anchored=False, tail_eps=tail_eps), limit_right
        )
        gap = tv_distance(prefix_with_endpoint_law(spec, 0, tail_eps), limit_pair)
        rows.append(LadderRow(length=length, tv_left=tv_left, tv_right=tv_right, extra=gap))

    verdicts = {
        "tv_left_strictly_decreasing": _strictly_decreasing([r.tv_left for r in rows]),
        "tv_right_strictly_decreasing": _strictly_decreasing([r.tv_right for r in rows]),
        "independence_gap_strictly_decreasing": _strictly_decreasing(
            [r.extra for r in rows]
        ),
    }
    return LadderReport(
        kind="finite-moment-regime",
        params={
            "sigma": str(sigma),
            "alpha": alpha.serialize(),
            "beta": beta.serialize(),
            "k": k,
            "lengths": list(lengths),
        },
        extra_label="independence_gap",
        rows=tuple(rows),
        verdicts=verdicts,
    )


def theorem2_ladder(
    sigma: RationalLike,
    alpha: BoundaryMeasure,
    rho1: RationalLike,
    k: int,
    lengths: Sequence[int],
    tightness_cap: int = 10,
    tail_eps: Fraction = DEFAULT_TAIL_EPS,
) -> LadderReport:
    """Geometric-end-weight regime diagnostics (ratio >= 1).

    Per length: total variation between the exact law of the first k+1
    heights and the tilted chain started from the u-weighted deformation
    of alpha; between the end-anchored increment vector and the law of
    the first k partial sums of i.i.d. steps; and the probability that
    the end height stays below the cap (which drains away: the end point
    is not tight).
    """
    sigma = as_fraction(sigma)
    rho1 = as_fraction(rho1)
    if sigma <= 0:
        raise RejectedInputError("this regime requires sigma > 0")
    if rho1 < 1:
        raise RejectedInputError("this regime requires rho1 >= 1")
    if alpha.is_geometric and alpha.ratio * rho1 >= 1:
        raise RejectedInputError("geometric alpha needs ratio * rho1 < 1")
    if k < 1:
        raise RejectedInputError("k must be at least 1")
    if list(lengths) != sorted(set(lengths)) or not lengths:
        raise RejectedInputError("lengths must be strictly increasing and non-empty")
    if lengths[0] < k:
        raise RejectedInputError("shortest length must cover k")

    weights = WeightConfig.constant(sigma)
    beta = BoundaryMeasure.geometric(rho1)
    kernel = BoundaryKernel.tilted(rho1, sigma)
    init = initial_law(QDeformed(alpha, rho1), tail_eps=tail_eps)
    limit_left = chain_fdd_law(kernel, init, k)
    limit_incr = xi_walk_law(rho1, sigma, k)

    rows = []
    for length in lengths:
        spec = ModelSpec(weights=weights, alpha=alpha, beta=beta, length=length)
        tv_left = tv_distance(left_fdd_law(spec, k, tail_eps), limit_left)
        tv_incr = tv_distance(
            right_fdd_law(spec, k, anchored=True, tail_eps=tail_eps), limit_incr
        )
        end_law = right_fdd_law(spec, 0, tail_eps=tail_eps)
        bounded = sum(
            (p for key, p in zip(end_law.support, end_law.probs) if key[0] <= tightness_cap),
            _ZERO,
        )
        rows.append(
            LadderRow(length=length, tv_left=tv_left, tv_right=tv_incr, extra=bounded)
        )

    verdicts = {
        "tv_left_strictly_decreasing": _strictly_decreasing([r.tv_left for r in rows]),
        "tv_increments_strictly_decreasing": _strictly_decreasing(
            [r.tv_right for r in rows]
        ),
        "tightness_strictly_decreasing": _strictly_decreasing([r.extra for r in rows]),
    }
    return LadderReport(
        kind="geometric-end-regime",
        params={
            "sigma": str(sigma),
            "alpha": alpha.serialize(),
            "rho1": str(rho1),
            "k": k,
            "lengths": list(lengths),
            "tightness_cap": tightness_cap,
        },
        extra_label="tightness",
        rows=tuple(rows),
        verdicts=verdicts,
    )
