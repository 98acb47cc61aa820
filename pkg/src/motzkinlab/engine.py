"""Exact transfer-operator computations for weighted Motzkin paths.

The central object is the table of weighted path counts W[L][m][n]: the
total edge weight of all length-L paths from height m to height n.  It
satisfies the one-step recursion obtained by peeling the first edge,

    W[L+1][m][n] = up[m] * W[L][m+1][n]
                 + level[m] * W[L][m][n]
                 + down[m] * W[L][m-1][n]      (last term absent at m = 0),

with the L = 1 base case W[1][m][m-1] = down[m], W[1][m][m] = level[m],
W[1][m][m+1] = up[m].  Everything here is exact rational arithmetic;
floats appear only in exported diagnostic columns.

Infinite (geometric) boundary measures are handled without loss: sums
over start heights split at the path length, above which no path feels
the floor at zero and the trinomial closed form applies, so geometric
tails are summed exactly.  Where a finite table must truncate an
infinite-support law, the discarded mass is itself an exact rational and
is reported on the table.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence, TextIO

from .model import (
    BoundaryMeasure,
    ModelSpec,
    MotzkinPath,
    RationalLike,
    RejectedInputError,
    WeightConfig,
    as_fraction,
    path_weight,
)

#: Default certified bound on truncated tail mass, relative to total mass.
DEFAULT_TAIL_EPS = Fraction(1, 10**30)

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# Weight tables


@dataclass(frozen=True)
class WeightTable:
    """Dense (bound+1) x (bound+1) table of weighted path counts.

    Entry (m, n) is the total weight of length-`length` paths from m to n
    that stay within [0, bound].  Whenever the ceiling is unreachable
    (every path from m stays below m + length), the entry equals the
    unrestricted count.
    """

    length: int
    bound: int
    entries: tuple[tuple[Fraction, ...], ...]

    def value(self, m: int, n: int) -> Fraction:
        if 0 <= m <= self.bound and 0 <= n <= self.bound:
            return self.entries[m][n]
        return _ZERO

    def to_csv(self, stream: TextIO) -> None:
        """Write all entries as rows "m,n,value" with exact rationals."""
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["m", "n", "value"])
        for m in range(self.bound + 1):
            for n in range(self.bound + 1):
                writer.writerow([m, n, str(self.entries[m][n])])


def weight_table(weights: WeightConfig, length: int, bound: int) -> WeightTable:
    """Compute the weighted path-count table by the first-edge recursion.

    Cost is O(bound**2 * length) rational operations; tables are dense
    because desk-scale bounds make sparsity bookkeeping pointless.
    """
    if length < 1:
        raise RejectedInputError("length must be at least 1")
    if bound < length:
        raise RejectedInputError("bound < length would corrupt low entries")
    size = bound + 1
    table = [[_ZERO] * size for _ in range(size)]
    for m in range(size):
        table[m][m] = weights.level_at(m)
        if m >= 1:
            table[m][m - 1] = weights.down_at(m)
        if m + 1 < size:
            table[m][m + 1] = weights.up_at(m)
    for _ in range(length - 1):
        nxt = [[_ZERO] * size for _ in range(size)]
        for m in range(size):
            a = weights.up_at(m)
            b = weights.level_at(m)
            row_up = table[m + 1] if m + 1 < size else None
            row_mid = table[m]
            row_down = table[m - 1] if m >= 1 else None
            c = weights.down_at(m) if m >= 1 else _ZERO
            out = nxt[m]
            for n in range(size):
                val = b * row_mid[n]
                if row_up is not None:
                    val += a * row_up[n]
                if row_down is not None:
                    val += c * row_down[n]
                out[n] = val
        table = nxt
    return WeightTable(length=length, bound=bound, entries=tuple(tuple(r) for r in table))


def free_weight(length: int, k: int, sigma: RationalLike) -> Fraction:
    """Total weight of unconstrained trinomial walks with displacement k.

    Equals the path-count table entry (m, m+k) for every m >= length,
    where the floor at zero is out of reach.
    """
    if length < 0:
        raise RejectedInputError("length must be non-negative")
    if abs(k) > length:
        return _ZERO
    s = as_fraction(sigma)
    total = _ZERO
    for ups in range(max(0, k), (length + k) // 2 + 1):
        downs = ups - k
        flats = length - ups - downs
        if flats < 0:
            continue
        coeff = math.comb(length, ups) * math.comb(length - ups, downs)
        total += coeff * s**flats
    return total


def _free_end_sum(sigma: Fraction, ratio: Fraction, length: int) -> Fraction:
    """Closed form of sum_k free_weight(length, k, sigma) * ratio**k.

    The trinomial generating function: (ratio + sigma + 1/ratio)**length.
    """
    return (ratio + sigma + 1 / ratio) ** length


# ---------------------------------------------------------------------------
# Boundary-weighted height profiles (vector DP)


def _step_toward_start(weights: WeightConfig, vec: list[Fraction]) -> list[Fraction]:
    # Peel one edge at the start: out[n] = a_n v[n+1] + b_n v[n] + c_n v[n-1].
    size = len(vec)
    out = [_ZERO] * size
    for n in range(size):
        val = weights.level_at(n) * vec[n]
        if n + 1 < size:
            val += weights.up_at(n) * vec[n + 1]
        if n >= 1:
            val += weights.down_at(n) * vec[n - 1]
        out[n] = val
    return out


def _step_toward_end(weights: WeightConfig, vec: list[Fraction]) -> list[Fraction]:
    # Append one edge at the end: out[n] = a_{n-1} v[n-1] + b_n v[n] + c_{n+1} v[n+1].
    size = len(vec)
    out = [_ZERO] * size
    for n in range(size):
        val = weights.level_at(n) * vec[n]
        if n >= 1:
            val += weights.up_at(n - 1) * vec[n - 1]
        if n + 1 < size:
            val += weights.down_at(n + 1) * vec[n + 1]
        out[n] = val
    return out


def _measure_vector(measure: BoundaryMeasure, size: int) -> list[Fraction]:
    return [measure.weight(n) for n in range(size)]


def end_weighted_sums(
    weights: WeightConfig, measure: BoundaryMeasure, length: int, max_height: int
) -> tuple[Fraction, ...]:
    """For each start height m <= max_height, the total weight of length-
    `length` paths from m, with the end height n weighted by measure(n).

    Exact for every returned entry: the internal height ceiling sits at
    max_height + length, which no contributing path can touch.
    """
    if length < 0:
        raise RejectedInputError("length must be non-negative")
    bound = max_height + length
    if measure.max_support is not None:
        bound = max(bound, measure.max_support)
    vec = _measure_vector(measure, bound + 1)
    for _ in range(length):
        vec = _step_toward_start(weights, vec)
    return tuple(vec[: max_height + 1])


def start_weighted_sums(
    weights: WeightConfig, measure: BoundaryMeasure, length: int, max_height: int
) -> tuple[Fraction, ...]:
    """For each end height n <= max_height, the total weight of length-
    `length` paths arriving at n, start heights weighted by measure.

    Exact for every returned entry; contributions come only from starts
    within distance `length` of n, all inside the internal ceiling.
    """
    if length < 0:
        raise RejectedInputError("length must be non-negative")
    bound = max_height + length
    if measure.max_support is not None:
        bound = max(bound, measure.max_support)
    vec = _measure_vector(measure, bound + 1)
    for _ in range(length):
        vec = _step_toward_end(weights, vec)
    return tuple(vec[: max_height + 1])


# ---------------------------------------------------------------------------
# Normalization and truncation control


def _geometric_start_tail(spec: ModelSpec, cap: int) -> Fraction:
    """Exact unnormalized mass of start heights above `cap` (cap >= length - 1).

    Above the path length the floor is invisible, so the inner sum over
    end heights is the trinomial closed form and the outer sum is a
    geometric series; both are exact.
    """
    rho0 = spec.alpha.ratio
    rho1 = spec.beta.ratio
    sigma = spec.sigma
    if cap < spec.length - 1:
        raise RejectedInputError("tail split needs cap >= length - 1")
    r = rho0 * rho1
    return _free_end_sum(sigma, rho1, spec.length) * r ** (cap + 1) / (1 - r)


def normalization_constant(spec: ModelSpec) -> Fraction:
    """Total weighted mass of the path ensemble, exactly.

    For geometric alpha the sum over start heights splits at the path
    length: below it, exact vector sums; from it on, the closed-form
    geometric tail.  Rejects ensembles of zero mass (possible when level
    weights vanish and boundary parities are incompatible).
    """
    L = spec.length
    if not spec.alpha.is_geometric:
        cap = spec.alpha.max_support
        sums = end_weighted_sums(spec.weights, spec.beta, L, cap)
        total = sum(
            (spec.alpha.weight(m) * sums[m] for m in range(cap + 1)), _ZERO
        )
    else:
        sums = end_weighted_sums(spec.weights, spec.beta, L, L - 1)
        total = sum(
            (spec.alpha.weight(m) * sums[m] for m in range(L)), _ZERO
        )
        total += _geometric_start_tail(spec, L - 1)
    if total <= 0:
        raise RejectedInputError("path ensemble has zero total mass")
    return total


def initial_height_cap(spec: ModelSpec, tail_eps: Fraction = DEFAULT_TAIL_EPS) -> int:
    """Largest start height that exact enumerations keep.

    Finite alpha: its max support (nothing is discarded).  Geometric
    alpha: the least cap >= length whose certified tail mass is below
    tail_eps of the total.
    """
    if not spec.alpha.is_geometric:
        return spec.alpha.max_support
    total = normalization_constant(spec)
    budget = tail_eps * total
    r = spec.alpha.ratio * spec.beta.ratio
    base = _geometric_start_tail(spec, spec.length)
    # The tail at cap scales the base value by r**(cap - length); start
    # from a float estimate, then settle exactly.
    cap = spec.length
    ratio = float(budget / base) if base > 0 else 1.0
    if 0 < ratio < 1:
        cap += max(0, math.ceil(math.log(ratio) / math.log(float(r))))
    while _geometric_start_tail(spec, cap) >= budget:
        cap += 1
    while cap > spec.length and _geometric_start_tail(spec, cap - 1) < budget:
        cap -= 1
    return cap


def _end_height_cap(spec: ModelSpec, tail_eps: Fraction) -> int:
    """Largest end height kept by end-point enumerations (mirror of
    initial_height_cap; exact-tail certification uses the same split)."""
    if not spec.alpha.is_geometric:
        return spec.alpha.max_support + spec.length
    total = normalization_constant(spec)
    budget = tail_eps * total
    rho0, rho1 = spec.alpha.ratio, spec.beta.ratio
    sigma = spec.sigma
    r = rho0 * rho1

    def tail_bound(cap: int) -> Fraction:
        # start_weighted_sums(n) <= rho0**n * (rho0 + sigma + 1/rho0)**L for
        # all n: the floor only removes weight.  Geometric sum above cap.
        return _free_end_sum(sigma, rho0, spec.length) * r ** (cap + 1) / (1 - r)

    cap = spec.length
    base = tail_bound(cap)
    ratio = float(budget / base) if base > 0 else 1.0
    if 0 < ratio < 1:
        cap += max(0, math.ceil(math.log(ratio) / math.log(float(r))))
    while tail_bound(cap) >= budget:
        cap += 1
    while cap > spec.length and tail_bound(cap - 1) < budget:
        cap -= 1
    return cap


# ---------------------------------------------------------------------------
# Probability tables


@dataclass(frozen=True)
class DistTable:
    """Finite exact probability table over integer tuples.

    ``tail`` is the certified mass of atoms outside the table (exactly
    zero unless an infinite-support law was truncated); atom
    probabilities are true probabilities, so sum(probs) + tail == 1
    holds exactly.
    """

    support: tuple[tuple[int, ...], ...]
    probs: tuple[Fraction, ...]
    tail: Fraction = _ZERO

    def __post_init__(self) -> None:
        if len(self.support) != len(self.probs):
            raise RejectedInputError("support and probabilities differ in length")
        if not self.support:
            raise RejectedInputError("empty probability table")
        arity = len(self.support[0])
        if any(len(key) != arity for key in self.support):
            raise RejectedInputError("support tuples must share one arity")
        if len(set(self.support)) != len(self.support):
            raise RejectedInputError("support entries must be distinct")
        if any(p < 0 for p in self.probs) or self.tail < 0:
            raise RejectedInputError("probabilities must be non-negative")
        if sum(self.probs) + self.tail != 1:
            raise RejectedInputError("probabilities and tail must sum to one")
        if list(self.support) != sorted(self.support):
            raise RejectedInputError("support must be sorted")
        object.__setattr__(self, "_index", dict(zip(self.support, self.probs)))

    @classmethod
    def from_mapping(
        cls, mapping: dict[tuple[int, ...], Fraction], tail: Fraction = _ZERO
    ) -> "DistTable":
        items = sorted((k, p) for k, p in mapping.items() if p != 0)
        return cls(
            support=tuple(k for k, _ in items),
            probs=tuple(p for _, p in items),
            tail=tail,
        )

    def prob(self, key: tuple[int, ...]) -> Fraction:
        return self._index.get(tuple(key), _ZERO)

    def arity(self) -> int:
        return len(self.support[0])

    def marginal(self, coords: Sequence[int]) -> "DistTable":
        """Joint law of the selected coordinates (tail carried over)."""
        out: dict[tuple[int, ...], Fraction] = {}
        for key, p in zip(self.support, self.probs):
            sub = tuple(key[i] for i in coords)
            out[sub] = out.get(sub, _ZERO) + p
        return DistTable.from_mapping(out, tail=self.tail)

    def map_support(
        self, fn: Callable[[tuple[int, ...]], tuple[int, ...]]
    ) -> "DistTable":
        out: dict[tuple[int, ...], Fraction] = {}
        for key, p in zip(self.support, self.probs):
            new = fn(key)
            out[new] = out.get(new, _ZERO) + p
        return DistTable.from_mapping(out, tail=self.tail)

    def product(self, other: "DistTable") -> "DistTable":
        """Independent product; supports concatenate, tails combine."""
        out: dict[tuple[int, ...], Fraction] = {}
        for k1, p1 in zip(self.support, self.probs):
            for k2, p2 in zip(other.support, other.probs):
                out[k1 + k2] = p1 * p2
        tail = self.tail + other.tail - self.tail * other.tail
        return DistTable.from_mapping(out, tail=tail)

    def to_json_atoms(self) -> list[dict]:
        return [
            {"support": list(key), "prob": str(p), "prob_float": float(p)}
            for key, p in zip(self.support, self.probs)
        ]


# ---------------------------------------------------------------------------
# Finite-dimensional laws


def _prefix_edge_weight(weights: WeightConfig, here: int, nxt: int) -> Fraction:
    if nxt == here + 1:
        return weights.up_at(here)
    if nxt == here:
        return weights.level_at(here)
    return weights.down_at(here)


def _iter_prefixes(
    spec: ModelSpec, k: int, start_cap: int
) -> Iterator[tuple[tuple[int, ...], Fraction]]:
    """All (gamma_0..gamma_k) tuples with start weight alpha * edge weights."""
    stack: list[tuple[tuple[int, ...], Fraction]] = []
    for m0 in range(start_cap + 1):
        w0 = spec.alpha.weight(m0)
        if w0 > 0:
            stack.append(((m0,), w0))
    while stack:
        prefix, w = stack.pop()
        if len(prefix) == k + 1:
            yield prefix, w
            continue
        here = prefix[-1]
        for nxt in (here - 1, here, here + 1):
            if nxt < 0:
                continue
            step = _prefix_edge_weight(spec.weights, here, nxt)
            if step > 0:
                stack.append((prefix + (nxt,), w * step))


def left_fdd_law(
    spec: ModelSpec, k: int, tail_eps: Fraction = DEFAULT_TAIL_EPS
) -> DistTable:
    """Exact joint law of (gamma_0, ..., gamma_k) under the path ensemble.

    Atoms are alpha(m0) * prefix weight * (weight of continuations of
    length L-k from m_k, end-weighted by beta), normalized.  For
    geometric alpha the start height is capped with certified tail mass
    below tail_eps; the discarded mass is reported exactly on the table.
    """
    if not 0 <= k <= spec.length:
        raise RejectedInputError("need 0 <= k <= length")
    start_cap = initial_height_cap(spec, tail_eps)
    sums = end_weighted_sums(spec.weights, spec.beta, spec.length - k, start_cap + k)
    total = normalization_constant(spec)
    atoms: dict[tuple[int, ...], Fraction] = {}
    for prefix, w in _iter_prefixes(spec, k, start_cap):
        mass = w * sums[prefix[-1]]
        if mass > 0:
            atoms[prefix] = atoms.get(prefix, _ZERO) + mass / total
    tail = 1 - sum(atoms.values())
    return DistTable.from_mapping(atoms, tail=tail)


def right_fdd_law(
    spec: ModelSpec,
    k: int,
    anchored: bool = False,
    tail_eps: Fraction = DEFAULT_TAIL_EPS,
) -> DistTable:
    """Exact joint law of the path segment seen from the end point.

    With ``anchored=False``: law of (gamma_L, gamma_{L-1}, ..., gamma_{L-k}).
    With ``anchored=True``: law of the differences
    (gamma_{L-1} - gamma_L, ..., gamma_{L-k} - gamma_L), which may be
    negative.  Computed by the mirror decomposition: start-weighted
    arrival masses from alpha, the reversed segment's edge weights, and
    the beta weight at the end point.
    """
    if not 0 <= k <= spec.length:
        raise RejectedInputError("need 0 <= k <= length")
    end_cap = _end_height_cap(spec, tail_eps)
    arrivals = start_weighted_sums(
        spec.weights, spec.alpha, spec.length - k, end_cap + k
    )
    total = normalization_constant(spec)
    atoms: dict[tuple[int, ...], Fraction] = {}
    # Tuples ordered (h_0 = gamma_L, h_1 = gamma_{L-1}, ..., h_k); the
    # forward edge between gamma_{L-j} = h_j and gamma_{L-j+1} = h_{j-1}
    # carries the weight indexed by h_j.
    stack: list[tuple[tuple[int, ...], Fraction]] = []
    for h0 in range(end_cap + 1):
        w0 = spec.beta.weight(h0)
        if w0 > 0:
            stack.append(((h0,), w0))
    while stack:
        seg, w = stack.pop()
        if len(seg) == k + 1:
            mass = w * arrivals[seg[-1]]
            if mass > 0:
                atoms[seg] = atoms.get(seg, _ZERO) + mass / total
            continue
        prev = seg[-1]
        for nxt in (prev - 1, prev, prev + 1):
            if nxt < 0:
                continue
            step = _prefix_edge_weight(spec.weights, nxt, prev)
            if step > 0:
                stack.append((seg + (nxt,), w * step))
    tail = 1 - sum(atoms.values())
    table = DistTable.from_mapping(atoms, tail=tail)
    if anchored:
        table = table.map_support(lambda key: tuple(h - key[0] for h in key[1:]))
    return table


def prefix_with_endpoint_law(
    spec: ModelSpec, k: int, tail_eps: Fraction = DEFAULT_TAIL_EPS
) -> DistTable:
    """Exact joint law of (gamma_0, ..., gamma_k, gamma_L).

    k = 0 gives the two end points, the pair whose asymptotic
    independence the convergence diagnostics probe.
    """
    if not 0 <= k <= spec.length:
        raise RejectedInputError("need 0 <= k <= length")
    if k == spec.length:
        return left_fdd_law(spec, k, tail_eps).map_support(lambda key: key + (key[-1],))
    start_cap = initial_height_cap(spec, tail_eps)
    end_cap = _end_height_cap(spec, tail_eps)
    total = normalization_constant(spec)
    rows: dict[int, tuple[Fraction, ...]] = {}
    atoms: dict[tuple[int, ...], Fraction] = {}
    for prefix, w in _iter_prefixes(spec, k, start_cap):
        mk = prefix[-1]
        if mk not in rows:
            rows[mk] = start_weighted_sums(
                spec.weights,
                BoundaryMeasure.point_mass(mk),
                spec.length - k,
                end_cap,
            )
        row = rows[mk]
        for n in range(min(end_cap, mk + spec.length - k) + 1):
            mass = w * row[n] * spec.beta.weight(n)
            if mass > 0:
                key = prefix + (n,)
                atoms[key] = atoms.get(key, _ZERO) + mass / total
    tail = 1 - sum(atoms.values())
    return DistTable.from_mapping(atoms, tail=tail)


# ---------------------------------------------------------------------------
# Transfer matrix and end-point generating function


@dataclass(frozen=True)
class TransferMatrix:
    """Tridiagonal transfer operator for the constant-weight family.

    Row n holds 1/t at column n-1 (n >= 1), sigma at n, and t at n+1,
    truncated to heights 0..bound.  The parameter inverts under
    transposition: the transpose of the t-matrix is the (1/t)-matrix.
    """

    t: Fraction
    sigma: Fraction
    bound: int

    def __post_init__(self) -> None:
        if self.t <= 0:
            raise RejectedInputError("parameter t must be positive")
        if self.sigma < 0:
            raise RejectedInputError("sigma must be non-negative")
        if self.bound < 0:
            raise RejectedInputError("bound must be non-negative")

    def entry(self, m: int, n: int) -> Fraction:
        if not (0 <= m <= self.bound and 0 <= n <= self.bound):
            return _ZERO
        if n == m - 1:
            return 1 / self.t
        if n == m:
            return self.sigma
        if n == m + 1:
            return self.t
        return _ZERO

    def dense(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(
            tuple(self.entry(m, n) for n in range(self.bound + 1))
            for m in range(self.bound + 1)
        )

    def apply(self, vec: Sequence[Fraction]) -> list[Fraction]:
        """Row-wise action on a height-indexed column vector."""
        if len(vec) != self.bound + 1:
            raise RejectedInputError("vector length must match bound + 1")
        out: list[Fraction] = []
        for m in range(self.bound + 1):
            val = self.sigma * vec[m]
            if m >= 1:
                val += vec[m - 1] / self.t
            if m + 1 <= self.bound:
                val += self.t * vec[m + 1]
            out.append(val)
        return out


def endpoint_pgf(spec: ModelSpec, z0: RationalLike, z1: RationalLike) -> Fraction:
    """E[z0**gamma_0 * z1**gamma_L], exactly.

    Computed twice -- as a direct double sum against the dense table and
    as the boundary-vector / iterated-tridiagonal product -- and the two
    values are asserted equal before returning.
    """
    z0 = as_fraction(z0)
    z1 = as_fraction(z1)
    if not (0 < z0 <= 1 and 0 < z1 <= 1):
        raise RejectedInputError("generating-function arguments must lie in (0, 1]")
    L = spec.length
    start_cap = initial_height_cap(spec)
    bound = start_cap + L

    if spec.alpha.is_geometric:
        # Mass above the start cap, with both markers folded in: for
        # m >= L the inner sum is the trinomial closed form at ratio
        # rho1*z1, and the outer geometric series telescopes exactly.
        r = z0 * spec.alpha.ratio * spec.beta.ratio * z1
        tail = (
            _free_end_sum(spec.sigma, spec.beta.ratio * z1, L)
            * r ** (start_cap + 1)
            / (1 - r)
        )
    else:
        tail = _ZERO

    table = weight_table(spec.weights, L, bound)
    direct = tail
    for m in range(start_cap + 1):
        am = spec.alpha.weight(m)
        if am == 0:
            continue
        inner = _ZERO
        for n in range(bound + 1):
            wmn = table.entries[m][n]
            if wmn != 0:
                inner += wmn * spec.beta.weight(n) * z1**n
        direct += am * z0**m * inner

    vec = [spec.beta.weight(n) * z1**n for n in range(bound + 1)]
    for _ in range(L):
        vec = _step_toward_start(spec.weights, vec)
    product = tail
    for m in range(start_cap + 1):
        product += spec.alpha.weight(m) * z0**m * vec[m]

    if direct != product:
        raise AssertionError(
            f"generating-function routes disagree: {direct} vs {product}"
        )
    total = normalization_constant(spec)
    return direct / total
