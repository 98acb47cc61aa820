"""Exact sampling of random Motzkin paths.

Sampling runs in two phases: a backward pass accumulates, for every step
index k and height n, the total end-weighted mass R[k][n] of length-(L-k)
continuations from n; a forward pass then draws the start height
proportionally to alpha * R[0] and each step with the exact conditional
probability (edge weight) * R[k+1][next] / R[k][here].

Randomness comes from a counter-mode SHA-256 stream keyed by
(seed, path index), so every path has its own reproducible bit stream and
runs parallelize deterministically.  Draws are inverse-CDF against exact
rational thresholds: the uniform variate is refined 64 bits at a time
until its dyadic interval falls inside a single cell, so no floating
point ever touches a probability.
"""

from __future__ import annotations

import hashlib
import math
import struct
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import BinaryIO, Iterable, Sequence

from .engine import DEFAULT_TAIL_EPS, DistTable, initial_height_cap
from .model import (
    BoundaryMeasure,
    ModelSpec,
    MotzkinPath,
    RejectedInputError,
    WeightConfig,
)

_ZERO = Fraction(0)


class CounterStream:
    """Deterministic bit source: SHA-256 of (tag, key words, counter).

    Blocks are sha256(tag || key[0] || key[1] || ... || counter) with all
    integers little-endian 8-byte words; bits are consumed from each
    256-bit block most-significant first.  Distinct keys give
    non-overlapping streams by construction.
    """

    def __init__(self, tag: bytes, *key: int):
        self._prefix = tag + b"".join(
            struct.pack("<Q", k % (1 << 64)) for k in key
        )
        self._counter = 0
        self._buffer = 0
        self._buffer_bits = 0

    def bits(self, count: int) -> int:
        while self._buffer_bits < count:
            block = hashlib.sha256(
                self._prefix + struct.pack("<Q", self._counter)
            ).digest()
            self._counter += 1
            self._buffer = (self._buffer << 256) | int.from_bytes(block, "big")
            self._buffer_bits += 256
        self._buffer_bits -= count
        out = self._buffer >> self._buffer_bits
        self._buffer &= (1 << self._buffer_bits) - 1
        return out


class CategoricalDraw:
    """Inverse-CDF draw from exact rational cell probabilities.

    Cell probabilities are given as integer numerators over a common
    denominator.  A draw refines a dyadic interval [r/2^k, (r+1)/2^k)
    until it lies inside one cell; thresholds are pre-shifted by 64 bits
    so the common case resolves with one big-int multiply and a bisect.
    """

    def __init__(self, numerators: Sequence[int], denominator: int):
        if denominator <= 0 or sum(numerators) != denominator:
            raise RejectedInputError("cell masses must sum to the denominator")
        cum = [0]
        for n in numerators:
            if n < 0:
                raise RejectedInputError("cell masses must be non-negative")
            cum.append(cum[-1] + n)
        self.denominator = denominator
        self._cum = cum
        self._cum64 = [c << 64 for c in cum]

    def draw(self, stream: CounterStream) -> int:
        r = stream.bits(64)
        k = 64
        scaled = self._cum64
        while True:
            lo = r * self.denominator
            hi = lo + self.denominator  # (r+1) * D
            i = bisect_right(scaled, lo) - 1
            if i >= len(self._cum) - 1:
                i = len(self._cum) - 2
            if hi <= scaled[i + 1]:
                return i
            r = (r << 64) | stream.bits(64)
            k += 64
            scaled = [c << k for c in self._cum]


def _categorical_from_fractions(masses: Sequence[Fraction]) -> CategoricalDraw:
    denom = math.lcm(*(m.denominator for m in masses))
    nums = [int(m * denom) for m in masses]
    return CategoricalDraw(nums, sum(nums))


@dataclass(frozen=True)
class BackwardTable:
    """Backward continuation masses for one model.

    rows[k][n] holds the end-weighted mass of length-(L-k) continuations
    from height n; rows[L] is the (truncated) beta vector and rows[0][m]
    equals the engine's end-weighted sum over the full length.
    """

    length: int
    bound: int
    weights: WeightConfig
    rows: tuple[tuple[Fraction, ...], ...]
    _plans: dict = field(default_factory=dict, repr=False, compare=False)

    def start_cap(self) -> int:
        return self.bound - self.length


def build_backward_table(
    spec: ModelSpec, tail_eps: Fraction = DEFAULT_TAIL_EPS
) -> BackwardTable:
    """Backward pass over the whole length, O(bound * length) rationals.

    The height bound is start-cap + length, so every entry a path drawn
    from the (possibly truncated) start law can visit is exact.
    """
    start_cap = initial_height_cap(spec, tail_eps)
    bound = start_cap + spec.length
    if spec.beta.max_support is not None:
        bound = max(bound, spec.beta.max_support)
    rows: list[tuple[Fraction, ...]] = [
        tuple(spec.beta.weight(n) for n in range(bound + 1))
    ]
    for _ in range(spec.length):
        prev = rows[-1]
        nxt: list[Fraction] = []
        for n in range(bound + 1):
            val = spec.weights.level_at(n) * prev[n]
            if n + 1 <= bound:
                val += spec.weights.up_at(n) * prev[n + 1]
            if n >= 1:
                val += spec.weights.down_at(n) * prev[n - 1]
            nxt.append(val)
        rows.append(tuple(nxt))
    rows.reverse()
    if not any(rows[0][m] > 0 for m in range(start_cap + 1)):
        raise RejectedInputError("no admissible path: backward mass vanishes")
    return BackwardTable(
        length=spec.length, bound=bound, weights=spec.weights, rows=tuple(rows)
    )


class _PathDrawPlan:
    """Per-(step, height) conditional rows, built lazily and shared."""

    def __init__(self, table: BackwardTable, alpha: BoundaryMeasure):
        start_cap = table.start_cap()
        masses = [alpha.weight(m) * table.rows[0][m] for m in range(start_cap + 1)]
        if not any(m > 0 for m in masses):
            raise RejectedInputError("start law has no mass below the cap")
        self.initial = _categorical_from_fractions(masses)
        self._step_cache: dict[tuple[int, int], tuple[CategoricalDraw, tuple[int, ...]]] = {}
        self._table = table

    def step(self, k: int, here: int) -> tuple[CategoricalDraw, tuple[int, ...]]:
        key = (k, here)
        cached = self._step_cache.get(key)
        if cached is not None:
            return cached
        table = self._table
        weights = table.weights
        nxt_row = table.rows[k + 1]
        targets: list[int] = []
        masses: list[Fraction] = []
        for nxt in (here - 1, here, here + 1):
            if nxt < 0 or nxt > table.bound:
                continue
            if nxt == here - 1:
                w = weights.down_at(here)
            elif nxt == here:
                w = weights.level_at(here)
            else:
                w = weights.up_at(here)
            mass = w * nxt_row[nxt]
            if mass > 0:
                targets.append(nxt)
                masses.append(mass)
        # Conditional masses sum to rows[k][here] by the backward recursion.
        plan = (_categorical_from_fractions(masses), tuple(targets))
        self._step_cache[key] = plan
        return plan


_PATH_TAG = b"motzkinlab/path-sampler/v1:"


def _plan_for(table: BackwardTable, alpha: BoundaryMeasure) -> _PathDrawPlan:
    # Plans live on the table instance; concurrent lookups may at worst
    # rebuild the same plan.
    plan = table._plans.get(alpha)
    if plan is None:
        plan = _PathDrawPlan(table, alpha)
        table._plans[alpha] = plan
    return plan


def sample_path(
    table: BackwardTable, alpha: BoundaryMeasure, seed: int, index: int = 0
) -> MotzkinPath:
    """Draw one path with law exactly the weighted path ensemble.

    Deterministic in (table, alpha, seed, index); paths for distinct
    (seed, index) pairs use disjoint bit streams.  For geometric alpha
    the start height is drawn from the capped table, whose certified
    missing mass is below the tail bound used to build it.
    """
    plan = _plan_for(table, alpha)
    stream = CounterStream(_PATH_TAG, seed, index)
    here = plan.initial.draw(stream)
    heights = [here]
    for k in range(table.length):
        draw, targets = plan.step(k, here)
        here = targets[draw.draw(stream)]
        heights.append(here)
    return MotzkinPath(tuple(heights))


def sample_paths(
    table: BackwardTable, alpha: BoundaryMeasure, seed: int, count: int
) -> list[MotzkinPath]:
    return [sample_path(table, alpha, seed, index) for index in range(count)]


def empirical_fdd(
    paths: Iterable[MotzkinPath], coordinates: Sequence[int]
) -> DistTable:
    """Empirical frequency table of the selected path coordinates.

    Frequencies are exact rationals with the sample count as denominator.
    """
    paths = list(paths)
    if not paths:
        raise RejectedInputError("empty path collection")
    length = paths[0].length
    if any(p.length != length for p in paths):
        raise RejectedInputError("paths must share one length")
    for c in coordinates:
        if not 0 <= c <= length:
            raise RejectedInputError(f"coordinate {c} outside 0..{length}")
    counts: dict[tuple[int, ...], int] = {}
    for p in paths:
        key = tuple(p.heights[c] for c in coordinates)
        counts[key] = counts.get(key, 0) + 1
    n = len(paths)
    return DistTable.from_mapping({k: Fraction(v, n) for k, v in counts.items()})


# ---------------------------------------------------------------------------
# Columnar binary dump

_BIN_HEADER = struct.Struct("<II")


def write_binary(paths: Sequence[MotzkinPath], stream: BinaryIO) -> None:
    """Columnar dump: header of two little-endian uint32 (length L, path
    count), then L+1 blocks of `count` little-endian int32 heights; block
    k holds coordinate k of every path in order."""
    if not paths:
        raise RejectedInputError("empty path collection")
    length = paths[0].length
    if any(p.length != length for p in paths):
        raise RejectedInputError("paths must share one length")
    stream.write(_BIN_HEADER.pack(length, len(paths)))
    for k in range(length + 1):
        stream.write(struct.pack(f"<{len(paths)}i", *(p.heights[k] for p in paths)))


def read_binary(stream: BinaryIO) -> list[MotzkinPath]:
    header = stream.read(_BIN_HEADER.size)
    length, count = _BIN_HEADER.unpack(header)
    columns = []
    for _ in range(length + 1):
        raw = stream.read(4 * count)
        columns.append(struct.unpack(f"<{count}i", raw))
    return [MotzkinPath(tuple(col[i] for col in columns)) for i in range(count)]
