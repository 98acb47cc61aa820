"""Shared brute-force oracles: exhaustive path enumeration, independent of
the engine's recursions."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterator

import pytest

from motzkinlab import BoundaryMeasure, ModelSpec, MotzkinPath, WeightConfig, path_weight


def iter_paths(length: int, start: int, ceiling: int | None = None) -> Iterator[tuple[int, ...]]:
    """All height tuples of the given length from `start`, staying >= 0
    (and <= ceiling when given)."""
    def extend(prefix: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        if len(prefix) == length + 1:
            yield prefix
            return
        here = prefix[-1]
        for nxt in (here - 1, here, here + 1):
            if nxt < 0:
                continue
            if ceiling is not None and nxt > ceiling:
                continue
            yield from extend(prefix + (nxt,))

    if ceiling is not None and start > ceiling:
        return
    yield from extend((start,))


def brute_weight_sum(
    weights: WeightConfig, length: int, m: int, n: int, ceiling: int | None = None
) -> Fraction:
    """Sum of path weights from m to n by explicit enumeration."""
    total = Fraction(0)
    for heights in iter_paths(length, m, ceiling):
        if heights[-1] == n:
            total += path_weight(MotzkinPath(heights), weights)
    return total


def brute_path_law(spec: ModelSpec) -> dict[tuple[int, ...], Fraction]:
    """The full path law by enumeration; requires finite-support alpha."""
    assert spec.alpha.max_support is not None
    masses: dict[tuple[int, ...], Fraction] = {}
    total = Fraction(0)
    for m0 in range(spec.alpha.max_support + 1):
        am = spec.alpha.weight(m0)
        if am == 0:
            continue
        for heights in iter_paths(spec.length, m0):
            bn = spec.beta.weight(heights[-1])
            if bn == 0:
                continue
            mass = am * bn * path_weight(MotzkinPath(heights), spec.weights)
            if mass > 0:
                masses[heights] = mass
                total += mass
    return {heights: mass / total for heights, mass in masses.items()}


@pytest.fixture
def unit_weights() -> WeightConfig:
    return WeightConfig.constant(1)


@pytest.fixture
def delta0() -> BoundaryMeasure:
    return BoundaryMeasure.point_mass(0)
