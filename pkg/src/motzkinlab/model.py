"""Domain types for weighted Motzkin paths with weighted end points.

A Motzkin path is a finite sequence of non-negative integer heights that
changes by at most one per step.  Edge weights depend on the altitude of
the *left* end of each edge: ``up[n]`` for a rise from height n,
``level[n]`` for a flat step at height n, ``down[n]`` for a fall from
height n.  Two boundary measures weight the start and end heights.  All
arithmetic in this module is exact rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class RejectedInputError(ValueError):
    """An argument fails a documented precondition."""


RationalLike = int | str | float | Fraction


def as_fraction(value: RationalLike) -> Fraction:
    """Exact rational from an int, Fraction, string, or float.

    Strings may be "p/q" or decimal ("0.5" -> 1/2).  Floats are read
    through their shortest decimal repr, so 0.1 becomes exactly 1/10
    rather than the binary value of the literal.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise RejectedInputError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise RejectedInputError(f"cannot parse rational from {value!r}") from exc
    raise RejectedInputError(f"cannot convert {type(value).__name__} to a rational")


@dataclass(frozen=True)
class WeightConfig:
    """Altitude-indexed edge weights (up, level, down).

    Sequences are stored as finite prefixes and repeat their last entry
    at greater altitudes.  ``constant_case`` marks the homogeneous family
    (1, sigma, 1); when set, queries ignore the stored prefixes.  Up and
    down weights must be strictly positive; level weights may be zero
    (the flat-step-free degenerate family is meaningful and supported).
    ``down[0]`` is never read by any weight computation, since a fall
    from height 0 would leave the non-negative lattice.
    """

    up: tuple[Fraction, ...]
    level: tuple[Fraction, ...]
    down: tuple[Fraction, ...]
    constant_case: Fraction | None = None

    def __post_init__(self) -> None:
        for name, seq in (("up", self.up), ("level", self.level), ("down", self.down)):
            if not seq:
                raise RejectedInputError(f"{name} weight sequence is empty")
        if any(w <= 0 for w in self.up) or any(w <= 0 for w in self.down):
            raise RejectedInputError("up/down weights must be strictly positive")
        if any(w < 0 for w in self.level):
            raise RejectedInputError("level weights must be non-negative")
        if self.constant_case is not None:
            sigma = self.constant_case
            if sigma < 0:
                raise RejectedInputError("constant level weight must be non-negative")
            if self.up != (Fraction(1),) or self.down != (Fraction(1),) or self.level != (sigma,):
                raise RejectedInputError("constant_case conflicts with stored sequences")

    @classmethod
    def constant(cls, sigma: RationalLike) -> "WeightConfig":
        """The homogeneous family: up = down = 1, level = sigma at every height."""
        s = as_fraction(sigma)
        return cls(up=(Fraction(1),), level=(s,), down=(Fraction(1),), constant_case=s)

    @classmethod
    def from_sequences(
        cls,
        up: tuple[RationalLike, ...] | list[RationalLike],
        level: tuple[RationalLike, ...] | list[RationalLike],
        down: tuple[RationalLike, ...] | list[RationalLike],
    ) -> "WeightConfig":
        return cls(
            up=tuple(as_fraction(w) for w in up),
            level=tuple(as_fraction(w) for w in level),
            down=tuple(as_fraction(w) for w in down),
        )

    @property
    def is_constant(self) -> bool:
        return self.constant_case is not None

    def up_at(self, n: int) -> Fraction:
        return self.up[min(n, len(self.up) - 1)]

    def level_at(self, n: int) -> Fraction:
        return self.level[min(n, len(self.level) - 1)]

    def down_at(self, n: int) -> Fraction:
        if n < 1:
            raise RejectedInputError("down weight at height 0 is never used")
        return self.down[min(n, len(self.down) - 1)]


@dataclass(frozen=True)
class MotzkinPath:
    """Height sequence (gamma_0, ..., gamma_L) with L >= 1."""

    heights: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.heights) < 2:
            raise RejectedInputError("a path needs at least one step")
        for h in self.heights:
            if not isinstance(h, int) or h < 0:
                raise RejectedInputError(f"height {h!r} is not a non-negative integer")
        for a, b in zip(self.heights, self.heights[1:]):
            if abs(b - a) > 1:
                raise RejectedInputError(f"jump from {a} to {b} exceeds one")

    @property
    def length(self) -> int:
        return len(self.heights) - 1

    def steps(self) -> tuple[int, ...]:
        return tuple(b - a for a, b in zip(self.heights, self.heights[1:]))

    def serialize(self) -> str:
        return ",".join(str(h) for h in self.heights)

    @classmethod
    def parse(cls, text: str) -> "MotzkinPath":
        try:
            heights = tuple(int(part) for part in text.strip().split(","))
        except ValueError as exc:
            raise RejectedInputError(f"cannot parse path from {text!r}") from exc
        return cls(heights)


def path_weight(path: MotzkinPath, weights: WeightConfig) -> Fraction:
    """Product of edge weights along the path.

    The weight of each edge is indexed by the height of its left end, so
    the result is multiplicative under concatenation at a shared height.
    """
    total = Fraction(1)
    for a, b in zip(path.heights, path.heights[1:]):
        if b == a + 1:
            total *= weights.up_at(a)
        elif b == a:
            total *= weights.level_at(a)
        else:
            total *= weights.down_at(a)
    return total


def reverse_path(path: MotzkinPath) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Both reversal conventions for a path.

    Returns ``(reversed_heights, anchored_increments)`` where
    ``reversed_heights[k] = gamma[L-k]`` (a valid path again) and
    ``anchored_increments[k] = gamma[L-k] - gamma[L]`` (starts at 0, may
    go negative).  Diagnostics against the two limit regimes need one
    convention each, so both are exposed.
    """
    rev = tuple(reversed(path.heights))
    base = rev[0]
    return rev, tuple(h - base for h in rev)


@dataclass(frozen=True)
class BoundaryMeasure:
    """Non-negative measure on the non-negative integers.

    Either finitely supported (a weight vector, not all zero) or
    geometric with ratio rho > 0, i.e. weight rho**n at height n.  The
    geometric variant may have infinite mass (rho >= 1); whether it is
    usable depends on the consuming operation.
    """

    finite_weights: tuple[Fraction, ...] | None = None
    ratio: Fraction | None = None

    def __post_init__(self) -> None:
        if (self.finite_weights is None) == (self.ratio is None):
            raise RejectedInputError("exactly one of finite_weights/ratio must be set")
        if self.finite_weights is not None:
            if any(w < 0 for w in self.finite_weights):
                raise RejectedInputError("boundary weights must be non-negative")
            if not any(w > 0 for w in self.finite_weights):
                raise RejectedInputError("boundary measure must not vanish")
        if self.ratio is not None and self.ratio <= 0:
            raise RejectedInputError("geometric ratio must be positive")

    @classmethod
    def finite(cls, *weights: RationalLike) -> "BoundaryMeasure":
        return cls(finite_weights=tuple(as_fraction(w) for w in weights))

    @classmethod
    def geometric(cls, ratio: RationalLike) -> "BoundaryMeasure":
        return cls(ratio=as_fraction(ratio))

    @classmethod
    def point_mass(cls, height: int) -> "BoundaryMeasure":
        if height < 0:
            raise RejectedInputError("point mass height must be non-negative")
        return cls.finite(*([0] * height + [1]))

    @property
    def is_geometric(self) -> bool:
        return self.ratio is not None

    @property
    def max_support(self) -> int | None:
        """Largest height with positive weight, or None for geometric."""
        if self.finite_weights is None:
            return None
        return max(n for n, w in enumerate(self.finite_weights) if w > 0)

    def weight(self, n: int) -> Fraction:
        if n < 0:
            return Fraction(0)
        if self.ratio is not None:
            return self.ratio**n
        if n >= len(self.finite_weights):
            return Fraction(0)
        return self.finite_weights[n]

    def serialize(self) -> str:
        if self.ratio is not None:
            return f"geom:{self.ratio}"
        return "finite:" + ",".join(str(w) for w in self.finite_weights)

    @classmethod
    def parse(cls, text: str) -> "BoundaryMeasure":
        kind, _, rest = text.partition(":")
        if kind == "geom":
            return cls.geometric(rest)
        if kind == "finite":
            return cls.finite(*rest.split(","))
        raise RejectedInputError(f"boundary measure spec {text!r} must be finite:... or geom:...")


@dataclass(frozen=True)
class ModelSpec:
    """A fully specified finite-length path model.

    Admissible boundary combinations (anything else is rejected):

    1. both measures finitely supported;
    2. alpha finite, beta geometric with any ratio > 0 (end heights stay
       bounded by max-support(alpha) + length, so the infinite measure is
       harmless);
    3. alpha geometric(rho0), beta geometric(rho1) with rho0 < 1 and
       rho0*rho1 < 1.  This regime additionally requires constant-case
       edge weights, because the exact closed forms used for the start
       height tail only exist in the homogeneous family.
    """

    weights: WeightConfig
    alpha: BoundaryMeasure
    beta: BoundaryMeasure
    length: int

    def __post_init__(self) -> None:
        if self.length < 1:
            raise RejectedInputError("length must be at least 1")
        if self.alpha.is_geometric:
            if not self.beta.is_geometric:
                raise RejectedInputError(
                    "geometric alpha is only supported together with geometric beta"
                )
            rho0, rho1 = self.alpha.ratio, self.beta.ratio
            if rho0 >= 1 or rho0 * rho1 >= 1:
                raise RejectedInputError(
                    "geometric/geometric boundaries need rho0 < 1 and rho0*rho1 < 1"
                )
            if not self.weights.is_constant:
                raise RejectedInputError(
                    "geometric alpha requires constant-case edge weights"
                )

    @property
    def sigma(self) -> Fraction:
        if self.weights.constant_case is None:
            raise RejectedInputError("model does not use constant-case weights")
        return self.weights.constant_case
