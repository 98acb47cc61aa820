"""Limit boundary processes: birth-death kernels, initial laws, and an
i.i.d. step law.

As the path length grows, the segment of a weighted random Motzkin path
seen from either end point converges to a Markov chain on the
non-negative integers.  Two kernel families arise: a critical one (the
discrete analogue of a walk conditioned to stay non-negative) and a
geometric tilt of it indexed by a ratio rho.  Both are instances of one
formula built from q-brackets, with the critical family at rho = 1.  All
laws here are exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .engine import DEFAULT_TAIL_EPS, DistTable
from .model import BoundaryMeasure, RationalLike, RejectedInputError, as_fraction
from .sampler import CounterStream, _categorical_from_fractions

_ZERO = Fraction(0)
_ONE = Fraction(1)


def q_bracket(k: int, q: Fraction) -> Fraction:
    """Standard q-analogue of the integer k: 1 + q + ... + q**(k-1).

    Empty sum at k = 0; equals k at q = 1, which is what removes the
    apparent singularity of the tilted kernel at ratio one.
    """
    if k < 0:
        raise RejectedInputError("q-bracket needs k >= 0")
    if q == 1:
        return Fraction(k)
    return (1 - q**k) / (1 - q)


def chebyshev_u_at_cosh(n: int, rho: Fraction) -> Fraction:
    """Monic second-kind Chebyshev value u_n(rho + 1/rho), exactly.

    Equals rho**(-n) * (1 + rho^2 + ... + rho^(2n)); n + 1 at rho = 1.
    This is the positive eigenvector of the flat-weight transfer operator
    that drives the geometric tilt below.
    """
    if n < 0:
        return _ZERO
    return q_bracket(n + 1, rho * rho) / rho**n


@dataclass(frozen=True)
class BoundaryKernel:
    """Transition kernel of a limiting boundary process.

    Row n moves to n+1, n, n-1 with probabilities proportional to
    [n+2], rho*sigma*[n+1], rho^2*[n], where [k] is the q-bracket at
    q = rho**2; the common normalizer is (rho^2 + 1 + rho*sigma)*[n+1].
    The empty bracket [0] = 0 kills the down move at the floor.  At
    rho = 1 the rows reduce to (n+2), sigma*(n+1), n over (2+sigma)(n+1).
    """

    rho: Fraction
    sigma: Fraction

    def __post_init__(self) -> None:
        if self.rho <= 0:
            raise RejectedInputError("kernel ratio must be positive")
        if self.sigma < 0:
            raise RejectedInputError("kernel sigma must be non-negative")

    @classmethod
    def critical(cls, sigma: RationalLike) -> "BoundaryKernel":
        """The rho = 1 kernel (walk conditioned to stay non-negative)."""
        return cls(rho=_ONE, sigma=as_fraction(sigma))

    @classmethod
    def tilted(cls, rho: RationalLike, sigma: RationalLike) -> "BoundaryKernel":
        """The geometrically tilted kernel; reduces to critical at rho = 1."""
        return cls(rho=as_fraction(rho), sigma=as_fraction(sigma))

    @property
    def is_critical(self) -> bool:
        return self.rho == 1


def kernel_row(kernel: BoundaryKernel, n: int) -> dict[int, Fraction]:
    """Exact rational transition row from state n (states >= 0 only)."""
    if n < 0:
        raise RejectedInputError("states are non-negative")
    rho, sigma = kernel.rho, kernel.sigma
    q = rho * rho
    denom = (q + 1 + rho * sigma) * q_bracket(n + 1, q)
    row = {
        n + 1: q_bracket(n + 2, q) / denom,
        n: rho * sigma * q_bracket(n + 1, q) / denom,
    }
    if n >= 1:
        row[n - 1] = q * q_bracket(n, q) / denom
    return row


# ---------------------------------------------------------------------------
# Initial laws


@dataclass(frozen=True)
class SizeBiased:
    """Pr(n) proportional to (n+1) * measure(n); needs a finite first
    moment (finite support, or geometric ratio < 1)."""

    measure: BoundaryMeasure


@dataclass(frozen=True)
class QDeformed:
    """Pr(n) proportional to measure(n) * u_n(rho1 + 1/rho1) with
    rho1 >= 1; the factor degenerates to n + 1 at rho1 = 1."""

    measure: BoundaryMeasure
    rho1: Fraction

    def __post_init__(self) -> None:
        if self.rho1 < 1:
            raise RejectedInputError("q-deformed law needs rho1 >= 1")


@dataclass(frozen=True)
class TwoGeometrics:
    """Sum of independent geometric variables with parameters
    rho0*rho_hat and rho0/rho_hat (both must be < 1)."""

    rho0: Fraction
    rho_hat: Fraction

    def __post_init__(self) -> None:
        if self.rho0 <= 0 or self.rho_hat <= 0:
            raise RejectedInputError("parameters must be positive")
        if self.rho0 * self.rho_hat >= 1 or self.rho0 / self.rho_hat >= 1:
            raise RejectedInputError(
                "two-geometrics law needs rho0*rho_hat < 1 and rho0/rho_hat < 1"
            )


InitialLawSpec = Union[SizeBiased, QDeformed, TwoGeometrics]


def _unnormalized_weight(spec: InitialLawSpec, n: int) -> Fraction:
    if isinstance(spec, SizeBiased):
        return (n + 1) * spec.measure.weight(n)
    if isinstance(spec, QDeformed):
        return spec.measure.weight(n) * chebyshev_u_at_cosh(n, spec.rho1)
    p = spec.rho0 * spec.rho_hat
    q = spec.rho0 / spec.rho_hat
    if p == q:
        return (n + 1) * p**n * (1 - p) ** 2
    return (1 - p) * (1 - q) * (p ** (n + 1) - q ** (n + 1)) / (p - q)


def _normalizer(spec: InitialLawSpec) -> Fraction:
    """Exact total mass of the unnormalized weights (closed forms for the
    geometric cases; rejects non-normalizable parameters)."""
    if isinstance(spec, TwoGeometrics):
        return _ONE
    measure = spec.measure
    if not measure.is_geometric:
        return sum(
            (_unnormalized_weight(spec, n) for n in range(measure.max_support + 1)),
            _ZERO,
        )
    r = measure.ratio
    if isinstance(spec, SizeBiased):
        if r >= 1:
            raise RejectedInputError("size-biased law needs geometric ratio < 1")
        return 1 / (1 - r) ** 2
    rho1 = spec.rho1
    if r * rho1 >= 1:
        raise RejectedInputError("q-deformed law needs measure ratio * rho1 < 1")
    # sum_n r^n u_n(rho1 + 1/rho1) = 1 / ((1 - r*rho1) * (1 - r/rho1)).
    return 1 / ((1 - r * rho1) * (1 - r / rho1))


def _support_limit(spec: InitialLawSpec) -> int | None:
    if isinstance(spec, TwoGeometrics):
        return None
    return spec.measure.max_support


def initial_law(
    spec: InitialLawSpec,
    support_cap: int | None = None,
    tail_eps: Fraction = DEFAULT_TAIL_EPS,
) -> DistTable:
    """Exact pmf of the initial law, truncated with a certified tail.

    With ``support_cap=None`` the cap grows until the exact discarded
    mass drops below tail_eps.  An explicit cap must satisfy the same
    bound (pass ``tail_eps=1`` to accept any truncation); the discarded
    mass is reported on the returned table either way.
    """
    total = _normalizer(spec)
    limit = _support_limit(spec)
    atoms: dict[tuple[int, ...], Fraction] = {}
    partial = _ZERO
    n = 0
    while True:
        if limit is not None and n > limit:
            break
        w = _unnormalized_weight(spec, n)
        if w > 0:
            atoms[(n,)] = w / total
            partial += w / total
        if support_cap is not None and n >= support_cap:
            break
        if support_cap is None and limit is None and 1 - partial < tail_eps:
            break
        if support_cap is None and limit is None and n > 1_000_000:
            raise RejectedInputError("initial law tail does not certify; check parameters")
        n += 1
    tail = 1 - partial
    if tail >= tail_eps:
        raise RejectedInputError(
            f"support cap {support_cap} leaves tail {float(tail):.3g} above the bound"
        )
    return DistTable.from_mapping(atoms, tail=tail)


# ---------------------------------------------------------------------------
# Exact finite-dimensional chain laws and the step law


def chain_fdd_law(kernel: BoundaryKernel, init: DistTable, k: int) -> DistTable:
    """Exact joint law of (Z_0, ..., Z_k) for the chain started from
    ``init`` (a 1-tuple table, e.g. from initial_law)."""
    if k < 0:
        raise RejectedInputError("k must be non-negative")
    if init.arity() != 1:
        raise RejectedInputError("initial table must be over single states")
    atoms = {key: p for key, p in zip(init.support, init.probs)}
    for _ in range(k):
        nxt: dict[tuple[int, ...], Fraction] = {}
        for key, p in atoms.items():
            for m, q in kernel_row(kernel, key[-1]).items():
                if q > 0:
                    nxt[key + (m,)] = nxt.get(key + (m,), _ZERO) + p * q
        atoms = nxt
    return DistTable.from_mapping(atoms, tail=init.tail)


def xi_pmf(rho1: RationalLike, sigma: RationalLike) -> DistTable:
    """The i.i.d. step law on {-1, 0, +1} seen from the end point in the
    geometric-boundary regime: (1/rho1, sigma, rho1) / (rho1 + 1/rho1 + sigma)
    for steps (+1, 0, -1)."""
    rho1 = as_fraction(rho1)
    sigma = as_fraction(sigma)
    if rho1 < 1:
        raise RejectedInputError("step law needs rho1 >= 1")
    if sigma <= 0:
        raise RejectedInputError("step law needs sigma > 0")
    denom = rho1 + 1 / rho1 + sigma
    return DistTable.from_mapping(
        {
            (1,): (1 / rho1) / denom,
            (0,): sigma / denom,
            (-1,): rho1 / denom,
        }
    )


def xi_walk_law(rho1: RationalLike, sigma: RationalLike, k: int) -> DistTable:
    """Joint law of the first k partial sums of i.i.d. steps.

    This is the limit of the end-anchored increment vector
    (gamma_{L-1} - gamma_L, ..., gamma_{L-k} - gamma_L); comparing
    anchored increments against it is equivalent to comparing
    consecutive reversed steps against the i.i.d. product, because the
    two vectors are images of each other under a support bijection.
    """
    if k < 1:
        raise RejectedInputError("walk law needs k >= 1")
    step = xi_pmf(rho1, sigma)
    atoms: dict[tuple[int, ...], Fraction] = {(): _ONE}
    for _ in range(k):
        nxt: dict[tuple[int, ...], Fraction] = {}
        for key, p in atoms.items():
            base = key[-1] if key else 0
            for (eps,), q in zip(step.support, step.probs):
                new = key + (base + eps,)
                nxt[new] = nxt.get(new, _ZERO) + p * q
        atoms = nxt
    return DistTable.from_mapping(atoms)


_CHAIN_TAG = b"motzkinlab/limit-chain/v1:"


def simulate_chain(
    kernel: BoundaryKernel,
    init: InitialLawSpec,
    steps: int,
    seed: int,
    tail_eps: Fraction = DEFAULT_TAIL_EPS,
) -> tuple[int, ...]:
    """Simulate (Z_0, ..., Z_steps); deterministic in the seed.

    Draws use the same exact-rational inverse-CDF machinery as the path
    sampler, on the tail-certified truncation of the initial law.
    """
    if steps < 0:
        raise RejectedInputError("steps must be non-negative")
    table = initial_law(init, tail_eps=tail_eps)
    stream = CounterStream(_CHAIN_TAG, seed)
    draw = _categorical_from_fractions(list(table.probs))
    here = table.support[draw.draw(stream)][0]
    out = [here]
    row_cache: dict[int, tuple] = {}
    for _ in range(steps):
        cached = row_cache.get(here)
        if cached is None:
            row = kernel_row(kernel, here)
            targets = tuple(sorted(row))
            cached = (_categorical_from_fractions([row[t] for t in targets]), targets)
            row_cache[here] = cached
        drawer, targets = cached
        here = targets[drawer.draw(stream)]
        out.append(here)
    return tuple(out)
