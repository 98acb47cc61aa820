"""Chebyshev polynomials, semicircle-type measures, and numerical
certificates tying them to the exact path-count engine.

The flat-weight path counts admit a Viennot-style integral form: the
count from m to n over length L equals the integral of
u_m(x) u_n(x) (x + sigma)^L against the semicircle density on [-2, 2],
with u_n the monic second-kind Chebyshev polynomials.  Summing a
geometric end weight turns the semicircle into a mixed measure: a
deformed density on [-2, 2] plus, once the ratio exceeds one, an atom at
rho + 1/rho.  This module evaluates those integrals numerically and
checks them against the exact rational engine values.

Two quadrature back ends with different guarantees: a Gauss rule for the
semicircle weight (exact for polynomial integrands by degree count), and
a trapezoid rule in the substituted angle variable, where the deformed
densities are smooth for every rho > 0 including the critical ratio, with
node doubling until stabilization.  Everything here is binary64; the
exact side of every certificate comes from the engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .engine import end_weighted_sums
from .model import BoundaryMeasure, RationalLike, RejectedInputError, WeightConfig, as_fraction


class QuadratureError(RuntimeError):
    """Node doubling failed to stabilize under the requested tolerance."""


# ---------------------------------------------------------------------------
# Chebyshev evaluation


def cheb_u(n: int, x):
    """Monic second-kind Chebyshev polynomial u_n on the [-2, 2] scaling.

    Three-term recursion u_{-1} = 0, u_0 = 1, x*u_k = u_{k+1} + u_{k-1};
    accepts scalars or ndarrays.  u_n(2) = n + 1, and |u_n| <= n + 1 on
    [-2, 2].
    """
    if n < 0:
        raise RejectedInputError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.zeros_like(x)
    here = np.ones_like(x)
    for _ in range(n):
        prev, here = here, x * here - prev
    return here if here.ndim else float(here)


def cheb_u_closed(n: int, x: float) -> float:
    """Closed form for |x| >= 2: write x = z + 1/z and evaluate
    (z^(n+1) - z^-(n+1)) / (z - 1/z), with the limit n + 1 at z = 1.
    Used as an independent cross-check of the recursion."""
    if abs(x) < 2:
        raise RejectedInputError("closed form needs |x| >= 2")
    sign = 1.0 if x >= 0 else -1.0
    ax = abs(x)
    z = (ax + math.sqrt(ax * ax - 4.0)) / 2.0
    if z == 1.0:
        val = n + 1.0
    else:
        val = (z ** (n + 1) - z ** -(n + 1)) / (z - 1.0 / z)
    return sign**n * val


# ---------------------------------------------------------------------------
# Quadrature rules


@dataclass(frozen=True)
class GaussURule:
    """Gauss rule for the normalized semicircle weight on [-2, 2].

    Nodes 2*cos(k*pi/(N+1)) and weights 2*sin^2(k*pi/(N+1))/(N+1),
    k = 1..N: exact for polynomial integrands of degree <= 2N - 1.
    """

    nodes: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, n_nodes: int) -> "GaussURule":
        if n_nodes < 1:
            raise RejectedInputError("need at least one node")
        k = np.arange(1, n_nodes + 1)
        theta = k * math.pi / (n_nodes + 1)
        return cls(nodes=2.0 * np.cos(theta), weights=2.0 * np.sin(theta) ** 2 / (n_nodes + 1))

    def integrate(self, f: Callable[[np.ndarray], np.ndarray]) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def viennot_integral(m: int, n: int, length: int, sigma: float) -> float:
    """Semicircle integral of u_m(x) u_n(x) (x + sigma)^length.

    The integrand is a polynomial of degree m + n + length, so the Gauss
    rule below is exact up to rounding; the value equals the exact
    rational path count from m to n.
    """
    if m < 0 or n < 0 or length < 1:
        raise RejectedInputError("need m, n >= 0 and length >= 1")
    rule = GaussURule.build((length + m + n) // 2 + 2)
    sig = float(sigma)
    return rule.integrate(lambda x: cheb_u(m, x) * cheb_u(n, x) * (x + sig) ** length)


def _theta_profile(rho: float, theta: np.ndarray) -> np.ndarray:
    # Weight of the continuous part after x = 2 cos(theta): the measure is
    # (2/pi) * profile(theta) d(theta).  Smooth on [0, pi] for every
    # rho >= 0; at rho = 1 the ratio degenerates to cos^2(theta/2).
    if rho == 1.0:
        return np.cos(theta / 2.0) ** 2
    return np.sin(theta) ** 2 / ((1.0 - rho) ** 2 + 4.0 * rho * np.sin(theta / 2.0) ** 2)


def theta_integral(
    g: Callable[[np.ndarray], np.ndarray],
    tol: float = 1e-12,
    start_nodes: int = 64,
    max_nodes: int = 1 << 20,
) -> float:
    """(2/pi) * integral of g over [0, pi] by trapezoid with doubling.

    The integrands used here extend to smooth even periodic functions, so
    the trapezoid rule converges geometrically; a value is accepted only
    once doubling the node count moves it by less than tol (relative to
    max(1, |value|)).
    """
    n = start_nodes
    theta = np.linspace(0.0, math.pi, n + 1)
    values = g(theta)
    total = float(np.sum(values) - 0.5 * (values[0] + values[-1])) * (math.pi / n)
    while n <= max_nodes:
        mid = (np.arange(n) + 0.5) * (math.pi / n)
        refined = 0.5 * total + float(np.sum(g(mid))) * (math.pi / (2 * n))
        n *= 2
        if abs(refined - total) <= tol * max(1.0, abs(refined)):
            return refined * (2.0 / math.pi)
        total = refined
    raise QuadratureError(
        f"no stabilization below {tol:g} within {max_nodes} nodes (last delta "
        f"{abs(refined - total):.3g})"
    )


# ---------------------------------------------------------------------------
# The mixed measure family


@dataclass(frozen=True)
class MixedMeasure:
    """Semicircle-type measure deformed by a geometric end weight.

    Continuous density sqrt(4 - x^2) / (2 pi (1 - x rho + rho^2)) on
    [-2, 2] (the plain semicircle at rho = 0), plus an atom of mass
    (1 - 1/rho^2)+ at rho + 1/rho once rho > 1.  Total mass is one.
    """

    rho: float

    def __post_init__(self) -> None:
        if self.rho < 0:
            raise RejectedInputError("ratio must be non-negative")

    @classmethod
    def semicircle(cls) -> "MixedMeasure":
        return cls(rho=0.0)

    @property
    def atom_mass(self) -> float:
        return max(0.0, 1.0 - 1.0 / self.rho**2) if self.rho > 0 else 0.0

    @property
    def atom_location(self) -> float:
        return self.rho + 1.0 / self.rho if self.rho > 0 else math.nan

    @property
    def top_of_support(self) -> float:
        return max(2.0, self.atom_location) if self.atom_mass > 0 else 2.0

    def density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        base = np.sqrt(np.clip(4.0 - x * x, 0.0, None)) / (2.0 * math.pi)
        if self.rho == 0:
            return base
        return base / (1.0 - x * self.rho + self.rho**2)


def mu_moment_split(
    F: Callable[[np.ndarray], np.ndarray],
    rho: float,
    sigma: float,
    length: int,
    tol: float = 1e-12,
) -> tuple[float, float]:
    """(continuous, atom) parts of the integral of F(x) (x + sigma)^length
    against the mixed measure at the given ratio."""
    if rho < 0:
        raise RejectedInputError("ratio must be non-negative")
    if length < 0:
        raise RejectedInputError("length must be non-negative")
    rho = float(rho)
    sigma = float(sigma)

    def integrand(theta: np.ndarray) -> np.ndarray:
        x = 2.0 * np.cos(theta)
        return np.asarray(F(x)) * (x + sigma) ** length * _theta_profile(rho, theta)

    continuous = theta_integral(integrand, tol=tol)
    atom = 0.0
    if rho > 1.0:
        loc = rho + 1.0 / rho
        atom = (1.0 - 1.0 / rho**2) * float(np.asarray(F(np.asarray(loc)))) * (
            loc + sigma
        ) ** length
    return continuous, atom


def mu_moment(
    F: Callable[[np.ndarray], np.ndarray],
    rho: float,
    sigma: float,
    length: int,
    tol: float = 1e-12,
) -> float:
    """Integral of F(x) (x + sigma)^length against the mixed measure."""
    continuous, atom = mu_moment_split(F, rho, sigma, length, tol=tol)
    return continuous + atom


# ---------------------------------------------------------------------------
# Exact side and certificates


def h_m_dp(m: int, rho: RationalLike, length: int, sigma: RationalLike) -> Fraction:
    """Exact rational sum over end heights n of rho^n times the weighted
    path count from m over the given length (a finite sum: only
    |n - m| <= length contributes)."""
    if m < 0 or length < 1:
        raise RejectedInputError("need m >= 0 and length >= 1")
    weights = WeightConfig.constant(as_fraction(sigma))
    measure = BoundaryMeasure.geometric(as_fraction(rho)) if as_fraction(rho) != 0 else None
    if measure is None:
        # ratio zero: only the n = 0 term survives.
        point = BoundaryMeasure.point_mass(0)
        return end_weighted_sums(weights, point, length, m)[m]
    return end_weighted_sums(weights, measure, length, m)[m]


@dataclass(frozen=True)
class CheckReport:
    """One numerical certificate: exact lhs vs quadrature rhs."""

    check: str
    params: dict
    lhs: float
    rhs: float
    residual: float
    tol: float
    passed: bool

    def to_json_obj(self) -> dict:
        return {
            "check": self.check,
            "params": self.params,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "residual": self.residual,
            "tol": self.tol,
            "pass": self.passed,
        }


def lemma42_check(
    m: int,
    rho: RationalLike,
    length: int,
    sigma: RationalLike,
    tol: float = 1e-8,
) -> CheckReport:
    """Certify the mixed-measure integral identity at one parameter point.

    Exact side: the geometric end-weighted path count h_m.  Numerical
    side: the integral of u_m(x) (x + sigma)^length against the mixed
    measure, whose atom participates exactly when the ratio exceeds one.
    """
    rho_exact = as_fraction(rho)
    sigma_exact = as_fraction(sigma)
    exact = h_m_dp(m, rho_exact, length, sigma_exact)
    lhs = float(exact)
    continuous, atom = mu_moment_split(
        lambda x: cheb_u(m, x), float(rho_exact), float(sigma_exact), length
    )
    rhs = continuous + atom
    residual = abs(lhs - rhs) / max(1.0, abs(lhs))
    return CheckReport(
        check="mixed-measure-moment",
        params={
            "m": m,
            "rho": str(rho_exact),
            "L": length,
            "sigma": str(sigma_exact),
            "atom": atom,
        },
        lhs=lhs,
        rhs=rhs,
        residual=residual,
        tol=tol,
        passed=residual <= tol,
    )


def ratio_probe(
    F: Callable[[np.ndarray], np.ndarray],
    measure: MixedMeasure,
    sigma: float,
    lengths: Sequence[int],
    tol: float = 1e-12,
) -> list[float]:
    """Moment ratios int F (x+sigma)^L dmu / int (x+sigma)^L dmu along a
    ladder of lengths; they approach F evaluated at the top of the
    measure's support as L grows."""
    out = []
    one = lambda x: np.ones_like(np.asarray(x, dtype=float))
    for length in lengths:
        denom = mu_moment(one, measure.rho, sigma, length, tol=tol)
        if denom <= 0:
            raise QuadratureError(f"non-positive normalizing moment at L={length}")
        out.append(mu_moment(F, measure.rho, sigma, length, tol=tol) / denom)
    return out


def semicircle_moment(k: int) -> int:
    """Exact semicircle moments on [-2, 2]: zero at odd k, the Catalan
    number C_{k/2} at even k, via the integer recurrence
    C_0 = 1, C_{j+1} = C_j * 2(2j + 1) / (j + 2)."""
    if k < 0:
        raise RejectedInputError("moment order must be non-negative")
    if k % 2 == 1:
        return 0
    c = 1
    for j in range(k // 2):
        c = c * 2 * (2 * j + 1) // (j + 2)
    return c
