"""
Discrete increments standing in for the G-Brownian increment.

A :class:`Lattice` is one zero-mean random variable with finitely many outcomes,
pinned at a volatility level. A :class:`LatticeFamily` collects lattices whose
second moments span ``[sigma_lo**2, sigma_hi**2]``; the backward scheme takes the
supremum over its members.
"""

from collections.abc import Callable
from dataclasses import dataclass, field
from functools import lru_cache
from math import sqrt

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .utils.constants import (
    DEFAULT_GH_ORDER,
    MAX_GH_ORDER,
    MIN_GH_ORDER,
    MOMENT_TOLERANCE,
    NEGATIVE_VOLATILITY_ERROR,
    SECOND_MOMENT_TOLERANCE,
    SIGMA_ORDER_ERROR,
    WEIGHT_SUM_TOLERANCE,
)
from .utils.definitions import FloatArray, SchemeKind
from .utils.exceptions import (
    DomainError,
    InvalidOrderError,
    InvalidVolatilityError,
    LatticeInvariantError,
    UnsupportedOrderError,
)

SQRT_PI = sqrt(np.pi)


def _frozen(values: FloatArray) -> FloatArray:
    array = np.array(values, dtype=np.float64)
    array.setflags(write=False)
    return array


def _second_moment_matches(moment: float, sigma: float) -> bool:
    variance = sigma * sigma
    return abs(moment - variance) <= SECOND_MOMENT_TOLERANCE * max(1.0, variance)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Hermite rule for the weight function ``exp(-x**2)``."""

    order: int
    nodes: FloatArray
    weights: FloatArray

    def __post_init__(self) -> None:
        object.__setattr__(self, "nodes", _frozen(self.nodes))
        object.__setattr__(self, "weights", _frozen(self.weights))
        if np.any(self.weights <= 0.0):
            raise LatticeInvariantError("quadrature weights must be positive")
        if np.any(np.diff(self.nodes) <= 0.0):
            raise LatticeInvariantError("quadrature nodes must increase strictly")
        if abs(self.weights.sum() - SQRT_PI) > WEIGHT_SUM_TOLERANCE * SQRT_PI:
            raise LatticeInvariantError("quadrature weights must sum to sqrt(pi)")


@dataclass(frozen=True, eq=False)
class Lattice:
    """A finite zero-mean increment with second moment ``sigma_level**2``."""

    points: FloatArray
    probs: FloatArray
    sigma_level: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "points", _frozen(self.points))
        object.__setattr__(self, "probs", _frozen(self.probs))
        if self.points.shape != self.probs.shape or self.points.ndim != 1:
            raise LatticeInvariantError("points and probs must be matching vectors")
        if np.any(self.probs < 0.0):
            raise LatticeInvariantError("probabilities must be nonnegative")
        if abs(self.probs.sum() - 1.0) > WEIGHT_SUM_TOLERANCE:
            raise LatticeInvariantError("probabilities must sum to 1")
        scale = max(1.0, self.sigma_level)
        if abs(lattice_moment(self, 1)) > MOMENT_TOLERANCE * scale:
            raise LatticeInvariantError("lattice mean must vanish")
        if not _second_moment_matches(lattice_moment(self, 2), self.sigma_level):
            raise LatticeInvariantError("second moment must equal sigma_level**2")

    @property
    def size(self) -> int:
        return int(self.points.size)

    @property
    def max_abs_point(self) -> float:
        return float(np.max(np.abs(self.points)))


@dataclass(frozen=True, eq=False)
class LatticeFamily:
    """Finite parameter set of lattices spanning ``[sigma_lo, sigma_hi]``.

    All members share the same number of points, so the family can be stacked
    into ``(members, points)`` matrices for vectorized evaluation.
    """

    kind: SchemeKind
    members: tuple[Lattice, ...]
    sigma_lo: float
    sigma_hi: float
    order: int | None = None
    points_matrix: FloatArray = field(init=False, repr=False)
    probs_matrix: FloatArray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not self.members:
            raise LatticeInvariantError("a family needs at least one member")
        if not 0.0 <= self.sigma_lo <= self.sigma_hi < np.inf:
            raise LatticeInvariantError(
                SIGMA_ORDER_ERROR.format(self.sigma_lo, self.sigma_hi),
            )
        second = [lattice_moment(member, 2) for member in self.members]
        if not _second_moment_matches(min(second), self.sigma_lo):
            raise LatticeInvariantError("smallest second moment must be sigma_lo**2")
        if not _second_moment_matches(max(second), self.sigma_hi):
            raise LatticeInvariantError("largest second moment must be sigma_hi**2")
        object.__setattr__(
            self,
            "points_matrix",
            _frozen(np.stack([member.points for member in self.members])),
        )
        object.__setattr__(
            self,
            "probs_matrix",
            _frozen(np.stack([member.probs for member in self.members])),
        )

    @property
    def sigma_levels(self) -> FloatArray:
        return np.array([member.sigma_level for member in self.members])

    @property
    def max_abs_point(self) -> float:
        """Largest absolute increment over all members (``p_max``)."""
        return max(member.max_abs_point for member in self.members)

    def __len__(self) -> int:
        return len(self.members)


@lru_cache(maxsize=MAX_GH_ORDER)
def gauss_hermite_rule(order: int) -> QuadratureRule:
    """
    Compute the ``order``-point Gauss-Hermite rule.

    Nodes are the eigenvalues of the symmetric tridiagonal Jacobi matrix of the
    Hermite polynomials. Weights use the Christoffel sum over orthonormal
    polynomials, which stays accurate for the tiny outer weights of large rules.

    Args:
        order: Number of nodes, between 2 and 64

    Returns:
        QuadratureRule with symmetric nodes and weights summing to sqrt(pi)

    Raises:
        InvalidOrderError: If order < 2
        UnsupportedOrderError: If order > 64
    """
    if order < MIN_GH_ORDER:
        raise InvalidOrderError(order)
    if order > MAX_GH_ORDER:
        raise UnsupportedOrderError(order)

    off_diagonal = np.sqrt(np.arange(1, order) / 2.0)
    nodes = eigh_tridiagonal(np.zeros(order), off_diagonal, eigvals_only=True)
    nodes = 0.5 * (nodes - nodes[::-1])

    # p_{k+1} = x*sqrt(2/(k+1))*p_k - sqrt(k/(k+1))*p_{k-1}, orthonormal
    prev = np.zeros(order)
    current = np.full(order, np.pi**-0.25)
    christoffel = current**2
    for k in range(order - 1):
        prev, current = current, (
            nodes * sqrt(2.0 / (k + 1)) * current - sqrt(k / (k + 1)) * prev
        )
        christoffel = christoffel + current**2
    weights = 1.0 / christoffel
    weights = 0.5 * (weights + weights[::-1])
    weights *= SQRT_PI / weights.sum()

    return QuadratureRule(order=order, nodes=nodes, weights=weights)


def make_trinomial_lattice(sigma: float) -> Lattice:
    """Trinomial increment on ``(-1, 0, 1)`` with second moment ``sigma**2``."""
    if sigma < 0.0:
        raise DomainError(NEGATIVE_VOLATILITY_ERROR.format(sigma), {"sigma": sigma})
    if sigma > 1.0:
        raise InvalidVolatilityError(sigma)
    side = 0.5 * sigma * sigma
    return Lattice(
        points=np.array([-1.0, 0.0, 1.0]),
        probs=np.array([side, 1.0 - sigma * sigma, side]),
        sigma_level=float(sigma),
    )


def make_gh_lattice(rule: QuadratureRule, sigma: float) -> Lattice:
    """Increments ``sigma*sqrt(2)*x_i`` with probabilities ``A_i/sqrt(pi)``."""
    if sigma < 0.0:
        raise DomainError(NEGATIVE_VOLATILITY_ERROR.format(sigma), {"sigma": sigma})
    probs = rule.weights / SQRT_PI
    return Lattice(
        points=sigma * sqrt(2.0) * rule.nodes,
        probs=probs / probs.sum(),
        sigma_level=float(sigma),
    )


def make_family(
    kind: SchemeKind | str,
    sigma_lo: float,
    sigma_hi: float,
    extra_levels: int = 0,
    *,
    order: int | None = None,
) -> LatticeFamily:
    """
    Build the lattice family for a scheme.

    Members sit at ``sigma_lo``, ``sigma_hi`` and ``extra_levels`` equally spaced
    interior levels. Coinciding levels collapse into one member.

    Args:
        kind: Trinomial or Gauss-Hermite
        sigma_lo: Lower volatility bound
        sigma_hi: Upper volatility bound
        extra_levels: Number of interior levels
        order: Gauss-Hermite order (ignored for trinomial)

    Returns:
        LatticeFamily ordered by increasing sigma level
    """
    kind = SchemeKind(kind)
    if sigma_lo < 0.0:
        raise DomainError(NEGATIVE_VOLATILITY_ERROR.format(sigma_lo))
    if sigma_lo > sigma_hi:
        raise DomainError(SIGMA_ORDER_ERROR.format(sigma_lo, sigma_hi))
    if extra_levels < 0:
        raise DomainError("extra_levels must be nonnegative")

    levels = np.linspace(sigma_lo, sigma_hi, extra_levels + 2)
    levels[0], levels[-1] = sigma_lo, sigma_hi
    levels = np.unique(levels)

    build: Callable[[float], Lattice]
    if kind is SchemeKind.TRINOMIAL:
        build = make_trinomial_lattice
        order = None
    else:
        rule = gauss_hermite_rule(order if order is not None else DEFAULT_GH_ORDER)
        order = rule.order

        def build(sigma: float) -> Lattice:
            return make_gh_lattice(rule, sigma)

    return LatticeFamily(
        kind=kind,
        members=tuple(build(float(level)) for level in levels),
        sigma_lo=float(sigma_lo),
        sigma_hi=float(sigma_hi),
        order=order,
    )


def lattice_moment(lat: Lattice, k: int) -> float:
    """Return ``E[xi**k] = sum(probs * points**k)``."""
    return float(np.dot(lat.probs, lat.points**k))


def sublinear_expectation(
    fam: LatticeFamily,
    phi: Callable[[FloatArray], FloatArray],
) -> float:
    """Upper expectation ``max over members of E[phi(xi)]``."""
    return max(
        float(np.dot(member.probs, phi(member.points))) for member in fam.members
    )


def guaranteed_rate(fam: LatticeFamily) -> float:
    """Convergence order guaranteed for the family: 1/4 with zero skew, else 1/6."""
    symmetric = all(
        abs(lattice_moment(member, 3)) <= MOMENT_TOLERANCE
        and np.isfinite(lattice_moment(member, 4))
        for member in fam.members
    )
    return 0.25 if symmetric else 1.0 / 6.0
