"""Compatibility domain of an assignment: the system states it maps to
valid system-environment density operators.

Membership is certified by the smallest output eigenvalue; the domain
boundary is located by bisection along affine rays, and its volume is
estimated by Monte Carlo sampling under the Hilbert-Schmidt measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from assignlab.operators import (
    PSD_TOL,
    decompose,
    min_eigenvalue,
    random_density,
    require_density,
)

__all__ = [
    "CompatibilityVerdict",
    "domain_verdict",
    "RaySection",
    "boundary_along_ray",
    "DomainEstimate",
    "domain_volume",
    "SimplexDomainReport",
    "simplex_domain_check",
]

BISECTION_BRACKET = 1e-8
BISECTION_MAX_ITER = 60

# two-sided 95% normal quantile for the Wilson score interval
Z95 = 1.959963984540054


@dataclass(frozen=True)
class CompatibilityVerdict:
    lambda_min: float
    in_domain: bool
    tol: float


def domain_verdict(assignment, state: np.ndarray, tol: float = PSD_TOL) -> CompatibilityVerdict:
    """Is ``state`` mapped to a positive semidefinite operator?"""
    if tol <= 0:
        raise ValueError("tol must be positive")
    lam = min_eigenvalue(assignment.apply(state))
    return CompatibilityVerdict(lambda_min=lam, in_domain=lam >= -tol, tol=tol)


@dataclass(frozen=True, eq=False)
class RaySection:
    """Largest in-domain prefix of the segment center -> target."""

    center: np.ndarray
    target: np.ndarray
    t_star: float
    iterations: int
    bracket_width: float


def boundary_along_ray(
    assignment,
    center: np.ndarray,
    target: np.ndarray,
    tol: float = PSD_TOL,
    bracket: float = BISECTION_BRACKET,
    max_iter: int = BISECTION_MAX_ITER,
) -> RaySection:
    """Bisect for the largest t in [0, 1] with (1-t) center + t target in domain.

    The smallest output eigenvalue is concave along an affine segment of
    inputs, so the in-domain set on the ray is an interval containing t = 0;
    bisection on the exit point is therefore valid.
    """
    center = np.asarray(center, dtype=complex)
    target = require_density(np.asarray(target, dtype=complex), name="target")
    if not domain_verdict(assignment, center, tol).in_domain:
        raise ValueError("center state is not in the compatibility domain")

    def in_domain(t: float) -> bool:
        state = (1.0 - t) * center + t * target
        return min_eigenvalue(assignment.apply(state)) >= -tol

    if in_domain(1.0):
        return RaySection(center=center, target=target, t_star=1.0, iterations=0,
                          bracket_width=0.0)
    lo, hi = 0.0, 1.0
    iterations = 0
    while hi - lo > bracket and iterations < max_iter:
        mid = 0.5 * (lo + hi)
        if in_domain(mid):
            lo = mid
        else:
            hi = mid
        iterations += 1
    return RaySection(center=center, target=target, t_star=lo, iterations=iterations,
                      bracket_width=hi - lo)


@dataclass(frozen=True)
class DomainEstimate:
    samples: int
    hits: int
    fraction: float
    ci95: tuple[float, float]


def wilson_interval(hits: int, samples: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval; well-behaved for fractions near 0 or 1."""
    if samples < 1:
        raise ValueError("samples must be at least 1")
    p = hits / samples
    denom = 1.0 + z * z / samples
    center = (p + z * z / (2 * samples)) / denom
    half = z * np.sqrt(p * (1.0 - p) / samples + z * z / (4 * samples * samples)) / denom
    # the interval endpoints are exactly 0 (resp. 1) at p = 0 (resp. 1)
    low = 0.0 if hits == 0 else max(0.0, center - half)
    high = 1.0 if hits == samples else min(1.0, center + half)
    return (low, high)


def domain_volume(
    assignment, samples: int, rng: np.random.Generator, tol: float = PSD_TOL
) -> DomainEstimate:
    """Fraction of Hilbert-Schmidt-random states inside the compatibility domain."""
    if samples < 100:
        raise ValueError("need at least 100 samples for a volume estimate")
    hits = 0
    for _ in range(samples):
        state = random_density(assignment.dim_s, rng)
        if min_eigenvalue(assignment.apply(state)) >= -tol:
            hits += 1
    return DomainEstimate(
        samples=samples,
        hits=hits,
        fraction=hits / samples,
        ci95=wilson_interval(hits, samples),
    )


@dataclass(frozen=True)
class SimplexDomainReport:
    probes: int
    agreements: int
    max_gap: float  # worst |lambda_min - min(0, min_i q_i)| observed

    @property
    def all_agree(self) -> bool:
        return self.agreements == self.probes


def simplex_domain_check(
    assignment, samples: int, rng: np.random.Generator, tol: float = PSD_TOL
) -> SimplexDomainReport:
    """For an assignment with mutually orthonormal environment flags, the
    output spectrum is the coefficient vector padded with zeros, so domain
    membership is equivalent to all decomposition coefficients being
    nonnegative. Verify that equivalence on random probes."""
    taus = assignment.env_ops
    overlaps = np.einsum("iab,jba->ij", taus, taus)
    if np.max(np.abs(overlaps - np.eye(len(taus)))) > 1e-10:
        raise ValueError("environment operators are not orthonormal projectors")
    agreements = 0
    max_gap = 0.0
    for _ in range(samples):
        state = random_density(assignment.dim_s, rng)
        q = decompose(state, assignment.basis)
        lam = min_eigenvalue(assignment.apply(state))
        spectral = lam >= -tol
        coefficient = q.min() >= -tol
        if spectral == coefficient:
            agreements += 1
        max_gap = max(max_gap, abs(lam - min(0.0, q.min())))
    return SimplexDomainReport(probes=samples, agreements=agreements, max_gap=max_gap)
