"""Densities of top-degree forms, Jacobians and numerical integration.

All densities are taken against Lebesgue measure on C^n = R^{2n}: a form
written as ``c(z) dz_1 ^ dz̄_1 ^ ... ^ dz_n ^ dz̄_n`` is represented by the
real number ``c(z)``, with the ``(i/2)^n`` factors absorbed.  Under this
convention the Poincaré form of the ball of radius r has density
``r**(-2n)`` at the centre.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import (
    AccuracyNotReachedError,
    DegenerateComparisonError,
    DimensionMismatchError,
    OutsideDomainError,
)

__all__ = [
    "VolumeDensity",
    "as_point",
    "as_points",
    "jacobian_determinant_squared",
    "density_ratio",
    "poincare_coefficient",
    "QuadratureConfig",
    "IntegrationResult",
    "Box",
    "Disc",
    "StarRegion",
    "MonteCarloRegion",
    "integrate_density",
    "gauss_legendre",
]


def as_point(z, dim: int | None = None) -> np.ndarray:
    """Coerce ``z`` to a 1-D complex coordinate vector."""
    p = np.atleast_1d(np.asarray(z, dtype=complex))
    if p.ndim != 1 or p.size == 0:
        raise DimensionMismatchError(f"expected a 1-D coordinate vector, got shape {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError("point has non-finite coordinates")
    if dim is not None and p.size != dim:
        raise DimensionMismatchError(f"point has dimension {p.size}, expected {dim}")
    return p


def as_points(Z, dim: int) -> np.ndarray:
    """Coerce a batch of points to shape (m, dim)."""
    P = np.asarray(Z, dtype=complex)
    if P.ndim == 1:
        P = P.reshape(-1, dim) if dim > 1 else P[:, None]
    if P.ndim != 2 or P.shape[1] != dim:
        raise DimensionMismatchError(f"expected points of shape (m, {dim}), got {P.shape}")
    return P


@dataclass(frozen=True)
class VolumeDensity:
    """Nonnegative coefficient of a (d,d)-form at one point."""

    value: float
    dim: int

    def __post_init__(self):
        v = float(self.value)
        if not np.isfinite(v) or v < 0:
            raise ValueError(f"density must be finite and nonnegative, got {self.value!r}")
        if self.dim < 1:
            raise ValueError("form degree must be >= 1")
        object.__setattr__(self, "value", v)

    def scaled(self, factor: float) -> "VolumeDensity":
        return VolumeDensity(self.value * factor, self.dim)

    def __mul__(self, factor):
        if isinstance(factor, (int, float, np.floating)):
            return self.scaled(float(factor))
        return NotImplemented

    __rmul__ = __mul__

    def __float__(self):
        return self.value


def jacobian_determinant_squared(J) -> VolumeDensity:
    """|det J|^2 as a density of degree d for a square d x d Jacobian."""
    J = np.atleast_2d(np.asarray(J, dtype=complex))
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise DimensionMismatchError(f"Jacobian must be square, got shape {J.shape}")
    if not np.all(np.isfinite(J)):
        raise ValueError("Jacobian has non-finite entries")
    return VolumeDensity(abs(np.linalg.det(J)) ** 2, J.shape[0])


def density_ratio(num: VolumeDensity, den: VolumeDensity) -> float:
    if num.dim != den.dim:
        raise DimensionMismatchError(f"cannot compare densities of degree {num.dim} and {den.dim}")
    if den.value == 0.0:
        raise DegenerateComparisonError("denominator density vanishes at the comparison point")
    return num.value / den.value


def poincare_coefficient(d: int, r: float, Z) -> np.ndarray | float:
    """Density r^2 / (r^2 - |z|^2)^(d+1) of the Poincaré form on B^d_r.

    ``Z`` is one point (shape (d,)) or a batch (shape (m, d)).
    """
    Z = np.asarray(Z, dtype=complex)
    if Z.shape[-1] != d:
        raise DimensionMismatchError(f"point dimension {Z.shape[-1]} != ball dimension {d}")
    s = r * r - np.sum(np.abs(Z) ** 2, axis=-1)
    if np.any(s <= 0):
        raise OutsideDomainError(f"point outside the ball of radius {r}")
    out = r * r / s ** (d + 1)
    return float(out) if np.ndim(out) == 0 else out


# -- quadrature ---------------------------------------------------------------

def gauss_legendre(order: int, a: float = 0.0, b: float = 1.0):
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    x, w = leggauss(order)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


@dataclass(frozen=True)
class QuadratureConfig:
    """Refinement schedule for :func:`integrate_density`.

    The rule of ``order`` is compared with the rule of doubled order until two
    successive estimates agree to ``max(atol, rtol*|I|)``.
    """

    order: int = 16
    rtol: float = 1e-10
    atol: float = 1e-13
    max_refinements: int = 6
    mc_samples: int = 200_000
    seed: int = 0

    def __post_init__(self):
        if self.order < 1 or self.max_refinements < 1 or self.mc_samples < 2:
            raise ValueError("invalid quadrature configuration")


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    error: float
    order: int
    evaluations: int


class Region(Protocol):
    dim: int

    def rule(self, order: int) -> tuple[np.ndarray, np.ndarray]:
        ...


@dataclass(frozen=True)
class Box:
    """Product of rectangles [Re lo, Re hi] x [Im lo, Im hi], one per coordinate."""

    lower: tuple
    upper: tuple

    @property
    def dim(self):
        return len(self.lower)

    def rule(self, order):
        axes = []
        for lo, hi in zip(np.atleast_1d(np.asarray(self.lower, complex)),
                          np.atleast_1d(np.asarray(self.upper, complex))):
            axes.append(gauss_legendre(order, lo.real, hi.real))
            axes.append(gauss_legendre(order, lo.imag, hi.imag))
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
        coords = np.stack([g.ravel() for g in grids], axis=1)
        weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
        pts = coords[:, 0::2] + 1j * coords[:, 1::2]
        return pts, weights


def _polar_rule(center, theta_nodes, theta_weights, radius_fn, order):
    t_ref, w_ref = gauss_legendre(order)
    rmax = radius_fn(theta_nodes)
    # radial nodes scaled per angle: t in [0, rmax(theta)], area element t dt dtheta
    T = rmax[:, None] * t_ref[None, :]
    W = theta_weights[:, None] * (rmax[:, None] * w_ref[None, :]) * T
    pts = center + T * np.exp(1j * theta_nodes)[:, None]
    return pts.reshape(-1, 1), W.ravel()


@dataclass(frozen=True)
class Disc:
    center: complex = 0j
    radius: float = 1.0
    dim = 1

    def rule(self, order):
        m = 2 * order + 1
        theta = 2 * np.pi * np.arange(m) / m
        wt = np.full(m, 2 * np.pi / m)
        return _polar_rule(complex(self.center), theta, wt,
                           lambda th: np.full_like(th, self.radius), order)


@dataclass(frozen=True)
class StarRegion:
    """Planar region star-shaped about ``center``, cut into angular wedges.

    Each wedge is ``(theta0, theta1, radius_fn)`` where ``radius_fn`` maps an
    array of angles to the boundary distance along that ray.  Gauss-Legendre
    is used in both the angle and the radius of every wedge.
    """

    wedges: tuple
    center: complex = 0j
    dim = 1

    def rule(self, order):
        pts, wts = [], []
        for th0, th1, fn in self.wedges:
            th, wth = gauss_legendre(order, th0, th1)
            p, w = _polar_rule(complex(self.center), th, wth, fn, order)
            pts.append(p)
            wts.append(w)
        return np.concatenate(pts), np.concatenate(wts)


@dataclass(frozen=True)
class MonteCarloRegion:
    """Irregular region given by a vectorised indicator inside a Box."""

    bounding_box: Box
    indicator: Callable[[np.ndarray], np.ndarray]

    @property
    def dim(self):
        return self.bounding_box.dim


def _bbox_volume(box: Box) -> float:
    lo = np.atleast_1d(np.asarray(box.lower, complex))
    hi = np.atleast_1d(np.asarray(box.upper, complex))
    return float(np.prod((hi.real - lo.real) * (hi.imag - lo.imag)))


def _integrate_mc(f, region: MonteCarloRegion, quad: QuadratureConfig) -> IntegrationResult:
    rng = np.random.default_rng(quad.seed)
    box = region.bounding_box
    lo = np.atleast_1d(np.asarray(box.lower, complex))
    hi = np.atleast_1d(np.asarray(box.upper, complex))
    m = quad.mc_samples
    u = rng.random((m, box.dim)) + 1j * rng.random((m, box.dim))
    pts = lo.real + u.real * (hi.real - lo.real) + 1j * (lo.imag + u.imag * (hi.imag - lo.imag))
    inside = np.asarray(region.indicator(pts), dtype=bool)
    vals = np.zeros(m)
    if inside.any():
        vals[inside] = f(pts[inside])
    vol = _bbox_volume(box)
    est = vol * vals.mean()
    err = vol * vals.std(ddof=1) / np.sqrt(m)
    return IntegrationResult(float(est), float(err), 0, m)


def integrate_density(f: Callable[[np.ndarray], np.ndarray], region,
                      quad: QuadratureConfig | None = None) -> IntegrationResult:
    """Integrate a density against Lebesgue measure over ``region``.

    Parameters
    ----------
    f : callable
        Vectorised density: maps an (m, n) complex array of points to m
        nonnegative reals.
    region : Box, Disc, StarRegion, DomainModel or MonteCarloRegion
        Anything with a ``rule(order)`` method returning points and weights;
        ``MonteCarloRegion`` is sampled instead.
    quad : QuadratureConfig

    Returns
    -------
    IntegrationResult
        Value with the difference of the last two refinement levels as the
        error estimate (standard error for Monte Carlo).

    Raises
    ------
    AccuracyNotReachedError
        If the refinement budget runs out; carries the best estimate.
    """
    quad = quad or QuadratureConfig()
    if isinstance(region, MonteCarloRegion):
        return _integrate_mc(f, region, quad)

    def level(order):
        pts, w = region.rule(order)
        vals = np.asarray(f(pts), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise ValueError("density is not finite on the quadrature nodes")
        return float(np.dot(w, vals)), len(w)

    order = quad.order
    prev, evals = level(order)
    err = np.inf
    for _ in range(quad.max_refinements):
        order *= 2
        cur, k = level(order)
        evals += k
        err = abs(cur - prev)
        if err <= max(quad.atol, quad.rtol * abs(cur)):
            return IntegrationResult(cur, err, order, evals)
        prev = cur
    raise AccuracyNotReachedError(
        f"quadrature did not reach rtol={quad.rtol} by order {order}", prev, err)


def chunked_gram(values_fn, points: np.ndarray, weights: np.ndarray, chunk: int = 20000):
    """Weighted Gram matrix sum_k w_k conj(V_k)^T V_k, built in chunks."""
    G = None
    for s in range(0, len(weights), chunk):
        V = values_fn(points[s:s + chunk])
        part = (V.conj().T * weights[s:s + chunk]) @ V
        G = part if G is None else G + part
    return G


def stack_points(parts: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate([np.atleast_2d(p) for p in parts], axis=1)
