"""Compact quotients of the disc by surface groups.

A closed surface of genus g >= 2 is the quotient of the unit disc by a
Fuchsian group with a regular 4g-gon fundamental domain whose angles are
2 pi / 4g.  The Carathéodory density of the disc is the Poincaré density mu,
a quarter of the curvature -1 area element, so integrating mu over the
polygon gives pi (g - 1).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

import numpy as np

from .bounds import BoundKind
from .errors import AccuracyNotReachedError
from .forms import QuadratureConfig, StarRegion, integrate_density, poincare_coefficient
from .harness import CheckRecord, compare

__all__ = [
    "FuchsianOctagon",
    "FuchsianPolygon",
    "build_octagon",
    "build_polygon",
    "caratheodory_measure",
    "caratheodory_measure_genus2",
    "canonical_dimensions",
    "canonical_volume_curve",
    "check_quotient_volume_bound",
    "QUOTIENT_RTOL",
]

# relative change between successive refinements that ends the quadrature
QUOTIENT_RTOL = 1e-5


@dataclass(frozen=True)
class FuchsianPolygon:
    """Regular geodesic 4g-gon centred at 0 with interior angles 2 pi / 4g.

    ``rho`` is the Euclidean radius of the vertices.  Side k joins vertices
    k and k+1 and lies on the circle of centre ``side_centers[k]`` and radius
    ``side_radius``, orthogonal to the unit circle.
    """

    genus: int
    rho: float

    @property
    def sides(self) -> int:
        return 4 * self.genus

    @property
    def angle(self) -> float:
        return 2 * np.pi / self.sides

    @property
    def vertices(self) -> np.ndarray:
        return self.rho * np.exp(2j * np.pi * np.arange(self.sides) / self.sides)

    @property
    def _center_distance(self) -> float:
        return (self.rho ** 2 + 1) / (2 * self.rho * np.cos(np.pi / self.sides))

    @property
    def side_centers(self) -> np.ndarray:
        N = self.sides
        return self._center_distance * np.exp(1j * np.pi * (2 * np.arange(N) + 1) / N)

    @property
    def side_radius(self) -> float:
        return float(np.sqrt(self._center_distance ** 2 - 1))

    def boundary_radius(self, theta, side: int) -> np.ndarray:
        """Distance from 0 to side ``side`` along the ray of angle theta."""
        c = self._center_distance
        phi = np.asarray(theta) - np.pi * (2 * side + 1) / self.sides
        cp = c * np.cos(phi)
        return cp - np.sqrt(cp * cp - 1)

    def region(self) -> StarRegion:
        N = self.sides
        wedges = tuple(
            (2 * np.pi * k / N, 2 * np.pi * (k + 1) / N,
             lambda th, k=k: self.boundary_radius(th, k))
            for k in range(N))
        return StarRegion(wedges)

    def interior_angles(self) -> np.ndarray:
        """Angles between the side tangents at each vertex, measured directly."""
        V, C = self.vertices, self.side_centers
        N = self.sides
        out = np.empty(N)
        for k in range(N):
            t_next = _tangent_towards(V[k], C[k], V[(k + 1) % N])
            t_prev = _tangent_towards(V[k], C[k - 1], V[k - 1])
            cosang = (t_next * np.conj(t_prev)).real
            out[k] = np.arccos(np.clip(cosang, -1, 1))
        return out

    def hyperbolic_area(self, quad: QuadratureConfig | None = None) -> float:
        """Area for the curvature -1 metric 4 |dz|^2 / (1 - |z|^2)^2."""
        return 4 * caratheodory_measure(self, quad)


FuchsianOctagon = FuchsianPolygon


def _tangent_towards(v, center, target):
    t = 1j * (v - center)
    t /= abs(t)
    return t if (t * np.conj(target - v)).real > 0 else -t


def build_polygon(genus: int) -> FuchsianPolygon:
    """Regular 4g-gon with angle 2 pi / 4g.

    The hyperbolic vertex radius R satisfies cosh R = cot(pi/N) cot(alpha/2)
    for N sides of angle alpha; the Euclidean radius is tanh(R/2).
    """
    if genus < 2:
        raise ValueError("a compact hyperbolic surface needs genus >= 2")
    N = 4 * genus
    alpha = 2 * np.pi / N
    cosh_R = 1 / (np.tan(np.pi / N) * np.tan(alpha / 2))
    rho = np.sqrt((cosh_R - 1) / (cosh_R + 1))
    return FuchsianPolygon(genus, float(rho))


def build_octagon() -> FuchsianPolygon:
    return build_polygon(2)


def _mu(Z):
    return poincare_coefficient(1, 1.0, Z)


def caratheodory_measure(poly: FuchsianPolygon, quad: QuadratureConfig | None = None) -> float:
    """Integral of the disc's Carathéodory density over the polygon.

    Gauss-Legendre on every wedge, doubling the order until two successive
    estimates agree to ``quad.rtol`` (default 1e-5 relative).
    """
    quad = quad or QuadratureConfig(order=8, rtol=QUOTIENT_RTOL, atol=0.0, max_refinements=8)
    try:
        return integrate_density(_mu, poly.region(), quad).value
    except AccuracyNotReachedError as exc:
        raise AccuracyNotReachedError(
            f"polygon integral did not settle: {exc}", exc.estimate, exc.error) from exc


def caratheodory_measure_genus2(polygon: FuchsianPolygon | None = None,
                                quad: QuadratureConfig | None = None) -> float:
    return caratheodory_measure(polygon or build_octagon(), quad)


def canonical_dimensions(genus: int, m_max: int) -> list[int]:
    """dim H^0(X, mK) for m = 1..m_max on a genus-g curve, by Riemann-Roch:
    g for m = 1 and (2m - 1)(g - 1) for m >= 2."""
    if genus < 2:
        raise ValueError("a compact hyperbolic surface needs genus >= 2")
    return [genus if m == 1 else (2 * m - 1) * (genus - 1) for m in range(1, m_max + 1)]


def canonical_volume_curve(genus: int, m_max: int = 20) -> Fraction:
    """vol(K_X) = lim dim H^0(mK) / m for a curve.

    For m >= 2 the dimensions are linear in m, so the limit is the slope of
    consecutive values, computed exactly and confirmed constant.
    """
    dims = canonical_dimensions(genus, m_max)
    slopes = {Fraction(b - a) for a, b in zip(dims[1:], dims[2:])}
    if len(slopes) != 1:
        raise ArithmeticError("dimension sequence is not eventually linear")
    return slopes.pop()


def check_quotient_volume_bound(poly: FuchsianPolygon | None = None, density_scale: float = 1.0,
                                quad: QuadratureConfig | None = None,
                                tol: float = 1e-3) -> CheckRecord:
    """((n!)^2 (n+1)^n / pi^n) mu^C(X) <= vol(K_X) for n = 1.

    For disc quotients this is an equality.  ``density_scale`` multiplies the
    Poincaré density, to test other normalisations (2 for the convention
    that keeps the 2^n factor of the coordinate forms).
    """
    poly = poly or build_octagon()
    n = 1
    measure = density_scale * caratheodory_measure(poly, quad)
    const = factorial(n) ** 2 * (n + 1) ** n / np.pi ** n
    vol = float(canonical_volume_curve(poly.genus))
    return compare(f"quotient_volume.genus{poly.genus}",
                   "((n!)^2 (n+1)^n / pi^n) mu^C(X) <= vol(K_X)", const * measure,
                   BoundKind.EXACT, vol, BoundKind.EXACT, tol, equality=True,
                   meta=dict(genus=poly.genus, measure=measure, constant=const,
                             density_scale=density_scale, vertex_radius=poly.rho))
