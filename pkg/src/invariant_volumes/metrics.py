"""Infinitesimal invariant metrics at a point and direction.

All values are squared norms g(p, v).  The Carathéodory lower bound uses the
same maps-out family as the volume bound, measured on the line through p
along v: a map D -> B^n followed by the projection onto the line through the
image of v gives a disc map with derivative |K v|.  The Kobayashi upper bound
uses discs t -> F(t e) inside the certified ellipsoids F(B^n) ⊂ D.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .bounds import CLOSED_FORM_RTOL, DIFFERENTIATION_RTOL, OPTIMIZER_RTOL, BoundKind
from .curvature import PSD_TOLERANCE, KahlerPotential, mixed_hessian
from .domains import _require_domain
from .errors import DimensionMismatchError, OutsideDomainError, SingularMetricError
from .forms import as_point, as_points
from .maps import MapSearchConfig, automorphism_linear_part, multistart_maximize
from .volumes import (
    LinearSlice,
    _attains,
    _bergman_kernel,
    _pack,
    _unpack,
    closed_form_slice_volume,
    restricted_caratheodory_lower,
)

__all__ = [
    "MetricValue",
    "caratheodory_metric_lower",
    "kobayashi_metric_upper",
    "bergman_metric",
    "bergman_metric_matrix",
    "poincare_metric_ball",
    "ball_metric_matrix",
    "ke_metric_ball",
]


@dataclass(frozen=True)
class MetricValue:
    value: float
    bound_kind: BoundKind
    tolerance: float = CLOSED_FORM_RTOL
    diagnostics: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"metric value must be nonnegative, got {self.value}")

    def __float__(self):
        return float(self.value)


def _direction(v, n):
    v = as_point(v, n)
    if not np.any(v):
        raise ValueError("direction must be nonzero")
    return v


def caratheodory_metric_lower(D, p, v, cfg: MapSearchConfig | None = None) -> MetricValue:
    D = _require_domain(D)
    p = D._check_interior(p)
    v = _direction(v, D.dim)
    est = restricted_caratheodory_lower(D, LinearSlice(D, v[:, None], p), p, cfg)
    return MetricValue(est.value, est.bound_kind, est.tolerance, est.diagnostics)


def _disc(D, p, v, L, x0):
    """|(dF(0))^-1 v|^2 for F(w) = x0 + s L psi_{-a}(w), or None."""
    s = D.ellipsoid_max_scale(x0, L)
    if not (np.isfinite(s) and s > 0):
        return None
    try:
        a = np.linalg.solve(s * L, p - x0)
        u = np.linalg.solve(s * L, v)
    except np.linalg.LinAlgError:
        return None
    aa = np.vdot(a, a).real
    if aa >= 1:
        return None
    # psi_a has derivative L_a / (1 - |a|^2) at a
    w = automorphism_linear_part(a) @ u / (1 - aa)
    return np.vdot(w, w).real


def kobayashi_metric_upper(D, p, v, cfg: MapSearchConfig | None = None) -> MetricValue:
    D = _require_domain(D)
    p = D._check_interior(p)
    n = D.dim
    v = _direction(v, n)
    cfg = cfg or MapSearchConfig()
    closed = closed_form_slice_volume(D, LinearSlice(D, v[:, None], p), p)
    ctr, _ = D.circumball()
    seeds = [_pack(np.eye(n), ctr), _pack(np.eye(n), p)]
    shapes = [(n, n), (n,)]

    def objective(x):
        val = _disc(D, p, v, *_unpack(x, shapes))
        return -np.inf if val is None or val <= 0 else -np.log(val)

    refine = not any(_attains(np.exp(-objective(x)), closed) for x in seeds)
    result = multistart_maximize(objective, seeds, cfg, refine)
    diag = dict(evaluations=result.evaluations, starts=result.starts)
    if not np.isfinite(result.value):
        diag["note"] = "no disc through (p, v) in the family"
        return MetricValue(np.inf, BoundKind.UPPER, OPTIMIZER_RTOL, diag)
    value = float(np.exp(-result.value))
    kind = BoundKind.EXACT if _attains(value, closed) or (
        closed is not None and abs(value - closed) <= CLOSED_FORM_RTOL * closed) else BoundKind.UPPER
    if closed is not None:
        diag["closed_form"] = closed
    return MetricValue(value, kind, OPTIMIZER_RTOL, diag)


def _bergman_potential(D) -> KahlerPotential:
    ctr, R = D.circumball()

    def log_kernel(Z):
        return np.log([_bergman_kernel(D, z) for z in as_points(Z, D.dim)])

    def validity(z):
        ext = D.boundary_extremes(z) if D.contains(z) else None
        return 0.0 if ext is None else ext.inner

    return KahlerPotential(log_kernel, D.dim, validity, R)


def bergman_metric_matrix(D, p) -> np.ndarray:
    """Mixed Hessian of log v^B at p from the closed-form Bergman density."""
    D = _require_domain(D)
    p = D._check_interior(p)
    if _bergman_kernel(D, p) <= 0:
        raise SingularMetricError("Bergman density vanishes")
    return mixed_hessian(_bergman_potential(D), p)


def bergman_metric(D, p, v) -> MetricValue:
    """sum_ij G[i, j] v_i conj(v_j) with G the mixed Hessian of log v^B.

    The Hessian comes from finite differences of the closed-form density.
    """
    G = bergman_metric_matrix(D, p)
    v = _direction(v, D.dim)
    if np.min(np.linalg.eigvalsh(G)) <= PSD_TOLERANCE:
        raise SingularMetricError(f"Bergman metric is degenerate at {p}")
    return MetricValue(float((v @ G @ v.conj()).real), BoundKind.EXACT, DIFFERENTIATION_RTOL)


def ball_metric_matrix(r: float, z) -> np.ndarray:
    """Coefficient matrix g[i, j] of the potential metric -log(r^2 - |z|^2)."""
    z = as_point(z)
    s = r * r - np.vdot(z, z).real
    if s <= 0:
        raise OutsideDomainError(f"{z} is outside the ball of radius {r}")
    return np.eye(z.size) / s + np.outer(z.conj(), z) / s ** 2


def poincare_metric_ball(r: float, z, v) -> MetricValue:
    """Metric of the potential -log(r^2 - |z|^2):

    |v|^2 / (r^2 - |z|^2) + |<v, z>|^2 / (r^2 - |z|^2)^2.
    """
    z = as_point(z)
    v = as_point(v)
    if v.size != z.size:
        raise DimensionMismatchError("point and direction dimensions differ")
    s = r * r - np.vdot(z, z).real
    if s <= 0:
        raise OutsideDomainError(f"{z} is outside the ball of radius {r}")
    value = np.vdot(v, v).real / s + abs(np.vdot(z, v)) ** 2 / s ** 2
    return MetricValue(float(value), BoundKind.EXACT)


def ke_metric_ball(r: float, z, v) -> MetricValue:
    """Kähler-Einstein metric of the ball, which is the potential metric above."""
    return poincare_metric_ball(r, z, v)
