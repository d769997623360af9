"""Kähler geometry from a potential by finite differences.

Derivatives are taken in the real coordinates u = (Re z, Im z) with product
central differences, extrapolated over the steps h, h/2, h/4 (the product
stencil error is even in h, so two Richardson levels cancel the h^2 and h^4
terms).  Complex derivatives are recombined with the Wirtinger operators

    d/dz_k    = (d/dx_k - i d/dy_k) / 2,
    d/dzbar_k = (d/dx_k + i d/dy_k) / 2.

Conventions: ``g[i, j] = d^2 phi / dz_i dzbar_j``; the curvature tensor is

    R[i,j,k,l] = -d_k dbar_l g_{i jbar} + g^{p qbar} (d_k g_{i qbar}) (dbar_l g_{p jbar}),

Ricci is the metric trace over (i, j) and the scalar curvature the metric
trace of Ricci.  With these conventions the ball potential
-log(r^2 - |z|^2) gives g(0) = I/r^2, HSC = -2, Ric = -(n+1) g and
S = -n(n+1).
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement, permutations, product
from typing import Callable

import numpy as np

from .errors import DimensionMismatchError, SingularMetricError, StepSizeError
from .forms import as_point

__all__ = [
    "KahlerPotential",
    "ball_potential",
    "flat_potential",
    "log_density_potential",
    "CurvatureReport",
    "real_derivative_tensor",
    "mixed_hessian",
    "metric_at",
    "curvature_at",
    "holomorphic_sectional_curvature",
    "ricci_and_scalar",
    "ricci_of_volume_density",
    "PSD_TOLERANCE",
]

# smallest eigenvalue above this counts as positive semidefinite
PSD_TOLERANCE = 1e-8
# default step as a fraction of the distance to the edge of validity
STEP_FRACTION = 0.04


@dataclass(frozen=True)
class KahlerPotential:
    """A smooth real function on an open set of C^n.

    ``func`` is vectorised: (m, n) complex -> (m,) real.  ``validity`` returns
    the distance from a point to the edge of the set where ``func`` is smooth
    (``None`` for entire potentials); ``scale`` is a characteristic length
    used to cap the step.
    """

    func: Callable[[np.ndarray], np.ndarray]
    dim: int
    validity: Callable[[np.ndarray], float] | None = None
    scale: float = 1.0

    def distance(self, z) -> float:
        d = np.inf if self.validity is None else float(self.validity(z))
        if d <= 0:
            raise StepSizeError(f"{z} is outside the validity domain of the potential")
        return d


def ball_potential(r: float = 1.0, n: int = 1) -> KahlerPotential:
    """-log(r^2 - |z|^2) on the ball of radius r."""
    return KahlerPotential(
        lambda Z: -np.log(r * r - np.sum(np.abs(Z) ** 2, axis=1)),
        n,
        lambda z: r - np.linalg.norm(z),
        r,
    )


def flat_potential(n: int = 1) -> KahlerPotential:
    return KahlerPotential(lambda Z: np.sum(np.abs(Z) ** 2, axis=1), n)


def log_density_potential(density: Callable[[np.ndarray], np.ndarray], n: int,
                          validity=None, scale: float = 1.0) -> KahlerPotential:
    """log V for a vectorised positive density V."""

    def f(Z):
        v = np.asarray(density(Z), float)
        if np.any(v <= 0):
            raise StepSizeError("density vanishes inside the difference stencil")
        return np.log(v)

    return KahlerPotential(f, n, validity, scale)


@lru_cache(maxsize=None)
def _stencil(m: int, k: int):
    """Product central-difference stencil for all order-k partials in m variables."""
    tuples = list(combinations_with_replacement(range(m), k))
    offsets, rows, coefs = [], [], []
    for t, tup in enumerate(tuples):
        for signs in product((1, -1), repeat=k):
            off = np.zeros(m, int)
            for a, s in zip(tup, signs):
                off[a] += s
            offsets.append(off)
            rows.append(t)
            coefs.append(np.prod(signs))
    uniq, inv = np.unique(np.array(offsets), axis=0, return_inverse=True)
    C = np.zeros((len(tuples), len(uniq)))
    np.add.at(C, (np.array(rows), inv.ravel()), np.array(coefs, float))
    return tuples, uniq.astype(float), C


def real_derivative_tensor(func, u: np.ndarray, k: int, h: float):
    """Symmetric tensor of all k-th partials of ``func`` at real point ``u``.

    ``func`` takes an (m, 2n) real array.  Returns the tensor and an error
    estimate (difference of the last two extrapolation levels).
    """
    m = u.size
    tuples, offsets, C = _stencil(m, k)

    def level(step):
        vals = np.asarray(func(u + step * offsets), float)
        if not np.all(np.isfinite(vals)):
            raise StepSizeError(f"non-finite values in the difference stencil (h={step:g})")
        return C @ vals / (2 * step) ** k

    T0, T1, T2 = level(h), level(h / 2), level(h / 4)
    R10, R11 = (4 * T1 - T0) / 3, (4 * T2 - T1) / 3
    R2 = (16 * R11 - R10) / 15
    err = float(np.max(np.abs(R2 - R11))) if R2.size else 0.0
    full = np.zeros((m,) * k)
    for val, tup in zip(R2, tuples):
        for perm in set(permutations(tup)):
            full[perm] = val
    return full, err


def _wirtinger(n):
    W = np.zeros((n, 2 * n), complex)
    W[np.arange(n), np.arange(n)] = 0.5
    W[np.arange(n), n + np.arange(n)] = -0.5j
    return W


def _real_func(func, n):
    return lambda U: func(U[:, :n] + 1j * U[:, n:])


def _step(phi: KahlerPotential, z, h):
    if h is not None:
        return h
    d = phi.distance(z)
    return STEP_FRACTION * min(d, phi.scale)


def _prepare(phi: KahlerPotential, z):
    z = as_point(z)
    if z.size != phi.dim:
        raise DimensionMismatchError(f"point of dimension {z.size} for a potential on C^{phi.dim}")
    return z, np.concatenate([z.real, z.imag])


def mixed_hessian(phi: KahlerPotential, z, h: float | None = None) -> np.ndarray:
    """Matrix of d^2 phi / dz_i dzbar_j at z (hermitian)."""
    z, u = _prepare(phi, z)
    n = phi.dim
    H, _ = real_derivative_tensor(_real_func(phi.func, n), u, 2, _step(phi, z, h))
    W = _wirtinger(n)
    g = np.einsum("ia,jb,ab->ij", W, W.conj(), H)
    return 0.5 * (g + g.conj().T)


def metric_at(phi: KahlerPotential, z, h: float | None = None) -> np.ndarray:
    return mixed_hessian(phi, z, h)


@dataclass(frozen=True)
class CurvatureReport:
    metric: np.ndarray
    curvature: np.ndarray
    ricci: np.ndarray
    scalar: float
    hsc: float
    step: float
    error: float
    positive_definite: bool


def _min_eig(M):
    return float(np.min(np.linalg.eigvalsh(0.5 * (M + M.conj().T))))


def curvature_at(phi: KahlerPotential, z, h: float | None = None) -> CurvatureReport:
    """Metric, curvature tensor, Ricci and scalar curvature at z."""
    z, u = _prepare(phi, z)
    n = phi.dim
    step = _step(phi, z, h)
    f = _real_func(phi.func, n)
    H2, e2 = real_derivative_tensor(f, u, 2, step)
    H3, e3 = real_derivative_tensor(f, u, 3, step)
    H4, e4 = real_derivative_tensor(f, u, 4, step)
    W = _wirtinger(n)
    Wc = W.conj()
    g = np.einsum("ia,jb,ab->ij", W, Wc, H2)
    g = 0.5 * (g + g.conj().T)
    pd = _min_eig(g) > PSD_TOLERANCE
    if not pd:
        raise SingularMetricError(f"metric is not positive definite at {z}")
    T3 = np.einsum("ia,jb,kc,abc->ijk", W, Wc, W, H3)
    T4 = np.einsum("ia,jb,kc,ld,abcd->ijkl", W, Wc, W, Wc, H4)
    ginv = np.linalg.inv(g)
    # g^{p qbar} = ginv[q, p]
    R = -T4 + np.einsum("qp,iqk,jpl->ijkl", ginv, T3, T3.conj())
    ric, scal = _traces(g, R)
    report = CurvatureReport(g, R, ric, scal, float("nan"), step, max(e2, e3, e4), pd)
    e1 = np.zeros(n, complex)
    e1[0] = 1
    return CurvatureReport(g, R, ric, scal, holomorphic_sectional_curvature(report, e1),
                           step, max(e2, e3, e4), pd)


def _traces(g, R):
    ginv = np.linalg.inv(g)
    ric = np.einsum("ji,ijkl->kl", ginv, R)
    ric = 0.5 * (ric + ric.conj().T)
    scal = float(np.einsum("lk,kl->", ginv, ric).real)
    return ric, scal


def holomorphic_sectional_curvature(report: CurvatureReport, v) -> float:
    """R(v, vbar, v, vbar) / g(v, vbar)^2."""
    v = as_point(v, report.metric.shape[0])
    if not np.any(v):
        raise ValueError("direction must be nonzero")
    num = np.einsum("ijkl,i,j,k,l->", report.curvature, v, v.conj(), v, v.conj()).real
    den = np.einsum("ij,i,j->", report.metric, v, v.conj()).real
    return float(num / den ** 2)


def ricci_and_scalar(report: CurvatureReport):
    if _min_eig(report.metric) <= PSD_TOLERANCE:
        raise SingularMetricError("metric is singular")
    return _traces(report.metric, report.curvature)


def ricci_of_volume_density(density: Callable[[np.ndarray], np.ndarray], z, n: int | None = None,
                            validity=None, scale: float = 1.0, h: float | None = None) -> np.ndarray:
    """Mixed Hessian of log V at z.

    This is the coefficient matrix of i ddbar log V written against
    (i/2) dz ^ dzbar halved, i.e. -Ric(V) = 2 * (i/2) * H.  A volume form of
    a Kähler-Einstein metric with Ric = -2(n+1) omega returns (n+1) g.
    """
    z = as_point(z)
    n = z.size if n is None else n
    return mixed_hessian(log_density_potential(density, n, validity, scale), z, h)
