"""Invariant volume densities: Poincaré, Bergman, Kähler-Einstein, and
bounds for the Carathéodory and Kobayashi pseudo-volume forms.

The Carathéodory and Kobayashi forms are extremal problems over all
holomorphic maps.  They are bounded here by searching two closed families:

* maps out, ``z -> U^H psi_a(M (z - x0) / rho)``: an affine map whose image of
  D is certified to lie in the unit ball (rho from ``D.affine_sup_bound``),
  followed by the ball automorphism moving the image of p to 0 and an
  orthogonal projection onto C^d.  Their densities are lower bounds.
* maps in, ``w -> x0 + s L psi_{-a}(w)``: an ellipsoid certified to lie in D
  (s from ``D.ellipsoid_max_scale``) parameterised by the unit ball with 0
  sent to p.  Their inverse Jacobian densities are upper bounds.

Both families contain the extremal maps of balls, so the bounds are exact
there.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from math import factorial

import numpy as np

from .bounds import CLOSED_FORM_RTOL, OPTIMIZER_RTOL, BoundKind
from .domains import AffineImage, Ball, Polydisk, Product, _require_domain
from .errors import DimensionMismatchError, OutsideDomainError, UnsupportedDomainError
from .forms import VolumeDensity, as_point, chunked_gram, poincare_coefficient
from .maps import (
    Affine,
    BallAutomorphism,
    CandidateMap,
    Composition,
    MapSearchConfig,
    automorphism_linear_part,
    multistart_maximize,
)

__all__ = [
    "VolumeEstimate",
    "LinearSlice",
    "poincare_density",
    "caratheodory_lower",
    "kobayashi_upper",
    "restricted_caratheodory_lower",
    "restricted_kobayashi_upper",
    "bergman_density_closed",
    "bergman_density_numeric",
    "ke_density_ball",
    "ke_density",
    "closed_form_poincare_volume",
    "closed_form_slice_volume",
    "DEFAULT_BERGMAN_DEGREE",
    "GRAM_CONDITION_LIMIT",
]

DEFAULT_BERGMAN_DEGREE = {1: 12, 2: 8, 3: 6}
GRAM_CONDITION_LIMIT = 1e10


@dataclass
class VolumeEstimate:
    """A density with its bound kind.

    ``density`` is None for an upper bound with no valid candidate, in which
    case ``value`` is +inf.
    """

    density: VolumeDensity | None
    bound_kind: BoundKind
    witness: CandidateMap | None = None
    diagnostics: dict = field(default_factory=dict)
    tolerance: float = CLOSED_FORM_RTOL

    @property
    def value(self) -> float:
        return np.inf if self.density is None else self.density.value


def poincare_density(d: int, r: float, z) -> VolumeDensity:
    """r^2 / (r^2 - |z|^2)^(d+1)."""
    z = as_point(z, d)
    return VolumeDensity(poincare_coefficient(d, r, z), d)


@dataclass(frozen=True)
class LinearSlice:
    """The d-dimensional slice {base + E u} of ``domain``.

    ``embedding`` is an injective n x d matrix E; slice densities are measured
    in the coordinates u.
    """

    domain: object
    embedding: np.ndarray
    base: np.ndarray = None

    def __post_init__(self):
        n = self.domain.dim
        E = np.asarray(self.embedding, complex)
        if E.ndim == 1:
            E = E[:, None]
        if E.shape[0] != n or E.shape[1] > n:
            raise DimensionMismatchError(f"embedding must be {n} x d with d <= {n}")
        if np.linalg.matrix_rank(E) != E.shape[1]:
            raise ValueError("slice embedding must be injective")
        q = np.zeros(n, complex) if self.base is None else as_point(self.base, n)
        object.__setattr__(self, "embedding", E)
        object.__setattr__(self, "base", q)

    @classmethod
    def coordinate(cls, domain, d: int, base=None) -> "LinearSlice":
        """The slice z_{d+1} = ... = z_n = const (const from ``base``)."""
        return cls(domain, np.eye(domain.dim, d), base)

    @classmethod
    def whole(cls, domain) -> "LinearSlice":
        return cls(domain, np.eye(domain.dim))

    @property
    def dim(self) -> int:
        return self.embedding.shape[1]

    def to_ambient(self, u):
        return self.base + self.embedding @ as_point(u, self.dim)

    def to_slice(self, p, atol: float = 1e-12):
        p = as_point(p, self.domain.dim)
        u, *_ = np.linalg.lstsq(self.embedding, p - self.base, rcond=None)
        if np.linalg.norm(self.to_ambient(u) - p) > atol * max(1.0, np.linalg.norm(p)):
            raise OutsideDomainError(f"{p} does not lie on the slice")
        return u


# -- parameter packing -----------------------------------------------------

def _pack(*arrays):
    flat = np.concatenate([np.asarray(a, complex).ravel() for a in arrays])
    return np.concatenate([flat.real, flat.imag])


def _unpack(x, shapes):
    half = x.size // 2
    z = x[:half] + 1j * x[half:]
    out, k = [], 0
    for shp in shapes:
        size = int(np.prod(shp))
        out.append(z[k:k + size].reshape(shp))
        k += size
    return out


# -- maps out of D (lower bounds) -----------------------------------------

def _outward(D, p, E, M, x0):
    """Density det(K^H K) of the projected automorphism family, or None."""
    rho = D.affine_sup_bound(M, -M @ x0)
    if not (np.isfinite(rho) and rho > 0):
        return None
    a = M @ (p - x0) / rho
    aa = np.vdot(a, a).real
    if aa >= 1:
        return None
    K = automorphism_linear_part(a) @ (M @ E) / (rho * (1 - aa))
    val = np.linalg.det(K.conj().T @ K).real
    return val, rho, a, K


def _outward_witness(D, p, E, M, x0) -> CandidateMap:
    _, rho, a, K = _outward(D, p, E, M, x0)
    U, _, _ = np.linalg.svd(K, full_matrices=False)
    maps = [Affine(M / rho, -M @ x0 / rho), BallAutomorphism(tuple(a))]
    if E.shape[1] < D.dim:
        maps.append(Affine(U.conj().T))
    return Composition(tuple(maps))


def _attains(value, target):
    return target is not None and np.isfinite(value) and abs(value - target) <= 1e-12 * target


def _ball_seeds(D, p, E):
    """Seeds that straighten D back to its ball when D is an affine ball.

    Returns ((M, x0), (K, du)) for the maps-out and maps-in families, where
    du is the slice-coordinate offset from p to the centre of the slice, or
    None for other domains.  On the maps-out side the automorphism built into
    the family already carries an off-centre slice to a central one.
    """
    inner = _unwrap_ball(D)
    if inner is None:
        return None
    B, A, t = inner
    Q, T = np.linalg.qr(np.linalg.solve(A, E))
    y_p = np.linalg.solve(A, p - t) - B.c
    dy = -Q @ (Q.conj().T @ y_p)  # from p to the slice centre, in ball coordinates
    Tinv = np.linalg.inv(T)
    return (np.linalg.inv(A), A @ B.c + t), (Tinv, Tinv @ (Q.conj().T @ dy))


def _outward_search(D, p, E, cfg, extra_seeds=(), target=None):
    n = D.dim
    ctr, _ = D.circumball()
    seeds = [(np.eye(n), ctr), (np.eye(n), p)]
    if E.shape[1] < n:
        # projection onto the slice directions
        Q, _ = np.linalg.qr(E)
        seeds += [(Q @ Q.conj().T, ctr), (Q @ Q.conj().T, p)]
    straight = _ball_seeds(D, p, E)
    if straight is not None:
        seeds.append(straight[0])
    seeds += [(np.asarray(M, complex), np.asarray(x0, complex)) for M, x0 in extra_seeds]
    shapes = [(n, n), (n,)]

    def objective(x):
        M, x0 = _unpack(x, shapes)
        res = _outward(D, p, E, M, x0)
        if res is None or res[0] <= 0:
            return -np.inf
        return np.log(res[0])

    packed = [_pack(M, x0) for M, x0 in seeds]
    # skip the search when a seed already realises the known extremal value
    refine = not any(_attains(np.exp(objective(x)), target) for x in packed)
    result = multistart_maximize(objective, packed, cfg, refine)
    M, x0 = _unpack(result.x, shapes)
    res = _outward(D, p, E, M, x0)
    if res is None or res[0] <= 0:
        return 0.0, None, result
    return res[0], _outward_witness(D, p, E, M, x0), result


# -- maps into D (upper bounds) ---------------------------------------------

def _inward(D, u_p, E, q, K, u0):
    """Inverse Jacobian density of w -> x0 + s E K psi_{-a}(w), or None."""
    d = K.shape[0]
    x0 = q + E @ u0
    L = E @ K
    s = D.ellipsoid_max_scale(x0, L)
    detK = abs(np.linalg.det(K))
    if not (np.isfinite(s) and s > 0 and detK > 0):
        return None
    a = np.linalg.solve(s * K, u_p - u0)
    aa = np.vdot(a, a).real
    if aa >= 1:
        return None
    val = 1.0 / ((1 - aa) ** (d + 1) * s ** (2 * d) * detK ** 2)
    return val, s, a


def _inward_witness(D, u_p, E, q, K, u0) -> CandidateMap:
    _, s, a = _inward(D, u_p, E, q, K, u0)
    return Composition((BallAutomorphism(tuple(-a)), Affine(s * E @ K, q + E @ u0)))


def _inward_search(D, u_p, E, q, cfg, extra_seeds=(), target=None):
    d = E.shape[1]
    ctr, _ = D.circumball()
    u_ctr, *_ = np.linalg.lstsq(E, ctr - q, rcond=None)
    seeds = [(np.eye(d), u_ctr), (np.eye(d), u_p)]
    straight = _ball_seeds(D, q + E @ u_p, E)
    if straight is not None:
        K, du = straight[1]
        seeds.append((K, u_p + du))
    seeds += [(np.asarray(K, complex), np.asarray(u0, complex)) for K, u0 in extra_seeds]
    shapes = [(d, d), (d,)]

    def objective(x):
        K, u0 = _unpack(x, shapes)
        res = _inward(D, u_p, E, q, K, u0)
        return -np.inf if res is None else -np.log(res[0])

    packed = [_pack(K, u0) for K, u0 in seeds]
    refine = not any(_attains(np.exp(-objective(x)), target) for x in packed)
    result = multistart_maximize(objective, packed, cfg, refine)
    K, u0 = _unpack(result.x, shapes)
    res = _inward(D, u_p, E, q, K, u0)
    if res is None:
        return np.inf, None, result
    return res[0], _inward_witness(D, u_p, E, q, K, u0), result


# -- closed forms ------------------------------------------------------------

def _unwrap_ball(D):
    """(ball, A, t) when D is a ball or an affine image of one, else None."""
    if isinstance(D, Ball):
        return D, np.eye(D.dim), np.zeros(D.dim)
    if isinstance(D, AffineImage):
        inner = _unwrap_ball(D.base)
        if inner is not None:
            B, A, t = inner
            return B, D.A @ A, D.A @ t + D.t
    return None


def closed_form_poincare_volume(D, p) -> float | None:
    """Exact Carathéodory = Kobayashi density where D is biholomorphic to a
    ball by an affine map (pullback of the Poincaré form), else None."""
    inner = _unwrap_ball(D)
    if inner is None:
        return None
    B, A, t = inner
    u = np.linalg.solve(A, p - t)
    n = B.dim
    return poincare_coefficient(n, B.radius, u - B.c) / abs(np.linalg.det(A)) ** 2


def _diag(result, **extra):
    info = dict(evaluations=result.evaluations, starts=result.starts)
    info.update(extra)
    return info


def _finish(value, witness, result, kind_if_inexact, closed, d):
    if closed is not None and np.isfinite(value) and abs(value - closed) <= CLOSED_FORM_RTOL * closed:
        kind = BoundKind.EXACT
    else:
        kind = kind_if_inexact
    diag = _diag(result)
    if closed is not None:
        diag["closed_form"] = closed
    if witness is None:
        diag["note"] = "no valid candidate in the family"
    density = VolumeDensity(float(value), d) if np.isfinite(value) else None
    return VolumeEstimate(density, kind, witness, diag, OPTIMIZER_RTOL)


def closed_form_slice_volume(D, Z: "LinearSlice", p) -> float | None:
    """Exact restricted density where D is a ball up to an affine map.

    The slice of a ball is again a ball in suitable coordinates: writing the
    embedding as Q T with orthonormal Q, the slice is the d-ball in w = T u of
    radius sqrt(R^2 - |perpendicular offset|^2).
    """
    inner = _unwrap_ball(D)
    if inner is None:
        return None
    B, A, t = inner
    E = np.linalg.solve(A, Z.embedding)
    q = np.linalg.solve(A, Z.base - t) - B.c
    u = Z.to_slice(p)
    Q, T = np.linalg.qr(E)
    par = Q.conj().T @ q
    perp2 = np.vdot(q, q).real - np.vdot(par, par).real
    r2 = B.radius ** 2 - perp2
    w = par + T @ u
    return poincare_coefficient(Z.dim, np.sqrt(r2), w) * abs(np.linalg.det(T)) ** 2


def caratheodory_lower(D, p, cfg: MapSearchConfig | None = None, extra_seeds=()) -> VolumeEstimate:
    """Lower bound for the Carathéodory volume density of D at p.

    ``extra_seeds`` are additional (M, x0) starting points for the family.
    """
    return restricted_caratheodory_lower(D, LinearSlice.whole(D), p, cfg, extra_seeds)


def kobayashi_upper(D, p, cfg: MapSearchConfig | None = None, extra_seeds=()) -> VolumeEstimate:
    """Upper bound for the Kobayashi volume density of D at p.

    ``extra_seeds`` are additional (K, u0) starting points for the family.
    """
    return restricted_kobayashi_upper(D, LinearSlice.whole(D), p, cfg, extra_seeds)


def restricted_caratheodory_lower(D, Z: LinearSlice, p, cfg: MapSearchConfig | None = None,
                                  extra_seeds=()) -> VolumeEstimate:
    """Lower bound for the Carathéodory density of D restricted to the slice Z."""
    D = _require_domain(D)
    p = D._check_interior(p)
    cfg = cfg or MapSearchConfig()
    closed = closed_form_slice_volume(D, Z, p)
    value, witness, result = _outward_search(D, p, Z.embedding, cfg, extra_seeds, closed)
    return _finish(value, witness, result, BoundKind.LOWER, closed, Z.dim)


def restricted_kobayashi_upper(D, Z: LinearSlice, p, cfg: MapSearchConfig | None = None,
                               extra_seeds=()) -> VolumeEstimate:
    """Upper bound for the Kobayashi density of D restricted to Z, over
    d-balls mapped into the slice."""
    D = _require_domain(D)
    p = D._check_interior(p)
    cfg = cfg or MapSearchConfig()
    closed = closed_form_slice_volume(D, Z, p)
    value, witness, result = _inward_search(D, Z.to_slice(p), Z.embedding, Z.base, cfg,
                                            extra_seeds, closed)
    return _finish(value, witness, result, BoundKind.UPPER, closed, Z.dim)


# -- Bergman -----------------------------------------------------------------

def _bergman_kernel(D, p) -> float:
    if isinstance(D, Ball):
        n, R = D.dim, D.radius
        s = 1 - np.sum(np.abs((p - D.c) / R) ** 2)
        if s <= 0:
            raise OutsideDomainError("point outside the ball")
        return factorial(n) / (np.pi ** n * R ** (2 * n)) / s ** (n + 1)
    if isinstance(D, Polydisk):
        rho = D.rho
        s = 1 - np.abs(p / rho) ** 2
        if np.any(s <= 0):
            raise OutsideDomainError("point outside the polydisk")
        return float(np.prod(1 / (np.pi * rho ** 2 * s ** 2)))
    if isinstance(D, Product):
        return float(np.prod([_bergman_kernel(f, p[sl]) for f, sl in zip(D.factors, D._slices)]))
    if isinstance(D, AffineImage):
        return _bergman_kernel(D.base, D.Ainv @ (p - D.t)) / abs(np.linalg.det(D.A)) ** 2
    raise UnsupportedDomainError(f"no closed-form Bergman kernel for {type(D).__name__}")


def bergman_density_closed(D, p) -> VolumeEstimate:
    """Bergman density on the diagonal from the known kernels.

    Ball of radius R in C^n: n! / (pi^n R^2n) (1 - |z/R|^2)^-(n+1); polydisks
    and products multiply; affine images transform by |det A|^-2.
    """
    p = as_point(p, D.dim)
    return VolumeEstimate(VolumeDensity(_bergman_kernel(D, p), D.dim), BoundKind.EXACT)


def _exponents(n: int, degree: int):
    """Multi-indices of total degree <= degree, ordered by degree."""
    out = []
    for k in range(degree + 1):
        for combo in combinations_with_replacement(range(n), k):
            alpha = [0] * n
            for i in combo:
                alpha[i] += 1
            out.append(tuple(alpha))
    return np.array(out, int)


def _monomials(Z, center, exps):
    W = np.asarray(Z) - center
    return np.prod(W[:, None, :] ** exps[None, :, :], axis=2)


def bergman_density_numeric(D, p, degree: int | None = None, quad=None) -> VolumeEstimate:
    """Bergman density restricted to polynomial forms of total degree <= degree.

    The Gram matrix of the monomials (centred at the domain's centre) is
    integrated with the domain's quadrature rule, chosen exact for polynomials
    in (z, zbar) of the needed degree.  The density on the subspace is
    b^T G^-1 conj(b), a lower bound nondecreasing in ``degree``.
    """
    D = _require_domain(D)
    p = D._check_interior(p)
    n = D.dim
    degree = DEFAULT_BERGMAN_DEGREE.get(n, 4) if degree is None else int(degree)
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    min_order = 1 if quad is None else quad.order
    ctr, _ = D.circumball()
    requested = degree
    while True:
        exps = _exponents(n, degree)
        order = max((degree + n) // 2 + 1, min_order)
        pts, w = D.quadrature(order, degree + 2)
        G = chunked_gram(lambda P: _monomials(P, ctr, exps), pts, w)
        scale = 1 / np.sqrt(G.diagonal().real)
        Gs = G * np.outer(scale, scale)
        cond = np.linalg.cond(Gs)
        if cond <= GRAM_CONDITION_LIMIT or degree == 0:
            break
        warnings.warn(f"Gram matrix condition {cond:.2e} at degree {degree}; reducing degree",
                      RuntimeWarning, stacklevel=2)
        degree -= 1
    b = scale * _monomials(p[None, :], ctr, exps)[0].conj()
    value = float(np.vdot(b, np.linalg.solve(Gs, b)).real)
    diag = dict(degree=degree, requested_degree=requested, basis_size=len(exps),
                condition=float(cond), nodes=len(w))
    return VolumeEstimate(VolumeDensity(value, n), BoundKind.LOWER, None, diag, CLOSED_FORM_RTOL)


# -- Kähler-Einstein -------------------------------------------------------

def ke_density_ball(d: int, r: float, z) -> VolumeEstimate:
    """Kähler-Einstein volume density (n+1)^n mu^n_r on the ball.

    With omega = (i/2) ddbar log mu^n one has omega^n = (n+1)^n n! mu^n, so
    omega^n / n! = (n+1)^n mu^n.
    """
    mu = poincare_density(d, r, z)
    return VolumeEstimate(mu.scaled((d + 1) ** d), BoundKind.EXACT)


def ke_density(D, p) -> VolumeEstimate:
    """Kähler-Einstein density on balls and their affine images."""
    inner = _unwrap_ball(D)
    if inner is None:
        raise UnsupportedDomainError("Kähler-Einstein density is only available on balls "
                                     "and affine images of balls")
    B, A, t = inner
    u = np.linalg.solve(A, as_point(p, D.dim) - t) - B.c
    est = ke_density_ball(B.dim, B.radius, u)
    return VolumeEstimate(est.density.scaled(abs(np.linalg.det(A)) ** -2), BoundKind.EXACT)
