"""Holomorphic candidate maps with closed-form values and Jacobians.

These are the search spaces for the extremal problems: maps out of a domain
into a ball (Carathéodory side) and maps from a ball into a domain
(Kobayashi side).  :class:`Composition` applies its members left to right,
so ``Composition([f, g])`` is ``g ∘ f``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .errors import DimensionMismatchError, InvalidCandidateError, OutsideDomainError
from .forms import VolumeDensity, as_point, jacobian_determinant_squared, poincare_coefficient

__all__ = [
    "CandidateMap",
    "Affine",
    "DiagonalScaling",
    "BallAutomorphism",
    "automorphism_linear_part",
    "PowerMap",
    "Composition",
    "identity",
    "evaluate",
    "jacobian",
    "pullback_poincare",
    "MapSearchConfig",
    "SearchResult",
    "multistart_maximize",
]


class CandidateMap:
    domain_dim: int
    codomain_dim: int

    def __call__(self, z):
        return self.evaluate(z)

    def _arg(self, z):
        return as_point(z, self.domain_dim)

    def then(self, other: "CandidateMap") -> "Composition":
        return Composition((self, other))


@dataclass(frozen=True, eq=False)
class Affine(CandidateMap):
    """z -> A z + b for a (k x n) complex matrix A."""

    A: np.ndarray
    b: np.ndarray = None

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, complex))
        b = np.zeros(A.shape[0], complex) if self.b is None else as_point(self.b, A.shape[0])
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def domain_dim(self):
        return self.A.shape[1]

    @property
    def codomain_dim(self):
        return self.A.shape[0]

    def evaluate(self, z):
        return self.A @ self._arg(z) + self.b

    def jacobian(self, z):
        self._arg(z)
        return self.A.copy()


@dataclass(frozen=True)
class DiagonalScaling(CandidateMap):
    factors: tuple

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(np.atleast_1d(np.asarray(self.factors, complex))))

    @property
    def domain_dim(self):
        return len(self.factors)

    codomain_dim = domain_dim

    def evaluate(self, z):
        return np.asarray(self.factors) * self._arg(z)

    def jacobian(self, z):
        self._arg(z)
        return np.diag(np.asarray(self.factors))


def automorphism_linear_part(a: np.ndarray) -> np.ndarray:
    """P + sqrt(1 - |a|^2) Q, with P the projection onto C a and Q = I - P."""
    n = a.size
    norm = np.linalg.norm(a)
    if norm == 0:
        return np.eye(n, dtype=complex)
    u = a / norm  # |a|^2 can underflow where |a| does not
    P = np.outer(u, u.conj())
    return P + np.sqrt(1 - norm * norm) * (np.eye(n) - P)


@dataclass(frozen=True)
class BallAutomorphism(CandidateMap):
    """Automorphism of the unit ball B^n sending ``a`` to 0.

    psi_a(z) = (P z + s Q z - a) / (1 - <z, a>), with P the orthogonal
    projection onto C a, Q = I - P and s = sqrt(1 - |a|^2).  The inverse of
    psi_a is psi_{-a}; for n = 1, psi_a(z) = (z - a) / (1 - conj(a) z).
    """

    a: tuple

    def __post_init__(self):
        a = as_point(self.a)
        if np.linalg.norm(a) >= 1:
            raise OutsideDomainError("automorphism centre must lie in the open unit ball")
        object.__setattr__(self, "a", tuple(a))

    @property
    def domain_dim(self):
        return len(self.a)

    codomain_dim = domain_dim

    @property
    def _vec(self):
        return np.asarray(self.a, complex)

    @property
    def linear_part(self) -> np.ndarray:
        return automorphism_linear_part(self._vec)

    def evaluate(self, z):
        z = self._arg(z)
        a = self._vec
        return (self.linear_part @ z - a) / (1 - np.vdot(a, z))

    def jacobian(self, z):
        z = self._arg(z)
        a = self._vec
        L = self.linear_part
        den = 1 - np.vdot(a, z)
        num = L @ z - a
        return L / den + np.outer(num, a.conj()) / den ** 2

    def inverse(self) -> "BallAutomorphism":
        return BallAutomorphism(tuple(-self._vec))


@dataclass(frozen=True)
class PowerMap(CandidateMap):
    """Componentwise power map z -> (z_1^k_1, ..., z_n^k_n), k_i >= 0."""

    exponents: tuple

    def __post_init__(self):
        k = tuple(int(e) for e in np.atleast_1d(self.exponents))
        if min(k) < 0:
            raise ValueError("exponents must be nonnegative")
        object.__setattr__(self, "exponents", k)

    @property
    def domain_dim(self):
        return len(self.exponents)

    codomain_dim = domain_dim

    def evaluate(self, z):
        return self._arg(z) ** np.asarray(self.exponents)

    def jacobian(self, z):
        z = self._arg(z)
        k = np.asarray(self.exponents)
        d = np.where(k > 0, k * z ** np.maximum(k - 1, 0), 0)
        return np.diag(d.astype(complex))


@dataclass(frozen=True)
class Composition(CandidateMap):
    """Maps applied in order: ``maps[0]`` first."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(self.maps)
        if not maps:
            raise ValueError("empty composition")
        for f, g in zip(maps, maps[1:]):
            if f.codomain_dim != g.domain_dim:
                raise DimensionMismatchError(
                    f"cannot compose {type(f).__name__} (-> C^{f.codomain_dim}) "
                    f"with {type(g).__name__} (C^{g.domain_dim} ->)")
        object.__setattr__(self, "maps", maps)

    @property
    def domain_dim(self):
        return self.maps[0].domain_dim

    @property
    def codomain_dim(self):
        return self.maps[-1].codomain_dim

    def evaluate(self, z):
        w = self._arg(z)
        for f in self.maps:
            w = f.evaluate(w)
        return w

    def jacobian(self, z):
        w = self._arg(z)
        J = np.eye(self.domain_dim, dtype=complex)
        for f in self.maps:
            J = f.jacobian(w) @ J
            w = f.evaluate(w)
        return J


def identity(n: int) -> Affine:
    return Affine(np.eye(n))


def evaluate(f: CandidateMap, z) -> np.ndarray:
    return f.evaluate(z)


def jacobian(f: CandidateMap, z) -> np.ndarray:
    return f.jacobian(z)


def pullback_poincare(f: CandidateMap, z, r: float = 1.0) -> VolumeDensity:
    """Pull back the Poincaré form of B^d_r by f at z (d = codomain dim)."""
    J = f.jacobian(z)
    if J.shape[0] != J.shape[1]:
        raise DimensionMismatchError("pullback of a top form needs a square Jacobian")
    w = f.evaluate(z)
    if np.linalg.norm(w) >= r:
        raise InvalidCandidateError(f"candidate sends {z} to {w}, outside B_{r}")
    d = J.shape[0]
    return VolumeDensity(poincare_coefficient(d, r, w) * jacobian_determinant_squared(J).value, d)


# -- search ---------------------------------------------------------------

_PENALTY = 1e300

@dataclass(frozen=True)
class MapSearchConfig:
    """Multi-start Nelder-Mead over a parameter box.

    ``starts`` Latin-hypercube seeds are drawn in ``[-box, box]^k`` around the
    natural seed of the family; the deterministic seeds supplied by the caller
    are always tried as well.
    """

    starts: int = 4
    maxiter: int = 400
    tol: float = 1e-10
    box: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("multi-start count must be >= 1")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.maxiter < 0:
            raise ValueError("maxiter must be nonnegative")


@dataclass
class SearchResult:
    x: np.ndarray
    value: float
    evaluations: int
    starts: int
    history: list = field(default_factory=list)


def multistart_maximize(objective: Callable[[np.ndarray], float], seeds: Sequence[np.ndarray],
                        cfg: MapSearchConfig, refine: bool = True) -> SearchResult:
    """Maximise ``objective`` from fixed seeds plus Latin-hypercube starts.

    Non-finite objective values count as -inf.  Ties are broken by the
    lexicographic order of the parameter vector so the result does not depend
    on evaluation order.  With ``refine=False`` only the seeds are evaluated.
    """
    seeds = [np.asarray(s, float) for s in seeds]
    if not seeds:
        raise ValueError("at least one seed is required")
    k = seeds[0].size
    evals = 0

    def neg(x):
        nonlocal evals
        evals += 1
        v = objective(x)
        # a large finite penalty keeps the simplex arithmetic finite
        return -v if np.isfinite(v) else _PENALTY

    starts = list(seeds)
    if refine and k > 0:
        lhs = qmc.LatinHypercube(d=k, seed=cfg.seed).random(cfg.starts)
        starts += [seeds[0] + cfg.box * (2 * u - 1) for u in lhs]
    best = []
    for x0 in starts:
        f0 = neg(x0)
        if refine and cfg.maxiter > 0 and k > 0:
            res = minimize(neg, x0, method="Nelder-Mead",
                           options=dict(maxiter=cfg.maxiter, xatol=cfg.tol, fatol=cfg.tol,
                                        adaptive=k > 4))
            x, fx = (res.x, res.fun) if res.fun <= f0 else (x0, f0)
        else:
            x, fx = x0, f0
        best.append((fx, tuple(np.round(x, 12)), x))
    best.sort(key=lambda t: (t[0], t[1]))
    fx, _, x = best[0]
    value = -np.inf if fx >= _PENALTY else -fx
    return SearchResult(np.asarray(x), value, evals, len(starts),
                        [-np.inf if b[0] >= _PENALTY else -b[0] for b in best])
