"""Model bounded domains in C^n.

Four analytic kinds are supported: balls, polydisks centred at the origin,
Cartesian products of model domains, and images of a model domain under an
invertible complex-affine map.  Every kind knows its membership test, its
boundary distance extremes, a quadrature rule exact for polynomials in
(z, z̄) of moderate degree, and two certified geometric bounds used by the
extremal-map searches:

* ``affine_sup_bound(M, c)`` -- an upper bound for sup_D |M z + c|;
* ``ellipsoid_max_scale(x0, L)`` -- the largest s with x0 + s L(B) inside D.
"""
from __future__ import annotations

import ast
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionMismatchError, OutsideDomainError, UnsupportedDomainError
from .forms import as_point, as_points, gauss_legendre

__all__ = [
    "Ball",
    "Polydisk",
    "Product",
    "AffineImage",
    "BoundaryExtremes",
    "contains",
    "boundary_extremes",
    "ball_automorphism",
    "parse_domain",
    "DEFAULT_BOUNDARY_RESOLUTION",
]

# samples per real boundary dimension for sampled boundary extremes
DEFAULT_BOUNDARY_RESOLUTION = 10_000


@dataclass(frozen=True)
class BoundaryExtremes:
    """Distances from an interior point to the nearest/farthest boundary point."""

    inner: float
    outer: float
    exact: bool = True
    resolution: int | None = None

    def __post_init__(self):
        if not (0 < self.inner <= self.outer < np.inf):
            raise ValueError(f"invalid boundary extremes ({self.inner}, {self.outer})")


def _disc_t_rule(radius: float, order: int, n_angles: int):
    """Rule on the disc in (t = |z|^2, theta); area element dt dtheta / 2."""
    t, wt = gauss_legendre(order, 0.0, radius * radius)
    th = 2 * np.pi * np.arange(n_angles) / n_angles
    T, TH = np.meshgrid(t, th, indexing="ij")
    W = np.outer(wt, np.full(n_angles, np.pi / n_angles))
    return (np.sqrt(T) * np.exp(1j * TH)).ravel(), W.ravel()


def _tensor_rules(rules):
    pts, wts = rules[0]
    pts = np.atleast_2d(pts.T).T if pts.ndim == 1 else pts
    for p2, w2 in rules[1:]:
        p2 = p2[:, None] if p2.ndim == 1 else p2
        m1, m2 = len(wts), len(w2)
        pts = np.concatenate([np.repeat(pts, m2, axis=0), np.tile(p2, (m1, 1))], axis=1)
        wts = np.repeat(wts, m2) * np.tile(w2, m1)
    return pts, wts


def _split_range(M, v):
    """Norms of the components of v inside and orthogonal to range(M)."""
    U, sv, _ = np.linalg.svd(M, full_matrices=False)
    rank = int(np.sum(sv > 1e-13 * max(sv.max(initial=0.0), 1e-300)))
    par = U[:, :rank].conj().T @ v
    par_norm = float(np.linalg.norm(par))
    perp2 = float(np.vdot(v, v).real) - par_norm ** 2
    return par_norm, float(np.sqrt(max(perp2, 0.0)))


class _Domain:
    dim: int

    def contains(self, p) -> bool:
        p = as_point(p, self.dim)
        return bool(self.contains_many(p[None, :])[0])

    def _check_interior(self, x):
        x = as_point(x, self.dim)
        if not self.contains(x):
            raise OutsideDomainError(f"{x} is not an interior point of {self}")
        return x

    def rule(self, order: int):
        return self.quadrature(order, 2 * order + 1)


@dataclass(frozen=True)
class Ball(_Domain):
    radius: float = 1.0
    dim: int = 1
    center: tuple = None

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        if self.dim < 1:
            raise ValueError("dimension must be >= 1")
        c = np.zeros(self.dim, complex) if self.center is None else as_point(self.center, self.dim)
        object.__setattr__(self, "center", tuple(c))

    @property
    def c(self) -> np.ndarray:
        return np.asarray(self.center, complex)

    def contains_many(self, Z):
        Z = as_points(Z, self.dim)
        return np.sum(np.abs(Z - self.c) ** 2, axis=1) < self.radius ** 2

    def boundary_extremes(self, x) -> BoundaryExtremes:
        x = self._check_interior(x)
        d = np.linalg.norm(x - self.c)
        return BoundaryExtremes(self.radius - d, self.radius + d)

    def circumball(self):
        return self.c, self.radius

    def affine_sup_bound(self, M, c):
        # split the offset along range(M): the orthogonal part only adds in quadrature
        M = np.atleast_2d(M)
        par, perp = _split_range(M, M @ self.c + c)
        return float(np.hypot(perp, par + self.radius * np.linalg.norm(M, 2)))

    def ellipsoid_max_scale(self, x0, L):
        L = np.atleast_2d(L)
        sigma = np.linalg.norm(L, 2)
        par, perp = _split_range(L, np.asarray(x0) - self.c)
        if perp >= self.radius:
            return 0.0
        room = np.sqrt(self.radius ** 2 - perp ** 2) - par
        if sigma == 0:
            return np.inf if room > 0 else 0.0
        return max(room, 0.0) / sigma

    def quadrature(self, order, n_angles):
        n, R = self.dim, self.radius
        s, ws = gauss_legendre(order)
        grids = np.meshgrid(*([s] * n), indexing="ij")
        S = np.stack([g.ravel() for g in grids], axis=1)
        WS = np.prod(np.stack([g.ravel() for g in np.meshgrid(*([ws] * n), indexing="ij")], axis=1), axis=1)
        # collapsed coordinates of the simplex {t >= 0, sum t < R^2}
        T = np.empty_like(S)
        rest = np.ones(len(S))
        jac = np.full(len(S), R ** (2 * n))
        for k in range(n):
            T[:, k] = R * R * rest * S[:, k]
            if k < n - 1:
                jac *= (1 - S[:, k]) ** (n - 1 - k)
            rest = rest * (1 - S[:, k])
        th = 2 * np.pi * np.arange(n_angles) / n_angles
        ang = np.stack([g.ravel() for g in np.meshgrid(*([th] * n), indexing="ij")], axis=1)
        wang = (2 * np.pi / n_angles) ** n
        pts = (np.sqrt(T)[:, None, :] * np.exp(1j * ang)[None, :, :]).reshape(-1, n) + self.c
        w = np.repeat(WS * jac * 0.5 ** n * wang, len(ang))
        return pts, w

    def sample_interior(self, count, rng):
        g = rng.standard_normal((count, 2 * self.dim))
        u = g / np.linalg.norm(g, axis=1, keepdims=True)
        rad = self.radius * rng.random(count) ** (1 / (2 * self.dim))
        v = u * rad[:, None]
        return self.c + v[:, : self.dim] + 1j * v[:, self.dim:]

    def sample_boundary(self, count, rng):
        g = rng.standard_normal((count, 2 * self.dim))
        u = self.radius * g / np.linalg.norm(g, axis=1, keepdims=True)
        return self.c + u[:, : self.dim] + 1j * u[:, self.dim:]

    def boundary_point(self, params):
        """Boundary point from 2n unconstrained reals (radial projection)."""
        v = np.asarray(params, float)
        nrm = np.linalg.norm(v)
        if nrm == 0:
            v, nrm = np.eye(1, 2 * self.dim).ravel(), 1.0
        v = self.radius * v / nrm
        return self.c + v[: self.dim] + 1j * v[self.dim:]

    def __str__(self):
        return f"Ball(r={self.radius}, n={self.dim})"


@dataclass(frozen=True)
class Polydisk(_Domain):
    radii: tuple = (1.0,)

    def __post_init__(self):
        r = tuple(float(x) for x in np.atleast_1d(self.radii))
        if not r or min(r) <= 0:
            raise ValueError("polydisk radii must be positive")
        object.__setattr__(self, "radii", r)

    @property
    def dim(self):
        return len(self.radii)

    @property
    def c(self):
        return np.zeros(self.dim, complex)

    @property
    def rho(self):
        return np.asarray(self.radii)

    def contains_many(self, Z):
        Z = as_points(Z, self.dim)
        return np.all(np.abs(Z) < self.rho, axis=1)

    def boundary_extremes(self, x):
        x = self._check_interior(x)
        ax = np.abs(x)
        return BoundaryExtremes(float(np.min(self.rho - ax)), float(np.linalg.norm(self.rho + ax)))

    def circumball(self):
        return self.c, float(np.linalg.norm(self.rho))

    def affine_sup_bound(self, M, c):
        M = np.atleast_2d(M)
        c = np.asarray(c)
        spectral = np.linalg.norm(c) + np.linalg.norm(M, 2) * np.linalg.norm(self.rho)
        entrywise = np.linalg.norm(np.abs(c) + np.abs(M) @ self.rho)
        return min(spectral, entrywise)

    def ellipsoid_max_scale(self, x0, L):
        L = np.atleast_2d(L)
        rows = np.linalg.norm(L, axis=1)
        room = self.rho - np.abs(np.asarray(x0))
        if np.any(room <= 0):
            return 0.0
        with np.errstate(divide="ignore"):
            return float(np.min(np.where(rows > 0, room / np.where(rows > 0, rows, 1), np.inf)))

    def quadrature(self, order, n_angles):
        return _tensor_rules([_disc_t_rule(r, order, n_angles) for r in self.radii])

    def sample_interior(self, count, rng):
        rad = self.rho * np.sqrt(rng.random((count, self.dim)))
        return rad * np.exp(2j * np.pi * rng.random((count, self.dim)))

    def sample_boundary(self, count, rng):
        Z = self.sample_interior(count, rng)
        face = rng.integers(0, self.dim, count)
        ang = np.exp(2j * np.pi * rng.random(count))
        Z[np.arange(count), face] = self.rho[face] * ang
        return Z

    def __str__(self):
        return f"Polydisk(r={list(self.radii)})"


@dataclass(frozen=True)
class Product(_Domain):
    factors: tuple = ()

    def __post_init__(self):
        f = tuple(self.factors)
        if not f:
            raise ValueError("product needs at least one factor")
        object.__setattr__(self, "factors", f)

    @cached_property
    def _slices(self):
        out, start = [], 0
        for f in self.factors:
            out.append(slice(start, start + f.dim))
            start += f.dim
        return out

    @property
    def dim(self):
        return sum(f.dim for f in self.factors)

    @property
    def c(self):
        return np.concatenate([f.c for f in self.factors])

    def contains_many(self, Z):
        Z = as_points(Z, self.dim)
        ok = np.ones(len(Z), bool)
        for f, sl in zip(self.factors, self._slices):
            ok &= f.contains_many(Z[:, sl])
        return ok

    def boundary_extremes(self, x):
        x = self._check_interior(x)
        parts = [f.boundary_extremes(x[sl]) for f, sl in zip(self.factors, self._slices)]
        exact = all(p.exact for p in parts)
        res = max((p.resolution or 0) for p in parts) or None
        return BoundaryExtremes(min(p.inner for p in parts),
                                float(np.sqrt(sum(p.outer ** 2 for p in parts))), exact, res)

    def circumball(self):
        balls = [f.circumball() for f in self.factors]
        return np.concatenate([b[0] for b in balls]), float(np.sqrt(sum(b[1] ** 2 for b in balls)))

    def affine_sup_bound(self, M, c):
        M = np.atleast_2d(M)
        c = np.asarray(c, complex)
        shift = c.copy()
        spectral = 0.0
        rowwise = np.zeros(M.shape[0])
        for f, sl in zip(self.factors, self._slices):
            ctr, R = f.circumball()
            Mk = M[:, sl]
            shift = shift + Mk @ ctr
            spectral += np.linalg.norm(Mk, 2) * R
            rowwise += np.linalg.norm(Mk, axis=1) * R
        return min(np.linalg.norm(shift) + spectral, np.linalg.norm(np.abs(shift) + rowwise))

    def ellipsoid_max_scale(self, x0, L):
        L = np.atleast_2d(L)
        x0 = np.asarray(x0)
        return min(f.ellipsoid_max_scale(x0[sl], L[sl, :]) for f, sl in zip(self.factors, self._slices))

    def quadrature(self, order, n_angles):
        return _tensor_rules([f.quadrature(order, n_angles) for f in self.factors])

    def sample_interior(self, count, rng):
        return np.concatenate([f.sample_interior(count, rng) for f in self.factors], axis=1)

    def sample_boundary(self, count, rng):
        Z = self.sample_interior(count, rng)
        which = rng.integers(0, len(self.factors), count)
        for k, (f, sl) in enumerate(zip(self.factors, self._slices)):
            idx = np.flatnonzero(which == k)
            if idx.size:
                Z[idx, sl] = f.sample_boundary(idx.size, rng)
        return Z

    def __str__(self):
        return "Product(" + ", ".join(str(f) for f in self.factors) + ")"


@dataclass(frozen=True)
class AffineImage(_Domain):
    """Image of ``base`` under z -> matrix @ z + shift."""

    base: object = None
    matrix: tuple = None
    shift: tuple = None
    resolution: int = DEFAULT_BOUNDARY_RESOLUTION

    def __post_init__(self):
        n = self.base.dim
        A = np.eye(n, dtype=complex) if self.matrix is None else np.asarray(self.matrix, complex)
        if A.shape != (n, n):
            raise DimensionMismatchError(f"affine matrix must be {n}x{n}")
        if abs(np.linalg.det(A)) < 1e-14 * max(1.0, np.linalg.norm(A)) ** n:
            raise ValueError("affine matrix is not invertible")
        t = np.zeros(n, complex) if self.shift is None else as_point(self.shift, n)
        object.__setattr__(self, "matrix", tuple(map(tuple, A)))
        object.__setattr__(self, "shift", tuple(t))

    @property
    def A(self):
        return np.asarray(self.matrix, complex)

    @property
    def t(self):
        return np.asarray(self.shift, complex)

    @cached_property
    def Ainv(self):
        return np.linalg.inv(self.A)

    @property
    def dim(self):
        return self.base.dim

    @property
    def c(self):
        return self.A @ self.base.c + self.t

    def to_base(self, Z):
        return (np.asarray(Z) - self.t) @ self.Ainv.T

    def from_base(self, U):
        return np.asarray(U) @ self.A.T + self.t

    def contains_many(self, Z):
        return self.base.contains_many(self.to_base(as_points(Z, self.dim)))

    def boundary_extremes(self, x, rng=None):
        x = self._check_interior(x)
        rng = rng or np.random.default_rng(0)
        count = self.resolution * (2 * self.dim - 1)
        Y = self.from_base(self.base.sample_boundary(count, rng))
        d = np.linalg.norm(Y - x, axis=1)
        inner, outer = float(d.min()), float(d.max())
        if isinstance(self.base, Ball):
            inner, outer = self._polish(x, Y[d.argmin()], Y[d.argmax()], inner, outer)
        return BoundaryExtremes(inner, outer, exact=False, resolution=count)

    def _polish(self, x, y_in, y_out, inner, outer):
        base = self.base

        def param(y):
            u = self.to_base(y[None, :])[0] - base.c
            return np.concatenate([u.real, u.imag])

        def dist(v):
            return np.linalg.norm(self.from_base(base.boundary_point(v)[None, :])[0] - x)

        opts = dict(xatol=1e-12, fatol=1e-14, maxiter=4000)
        r_in = minimize(dist, param(y_in), method="Nelder-Mead", options=opts)
        r_out = minimize(lambda v: -dist(v), param(y_out), method="Nelder-Mead", options=opts)
        return min(inner, float(r_in.fun)), max(outer, float(-r_out.fun))

    def circumball(self):
        ctr, R = self.base.circumball()
        return self.A @ ctr + self.t, float(np.linalg.norm(self.A, 2) * R)

    def affine_sup_bound(self, M, c):
        M = np.atleast_2d(M)
        return self.base.affine_sup_bound(M @ self.A, M @ self.t + np.asarray(c))

    def ellipsoid_max_scale(self, x0, L):
        return self.base.ellipsoid_max_scale(self.Ainv @ (np.asarray(x0) - self.t),
                                             self.Ainv @ np.atleast_2d(L))

    def quadrature(self, order, n_angles):
        U, w = self.base.quadrature(order, n_angles)
        return self.from_base(U), w * abs(np.linalg.det(self.A)) ** 2

    def sample_interior(self, count, rng):
        return self.from_base(self.base.sample_interior(count, rng))

    def sample_boundary(self, count, rng):
        return self.from_base(self.base.sample_boundary(count, rng))

    def __str__(self):
        return f"AffineImage({self.base})"


DomainModel = (Ball, Polydisk, Product, AffineImage)


def _require_domain(D):
    if not isinstance(D, DomainModel):
        raise UnsupportedDomainError(
            f"{type(D).__name__} is not a model domain; only Ball, Polydisk, Product "
            "and AffineImage are supported")
    return D


def contains(D, p) -> bool:
    return _require_domain(D).contains(p)


def boundary_extremes(D, x) -> BoundaryExtremes:
    return _require_domain(D).boundary_extremes(x)


def ball_automorphism(a):
    """Automorphism of the unit ball sending ``a`` to 0.

    For n = 1 this is z -> (z - a) / (1 - conj(a) z).
    """
    from .maps import BallAutomorphism

    return BallAutomorphism(a)


# -- specification grammar ----------------------------------------------------

KINDS = ("ball", "polydisk", "product", "affine")


def _split_top(text: str, sep: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([":
            depth += 1
        elif ch in ")]":
            depth -= 1
            if depth < 0:
                raise ValueError(f"unbalanced brackets in {text!r}")
        if ch == sep and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if depth != 0:
        raise ValueError(f"unbalanced brackets in {text!r}")
    parts.append("".join(cur).strip())
    return [p for p in parts if p]


def _starts_domain(token: str) -> bool:
    head = token.split(":", 1)[0].split("(", 1)[0].strip()
    return head in KINDS


def _params(text: str) -> dict[str, list[complex]]:
    out: dict[str, list] = {}
    key = None
    for tok in _split_top(text, ","):
        if "=" in tok:
            key, val = (s.strip() for s in tok.split("=", 1))
            out[key] = [val]
        elif key is None:
            raise ValueError(f"value {tok!r} has no key")
        else:
            out[key].append(tok)
    return {k: [complex(ast.literal_eval(v)) for v in vals] for k, vals in out.items()}


def _real(values, name):
    if any(abs(v.imag) > 0 for v in values):
        raise ValueError(f"{name} must be real")
    return [v.real for v in values]


def parse_domain(text: str, dim: int = 1):
    """Parse a domain specification string.

    Examples: ``ball:r=2``, ``ball:r=1,n=2,c=0.5,0``, ``polydisk:r=1,1``,
    ``product(ball:r=1,ball:r=1)``,
    ``affine(ball:r=1,n=2;matrix=[[1,0.5],[0,1]];shift=[0,0])``.
    ``dim`` is the default dimension for balls; factors of a product default
    to dimension 1.
    """
    text = text.strip()
    try:
        if text.startswith("product(") and text.endswith(")"):
            tokens = _split_top(text[len("product("):-1], ",")
            groups: list[list[str]] = []
            for tok in tokens:
                if _starts_domain(tok) or not groups:
                    groups.append([tok])
                else:
                    groups[-1].append(tok)
            return Product(tuple(parse_domain(",".join(g), 1) for g in groups))
        if text.startswith("affine(") and text.endswith(")"):
            parts = _split_top(text[len("affine("):-1], ";")
            base = parse_domain(parts[0], dim)
            kw = {}
            for p in parts[1:]:
                k, v = (s.strip() for s in p.split("=", 1))
                kw[k] = ast.literal_eval(v)
            unknown = set(kw) - {"matrix", "shift"}
            if unknown:
                raise ValueError(f"unknown affine keys {sorted(unknown)}")
            return AffineImage(base, kw.get("matrix"), kw.get("shift"))
        kind, _, rest = text.partition(":")
        kind = kind.strip()
        params = _params(rest) if rest.strip() else {}
        if kind == "ball":
            unknown = set(params) - {"r", "n", "c"}
            if unknown:
                raise ValueError(f"unknown ball keys {sorted(unknown)}")
            r = _real(params.get("r", [1]), "r")
            n = int(_real(params.get("n", [dim]), "n")[0])
            return Ball(r[0], n, tuple(params["c"]) if "c" in params else None)
        if kind == "polydisk":
            if set(params) - {"r"}:
                raise ValueError("polydisk accepts only r=")
            return Polydisk(tuple(_real(params.get("r", [1] * dim), "r")))
    except (SyntaxError, ValueError, TypeError, DimensionMismatchError) as exc:
        raise ValueError(f"cannot parse domain {text!r}: {exc}") from exc
    raise ValueError(f"cannot parse domain {text!r}: unknown kind")
