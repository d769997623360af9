"""Falsifiable numerical checks of the comparison inequalities.

Every check produces :class:`CheckRecord` objects.  A record is pass/fail
only when the bound kinds of its two sides can refute the inequality (see
:func:`bounds.can_certify_leq`); otherwise it is informational and carries
no verdict.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import factorial, sqrt

import numpy as np

from .bounds import (
    CLOSED_FORM_RTOL,
    DIFFERENTIATION_RTOL,
    BoundKind,
    can_certify_leq,
)
from .curvature import PSD_TOLERANCE, KahlerPotential, mixed_hessian
from .domains import Ball, _require_domain
from .forms import as_point, poincare_coefficient
from .maps import Affine, CandidateMap, Composition, MapSearchConfig, pullback_poincare
from .metrics import (
    ball_metric_matrix,
    bergman_metric,
    caratheodory_metric_lower,
    kobayashi_metric_upper,
    poincare_metric_ball,
)
from .squeezing import metric_comparison_constants, squeezing_constants, volume_comparison_constant
from .volumes import (
    LinearSlice,
    _unwrap_ball,
    caratheodory_lower,
    closed_form_poincare_volume,
    ke_density,
    kobayashi_upper,
    restricted_caratheodory_lower,
    restricted_kobayashi_upper,
)

__all__ = [
    "CheckRecord",
    "compare",
    "interior_grid",
    "lipschitz_constant",
    "restricted_ke_constant",
    "check_volume_decreasing",
    "check_lipschitz",
    "check_ahlfors_schwarz",
    "check_mok_yau",
    "check_royden",
    "check_chain_full",
    "check_chain_restricted",
    "check_metric_chain",
    "check_psh_log_caratheodory",
    "all_passed",
]

CHECKED = "pass-fail"
INFORMATIONAL = "informational"


@dataclass
class CheckRecord:
    """One evaluated inequality ``lhs <= rhs``.

    ``passed`` is None for informational records.  ``margin`` is rhs - lhs and
    ``tolerance`` is relative to max(|lhs|, |rhs|).
    """

    id: str
    anchor: str
    lhs: float
    rhs: float
    margin: float
    passed: bool | None
    kind: str
    tolerance: float
    lhs_kind: BoundKind
    rhs_kind: BoundKind
    note: str = ""
    meta: dict = field(default_factory=dict)
    equality: bool = False

    def to_dict(self) -> dict:
        def num(x):
            x = float(x)
            return x if np.isfinite(x) else str(x)

        return {
            "id": self.id,
            "anchor": self.anchor,
            "lhs": num(self.lhs),
            "rhs": num(self.rhs),
            "margin": num(self.margin),
            "pass": self.passed,
            "kind": self.kind,
            "tolerance": self.tolerance,
            "lhs_kind": self.lhs_kind.value,
            "rhs_kind": self.rhs_kind.value,
            "note": self.note,
            "meta": {k: _jsonable(v) for k, v in sorted(self.meta.items())},
        }


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        return float(v) if np.isfinite(v) else str(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def compare(id: str, anchor: str, lhs: float, lhs_kind: BoundKind, rhs: float, rhs_kind: BoundKind,
            tol: float = CLOSED_FORM_RTOL, equality: bool = False, note: str = "",
            informational: bool = False, meta: dict | None = None) -> CheckRecord:
    """Evaluate ``lhs <= rhs`` under the soundness rule.

    With ``equality`` the record also fails when rhs exceeds lhs by more
    than the tolerance.  ``informational`` forces a record without verdict.
    """
    lhs, rhs = float(lhs), float(rhs)
    margin = rhs - lhs if np.isfinite(rhs) or np.isfinite(lhs) else 0.0
    sound = can_certify_leq(lhs_kind, rhs_kind)
    if informational or not sound:
        if not sound and not note:
            note = f"{lhs_kind.value} <= {rhs_kind.value} cannot refute the inequality"
        return CheckRecord(id, anchor, lhs, rhs, margin, None, INFORMATIONAL, tol, lhs_kind,
                           rhs_kind, note, dict(meta or {}), equality)
    finite = [abs(x) for x in (lhs, rhs) if np.isfinite(x)]
    slack = tol * max(finite, default=0.0)
    ok = margin >= -slack
    if equality:
        ok = ok and abs(margin) <= slack
    return CheckRecord(id, anchor, lhs, rhs, margin, bool(ok), CHECKED, tol, lhs_kind, rhs_kind,
                       note, dict(meta or {}), equality)


def all_passed(records) -> bool:
    return all(r.passed is not False for r in records)


def _tol(*estimates) -> float:
    return max([CLOSED_FORM_RTOL] + [getattr(e, "tolerance", CLOSED_FORM_RTOL) for e in estimates])


def interior_grid(D, count: int = 1000, seed: int = 0, shrink: float = 0.95) -> np.ndarray:
    """Random interior points, pulled towards the circumcentre by ``shrink``
    so the grid stays away from the boundary (all model domains are convex)."""
    D = _require_domain(D)
    ctr, _ = D.circumball()
    Z = D.sample_interior(count, np.random.default_rng(seed))
    return ctr + shrink * (Z - ctr)


# -- volume decreasing ------------------------------------------------------

def check_volume_decreasing(phi: CandidateMap, source, target, points,
                            cfg: MapSearchConfig | None = None) -> list[CheckRecord]:
    """phi^* v^C_target <= v^C_source and phi^* v^K_target <= v^K_source.

    The Carathéodory left side is the pullback of the best witness on the
    target composed with phi, which is itself a candidate on the source; the
    source estimate is refined with it.
    """
    source, target = _require_domain(source), _require_domain(target)
    out = []
    for i, q in enumerate(points):
        q = source._check_interior(q)
        p = target._check_interior(phi(q))
        detJ2 = abs(np.linalg.det(phi.jacobian(q))) ** 2
        c_tgt = caratheodory_lower(target, p, cfg)
        c_src = caratheodory_lower(source, q, cfg)
        if c_tgt.witness is not None:
            lhs = pullback_poincare(Composition((phi, c_tgt.witness)), q).value
        else:
            lhs = 0.0
        rhs, rhs_kind = c_src.value, c_src.bound_kind
        if rhs_kind is not BoundKind.EXACT and lhs > rhs:
            rhs, rhs_kind = lhs, BoundKind.LOWER
        meta = dict(point=q, image=p)
        out.append(compare(f"volume_decreasing.caratheodory.{i:03d}", "phi^*(v^C_N) <= v^C_M",
                           lhs, c_tgt.bound_kind, rhs, rhs_kind, _tol(c_tgt, c_src), meta=meta))
        k_tgt = kobayashi_upper(target, p, cfg)
        k_src = kobayashi_upper(source, q, cfg)
        out.append(compare(f"volume_decreasing.kobayashi.{i:03d}", "phi^*(v^K_N) <= v^K_M",
                           detJ2 * k_tgt.value, k_tgt.bound_kind, k_src.value, k_src.bound_kind,
                           _tol(k_tgt, k_src), meta=meta))
    return out


# -- Lipschitz ----------------------------------------------------------------

def lipschitz_constant(n: int, r: float) -> float:
    """n^(1/2) 2^(2n+3) (n!)^2 / r^(2n+1)."""
    return sqrt(n) * 2 ** (2 * n + 3) * factorial(n) ** 2 / r ** (2 * n + 1)


def check_lipschitz(r: float, n: int, pairs=None, count: int = 1000, seed: int = 0) -> CheckRecord:
    """Largest |v^C(p) - v^C(q)| / |p - q| over pairs in the half-radius ball.

    On the ball v^C is the Poincaré density, so the quotients are exact.
    """
    if pairs is None:
        rng = np.random.default_rng(seed)
        half = Ball(r / 2, n)
        P, Q = half.sample_interior(count, rng), half.sample_interior(count, rng)
    else:
        P = np.array([as_point(p, n) for p, _ in pairs])
        Q = np.array([as_point(q, n) for _, q in pairs])
    if np.any(np.linalg.norm(P, axis=1) >= r / 2) or np.any(np.linalg.norm(Q, axis=1) >= r / 2):
        raise ValueError(f"pairs must lie in the ball of radius {r / 2}")
    dist = np.linalg.norm(P - Q, axis=1)
    diff = np.abs(poincare_coefficient(n, r, P) - poincare_coefficient(n, r, Q))
    quot = np.divide(diff, dist, out=np.zeros_like(diff), where=dist > 0)
    worst = float(quot.max()) if quot.size else 0.0
    C = lipschitz_constant(n, r)
    return compare(f"lipschitz.n{n}", "|v^C(p) - v^C(q)| <= C(n, r) |p - q|", worst, BoundKind.EXACT,
                   C, BoundKind.EXACT, meta=dict(pairs=len(quot), empirical_max=worst, r=r, n=n))


# -- Schwarz lemmas -----------------------------------------------------------

def check_ahlfors_schwarz(f: CandidateMap, points, r: float = 1.0) -> list[CheckRecord]:
    """f^* mu <= mu for a self-map f of the ball B^d_r."""
    out = []
    for i, z in enumerate(points):
        z = as_point(z, f.domain_dim)
        lhs = pullback_poincare(f, z, r).value
        rhs = poincare_coefficient(f.domain_dim, r, z)
        out.append(compare(f"ahlfors_schwarz.{i:03d}", "f^*mu <= mu", lhs, BoundKind.EXACT,
                           rhs, BoundKind.EXACT, meta=dict(point=z)))
    return out


def check_mok_yau(f: CandidateMap, grid, r: float = 1.0) -> CheckRecord:
    """sup f^*V_N / V_M <= K1^n / (n^n K2) from the ball B^n_r with its
    Kähler-Einstein volume to the unit ball with the Poincaré volume.

    With K1 = n(n+1) and K2 = (n+1)^n n! the bound is 1/n!.
    """
    n = f.domain_dim
    worst = 0.0
    for z in grid:
        z = as_point(z, n)
        vm = (n + 1) ** n * poincare_coefficient(n, r, z)
        worst = max(worst, pullback_poincare(f, z).value / vm)
    K1, K2 = n * (n + 1), (n + 1) ** n * factorial(n)
    bound = K1 ** n / (n ** n * K2)
    return compare(f"mok_yau.n{n}", "sup f^*V_N / V_M <= K1^n / (n^n K2)", worst, BoundKind.EXACT,
                   bound, BoundKind.EXACT, meta=dict(points=len(grid), K1=K1, K2=K2))


def _royden_trace(f, z, r_src, r_tgt):
    J = f.jacobian(z)
    Ginv = np.linalg.inv(ball_metric_matrix(r_src, z))
    H = ball_metric_matrix(r_tgt, f(z))
    # g^{a bbar} = Ginv[b, a]
    return float(np.einsum("ba,ab->", Ginv, J.T @ H @ J.conj()).real), J


def check_royden(f: CandidateMap, grid, r_src: float = 1.0, r_tgt: float = 1.0) -> list[CheckRecord]:
    """Trace of the pulled-back target metric against the source metric,
    bounded by (2 nu / (nu + 1)) (k / K) with nu the largest Jacobian rank.

    Both balls carry the metric of -log(r^2 - |z|^2).  The pass/fail record
    uses the Ricci bound k = -2(n+1) and K = -2; a second, informational record
    uses k = -(n+1), the Ricci constant of that metric.
    """
    n = f.domain_dim
    traces, nu = [], 0
    for z in grid:
        z = as_point(z, n)
        t, J = _royden_trace(f, z, r_src, r_tgt)
        traces.append(t)
        s = np.linalg.svd(J, compute_uv=False)
        nu = max(nu, int(np.sum(s > 1e-10 * max(1.0, s.max(initial=0.0)))))
    worst = max(traces, default=0.0)
    meta = dict(points=len(traces), rank=nu)
    if nu == 0:
        return [compare(f"royden.n{n}", "trace f^*h <= (2nu/(nu+1)) (k/K)", worst, BoundKind.EXACT,
                        0.0, BoundKind.EXACT, informational=True,
                        note="Jacobian rank 0 on the grid; bound undefined", meta=meta)]
    K = -2.0
    out = []
    for suffix, k, info in (("", -2.0 * (n + 1), False), (".potential_ricci", -(n + 1.0), True)):
        bound = 2 * nu / (nu + 1) * (k / K)
        out.append(compare(f"royden.n{n}{suffix}", "trace f^*h <= (2nu/(nu+1)) (k/K)", worst,
                           BoundKind.EXACT, bound, BoundKind.EXACT, informational=info,
                           note=f"k = {k:g}, K = {K:g}", meta=meta))
    return out


# -- volume chains --------------------------------------------------------

def _ke_available(D) -> bool:
    return _unwrap_ball(D) is not None


def _squeeze_witnesses(D, p, a, b, Q, tag, exact=True) -> list[CheckRecord]:
    """Reproduce the squeezing-construction bounds at p along the frame Q.

    Q has orthonormal columns spanning the directions measured (the whole
    space for full volumes, the slice for restricted ones); densities are
    returned for unit coordinates along Q.
    """
    d = Q.shape[1]
    out = []
    f_c = Affine(Q.conj().T / b, -Q.conj().T @ p / b)
    valid_c = D.affine_sup_bound(Q.conj().T / b, -Q.conj().T @ p / b) <= 1 + 1e-12
    jac = f_c.jacobian(p) @ Q
    value_c = poincare_coefficient(d, 1.0, f_c(p)) * abs(np.linalg.det(jac)) ** 2
    out.append(compare(f"{tag}.squeeze_caratheodory_witness", "v^C(p) >= 1/b^{2m}",
                       b ** (-2 * d), BoundKind.EXACT, value_c, BoundKind.EXACT, equality=True,
                       meta=dict(point=p, image_in_ball=bool(valid_c), b=b)))
    # w -> p + a Q w; Kobayashi density is |det(a I)|^-2 in the Q coordinates
    valid_k = D.ellipsoid_max_scale(p, a * Q) >= 1 - 1e-12
    value_k = 1.0 / abs(a ** d) ** 2
    out.append(compare(f"{tag}.squeeze_kobayashi_witness", "v^K(p) <= 1/a^{2m}", value_k,
                       BoundKind.EXACT, a ** (-2 * d), BoundKind.EXACT, equality=True,
                       meta=dict(point=p, ball_in_domain=bool(valid_k), a=a)))
    out.append(compare(f"{tag}.squeeze_closure", "1/a^{2m} = (b/a)^{2m} / b^{2m}", a ** (-2 * d),
                       BoundKind.EXACT, (b / a) ** (2 * d) * b ** (-2 * d), BoundKind.EXACT,
                       equality=True))
    for rec, ok in ((out[0], valid_c), (out[1], valid_k)):
        if ok:
            continue
        if exact:
            rec.passed, rec.note = False, "squeezing witness is not a valid candidate"
        else:
            # sampled boundary extremes may miss the true radius slightly
            rec.passed, rec.kind = None, INFORMATIONAL
            rec.note = "sampled squeezing radii do not certify the witness"
    return out


def check_chain_full(D, sample, cfg: MapSearchConfig | None = None) -> list[CheckRecord]:
    """v^C <= v^K, the Kähler-Einstein sandwich (where available) and
    v^K <= (b/a)^{2n} v^C with squeezing constants over ``sample``."""
    D = _require_domain(D)
    n = D.dim
    pts = [D._check_interior(p) for p in sample]
    sq = squeezing_constants(D, pts)
    const = volume_comparison_constant(sq, n)
    eq_case = sq.a == sq.b
    out = []
    for i, p in enumerate(pts):
        tag = f"chain_full.{i:03d}"
        meta = dict(point=p)
        C = caratheodory_lower(D, p, cfg)
        K = kobayashi_upper(D, p, cfg)
        tol = _tol(C, K)
        out.append(compare(f"{tag}.caratheodory_le_kobayashi", "v^C <= v^K", C.value, C.bound_kind,
                           K.value, K.bound_kind, tol, meta=meta))
        if _ke_available(D):
            ke = ke_density(D, p).value
            out.append(compare(f"{tag}.caratheodory_le_ke", "v^C <= v^KE / n!", C.value,
                               C.bound_kind, ke / factorial(n), BoundKind.EXACT, tol, meta=meta))
            out.append(compare(f"{tag}.ke_le_kobayashi", "v^KE <= v^K / n!", ke, BoundKind.EXACT,
                               K.value / factorial(n), K.bound_kind, tol, informational=True,
                               note="v^KE = (n+1)^n mu^n", meta=meta))
            mu = closed_form_poincare_volume(D, p)
            out.append(compare(f"{tag}.ke_le_kobayashi.rescaled", "v^KE <= v^K / n!",
                               mu / factorial(n), BoundKind.EXACT, K.value / factorial(n),
                               K.bound_kind, tol, informational=True,
                               note="v^KE rescaled to mu^n / n! (equality on the ball)", meta=meta))
        out.append(compare(f"{tag}.kobayashi_le_squeezed_caratheodory", "v^K <= (b/a)^{2n} v^C",
                           K.value, K.bound_kind, const * C.value, C.bound_kind, tol,
                           equality=eq_case, meta=dict(point=p, a=sq.a, b=sq.b)))
        out += _squeeze_witnesses(D, p, sq.a, sq.b, np.eye(n), tag, sq.exact)
    return out


def restricted_ke_constant(n: int, d: int) -> float:
    """d^d (n+1)^d / (d+1)^d."""
    return d ** d * (n + 1) ** d / (d + 1) ** d


def _restricted_ke(D, Z: LinearSlice, p, scale: float) -> float:
    """Kähler-Einstein density of the slice: det of (scale * ball metric)
    restricted to the slice coordinates."""
    B, A, t = _unwrap_ball(D)
    E = np.linalg.solve(A, Z.embedding)
    u = np.linalg.solve(A, p - t) - B.c
    G = scale * ball_metric_matrix(B.radius, u)
    return float(np.linalg.det(E.T @ G @ E.conj()).real)


def check_chain_restricted(D, Z: LinearSlice, sample, cfg: MapSearchConfig | None = None
                           ) -> list[CheckRecord]:
    """Restricted analogues of :func:`check_chain_full` on the slice Z."""
    D = _require_domain(D)
    n, d = D.dim, Z.dim
    pts = [D._check_interior(p) for p in sample]
    for p in pts:
        Z.to_slice(p)
    sq = squeezing_constants(D, pts)
    const = volume_comparison_constant(sq, d)
    kec = restricted_ke_constant(n, d)
    Q, T = np.linalg.qr(Z.embedding)
    jac_T = abs(np.linalg.det(T)) ** 2
    out = []
    for i, p in enumerate(pts):
        tag = f"chain_restricted.{i:03d}"
        meta = dict(point=p)
        C = restricted_caratheodory_lower(D, Z, p, cfg)
        K = restricted_kobayashi_upper(D, Z, p, cfg)
        tol = _tol(C, K)
        out.append(compare(f"{tag}.caratheodory_le_kobayashi", "v^C_Z <= v^K_Z", C.value,
                           C.bound_kind, K.value, K.bound_kind, tol, meta=meta))
        if _ke_available(D):
            ke_a = _restricted_ke(D, Z, p, n + 1.0)
            ke_b = _restricted_ke(D, Z, p, 1.0)
            out.append(compare(f"{tag}.caratheodory_le_ke", "v^C_Z <= (d^d (n+1)^d/(d+1)^d) v^KE_Z",
                               C.value, C.bound_kind, kec * ke_a, BoundKind.EXACT, tol,
                               note="v^KE from the metric (n+1) g", meta=meta))
            out.append(compare(f"{tag}.caratheodory_le_ke.rescaled",
                               "v^C_Z <= (d^d (n+1)^d/(d+1)^d) v^KE_Z", C.value, C.bound_kind,
                               kec * ke_b, BoundKind.EXACT, tol, informational=True,
                               note="v^KE from the metric g", meta=meta))
        out.append(compare(f"{tag}.kobayashi_le_squeezed_caratheodory", "v^K_Z <= (b/a)^{2d} v^C_Z",
                           K.value, K.bound_kind, const * C.value, C.bound_kind, tol,
                           equality=sq.a == sq.b and d == n, meta=dict(point=p, a=sq.a, b=sq.b)))
        # witness densities are in Q coordinates; slice coordinates add |det T|^2
        for rec in _squeeze_witnesses(D, p, sq.a, sq.b, Q, tag, sq.exact):
            rec.meta["slice_jacobian"] = jac_T
            out.append(rec)
    return out


# -- metric chain -------------------------------------------------------------

def _ke_metric(D, p, v) -> float:
    B, A, t = _unwrap_ball(D)
    u = np.linalg.solve(A, p - t) - B.c
    return poincare_metric_ball(B.radius, u, np.linalg.solve(A, v)).value


def check_metric_chain(D, samples, cfg: MapSearchConfig | None = None) -> list[CheckRecord]:
    """g^C <= g^K, g^C <= g^B, g^C <= (n+1) g^KE and the squeezing bounds,
    over ``samples`` of (p, v) pairs."""
    D = _require_domain(D)
    n = D.dim
    samples = [(D._check_interior(p), as_point(v, n)) for p, v in samples]
    sq = squeezing_constants(D, [p for p, _ in samples])
    mc = metric_comparison_constants(sq, n)
    eq_case = sq.a == sq.b
    out = []
    for i, (p, v) in enumerate(samples):
        tag = f"metric_chain.{i:03d}"
        meta = dict(point=p, direction=v)
        gc = caratheodory_metric_lower(D, p, v, cfg)
        gk = kobayashi_metric_upper(D, p, v, cfg)
        gb = bergman_metric(D, p, v)
        tol = _tol(gc, gk)
        out.append(compare(f"{tag}.caratheodory_le_kobayashi", "g^C <= g^K", gc.value, gc.bound_kind,
                           gk.value, gk.bound_kind, tol, meta=meta))
        out.append(compare(f"{tag}.caratheodory_le_bergman", "g^C <= g^B", gc.value, gc.bound_kind,
                           gb.value, gb.bound_kind, _tol(gc, gb), meta=meta))
        out.append(compare(f"{tag}.kobayashi_le_squeezed_caratheodory", "g^K <= (b^2/a^2) g^C",
                           gk.value, gk.bound_kind, mc.kobayashi * gc.value, gc.bound_kind, tol,
                           equality=eq_case, meta=meta))
        out.append(compare(f"{tag}.bergman_le_squeezed_kobayashi",
                           "g^B <= [(2 pi/a^3)(2b/a)^n]^2 g^K", gb.value, gb.bound_kind,
                           mc.bergman * gk.value, gk.bound_kind, _tol(gb, gk), meta=meta))
        if _ke_available(D):
            gke = _ke_metric(D, p, v)
            out.append(compare(f"{tag}.caratheodory_le_ke", "g^C <= (n+1) g^KE", gc.value,
                               gc.bound_kind, (n + 1) * gke, BoundKind.EXACT, tol, meta=meta))
            out.append(compare(f"{tag}.squeezed_kobayashi_le_ke", "(a^2/(b^2 n)) g^K <= g^KE",
                               mc.ke_lower * gk.value, gk.bound_kind, gke, BoundKind.EXACT, tol,
                               meta=meta))
            out.append(compare(f"{tag}.ke_le_squeezed_kobayashi",
                               "g^KE <= (b^{4n-2} n^{n-1}/a^{2n-2}) g^K", gke, BoundKind.EXACT,
                               mc.ke_upper * gk.value, gk.bound_kind, tol, meta=meta))
    return out


# -- plurisubharmonicity ------------------------------------------------------

def check_psh_log_caratheodory(D, points, density=None) -> list[CheckRecord]:
    """Strict plurisubharmonicity of log v^C: the mixed Hessian is positive
    definite at every point.

    ``density`` overrides the exact Carathéodory density (a vectorised map
    (m, n) -> (m,)), e.g. for negative controls.
    """
    D = _require_domain(D)
    if density is None:
        if _unwrap_ball(D) is None:
            raise ValueError("exact Carathéodory density is only available on balls; pass density")

        def density(Z):
            return np.array([closed_form_poincare_volume(D, z) for z in Z])

    def validity(z):
        return D.boundary_extremes(z).inner if D.contains(z) else 0.0

    _, R = D.circumball()
    phi = KahlerPotential(lambda Z: np.log(density(Z)), D.dim, validity, R)
    out = []
    for i, p in enumerate(points):
        p = D._check_interior(p)
        H = mixed_hessian(phi, p)
        lam = float(np.min(np.linalg.eigvalsh(H)))
        out.append(compare(f"psh_log_caratheodory.{i:03d}", "log v^C strictly psh", PSD_TOLERANCE,
                           BoundKind.EXACT, lam, BoundKind.EXACT, DIFFERENTIATION_RTOL,
                           meta=dict(point=p, min_eigenvalue=lam)))
        # strictness: a zero eigenvalue must not pass on tolerance
        out[-1].passed = lam > PSD_TOLERANCE
    return out
