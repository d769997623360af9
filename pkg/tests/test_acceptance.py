"""One test per acceptance criterion, each reporting a single pass/fail line."""
import time
from fractions import Fraction
from itertools import product
from math import factorial

import numpy as np

from invariant_volumes.bounds import BoundKind, can_certify_leq
from invariant_volumes.curvature import ball_potential, curvature_at, ricci_and_scalar, ricci_of_volume_density
from invariant_volumes.domains import Ball, Polydisk
from invariant_volumes.forms import poincare_coefficient
from invariant_volumes.harness import (
    CHECKED,
    INFORMATIONAL,
    all_passed,
    check_ahlfors_schwarz,
    check_chain_full,
    check_chain_restricted,
    check_lipschitz,
    check_metric_chain,
    compare,
    restricted_ke_constant,
)
from invariant_volumes.maps import Affine, BallAutomorphism, Composition, DiagonalScaling, MapSearchConfig, PowerMap
from invariant_volumes.metrics import bergman_metric, caratheodory_metric_lower, ke_metric_ball, kobayashi_metric_upper
from invariant_volumes.quotient import (
    build_octagon,
    canonical_volume_curve,
    caratheodory_measure,
    check_quotient_volume_bound,
)
from invariant_volumes.squeezing import squeezing_constants
from invariant_volumes.volumes import (
    LinearSlice,
    bergman_density_closed,
    bergman_density_numeric,
    caratheodory_lower,
    kobayashi_upper,
    restricted_caratheodory_lower,
    restricted_kobayashi_upper,
)

from conftest import ACCEPTANCE_LINES, ball_points

CFG = MapSearchConfig(starts=2, maxiter=400, seed=0)


def report(number, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_criterion_01_curvature_goldens():
    start = time.perf_counter()
    worst = dict(metric=0.0, hsc=0.0, ricci=0.0, scalar=0.0)
    for r, n in product((0.5, 1.0, 2.0), (1, 2, 3)):
        rep = curvature_at(ball_potential(r, n), np.zeros(n))
        g0 = np.eye(n) / r ** 2
        ric, scal = ricci_and_scalar(rep)
        worst["metric"] = max(worst["metric"], np.max(np.abs(rep.metric - g0)) * r ** 2)
        worst["hsc"] = max(worst["hsc"], abs(rep.hsc + 2))
        worst["ricci"] = max(worst["ricci"], np.max(np.abs(ric + (n + 1) * g0)) * r ** 2)
        worst["scalar"] = max(worst["scalar"], abs(scal + n * (n + 1)))
    elapsed = time.perf_counter() - start
    ok = (worst["metric"] <= 1e-6 and worst["hsc"] <= 1e-5 and worst["ricci"] <= 1e-5
          and worst["scalar"] <= 1e-5 and elapsed < 10)
    errs = ", ".join(f"{k} {v:.1e}" for k, v in worst.items())
    report(1, ok, f"curvature goldens r in {{0.5,1,2}}, n in {{1,2,3}}: {errs}; {elapsed:.2f} s")


def test_criterion_02_bergman_oracle():
    errs = [abs(bergman_density_numeric(Ball(dim=1), [0], degree=12).value - 1 / np.pi),
            abs(bergman_density_numeric(Ball(dim=2), [0, 0], degree=12).value - 2 / np.pi ** 2)]
    interior = []
    for D, pts in ((Ball(dim=1), [[0.3], [0.5j], [-0.2 + 0.4j]]),
                   (Ball(dim=2), [[0.3, 0], [0.2j, -0.3], [0.1, 0.4]])):
        for p in pts:
            exact = bergman_density_closed(D, p).value
            interior.append(abs(bergman_density_numeric(D, p, degree=12).value - exact))
    ok = max(errs) <= 1e-5 and max(interior) <= 1e-4
    report(2, ok, f"Bergman numeric vs kernel at 0: max error {max(errs):.1e}; "
                  f"interior points: max error {max(interior):.1e}")


def test_criterion_03_ke_identity(rng):
    worst = 0.0
    for n in (1, 2):
        target = (n + 1) ** n
        mu = lambda Z, n=n: poincare_coefficient(n, 1.0, Z)  # noqa: E731
        for z in ball_points(rng, n, 10, shrink=0.7):
            H = ricci_of_volume_density(mu, z, n, validity=lambda w: 1 - np.linalg.norm(w))
            # omega^n = n! det(H) in coordinate volume; divide by n! mu^n
            ratio = factorial(n) * np.linalg.det(H).real / (factorial(n) * mu(z[None, :])[0])
            worst = max(worst, abs(ratio - target) / target)
    report(3, worst <= 1e-5, f"(i/2 ddbar log mu)^n / (n! mu) = (n+1)^n, n in {{1,2}}, "
                             f"10 points each: max rel error {worst:.1e}")


def test_criterion_04_ball_extremality(rng):
    worst = 0.0
    witnesses = True
    for n in (1, 2):
        B = Ball(dim=n)
        for p in ball_points(rng, n, 20):
            mu = poincare_coefficient(n, 1.0, p)
            lo, up = caratheodory_lower(B, p, CFG), kobayashi_upper(B, p, CFG)
            worst = max(worst, abs(lo.value - mu) / mu, abs(up.value - mu) / mu)
            witnesses &= lo.witness is not None and np.linalg.norm(lo.witness(p)) < 1e-9
            witnesses &= up.witness is not None and np.linalg.norm(up.witness(np.zeros(n)) - p) < 1e-9
    report(4, worst <= 1e-3 and witnesses,
           f"v^C and v^K equal mu on the unit ball, n in {{1,2}}, 20 points each: "
           f"max rel error {worst:.1e}, automorphism witnesses valid: {witnesses}")


def test_criterion_05_genus2_quotient():
    start = time.perf_counter()
    measure = caratheodory_measure(build_octagon())
    vol = canonical_volume_curve(2)
    rec = check_quotient_volume_bound()
    elapsed = time.perf_counter() - start
    ok = (abs(measure - np.pi) <= 1e-4 and vol == Fraction(2) and rec.passed
          and abs(rec.lhs - rec.rhs) <= 1e-3 * rec.rhs and elapsed < 30)
    report(5, ok, f"genus 2: mu^C - pi = {measure - np.pi:.1e}, vol(K) = {vol}, "
                  f"lhs {rec.lhs:.8f} vs rhs {rec.rhs:g}; {elapsed:.2f} s")


def test_criterion_06_lipschitz():
    recs = [check_lipschitz(1.0, n, count=1000, seed=n) for n in (1, 2)]
    ok = all(r.passed for r in recs)
    detail = "; ".join(f"n={r.meta['n']}: empirical max {r.lhs:.3f} <= C = {r.rhs:.1f}" for r in recs)
    report(6, ok, f"Lipschitz over 1000 pairs in the half ball: {detail}")


def _random_map(rng, n):
    """Composition of ball self-maps: automorphisms, unitaries, powers, scalings."""
    maps = []
    for _ in range(int(rng.integers(1, 5))):
        kind = int(rng.integers(0, 4))
        if kind == 0:
            maps.append(BallAutomorphism(tuple(ball_points(rng, n, 1, shrink=0.95)[0])))
        elif kind == 1:
            U, _ = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
            maps.append(Affine(U))
        elif kind == 2:
            maps.append(PowerMap(tuple(int(k) for k in rng.integers(1, 4, n))))
        else:
            maps.append(DiagonalScaling(tuple(rng.random(n) * np.exp(2j * np.pi * rng.random(n)))))
    return Composition(tuple(maps))


def test_criterion_07_ahlfors_schwarz(rng):
    violations, total = 0, 0
    for n in (1, 2):
        for _ in range(250):
            f = _random_map(rng, n)
            recs = check_ahlfors_schwarz(f, ball_points(rng, n, 100, shrink=0.99))
            violations += sum(not r.passed for r in recs)
            total += len(recs)
    report(7, violations == 0, f"500 random ball self-maps x 100 points ({total} comparisons): "
                               f"{violations} violations")


def test_criterion_08_squeezing():
    D = Polydisk((1.0, 1.0))
    c = squeezing_constants(D, [[0, 0]])
    recs = {r.id: r for r in check_chain_full(D, [[0, 0]], CFG)}
    wc = recs["chain_full.000.squeeze_caratheodory_witness"]
    wk = recs["chain_full.000.squeeze_kobayashi_witness"]
    ok = (abs(c.a - 1) <= 1e-9 and abs(c.b - np.sqrt(2)) <= 1e-9 and wc.passed and wk.passed
          and wc.meta["image_in_ball"] and wk.meta["ball_in_domain"] and all_passed(recs.values()))
    report(8, ok, f"polydisk (a, b) = ({c.a:.12f}, {c.b:.12f}); witness densities "
                  f"{wc.rhs:.6f} = 1/b^4 and {wk.lhs:.6f} = 1/a^4")


def test_criterion_09_restricted():
    B = Ball(dim=2)
    Z = LinearSlice.coordinate(B, 1)
    lo = restricted_caratheodory_lower(B, Z, [0, 0], CFG).value
    up = restricted_kobayashi_upper(B, Z, [0, 0], CFG).value
    const = restricted_ke_constant(2, 1)
    P = Polydisk((1.0, 1.0))
    slices = [LinearSlice.coordinate(P, 1), LinearSlice(P, [[1], [1]]), LinearSlice.coordinate(P, 1, [0, 0.3])]
    samples = [[[0, 0], [0.2j, 0]], [[0, 0], [0.3, 0.3]], [[0, 0.3], [0.4, 0.3]]]
    recs = [r for Zs, pts in zip(slices, samples) for r in check_chain_restricted(P, Zs, pts, CFG)]
    checked = [r for r in recs if r.kind == CHECKED]
    ok = abs(lo - 1) <= 1e-3 and abs(up - 1) <= 1e-3 and const == 1.5 and all_passed(recs)
    report(9, ok, f"ball slice v^C = {lo:.6f}, v^K = {up:.6f}; constant (2,1) = {const}; "
                  f"{len(checked)} polydisk slice checks pass")


def test_criterion_10_metrics(rng):
    disc = Ball(dim=1)
    vals = (caratheodory_metric_lower(disc, [0], [1], CFG).value,
            kobayashi_metric_upper(disc, [0], [1], CFG).value,
            bergman_metric(disc, [0], [1]).value,
            ke_metric_ball(1.0, [0], [1]).value)
    values_ok = np.allclose(vals, (1, 1, 2, 1), rtol=1e-3)
    recs = []
    for n in (1, 2):
        P = ball_points(rng, n, 100, shrink=0.9)
        V = rng.standard_normal((100, n)) + 1j * rng.standard_normal((100, n))
        recs += check_metric_chain(Ball(dim=n), list(zip(P, V)), CFG)
    wanted = (".caratheodory_le_kobayashi", ".caratheodory_le_bergman", ".caratheodory_le_ke")
    chain = [r for r in recs if r.id.endswith(wanted)]
    ok = values_ok and len(chain) == 600 and all(r.passed for r in chain) and all_passed(recs)
    report(10, ok, f"disc metrics at 0 = ({', '.join(f'{v:.6f}' for v in vals)}); "
                   f"{len(chain)} g^C <= g^K, g^B, (n+1) g^KE checks on 200 (p, v) samples pass")


def test_criterion_11_soundness():
    wrong = []
    for lk, rk in product(BoundKind, BoundKind):
        for lhs, rhs in ((1.0, 2.0), (2.0, 1.0)):
            rec = compare("meta", "a <= b", lhs, lk, rhs, rk)
            sound = lk in (BoundKind.EXACT, BoundKind.LOWER) and rk in (BoundKind.EXACT, BoundKind.UPPER)
            expected = CHECKED if sound else INFORMATIONAL
            if rec.kind != expected or (rec.passed is None) == sound or can_certify_leq(lk, rk) != sound:
                wrong.append((lk.value, rk.value, lhs, rhs))
    report(11, not wrong, f"{len(BoundKind) ** 2} bound-kind pairs enumerated; "
                          f"{len(wrong)} misclassified comparisons")
