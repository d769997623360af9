import warnings
from math import factorial

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invariant_volumes.bounds import BoundKind
from invariant_volumes.curvature import ricci_of_volume_density
from invariant_volumes.domains import AffineImage, Ball, Polydisk, Product
from invariant_volumes.errors import OutsideDomainError, UnsupportedDomainError
from invariant_volumes.maps import MapSearchConfig
from invariant_volumes.metrics import ball_metric_matrix
from invariant_volumes.volumes import (
    LinearSlice,
    bergman_density_closed,
    bergman_density_numeric,
    caratheodory_lower,
    ke_density,
    ke_density_ball,
    kobayashi_upper,
    poincare_density,
    restricted_caratheodory_lower,
    restricted_kobayashi_upper,
)

from conftest import ball_points

FAST = MapSearchConfig(starts=2, maxiter=400, seed=0)


def _ball_kernel_series(z, terms=80):
    """sum over multi-indices of |z^alpha|^2 (n+|alpha|)! / (pi^n alpha!)."""
    z = np.asarray(z, complex)
    n = z.size
    if n == 1:
        x = abs(z[0]) ** 2
        return sum(x ** k * (k + 1) for k in range(terms)) / np.pi
    x, y = abs(z[0]) ** 2, abs(z[1]) ** 2
    total = 0.0
    for i in range(terms):
        for j in range(terms - i):
            total += x ** i * y ** j * factorial(2 + i + j) / (factorial(i) * factorial(j))
    return total / np.pi ** 2


def test_poincare_density_examples():
    assert poincare_density(1, 1.0, [0]).value == 1.0
    assert poincare_density(2, 2.0, [0, 0]).value == pytest.approx(1 / 16, rel=1e-15)
    assert poincare_density(1, 1.0, [0.5]).value == pytest.approx(1 / 0.75 ** 2)
    with pytest.raises(OutsideDomainError):
        poincare_density(1, 1.0, [1.0])


def test_ball_estimates_exact_at_center():
    B = Ball(dim=2)
    lo, up = caratheodory_lower(B, [0, 0], FAST), kobayashi_upper(B, [0, 0], FAST)
    assert lo.value == pytest.approx(1.0, rel=1e-12)
    assert up.value == pytest.approx(1.0, rel=1e-12)
    assert lo.bound_kind is BoundKind.EXACT and up.bound_kind is BoundKind.EXACT
    assert np.allclose(lo.witness([0, 0]), 0)


def test_ball_estimates_match_poincare_at_random_points(rng):
    for r in (0.5, 2.0):
        B = Ball(r, 2)
        for p in ball_points(rng, 2, 3, radius=r):
            mu = poincare_density(2, r, p).value
            assert caratheodory_lower(B, p, FAST).value == pytest.approx(mu, rel=1e-3)
            assert kobayashi_upper(B, p, FAST).value == pytest.approx(mu, rel=1e-3)


def test_caratheodory_witness_sends_point_to_origin(rng):
    D = Polydisk((1.0, 1.0))
    p = np.array([0.2 + 0.1j, -0.3j])
    est = caratheodory_lower(D, p, FAST)
    assert np.linalg.norm(est.witness(p)) < 1e-9


def test_polydisk_bounds_at_origin():
    D = Polydisk((1.0, 1.0))
    lo = caratheodory_lower(D, [0, 0], FAST)
    up = kobayashi_upper(D, [0, 0], FAST)
    assert lo.bound_kind is BoundKind.LOWER and up.bound_kind is BoundKind.UPPER
    assert lo.value >= 0.25 * (1 - 1e-9)
    assert up.value <= 1.0 * (1 + 1e-9)


def test_squeezing_bounds_in_ball():
    # B_a subset D subset B_b at 0 forces 1/b^2n <= v^C and v^K <= 1/a^2n
    D = Product((Ball(1.0, 1), Ball(2.0, 1)))
    a, b = 1.0, np.sqrt(5.0)
    assert caratheodory_lower(D, [0, 0], FAST).value >= b ** -4 * (1 - 1e-9)
    assert kobayashi_upper(D, [0, 0], FAST).value <= a ** -4 * (1 + 1e-9)


@pytest.mark.parametrize("D, p", [
    (Polydisk((1.0, 1.0)), [0.3, -0.2j]),
    (Product((Ball(dim=1), Ball(0.5, 1))), [0.1j, 0.2]),
    (AffineImage(Ball(dim=2), [[1, 0.3], [0, 0.5]], [0.1, 0]), [0.1, 0.05j]),
])
def test_sandwich(D, p):
    assert caratheodory_lower(D, p, FAST).value <= kobayashi_upper(D, p, FAST).value * (1 + 1e-9)


def test_affine_ball_closed_form():
    A = np.array([[2, 0.5j], [0, 1]])
    D = AffineImage(Ball(dim=2), A, [0.3, 0])
    p = np.array([0.5, 0.2])
    u = np.linalg.solve(A, p - [0.3, 0])
    expect = poincare_density(2, 1.0, u).value / abs(np.linalg.det(A)) ** 2
    assert caratheodory_lower(D, p, FAST).value == pytest.approx(expect, rel=1e-9)
    assert kobayashi_upper(D, p, FAST).value == pytest.approx(expect, rel=1e-9)


def test_bergman_closed_examples():
    assert bergman_density_closed(Ball(dim=1), [0]).value == pytest.approx(1 / np.pi)
    assert bergman_density_closed(Ball(dim=1), [0.5]).value == pytest.approx(0.5659, abs=1e-4)
    assert bergman_density_closed(Polydisk((1.0, 1.0)), [0, 0]).value == pytest.approx(1 / np.pi ** 2)
    with pytest.raises(UnsupportedDomainError):
        bergman_density_closed(object.__new__(type("Odd", (), {"dim": 1})), [0])


@given(st.floats(0, 0.7), st.floats(0, 2 * np.pi), st.floats(0, 0.5), st.floats(0, 2 * np.pi))
@settings(max_examples=30)
def test_bergman_ball_matches_series(r1, t1, r2, t2):
    z1 = np.array([r1 * np.exp(1j * t1)])
    assert bergman_density_closed(Ball(dim=1), z1).value == pytest.approx(_ball_kernel_series(z1, 200), rel=1e-9)
    z2 = np.array([r2 * np.exp(1j * t1), r2 * np.exp(1j * t2)])
    assert bergman_density_closed(Ball(dim=2), z2).value == pytest.approx(_ball_kernel_series(z2), rel=1e-9)


def test_bergman_affine_transform():
    D = AffineImage(Ball(dim=1), [[2.0]], [0])
    assert bergman_density_closed(D, [0]).value == pytest.approx(1 / (4 * np.pi))


def test_bergman_numeric_examples():
    disc = Ball(dim=1)
    assert bergman_density_numeric(disc, [0], degree=10).value == pytest.approx(1 / np.pi, abs=1e-6)
    assert bergman_density_numeric(Ball(dim=2), [0, 0], degree=8).value == pytest.approx(2 / np.pi ** 2, abs=1e-5)
    assert bergman_density_numeric(disc, [0], degree=0).value == pytest.approx(1 / np.pi, rel=1e-12)


def test_bergman_numeric_monotone_and_converging():
    p = [0.4 + 0.2j]
    vals = [bergman_density_numeric(Ball(dim=1), p, degree=k).value for k in range(0, 13, 2)]
    assert all(b >= a * (1 - 1e-9) for a, b in zip(vals, vals[1:]))
    exact = bergman_density_closed(Ball(dim=1), p).value
    assert vals[-1] <= exact * (1 + 1e-9)
    assert abs(vals[-1] - exact) < abs(vals[0] - exact)


def test_bergman_numeric_degree_reduction_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        est = bergman_density_numeric(AffineImage(Ball(dim=2), [[1, 1], [1, 1.001]], [0, 0]), [0, 0], degree=8)
    assert est.diagnostics["degree"] < 8
    assert any("condition" in str(w.message) for w in caught)


def test_ke_density_examples(rng):
    assert ke_density_ball(1, 1.0, [0]).value == pytest.approx(2.0)
    assert ke_density_ball(2, 1.0, [0, 0]).value == pytest.approx(9.0)
    for z in ball_points(rng, 2, 10):
        ratio = ke_density_ball(2, 1.0, z).value / poincare_density(2, 1.0, z).value
        assert ratio == pytest.approx(9.0, rel=1e-12)


@pytest.mark.parametrize("n", [1, 2])
def test_ke_density_is_einstein(n, rng):
    # Ric = -2(n+1) omega means the mixed Hessian of log V equals (n+1) g
    for z in ball_points(rng, n, 3, shrink=0.6):
        H = ricci_of_volume_density(lambda Z: np.array([ke_density_ball(n, 1.0, w).value for w in Z]),
                                    z, n, validity=lambda w: 1 - np.linalg.norm(w))
        np.testing.assert_allclose(H, (n + 1) * ball_metric_matrix(1.0, z), rtol=1e-5, atol=1e-5)


def test_ke_density_affine_and_unsupported():
    D = AffineImage(Ball(dim=1), [[0.5]], [0])
    assert ke_density(D, [0]).value == pytest.approx(2.0 / 0.25)
    with pytest.raises(UnsupportedDomainError):
        ke_density(Polydisk((1.0, 1.0)), [0, 0])


def test_restricted_examples():
    B = Ball(dim=2)
    Z = LinearSlice.coordinate(B, 1)
    lo = restricted_caratheodory_lower(B, Z, [0, 0], FAST)
    up = restricted_kobayashi_upper(B, Z, [0, 0], FAST)
    assert lo.value >= 1.0 - 1e-9 and up.value <= 1.0 + 1e-9
    assert lo.density.dim == 1


def test_restricted_off_center_slice_is_smaller_ball():
    B = Ball(dim=2)
    Z = LinearSlice.coordinate(B, 1, base=[0, 0.6])
    # slice is the disc of radius 0.8
    expect = poincare_density(1, 0.8, [0.3]).value
    assert restricted_caratheodory_lower(B, Z, [0.3, 0.6], FAST).value == pytest.approx(expect, rel=1e-9)
    assert restricted_kobayashi_upper(B, Z, [0.3, 0.6], FAST).value == pytest.approx(expect, rel=1e-9)


def test_restricted_squeezing_bounds():
    D = Polydisk((1.0, 1.0))
    Z = LinearSlice.coordinate(D, 1)
    a, b = 1.0, np.sqrt(2.0)
    assert restricted_caratheodory_lower(D, Z, [0, 0], FAST).value >= b ** -2 * (1 - 1e-9)
    assert restricted_kobayashi_upper(D, Z, [0, 0], FAST).value <= a ** -2 * (1 + 1e-9)


def test_whole_slice_agrees_with_full_estimates():
    D = Polydisk((1.0, 0.8))
    p = [0.2, 0.1j]
    Z = LinearSlice.whole(D)
    assert restricted_caratheodory_lower(D, Z, p, FAST).value == caratheodory_lower(D, p, FAST).value
    assert restricted_kobayashi_upper(D, Z, p, FAST).value == kobayashi_upper(D, p, FAST).value


def test_extra_seeds_never_decrease_lower_bound():
    D = Polydisk((1.0, 1.0))
    p = np.array([0.3, 0.1])
    base = caratheodory_lower(D, p, FAST).value
    seeded = caratheodory_lower(D, p, FAST, extra_seeds=[(np.eye(2) / np.sqrt(2), np.zeros(2))]).value
    assert seeded >= base * (1 - 1e-12)


def test_slice_validation():
    B = Ball(dim=2)
    with pytest.raises(ValueError):
        LinearSlice(B, np.zeros((2, 1)))
    with pytest.raises(OutsideDomainError):
        LinearSlice.coordinate(B, 1).to_slice([0, 0.5])


def test_slice_of_affine_ball_is_exact():
    D = AffineImage(Ball(dim=2), [[1.5, 0.4j], [0.2, 0.8]], [0.1, -0.2])
    Z = LinearSlice(D, [[1.0], [0.5j]], [0.1, -0.1])
    p = Z.to_ambient([0.2])
    lo = restricted_caratheodory_lower(D, Z, p, FAST)
    up = restricted_kobayashi_upper(D, Z, p, FAST)
    assert lo.bound_kind is BoundKind.EXACT and up.bound_kind is BoundKind.EXACT
    assert lo.value == pytest.approx(up.value, rel=1e-9)
