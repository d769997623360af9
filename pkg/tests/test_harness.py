import json
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from invariant_volumes.bounds import BoundKind
from invariant_volumes.domains import AffineImage, Ball, Polydisk
from invariant_volumes.harness import (
    CHECKED,
    INFORMATIONAL,
    all_passed,
    check_ahlfors_schwarz,
    check_chain_full,
    check_chain_restricted,
    check_lipschitz,
    check_metric_chain,
    check_mok_yau,
    check_psh_log_caratheodory,
    check_royden,
    check_volume_decreasing,
    compare,
    interior_grid,
    lipschitz_constant,
    restricted_ke_constant,
)
from invariant_volumes.maps import Affine, BallAutomorphism, DiagonalScaling, MapSearchConfig, PowerMap, identity
from invariant_volumes.volumes import LinearSlice

FAST = MapSearchConfig(starts=2, maxiter=400, seed=0)
DISC = Ball(dim=1)
SOUND_LHS = {BoundKind.EXACT, BoundKind.LOWER}
SOUND_RHS = {BoundKind.EXACT, BoundKind.UPPER}


def _by_id(records):
    return {r.id: r for r in records}


@pytest.mark.parametrize("lk, rk", list(product(BoundKind, BoundKind)))
def test_soundness_guard(lk, rk):
    rec = compare("x", "a <= b", 2.0, lk, 1.0, rk)
    if lk in SOUND_LHS and rk in SOUND_RHS:
        assert rec.kind == CHECKED and rec.passed is False
    else:
        assert rec.kind == INFORMATIONAL and rec.passed is None


@given(st.floats(0, 10), st.floats(0, 10), st.floats(1e-12, 1e-2))
def test_pass_iff_margin_within_tolerance(lhs, rhs, tol):
    rec = compare("x", "a <= b", lhs, BoundKind.EXACT, rhs, BoundKind.EXACT, tol)
    assert rec.passed == (rec.margin >= -tol * max(lhs, rhs))


def test_equality_flag_catches_slack():
    assert compare("x", "a = b", 1.0, BoundKind.EXACT, 1.0 + 1e-12, BoundKind.EXACT, equality=True).passed
    assert not compare("x", "a = b", 1.0, BoundKind.EXACT, 1.1, BoundKind.EXACT, equality=True).passed


def test_record_serialises():
    rec = compare("x", "a <= b", 1.0, BoundKind.LOWER, np.inf, BoundKind.UPPER, meta=dict(p=np.array([1j])))
    d = json.loads(json.dumps(rec.to_dict()))
    assert d["anchor"] == "a <= b" and d["rhs"] == "inf" and d["meta"]["p"] == [[0.0, 1.0]]


def test_volume_decreasing_examples():
    half = Ball(0.5, 1)
    recs = _by_id(check_volume_decreasing(identity(1), half, DISC, [[0]], FAST))
    c = recs["volume_decreasing.caratheodory.000"]
    assert c.lhs == pytest.approx(1.0) and c.rhs == pytest.approx(4.0) and c.passed
    assert recs["volume_decreasing.kobayashi.000"].passed
    same = check_volume_decreasing(identity(1), DISC, DISC, [[0.3]], FAST)
    assert all(r.passed and abs(r.margin) <= 1e-9 for r in same)
    sq = _by_id(check_volume_decreasing(PowerMap((2,)), DISC, DISC, [[0.5]], FAST))
    c = sq["volume_decreasing.caratheodory.000"]
    assert c.lhs == pytest.approx(1.1378, abs=1e-4) and c.rhs == pytest.approx(1.7778, abs=1e-4)
    assert all_passed(sq.values())


def test_lipschitz_examples():
    assert lipschitz_constant(1, 1.0) == pytest.approx(32.0)
    assert lipschitz_constant(2, 1.0) == pytest.approx(512 * np.sqrt(2))
    rec = check_lipschitz(1.0, 1, pairs=[([0.1], [0.1])])
    assert rec.lhs == 0.0 and rec.passed
    assert check_lipschitz(1.0, 2, count=200).passed
    with pytest.raises(ValueError):
        check_lipschitz(1.0, 1, pairs=[([0.6], [0])])


def test_ahlfors_schwarz_examples():
    rec = check_ahlfors_schwarz(PowerMap((2,)), [[0.5]])[0]
    assert rec.lhs / rec.rhs == pytest.approx(4 * 0.25 / 1.25 ** 2) and rec.passed
    rec = check_ahlfors_schwarz(BallAutomorphism((0.3j,)), [[0.2]])[0]
    assert rec.lhs / rec.rhs == pytest.approx(1.0) and rec.passed
    rec = check_ahlfors_schwarz(Affine([[0.0]], [0.1]), [[0.2]])[0]
    assert rec.lhs == 0.0 and rec.passed


def test_mok_yau_examples():
    grid = interior_grid(DISC, 50)
    rec = check_mok_yau(identity(1), grid)
    assert rec.rhs == pytest.approx(1.0) and rec.lhs == pytest.approx(0.5) and rec.passed
    assert check_mok_yau(PowerMap((2,)), grid).passed
    assert check_mok_yau(Affine([[0.0]], [0.0]), grid).lhs == 0.0
    assert check_mok_yau(identity(2), interior_grid(Ball(dim=2), 30)).rhs == pytest.approx(0.5)


def test_royden_examples():
    grid = interior_grid(DISC, 50)
    main, info = check_royden(identity(1), grid)
    assert main.rhs == pytest.approx(2.0) and main.lhs == pytest.approx(1.0) and main.passed
    assert info.kind == INFORMATIONAL
    (const,) = check_royden(Affine([[0.0]], [0.1]), grid)
    assert const.kind == INFORMATIONAL and const.lhs == 0.0
    assert check_royden(PowerMap((2,)), grid)[0].passed


def test_chain_full_ball():
    recs = _by_id(check_chain_full(DISC, [[0]], FAST))
    assert recs["chain_full.000.caratheodory_le_kobayashi"].lhs == pytest.approx(1.0)
    assert recs["chain_full.000.caratheodory_le_ke"].rhs == pytest.approx(2.0)
    ke = recs["chain_full.000.ke_le_kobayashi"]
    assert ke.kind == INFORMATIONAL and ke.lhs == pytest.approx(2.0) and ke.rhs == pytest.approx(1.0)
    sq = recs["chain_full.000.kobayashi_le_squeezed_caratheodory"]
    assert sq.equality and sq.passed
    assert all_passed(recs.values())


def test_chain_full_polydisk():
    recs = _by_id(check_chain_full(Polydisk((1.0, 1.0)), [[0, 0]], FAST))
    sq = recs["chain_full.000.kobayashi_le_squeezed_caratheodory"]
    assert sq.rhs == pytest.approx(4 * recs["chain_full.000.caratheodory_le_kobayashi"].lhs)
    assert recs["chain_full.000.squeeze_caratheodory_witness"].lhs == pytest.approx(0.25)
    assert all_passed(recs.values())
    assert not any(r.id.endswith("ke_le_kobayashi") for r in recs.values())


def test_chain_restricted_examples():
    assert restricted_ke_constant(2, 1) == pytest.approx(1.5)
    B = Ball(dim=2)
    recs = _by_id(check_chain_restricted(B, LinearSlice.coordinate(B, 1), [[0, 0]], FAST))
    r = recs["chain_restricted.000.caratheodory_le_kobayashi"]
    assert r.lhs == pytest.approx(1.0) and r.rhs == pytest.approx(1.0)
    assert all_passed(recs.values())
    P = Polydisk((1.0, 1.0))
    recs = _by_id(check_chain_restricted(P, LinearSlice.coordinate(P, 1), [[0, 0]], FAST))
    sq = recs["chain_restricted.000.kobayashi_le_squeezed_caratheodory"]
    assert sq.rhs == pytest.approx(2 * recs["chain_restricted.000.caratheodory_le_kobayashi"].lhs)
    assert all_passed(recs.values())


def test_metric_chain_examples():
    recs = _by_id(check_metric_chain(DISC, [([0], [1])], FAST))
    assert recs["metric_chain.000.caratheodory_le_kobayashi"].rhs == pytest.approx(1.0)
    assert recs["metric_chain.000.caratheodory_le_bergman"].rhs == pytest.approx(2.0, rel=1e-6)
    assert recs["metric_chain.000.caratheodory_le_ke"].rhs == pytest.approx(2.0)
    assert recs["metric_chain.000.kobayashi_le_squeezed_caratheodory"].equality
    assert all_passed(recs.values())
    recs = _by_id(check_metric_chain(Ball(dim=2), [([0, 0], [1, 0])], FAST))
    assert recs["metric_chain.000.caratheodory_le_bergman"].rhs == pytest.approx(3.0, rel=1e-6)
    assert all_passed(recs.values())


def test_chains_on_affine_ball():
    D = AffineImage(Ball(dim=2), [[1, 0.2], [0, 0.7]], [0.1, 0])
    pts = [[0.1, 0], [0.3, 0.2j]]
    assert all_passed(check_chain_full(D, pts, FAST))
    assert all_passed(check_metric_chain(D, [(p, [1, 1j]) for p in pts], FAST))


def test_psh_examples():
    recs = check_psh_log_caratheodory(DISC, [[0], [0.5]])
    assert recs[0].rhs == pytest.approx(2.0, rel=1e-6)
    assert recs[1].rhs == pytest.approx(2 / 0.75 ** 2, rel=1e-6)
    assert all_passed(recs)
    (rec,) = check_psh_log_caratheodory(Ball(dim=2), [[0, 0]])
    assert rec.rhs == pytest.approx(3.0, rel=1e-6) and rec.passed
    (neg,) = check_psh_log_caratheodory(DISC, [[0.2]], density=lambda Z: np.ones(len(Z)))
    assert neg.passed is False
    with pytest.raises(ValueError):
        check_psh_log_caratheodory(Polydisk((1.0, 1.0)), [[0, 0]])


def test_negative_control_scaled_map_fails():
    # a map leaving the disc must break the Schwarz inequality
    rec = check_ahlfors_schwarz(DiagonalScaling((1.5,)), [[0.1]])
    assert rec[0].passed is False
