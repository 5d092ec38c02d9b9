import math

import numpy as np
import pytest

from alarmtaxis import stability as stab
from alarmtaxis.errors import DegenerateParametersError, DomainError, InapplicableError
from alarmtaxis.model import ModelParams
from alarmtaxis.steady_states import coexistence_foodchain, coexistence_intraguild

FC = (2 / 3, 1 / 3, 4 / 3)


@pytest.mark.parametrize("b,gs1,gs2", [
    ((1, 1), True, True), ((1, 2), False, True), ((2.5, 1.8), True, True), ((3, 1), True, False),
    ((3.5, 0.5), False, False),
])
def test_conditions(b, gs1, gs2):
    assert stab.check_gs1(*b) is gs1
    assert stab.check_gs2(*b) is gs2


def test_small_intraguild_box():
    assert stab.check_small_intraguild(0.02, 1.0, 0.02)
    assert not stab.check_small_intraguild(0.1, 1.0, 0.02)
    assert not stab.check_small_intraguild(0.02, 1.5, 0.02)
    assert stab.check_small_intraguild(0.1, 1.0, 0.02, small_box=(0.0, 0.2))


def test_A1_examples():
    A, det, pd = stab.matrix_A1(1, 1)
    np.testing.assert_array_equal(A, np.eye(3))
    assert det == 1 and pd
    _, det, pd = stab.matrix_A1(3, 1)
    assert det == 0 and not pd


def test_A1_determinant_oracle(rng):
    for b1, b2 in rng.uniform(0, 4, size=(1000, 2)):
        A, det, _ = stab.matrix_A1(b1, b2)
        assert det == pytest.approx(stab.det3(A), rel=1e-12, abs=1e-14)
        assert stab.leading_minors(A)[1] == pytest.approx((3 - b1) * (1 + b1) / 4, abs=1e-14)


def _eig_pd(m):
    # independent oracle: roots of the characteristic polynomial
    return bool(np.all(np.roots(np.poly(m)).real > 1e-9))


def test_pd_flags_match_eigen_oracle(rng):
    agree = 0
    for _ in range(1000):
        q = rng.normal(size=(3, 3))
        m = (q + q.T) / 2 + rng.uniform(-1, 2) * np.eye(3)
        if np.abs(np.linalg.eigvalsh(m)).min() < 1e-6:
            continue  # too close to singular for either test to be meaningful
        assert stab.is_positive_definite(m) == _eig_pd(m)
        agree += 1
    assert agree > 900


def test_B1_taxis_free_is_diagonal():
    B, pd = stab.matrix_B1(ModelParams(d1=0.5, d2=2.0), 1.0, 1.0, FC)
    np.testing.assert_allclose(B, np.diag([0.5 * FC[0], 2 * FC[1], FC[2]]))
    assert pd


def test_B1_large_taxis_not_pd():
    B, pd = stab.matrix_B1(ModelParams(xi=1.9, chi=1.9), 1.0, 1.0, FC)
    assert not pd
    assert stab.det3(B) < 0  # oracle on the fast path


def test_B_minors_match_oracle(rng):
    for _ in range(300):
        p = ModelParams(d1=rng.uniform(0.1, 3), d2=rng.uniform(0.1, 3),
                        xi=rng.uniform(0, 3), chi=rng.uniform(0, 3))
        steady = tuple(rng.uniform(0.05, 3, 3))
        us, vs = rng.uniform(0.1, 3, 2)
        B, pd = stab.matrix_B2(p, us, vs, steady)
        oracle = stab.leading_minors(B)
        assert pd == stab.is_positive_definite(B, oracle)


def test_B_below_thresholds_is_pd(rng):
    for _ in range(300):
        steady = tuple(rng.uniform(0.05, 3, 3))
        us, vs = rng.uniform(0.1, 3, 2)
        base = ModelParams(d1=rng.uniform(0.1, 3), d2=rng.uniform(0.1, 3))
        xi1, _ = stab.taxis_thresholds(base, us, vs, steady)
        p = base.replace(xi=rng.uniform(0, 0.99) * xi1)
        _, chi1 = stab.taxis_thresholds(p, us, vs, steady)
        p = p.replace(chi=rng.uniform(0, 0.99) * chi1)
        assert stab.matrix_B1(p, us, vs, steady)[1]


def test_thresholds_examples():
    p = ModelParams()
    xi1, chi1 = stab.taxis_thresholds(p, 1.0, 1.0, FC)
    assert xi1 == pytest.approx(2.0)
    assert stab.taxis_thresholds(p, 2.0, 1.0, FC)[0] == pytest.approx(1.0)
    u, v, w = FC
    assert chi1 == pytest.approx(math.sqrt(2 * u * v / (w * (u + v))))


def test_threshold_monotonicity(rng):
    for _ in range(200):
        steady = tuple(rng.uniform(0.05, 3, 3))
        d1, d2, us, vs = rng.uniform(0.1, 3, 4)
        p = ModelParams(d1=d1, d2=d2)
        x = stab.taxis_thresholds(p, us, vs, steady)[0]
        assert stab.taxis_thresholds(p, us * 1.1, vs, steady)[0] < x
        assert stab.taxis_thresholds(p.replace(d1=d1 * 1.1), us, vs, steady)[0] > x
        assert stab.taxis_thresholds(p.replace(d2=d2 * 1.1), us, vs, steady)[0] > x


def test_thresholds_degenerate():
    with pytest.raises(DegenerateParametersError):
        stab.taxis_thresholds(ModelParams(), 1.0, 1.0, (0.5, 0.0, 1.0))
    with pytest.raises(DomainError):
        stab.taxis_thresholds(ModelParams(), 0.0, 1.0, FC)


def test_A2_reduced_example():
    steady = coexistence_intraguild(0.0, 1.0, 0.0)[0].triple
    A, pd = stab.matrix_A2(0.0, 1.0, 0.0, steady)
    assert pd
    assert 4 * stab.det3(A) == pytest.approx(stab.det_A2_reduced(1.0, steady, math.sqrt(2) / 2), rel=1e-12)


def test_A2_entry_deficit():
    steady = coexistence_intraguild(0.02, 0.9, 0.03)[0].triple
    us, _, ws = steady
    A, _ = stab.matrix_A2(0.02, 0.9, 0.03, steady, 0.8)
    assert 1 - A[0, 0] == pytest.approx(0.03 * ws / ((us + ws) * 0.8), rel=1e-15)


def test_A2_determinant_identity(rng):
    for _ in range(1000):
        b2 = rng.uniform(0.1, 1.41)
        s = rng.uniform(0.1, 2.0)
        steady = coexistence_intraguild(0.0, b2, 0.0)[0].triple
        A, _ = stab.matrix_A2(0.0, b2, 0.0, steady, s)
        closed = stab.det_A2_reduced(b2, steady, s)
        w = steady[2]
        # the form with u_* = 1 substituted
        literal = 3 - (b2 - 1) ** 2 - w**2 / ((1 + w) ** 2 * s**2) + (3 + (b2 - 1) * w) / ((1 + w) * s)
        assert 4 * stab.det3(A) == pytest.approx(closed, rel=1e-12, abs=1e-13)
        assert closed == pytest.approx(literal, rel=1e-12, abs=1e-13)


def test_A2_pd_over_range():
    for b2 in np.linspace(0.1, math.sqrt(2) - 1e-3, 40):
        steady = coexistence_intraguild(0.0, b2, 0.0)[0].triple
        assert stab.matrix_A2(0.0, b2, 0.0, steady)[1]


def test_A2_rejects_bad_uw():
    with pytest.raises(DomainError):
        stab.matrix_A2(0, 1, 0, (1, 0.3, 1.7), 0.0)


def test_B2_small_taxis_pd():
    steady = coexistence_intraguild(0.02, 1.0, 0.02)[0].triple
    B, pd = stab.matrix_B2(ModelParams(xi=0.05, chi=0.05), 1.0, 1.0, steady)
    assert pd and stab.det3(B) > 0
    B, pd = stab.matrix_B2(ModelParams(), 1.0, 1.0, steady)
    assert pd and np.count_nonzero(B - np.diag(np.diag(B))) == 0


def test_lower_bound_u():
    assert stab.lower_bound_u(0, 0, 5.0, 0.4) == 0.4
    assert stab.lower_bound_u(0, 0, 5.0, 3.0) == 1.0
    assert stab.lower_bound_u(0.1, 0.05, 2.0, 0.9) == pytest.approx(0.75)
    with pytest.raises(InapplicableError):
        stab.lower_bound_u(0.5, 0.6, 1.0, 0.9)


def test_region_scan_examples():
    scan = stab.region_scan()
    assert scan.admissible.shape == (200, 200)
    for pt, expected in [((1, 1), True), ((3, 1), False), ((3.5, 0.5), False), ((2.5, 1.8), True)]:
        i, j = scan.nearest(*pt)
        # nearest sample lies within half a grid step of the requested point
        assert abs(scan.b1[i] - pt[0]) <= 0.01 and abs(scan.b2[j] - pt[1]) <= 0.0075
        assert bool(scan.admissible[i, j]) is expected
    assert scan.n_components() == 1
    j = scan.nearest(1, 1)[1]
    assert scan.admissible[scan.b1 <= 1, j].all()


def test_region_admissible_implies_positive():
    scan = stab.region_scan(resolution=60)
    for i, j in zip(*np.nonzero(scan.admissible)):
        assert coexistence_foodchain(scan.b1[i], scan.b2[j]).positive


def test_region_csv():
    text = stab.region_scan(resolution=200).to_csv()
    lines = text.splitlines()
    assert lines[0] == "b1,b2,gs1,gs2,admissible" and len(lines) == 40001
    assert "1,1.02,true,true,true" in lines
    assert "3.5,0.51000000000000001,false,false,false" in lines


def test_region_rejects_bad_range():
    with pytest.raises(DomainError):
        stab.region_scan((2.0, 1.0))


def test_stability_report():
    r = stab.stability_report(ModelParams(b1=1, b2=1, xi=0.5), 1.0, 1.0)
    assert r.gs1 and r.gs2 and r.A1_pd and r.B1_psd_at_supnorms
    assert r.detA1 == 1.0 and r.xi1 == pytest.approx(2.0) and r.alpha == pytest.approx(1.0)
    assert set(r.as_json()) >= {"gs1", "gs2", "condition_1_10", "detA1", "A1_pd",
                                "B1_psd_at_supnorms", "xi1", "chi1"}
