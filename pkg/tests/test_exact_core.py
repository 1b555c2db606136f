import random

import pytest

from heckepair.exact_core import (
    IMAT_ID,
    EnumerationCapError,
    IMat2,
    ModMat,
    QMat2,
    SingularMatrixError,
    hnf,
    imat_diag,
    padic_snf,
    padic_valuation,
    row_hnf,
    sl2_mod,
    sl2_order,
    snf,
)
from oracles import brute_hnf, brute_snf_divisors


def _random_nonsingular(rng, lo=-9, hi=9):
    while True:
        m = IMat2(*(rng.randint(lo, hi) for _ in range(4)))
        if m.det():
            return m


def test_hnf_matches_brute_force_oracle():
    rng = random.Random(11)
    for _ in range(200):
        m = _random_nonsingular(rng, -6, 6)
        assert hnf(m).matrix == brute_hnf(m)


def test_hnf_shape_and_transform():
    rng = random.Random(12)
    for _ in range(300):
        m = _random_nonsingular(rng)
        form = hnf(m)
        h = form.matrix
        assert h.b == 0 and h.a > 0 and h.d > 0 and 0 <= h.c < h.a
        assert form.transform * m == h
        assert abs(form.transform.det()) == 1


def test_hnf_is_a_class_invariant():
    rng = random.Random(13)
    unimods = [IMAT_ID, IMat2(0, -1, 1, 0), IMat2(1, 1, 0, 1), IMat2(1, 0, -3, 1)]
    for _ in range(100):
        m = _random_nonsingular(rng)
        u = unimods[rng.randrange(len(unimods))]
        assert hnf(u * m).matrix == hnf(m).matrix


def test_hnf_rejects_singular():
    with pytest.raises(SingularMatrixError):
        hnf(IMat2(1, 2, 2, 4))


def test_snf_matches_gcd_of_minors():
    rng = random.Random(14)
    for _ in range(300):
        m = _random_nonsingular(rng)
        form = snf(m)
        assert (form.d1, form.d2) == brute_snf_divisors(m)
        assert form.d2 % form.d1 == 0
        assert form.left * m * form.right == imat_diag(form.d1, form.d2)


def test_row_hnf_generic():
    rows = [[2, 0], [0, 2], [1, 1]]
    assert row_hnf(rows) == [[2, 0], [1, 1]]
    rows4 = [
        [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1],
        [0, 0, 0, 2],
    ]
    assert row_hnf(rows4) == [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]


def test_sl2_mod_orders():
    assert len(sl2_mod(1)) == 1
    assert len(sl2_mod(2)) == 6
    assert len(sl2_mod(4)) == 48
    assert sl2_order(12) == 1152
    for m in (2, 3, 4, 5, 6):
        assert len(sl2_mod(m)) == sl2_order(m)


def test_sl2_mod_cap():
    with pytest.raises(EnumerationCapError):
        sl2_mod(10**4, cap=100)


def test_padic_valuation():
    assert padic_valuation(24, 2) == 3
    assert padic_valuation(24, 3) == 1
    assert padic_valuation(5, 2) == 0


def test_padic_snf_exponents_and_units():
    rng = random.Random(15)
    for p, k in ((2, 4), (3, 3), (5, 2)):
        mod = p**k
        for _ in range(100):
            m = IMat2(*(rng.randint(-20, 20) for _ in range(4)))
            det = m.det()
            if det == 0 or padic_valuation(abs(det), p) >= k:
                continue
            fac = padic_snf(m, p, k)
            assert fac.a <= fac.b
            assert fac.a + fac.b == padic_valuation(abs(det), p)
            for u in (fac.unit_left, fac.unit_right):
                assert u.det() % p != 0
            diag = ModMat.of(mod, p**fac.a, 0, 0, p**fac.b)
            assert fac.unit_left * diag * fac.unit_right == ModMat.of(mod, *m.entries())


def test_qmat_arithmetic():
    a = QMat2.of(1, 2, 3, 5)
    b = a.inverse()
    assert a * b == QMat2.of(1, 0, 0, 1)
    assert (a + b).a == a.a + b.a
    assert imat_diag(2, 3).to_qmat().det() == 6
