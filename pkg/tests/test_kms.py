import warnings
from decimal import Decimal, localcontext
from fractions import Fraction

import pytest

from heckepair.exact_core import IMat2
from heckepair.hecke import u_class, v_class
from heckepair.kms import (
    Beta,
    DivergenceError,
    UncertifiedBetaWarning,
    gibbs_trace,
    kms_residual,
    measure_cylinder,
    mu_orbit_mass,
    partition_global,
    partition_prime,
    phi_operator,
    phi_prime_pair,
    sigma1,
    total_orbit_mass,
    zeta_interval,
)
from heckepair.spectral import op_hecke, op_identity, window_prime


def test_sigma1_multiplicative():
    assert [sigma1(n) for n in range(1, 11)] == [1, 3, 4, 7, 6, 12, 8, 15, 13, 18]
    assert sigma1(2**10) == 2**11 - 1
    assert sigma1(6) == sigma1(2) * sigma1(3)
    # brute-force cross-check
    for n in range(1, 200):
        assert sigma1(n) == sum(d for d in range(1, n + 1) if n % d == 0)


def test_zeta_interval_brackets():
    with localcontext() as ctx:
        ctx.prec = 60
        lo, hi = zeta_interval(Decimal(2))
        pi2_6 = Decimal("1.644934066848226436472415166646")
        assert lo <= pi2_6 <= hi
        assert hi - lo < Decimal("1e-8")


def test_partition_prime_invariant_and_tolerance():
    for p in (2, 3):
        for beta in ("2.5", "3"):
            rep = partition_prime(p, beta, 30)
            gap = abs(rep.partial_sum - rep.closed_form)
            assert gap <= rep.tail_bound
            assert gap < Decimal("1e-12")
            assert rep.certified


def test_partition_prime_closed_form_at_integer_beta():
    rep = partition_prime(2, 3, 60)
    with localcontext() as ctx:
        ctx.prec = 60
        # (1 - 2^-3)^-1 (1 - 2^-2)^-1 = (8/7)(4/3) = 32/21
        want = Decimal(32) / Decimal(21)
        assert abs(rep.closed_form - want) < Decimal("1e-45")


def test_partition_global_certified_correction():
    rep = partition_global(3, 2000)
    gap = abs(rep.partial_sum - rep.closed_form)
    assert gap <= rep.tail_bound
    corrected_gap = abs(rep.corrected - rep.closed_form)
    assert corrected_gap <= rep.corrected_bound
    assert corrected_gap < gap


def test_divergence_and_warning():
    with pytest.raises(DivergenceError):
        phi_prime_pair("id", "id", 2, "0.5", 10)
    with pytest.warns(UncertifiedBetaWarning):
        phi_prime_pair("id", "id", 2, "1.5", 10)


def test_phi_catalogue_matches_window_traces():
    # phi on a truncated window (depth k) agrees with the series catalogue
    # truncated one level lower, because top-level columns lose their
    # superlattice images.
    for p in (2, 3):
        k = 5
        win = window_prime(p, k)
        v = op_hecke(v_class(p), win)
        num = phi_operator(v.transpose() @ v, 3)
        cat, _ = phi_prime_pair("vs", "v", p, 3, depth=k - 1)
        assert abs(num - cat) < Decimal("1e-30")


def test_kms_state_value_vstar_v():
    for p in (2, 3):
        val, tail = phi_prime_pair("vs", "v", p, 3, depth=40)
        assert abs(val - (p + 1)) < Decimal("1e-6")
        assert tail < Decimal("1e-10")


def test_kms_condition_residuals():
    pairs = [("v", "vs"), ("vs", "v"), ("u", "us"), ("us", "u"),
             ("v", "u"), ("u", "v"), ("e0", "e0"), ("u", "e0")]
    for p in (2, 3):
        for a, b in pairs:
            res, bound = kms_residual(a, b, p, 3, depth=40)
            assert res <= Decimal("1e-8"), (p, a, b, res)


def test_gibbs_trace_normalization():
    win = window_prime(2, 6)
    z = gibbs_trace(op_identity(win), 3)
    rep = partition_prime(2, 3, 6)
    assert abs(z - rep.partial_sum) < Decimal("1e-40")


def test_measure_cylinder_is_multiplicative():
    with localcontext() as ctx:
        ctx.prec = 60
        c2 = measure_cylinder([2], 3)
        c3 = measure_cylinder([3], 3)
        c23 = measure_cylinder([2, 3], 3)
        assert abs(c23.decimal - c2.decimal * c3.decimal) < Decimal("1e-40")
        assert c2.exact == Fraction(21, 32)


def test_orbit_masses_sum_to_one():
    mid, half = total_orbit_mass(3, 10**3)
    assert Decimal(1) - Decimal("1e-2") <= mid + half
    assert mid - half <= 1
    # the identity orbit carries mass 1/(zeta(3) zeta(2))
    m, h = mu_orbit_mass(IMat2(1, 0, 0, 1), 3)
    with localcontext() as ctx:
        ctx.prec = 60
        z3lo, z3hi = zeta_interval(Decimal(3))
        z2lo, z2hi = zeta_interval(Decimal(2))
        want_lo = 1 / (z3hi * z2hi)
        want_hi = 1 / (z3lo * z2lo)
        assert want_lo - h <= m <= want_hi + h


def test_beta_wrapper():
    b = Beta.of("2.5")
    assert not b.is_integral()
    assert Beta.of(3).is_integral()
    assert Beta.of(Fraction(1, 2)).value == Decimal("0.5")
