import random
from fractions import Fraction

import pytest

from heckepair.coset import DoubleCoset
from heckepair.hecke import (
    AdjointLeavesSemigroupError,
    HeckeElement,
    convolve,
    embed_semidirect,
    hecke_class,
    hecke_unit,
    involution,
    prime_restrict,
    u_class,
    v_class,
)
from oracles import convolve_defining


def _basis_classes(max_det):
    out = []
    for d1 in range(1, max_det + 1):
        for d2 in range(d1, max_det // d1 + 1):
            if d2 % d1 == 0 and d1 * d2 <= max_det:
                out.append(DoubleCoset(d1, d2))
    return out


def test_unit_is_neutral():
    for dc in _basis_classes(9):
        f = hecke_class(dc)
        assert convolve(hecke_unit(), f) == f
        assert convolve(f, hecke_unit()) == f


def test_v_squared_structure():
    for p in (2, 3, 5):
        prod = convolve(v_class(p), v_class(p))
        assert dict(prod.terms) == {
            DoubleCoset(1, p * p): Fraction(1),
            DoubleCoset(p, p): Fraction(p + 1),
        }


def test_u_is_central_scaling():
    for p in (2, 3):
        for dc in (DoubleCoset(1, p), DoubleCoset(1, p**2), DoubleCoset(p, p)):
            lhs = convolve(u_class(p), hecke_class(dc))
            rhs = convolve(hecke_class(dc), u_class(p))
            assert lhs == rhs
            assert lhs == hecke_class(DoubleCoset(p * dc.d1, p * dc.d2))


def test_structure_constants_match_defining_sum():
    pairs = [
        (DoubleCoset(1, 2), DoubleCoset(1, 2)),
        (DoubleCoset(1, 2), DoubleCoset(1, 3)),
        (DoubleCoset(1, 4), DoubleCoset(1, 2)),
        (DoubleCoset(2, 2), DoubleCoset(1, 3)),
        (DoubleCoset(1, 6), DoubleCoset(1, 2)),
    ]
    for a, b in pairs:
        prod = convolve(hecke_class(a), hecke_class(b))
        want = {dc: Fraction(c) for dc, c in convolve_defining(a, b).items()}
        assert dict(prod.terms) == want


def test_associativity_on_random_triples():
    rng = random.Random(41)
    classes = _basis_classes(16)
    for _ in range(50):
        a, b, c = (hecke_class(rng.choice(classes)) for _ in range(3))
        assert convolve(convolve(a, b), c) == convolve(a, convolve(b, c))


def test_local_algebra_is_commutative():
    for p in (2, 3):
        classes = [DoubleCoset(p**i, p**j)
                   for i in range(5) for j in range(i, 5) if i + j <= 4]
        for a in classes:
            for b in classes:
                assert convolve(hecke_class(a), hecke_class(b)) == \
                    convolve(hecke_class(b), hecke_class(a))


def test_cross_prime_classes_commute():
    assert convolve(v_class(2), v_class(3)) == convolve(v_class(3), v_class(2))
    assert convolve(u_class(2), v_class(5)) == convolve(v_class(5), u_class(2))


def test_involution_closes_only_on_unit():
    f = hecke_unit().scale(Fraction(2, 3))
    assert involution(f) == f
    with pytest.raises(AdjointLeavesSemigroupError):
        involution(v_class(2))


def test_prime_restrict():
    f = v_class(2) + v_class(3).scale(2)
    assert prime_restrict(f, 2) == v_class(2)
    assert prime_restrict(f, 3) == v_class(3).scale(2)


def test_embed_flavors():
    f = v_class(2)
    plain = embed_semidirect(f, "plain")
    inv = embed_semidirect(f, "det_inverse")
    mod = embed_semidirect(f, "det_sqrt_modular")
    assert plain.flavor == "plain"
    assert inv.terms == mod.terms
    (dc, c_plain), = plain.terms
    (dc2, c_inv), = inv.terms
    assert dc == dc2 == DoubleCoset(1, 2)
    assert c_inv == c_plain / 2
    with pytest.raises(ValueError):
        embed_semidirect(f, "bogus")
