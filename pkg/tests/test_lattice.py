import random
from fractions import Fraction

import pytest

from heckepair.exact_core import QMat2
from heckepair.kms import sigma1
from heckepair.lattice import (
    ZSQUARED,
    IncompatibleModulusError,
    Lattice,
    act,
    act_integral,
    lattice_from_basis,
    lattice_intersect,
    lattice_sum,
    localize,
    rel_index,
    superlattices,
    tensor_parts,
)
from heckepair.exact_core import ModMat
from oracles import brute_superlattice_count


def _random_lattice(rng, span=4):
    while True:
        m = QMat2.of(*(Fraction(rng.randint(-span, span), rng.randint(1, 3))
                       for _ in range(4)))
        if m.det():
            return lattice_from_basis(m)


def test_canonical_form_is_basis_independent():
    rng = random.Random(21)
    unimods = [QMat2.of(0, -1, 1, 0), QMat2.of(1, 1, 0, 1), QMat2.of(1, 0, -2, 1)]
    for _ in range(200):
        lat = _random_lattice(rng)
        u = unimods[rng.randrange(3)]
        assert lattice_from_basis(u * lat.basis()) == lat


def test_superlattice_count_is_sigma1():
    for n in range(1, 61):
        assert len(superlattices(n)) == sigma1(n)


def test_superlattice_count_matches_brute_force():
    for n in range(1, 13):
        assert len(superlattices(n)) == brute_superlattice_count(n)


def test_superlattices_contain_zsquared_with_right_index():
    for n in (1, 4, 6, 12):
        for lat in superlattices(n):
            assert lat.contains(ZSQUARED)
            assert rel_index(lat, ZSQUARED) == n


def test_sum_and_intersection_are_lattice_operations():
    rng = random.Random(22)
    for _ in range(60):
        a, b = _random_lattice(rng), _random_lattice(rng)
        s = lattice_sum(a, b)
        i = lattice_intersect(a, b)
        for x in (a, b):
            assert s.contains(x)
            assert x.contains(i)
        # index multiplicativity: [S:A][A:I] = [S:B][B:I]
        assert rel_index(s, a) * rel_index(a, i) == rel_index(s, b) * rel_index(b, i)
        assert lattice_sum(a, a) == a
        assert lattice_intersect(s, a) == a


def test_localize_and_tensor_parts():
    lat = lattice_from_basis(QMat2.of(Fraction(1, 12), 0, 0, Fraction(1, 3)))
    parts = tensor_parts(lat)
    assert parts.support() == (2, 3)
    assert parts.reconstruct() == lat
    l2 = localize(lat, 2)
    l3 = localize(lat, 3)
    assert rel_index(l2, ZSQUARED) == 4
    assert rel_index(l3, ZSQUARED) == 9
    assert lattice_sum(l2, l3) == lat
    assert localize(lat, 5) == ZSQUARED


def test_unique_neighbor_lemma():
    # A superlattice chain: if (1/p)Z^2 is not contained in L, then L has a
    # unique index-p superlattice neighbor above it and a unique one below.
    for p in (2, 3):
        half = lattice_from_basis(QMat2.of(Fraction(1, p), 0, 0, Fraction(1, p)))
        for n in (p, p**2, p**3, p**4):
            for lat in superlattices(n):
                if lat.contains(half):
                    continue
                ups = [m for m in superlattices(n * p) if m.contains(lat)]
                downs = [m for m in superlattices(n // p) if lat.contains(m)]
                assert len(ups) == p + 1
                assert len(downs) == 1


def test_act_scales_covolume():
    rng = random.Random(23)
    for _ in range(50):
        lat = _random_lattice(rng)
        g = QMat2.of(1, 0, 0, 2)
        img = act(g, lat)
        assert img.covolume() == lat.covolume() * 2


def test_act_integral_permutes_superlattices():
    w = ModMat.of(8, 3, 1, 1, 2)  # det 5, invertible mod 8
    lats = superlattices(8)
    images = {act_integral(w, lat) for lat in lats}
    assert images == set(lats)
    with pytest.raises(IncompatibleModulusError):
        act_integral(ModMat.of(2, 1, 0, 0, 1), superlattices(8)[0])


def test_to_json_round_trip_fields():
    lat = superlattices(6)[2]
    js = lat.to_json()
    assert set(js) == {"q", "hnf"}
    assert Lattice(js["q"], type(lat.hnf)(js["hnf"][0], 0, js["hnf"][1], js["hnf"][2])) == lat
