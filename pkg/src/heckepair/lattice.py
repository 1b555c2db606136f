"""Lattices in Q^2 commensurable with Z^2.

A lattice is a rank-2 Z-submodule of Q^2.  Every such lattice L has a
unique canonical form (q, H) where q is the least positive integer with
q*L contained in Z^2 and H is the Hermite normal form basis of q*L.
Canonicity makes equality and hashing structural, so lattices can index
Hilbert-space bases directly.

Row-vector convention throughout: the rows of a basis matrix generate
the lattice, and a matrix g acts on a lattice by transporting rows,
L -> {x*g : x in L}.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .exact_core import (
    IMat2,
    ModMat,
    QMat2,
    SingularMatrixError,
    imat_diag,
    padic_valuation,
    row_hnf,
)

__all__ = [
    "Lattice",
    "PrimeParts",
    "ZSQUARED",
    "IncompatibleModulusError",
    "lattice_from_basis",
    "rel_index",
    "lattice_sum",
    "lattice_intersect",
    "superlattices",
    "localize",
    "tensor_parts",
    "act",
    "act_integral",
]


class IncompatibleModulusError(ValueError):
    """Raised when a residue matrix has too small a modulus for the lattice."""


@dataclass(frozen=True)
class Lattice:
    """Canonical lattice: basis rows of the integral matrix ``hnf`` scaled by 1/q."""

    q: int
    hnf: IMat2

    def __post_init__(self) -> None:
        if self.q <= 0:
            raise ValueError("denominator must be positive")
        h = self.hnf
        if h.b != 0 or h.a <= 0 or h.d <= 0 or not 0 <= h.c < h.a:
            raise ValueError("basis is not in Hermite normal form")
        if gcd(self.q, h.content()) != 1:
            raise ValueError("denominator is not minimal")

    def basis(self) -> QMat2:
        """Rational basis matrix whose rows generate the lattice."""
        return self.hnf.to_qmat().scale(Fraction(1, self.q))

    def index_over(self, other: "Lattice") -> Fraction:
        return rel_index(self, other)

    def contains(self, other: "Lattice") -> bool:
        """True iff every generator of ``other`` lies in self."""
        inv = self.basis().inverse()
        return (other.basis() * inv).is_integral()

    def covolume(self) -> Fraction:
        """|det| of any basis; rel_index(Z^2, L) as a positive rational."""
        return abs(self.basis().det())

    def sort_key(self) -> tuple[int, int, int, int]:
        return (self.q, self.hnf.a, self.hnf.c, self.hnf.d)

    def to_json(self) -> dict:
        return {"q": self.q, "hnf": [self.hnf.a, self.hnf.c, self.hnf.d]}


ZSQUARED = Lattice(1, imat_diag(1, 1))


@dataclass(frozen=True)
class PrimeParts:
    """Finitely supported decomposition of a superlattice into p-parts."""

    parts: tuple[tuple[int, Lattice], ...]  # sorted by prime

    def support(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.parts)

    def part(self, p: int) -> Lattice:
        for q, lat in self.parts:
            if q == p:
                return lat
        return ZSQUARED

    def reconstruct(self) -> Lattice:
        out = ZSQUARED
        for _, lat in self.parts:
            out = lattice_sum(out, lat)
        return out


def lattice_from_basis(b: QMat2) -> Lattice:
    """Canonical lattice generated by the rows of ``b``."""
    if b.det() == 0:
        raise SingularMatrixError("lattice basis must be nonsingular")
    q = b.denominator_lcm()
    m = b.scale(Fraction(q)).to_imat()
    rows = row_hnf([[m.a, m.b], [m.c, m.d]])
    h = IMat2(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    # shrink q by any common content of the integral HNF
    g = gcd(q, h.content())
    if g > 1:
        q //= g
        h = IMat2(h.a // g, 0, h.c // g, h.d // g)
    return Lattice(q, h)


def rel_index(lat: Lattice, lat0: Lattice) -> Fraction:
    """Generalized index [lat : lat0] = |lat/lat∩lat0| / |lat0/lat∩lat0|."""
    r = lat0.covolume() / lat.covolume()
    assert r > 0
    return r


def lattice_sum(l1: Lattice, l2: Lattice) -> Lattice:
    """Smallest lattice containing both: HNF of the stacked bases."""
    q = lcm(l1.q, l2.q)
    rows = []
    for lat in (l1, l2):
        s = q // lat.q
        h = lat.hnf
        rows += [[s * h.a, s * h.b], [s * h.c, s * h.d]]
    r = row_hnf(rows)
    return lattice_from_basis(
        QMat2.of(r[0][0], r[0][1], r[1][0], r[1][1]).scale(Fraction(1, q))
    )


def lattice_intersect(l1: Lattice, l2: Lattice) -> Lattice:
    """Largest lattice contained in both, via duality: (L1∩L2)* = L1* + L2*."""
    d1 = _dual(l1)
    d2 = _dual(l2)
    return _dual(lattice_sum(d1, d2))


def _dual(lat: Lattice) -> Lattice:
    """Dual lattice {y : <x,y> in Z for all x in L}; basis rows = (B^T)^{-1} rows."""
    return lattice_from_basis(lat.basis().transpose().inverse())


def superlattices(n: int) -> list[Lattice]:
    """All lattices L with Z^2 ⊆ L and [L:Z^2] = n, lexicographically ordered.

    Duality swaps superlattices and sublattices of Z^2 while preserving
    the index, so we enumerate the index-n HNF sublattice bases
    (ad = n, 0 <= c < a) and dualize each.
    """
    if n < 1:
        raise ValueError("index must be positive")
    out = []
    for a in range(1, n + 1):
        if n % a:
            continue
        d = n // a
        for c in range(a):
            sub = lattice_from_basis(QMat2.of(a, 0, c, d))
            out.append(_dual(sub))
    assert len(set(out)) == len(out)
    out.sort(key=Lattice.sort_key)
    return out


def localize(lat: Lattice, p: int) -> Lattice:
    """The p-part L_p: preimage of the p-Sylow subgroup of L/Z^2."""
    _require_superlattice(lat)
    n = int(rel_index(lat, ZSQUARED))
    e = padic_valuation(n, p) if n % p == 0 else 0
    m = n // p**e
    # Z^2 + m*L has index p^e and kills all prime parts except p.
    scaled = lattice_from_basis(lat.basis().scale(Fraction(m)))
    return lattice_sum(ZSQUARED, scaled)


def tensor_parts(lat: Lattice) -> PrimeParts:
    """Decompose a superlattice into its p-parts, one per prime dividing the index."""
    _require_superlattice(lat)
    n = int(rel_index(lat, ZSQUARED))
    parts = []
    for p in _prime_divisors(n):
        parts.append((p, localize(lat, p)))
    return PrimeParts(tuple(parts))


def act(g: QMat2, lat: Lattice) -> Lattice:
    """Transport the lattice by the row action x -> x*g."""
    if g.det() == 0:
        raise SingularMatrixError("group element must be nonsingular")
    return lattice_from_basis(lat.basis() * g)


def act_integral(w: ModMat, lat: Lattice) -> Lattice:
    """Action of a residue matrix w (mod N) on a superlattice of index dividing N.

    The action is through L/Z^2 ⊂ (Q/Z)^2: a generator x + Z^2 of order
    dividing N is sent to x*w + Z^2, which only depends on w mod N.
    """
    _require_superlattice(lat)
    n = int(rel_index(lat, ZSQUARED))
    if w.m % n != 0:
        raise IncompatibleModulusError(
            f"modulus {w.m} does not determine the action on an index-{n} lattice"
        )
    w.inverse()  # raises if not invertible mod N
    # Lift w to an integral matrix; L = Z^2 + sum of generator images.
    wz = w.to_imat().to_qmat()
    b = lat.basis()
    rows = [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]
    for x, y in ((b.a, b.b), (b.c, b.d)):
        rows.append([x * wz.a + y * wz.c, x * wz.b + y * wz.d])
    out = _lattice_from_rows(rows)
    assert rel_index(out, ZSQUARED) == n
    return out


def _lattice_from_rows(rows: list[list[Fraction]]) -> Lattice:
    q = lcm(*(f.denominator for row in rows for f in row))
    ints = [[int(f * q) for f in row] for row in rows]
    r = row_hnf(ints)
    return lattice_from_basis(
        QMat2.of(r[0][0], r[0][1], r[1][0], r[1][1]).scale(Fraction(1, q))
    )


def _require_superlattice(lat: Lattice) -> None:
    if not lat.contains(ZSQUARED):
        raise ValueError("operation requires a lattice containing Z^2")


def _prime_divisors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out
