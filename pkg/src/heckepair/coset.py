"""Double-coset arithmetic for (M2(Z)+, SL2(Z)) and its semidirect extension.

The base pair is S = integral 2x2 matrices of positive determinant with
Gamma = SL2(Z); double cosets are classified by elementary divisors and
right cosets carry canonical Hermite-form representatives.  The extended
pair is P = M2(Q) x| GL2+(Q) over P0 = M2(Z) x| SL2(Z), with the
semidirect product (m1, g1)(m2, g2) = (m1 + m2*g1^{-1}, g1*g2) induced
by the right translation action of GL2+(Q) on M2(Q).

Left/right coset counts for the extended pair reduce to a coset count in
the base pair times a finite orbit factor: the orbit of the translation
part under the congruence group Gamma_g = g*Gamma*g^{-1} n Gamma,
computed entirely inside finite quotient modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from .exact_core import (
    IMat2,
    ModMat,
    QMat2,
    SL2_ENUM_CAP,
    row_hnf,
    sl2_mod,
    snf,
)

__all__ = [
    "DoubleCoset",
    "SemidirectElement",
    "GammaGQuotient",
    "classify",
    "right_cosets",
    "left_cosets",
    "semidirect_R",
    "semidirect_L",
    "semidirect_delta",
    "gamma_orbit",
    "gamma_g_quotient",
    "module_index",
]


@dataclass(frozen=True)
class DoubleCoset:
    """The double coset Gamma*diag(d1,d2)*Gamma, with d1 | d2."""

    d1: int
    d2: int

    def __post_init__(self) -> None:
        if self.d1 <= 0 or self.d2 <= 0:
            raise ValueError("elementary divisors must be positive")
        if self.d2 % self.d1:
            raise ValueError("elementary divisors must satisfy d1 | d2")

    def det(self) -> int:
        return self.d1 * self.d2

    def representative(self) -> IMat2:
        return IMat2(self.d1, 0, 0, self.d2)


@dataclass(frozen=True)
class SemidirectElement:
    """Element (m, g) of M2(Q) x| GL2+(Q)."""

    m: QMat2
    g: QMat2

    def __post_init__(self) -> None:
        if self.g.det() <= 0:
            raise ValueError("group part must have positive determinant")

    def __mul__(self, other: "SemidirectElement") -> "SemidirectElement":
        return SemidirectElement(self.m + other.m * self.g.inverse(), self.g * other.g)

    def inverse(self) -> "SemidirectElement":
        return SemidirectElement(self.m.scale(Fraction(-1)) * self.g, self.g.inverse())


@dataclass(frozen=True)
class GammaGQuotient:
    """Image of Gamma_g = g*Gamma*g^{-1} n Gamma in SL2(Z/m).

    Membership is the congruence adj(g)*gamma*g = 0 mod det(g); since
    SL2(Z) -> SL2(Z/m) is onto, the image acts with the same orbits as
    Gamma_g on any module of exponent dividing m.
    """

    g: IMat2
    modulus: int
    members: tuple[ModMat, ...]


def classify(s: IMat2) -> DoubleCoset:
    """Elementary-divisor class of an integral matrix of positive determinant."""
    if s.det() <= 0:
        raise ValueError("only positive-determinant matrices are classified")
    f = snf(s)
    return DoubleCoset(f.d1, f.d2)


def right_cosets(dc: DoubleCoset) -> list[IMat2]:
    """Hermite representatives t of the right cosets Gamma*t in the double coset.

    These are exactly the lower-triangular matrices [[a,0],[c,d]] with
    a*d = d1*d2, 0 <= c < a and gcd(a,c,d) = d1, ordered lexicographically
    on (a, c, d).
    """
    n = dc.det()
    out = []
    for a in range(1, n + 1):
        if n % a:
            continue
        d = n // a
        for c in range(a):
            if gcd(gcd(a, c), d) == dc.d1:
                out.append(IMat2(a, 0, c, d))
    return out


def left_cosets(dc: DoubleCoset) -> list[IMat2]:
    """Representatives of the left cosets t*Gamma: transposes of the right ones."""
    return [t.transpose() for t in right_cosets(dc)]


def gamma_g_quotient(g: IMat2, modulus: int, cap: int = SL2_ENUM_CAP) -> GammaGQuotient:
    """Compute the image of Gamma_g in SL2(Z/modulus) by exhaustive filtering."""
    d = g.det()
    if d <= 0:
        raise ValueError("group part must have positive determinant")
    if modulus % d:
        raise ValueError("modulus must be a multiple of det(g)")
    adj = g.adj()
    members = []
    for gam in sl2_mod(modulus, cap):
        prod = adj * gam.to_imat() * g
        if all(e % d == 0 for e in prod.entries()):
            members.append(gam)
    return GammaGQuotient(g, modulus, tuple(members))


def gamma_orbit(v: QMat2, group: list[ModMat] | tuple[ModMat, ...]) -> list[QMat2]:
    """Orbit of v + M2(Z) in M2(Q)/M2(Z) under gamma: m -> m*gamma^{-1}.

    ``group`` is a list of elements (or generators) of a subgroup of
    SL2(Z/m) with m a multiple of the denominator of v.  The orbit is
    closed by breadth-first search, so a generating set suffices.
    Representatives have entries in [0,1) and are sorted lexicographically.
    """
    d = v.denominator_lcm()
    for gam in group:
        if gam.m % d:
            raise ValueError("group modulus must be a multiple of the denominator")
    start = _frac_key(v)
    seen = {start}
    frontier = [start]
    movers = [gam.inverse().to_imat() for gam in group]
    while frontier:
        nxt = []
        for key in frontier:
            w = QMat2.of(*key)
            for gi in movers:
                img = _frac_key(w * gi.to_qmat())
                if img not in seen:
                    seen.add(img)
                    nxt.append(img)
        frontier = nxt
    return [QMat2.of(*key) for key in sorted(seen)]


def module_index(g: QMat2) -> Fraction:
    """|M2(Z) / (M2(Z) n M2(Z)g)| via the right-multiplication lattice in Q^4."""
    if g.det() == 0:
        raise ValueError("module index requires a nonsingular matrix")
    image = [_flatten(row * g) for row in _STD_BASIS]
    meet = _lat4_intersect(_Z4_ROWS, image)
    idx = abs(_det4(meet))
    assert idx.denominator == 1
    return idx


def semidirect_R(x: SemidirectElement, mod_cap: int = SL2_ENUM_CAP) -> int:
    """Number of right P0-cosets in P0 x P0 for the semidirect pair.

    Factors as R_Gamma(g) times the number of M2(Z)-translates covering
    the Gamma_g-orbit of the translation part inside
    M2(Q) / (M2(Z) + M2(Z)g^{-1}).
    """
    v, g = x.m, x.g
    g0 = _primitive_integral(g)
    r_base = len(right_cosets(classify(g0)))
    return r_base * _orbit_factor(v, g, g0, mod_cap)


def semidirect_L(x: SemidirectElement, mod_cap: int = SL2_ENUM_CAP) -> int:
    """Number of left P0-cosets in P0 x P0; equals semidirect_R of the inverse."""
    return semidirect_R(x.inverse(), mod_cap)


def semidirect_delta(x: SemidirectElement, mod_cap: int = SL2_ENUM_CAP) -> Fraction:
    """Modular function L/R of the pair at x."""
    return Fraction(semidirect_L(x, mod_cap), semidirect_R(x, mod_cap))


# -- internal helpers ---------------------------------------------------------

_STD_BASIS = (
    QMat2.of(1, 0, 0, 0),
    QMat2.of(0, 1, 0, 0),
    QMat2.of(0, 0, 1, 0),
    QMat2.of(0, 0, 0, 1),
)
_Z4_ROWS = [
    [Fraction(1), Fraction(0), Fraction(0), Fraction(0)],
    [Fraction(0), Fraction(1), Fraction(0), Fraction(0)],
    [Fraction(0), Fraction(0), Fraction(1), Fraction(0)],
    [Fraction(0), Fraction(0), Fraction(0), Fraction(1)],
]


def _flatten(m: QMat2) -> list[Fraction]:
    return [m.a, m.b, m.c, m.d]


def _primitive_integral(g: QMat2) -> IMat2:
    """Integral multiple lambda*g with lambda > 0 rational and content 1."""
    q = g.denominator_lcm()
    m = g.scale(Fraction(q)).to_imat()
    return IMat2(*(e // m.content() for e in m.entries()))


def _orbit_factor(v: QMat2, g: QMat2, g0: IMat2, mod_cap: int) -> int:
    """|M2(Z) \\ (M2(Z) + O_{Gamma_g}(v) + M2(Z)g^{-1})|.

    The covering set is a union of translates of the subgroup
    U = M2(Z) + M2(Z)g^{-1}; the count is the number of distinct orbit
    classes mod U times the (integer) index [U : M2(Z)].
    """
    ginv = g.inverse()
    u_rows = _lat4_hnf(_Z4_ROWS + [_flatten(row * ginv) for row in _STD_BASIS])
    index_u = Fraction(1) / abs(_det4(u_rows))
    assert index_u.denominator == 1

    d = v.denominator_lcm()
    modulus = lcm(d, g0.det())
    quo = gamma_g_quotient(g0, modulus, mod_cap)
    classes = set()
    for gam in quo.members:
        w = v * gam.inverse().to_imat().to_qmat()
        classes.add(tuple(_reduce_mod(u_rows, _flatten(w))))
    return len(classes) * int(index_u)


def _lat4_hnf(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Lower-triangular canonical basis of the rank-4 lattice spanned by rows."""
    q = lcm(*(f.denominator for row in rows for f in row))
    ints = [[int(f * q) for f in row] for row in rows]
    h = row_hnf(ints)
    return [[Fraction(e, q) for e in row] for row in h]


def _lat4_intersect(a: list[list[Fraction]], b: list[list[Fraction]]) -> list[list[Fraction]]:
    """Intersection of two rank-4 lattices via duality: (A n B)* = A* + B*."""
    da = _dual4(_lat4_hnf(a))
    db = _dual4(_lat4_hnf(b))
    return _dual4(_lat4_hnf(da + db))


def _dual4(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    inv = _inv4(rows)
    return _lat4_hnf([[inv[i][j] for i in range(4)] for j in range(4)])


def _inv4(rows: list[list[Fraction]]) -> list[list[Fraction]]:
    """Exact inverse of a 4x4 rational matrix by Gauss-Jordan elimination."""
    n = 4
    aug = [[Fraction(x) for x in rows[i]] + [Fraction(int(i == j)) for j in range(n)]
           for i in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            raise ValueError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        scale = aug[col][col]
        aug[col] = [x / scale for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def _det4(rows: list[list[Fraction]]) -> Fraction:
    """Determinant of a lower-triangular 4x4 basis (row_hnf output)."""
    out = Fraction(1)
    for i in range(4):
        out *= rows[i][i]
    return out


def _reduce_mod(basis: list[list[Fraction]], x: list[Fraction]) -> list[Fraction]:
    """Canonical representative of x modulo the lattice with lower-triangular basis."""
    coords = []
    resid = list(x)
    for i in range(3, -1, -1):
        c = resid[i] / basis[i][i]
        coords.append((i, c - (c // 1)))  # keep only the fractional part
        resid = [r - c * b for r, b in zip(resid, basis[i])]
    assert not any(resid)
    out = [Fraction(0)] * 4
    for i, c in coords:
        out = [o + c * b for o, b in zip(out, basis[i])]
    return out


def _frac_key(m: QMat2) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    return tuple(e - (e // 1) for e in m.entries())
