"""Exact arithmetic substrate: 2x2 integer/rational matrices, Hermite and
Smith normal forms, SL2 over Z/m, and truncated p-adic factorization.

Everything here is arbitrary precision; no floating point. All values are
immutable and all functions are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

#: Default guard on the size of an enumerated finite matrix group.
SL2_ENUM_CAP = 10**6


class SingularMatrixError(ValueError):
    """Raised when a nonsingular matrix is required."""


class EnumerationCapError(ValueError):
    """Raised when an enumeration would exceed its configured cap."""


class RegularityError(ValueError):
    """Raised when a matrix is p-adically singular at the requested depth."""


@dataclass(frozen=True)
class IMat2:
    """2x2 integer matrix, row-major entries (a b / c d)."""

    a: int
    b: int
    c: int
    d: int

    def det(self) -> int:
        return self.a * self.d - self.b * self.c

    def adj(self) -> "IMat2":
        return IMat2(self.d, -self.b, -self.c, self.a)

    def __mul__(self, other: "IMat2") -> "IMat2":
        return IMat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "IMat2":
        return IMat2(-self.a, -self.b, -self.c, -self.d)

    def scale(self, n: int) -> "IMat2":
        return IMat2(n * self.a, n * self.b, n * self.c, n * self.d)

    def transpose(self) -> "IMat2":
        return IMat2(self.a, self.c, self.b, self.d)

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def content(self) -> int:
        """gcd of the entries (0 for the zero matrix)."""
        return gcd(gcd(abs(self.a), abs(self.b)), gcd(abs(self.c), abs(self.d)))

    def to_qmat(self) -> "QMat2":
        return QMat2(Fraction(self.a), Fraction(self.b), Fraction(self.c), Fraction(self.d))

    def is_unimodular(self) -> bool:
        return abs(self.det()) == 1


IMAT_ID = IMat2(1, 0, 0, 1)


def imat_diag(d1: int, d2: int) -> IMat2:
    return IMat2(d1, 0, 0, d2)


@dataclass(frozen=True)
class QMat2:
    """2x2 matrix over Q with exact rational entries."""

    a: Fraction
    b: Fraction
    c: Fraction
    d: Fraction

    @staticmethod
    def of(a, b, c, d) -> "QMat2":
        return QMat2(Fraction(a), Fraction(b), Fraction(c), Fraction(d))

    def det(self) -> Fraction:
        return self.a * self.d - self.b * self.c

    def __mul__(self, other: "QMat2") -> "QMat2":
        return QMat2(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __add__(self, other: "QMat2") -> "QMat2":
        return QMat2(self.a + other.a, self.b + other.b,
                     self.c + other.c, self.d + other.d)

    def scale(self, x) -> "QMat2":
        x = Fraction(x)
        return QMat2(x * self.a, x * self.b, x * self.c, x * self.d)

    def inverse(self) -> "QMat2":
        det = self.det()
        if det == 0:
            raise SingularMatrixError("matrix is singular")
        return QMat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def transpose(self) -> "QMat2":
        return QMat2(self.a, self.c, self.b, self.d)

    def entries(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        return (self.a, self.b, self.c, self.d)

    def denominator_lcm(self) -> int:
        out = 1
        for e in self.entries():
            out = out * e.denominator // gcd(out, e.denominator)
        return out

    def is_integral(self) -> bool:
        return all(e.denominator == 1 for e in self.entries())

    def to_imat(self) -> IMat2:
        if not self.is_integral():
            raise ValueError("matrix is not integral")
        return IMat2(int(self.a), int(self.b), int(self.c), int(self.d))


QMAT_ID = QMat2.of(1, 0, 0, 1)


def qmat_diag(d1, d2) -> QMat2:
    return QMat2.of(d1, 0, 0, d2)


@dataclass(frozen=True)
class HnfForm:
    """Row Hermite normal form: lower triangular (a 0 / c d) with a, d > 0
    and 0 <= c < a together with a unimodular transform U with U*M = H.

    The off-diagonal entry is only defined modulo the pivot above it (row
    operations change c in steps of a), so c is reduced into [0, a); this is
    the unique canonical representative of the row module.
    """

    matrix: IMat2
    transform: IMat2

    @property
    def pivots(self) -> tuple[int, int]:
        return (self.matrix.a, self.matrix.d)


def row_hnf(rows: list) -> list[list[int]]:
    """Canonical lower-triangular Hermite basis of the row module spanned by
    the given integer rows.

    The module must have full rank (rank = row length).  Row j of the output
    has its pivot in column j, pivots are positive, and below-diagonal
    entries are reduced modulo the pivot of their column's row into [0, pivot).
    """
    work = [list(r) for r in rows if any(r)]
    if not work:
        raise SingularMatrixError("zero module has no Hermite basis")
    dim = len(work[0])
    result: list[list[int] | None] = [None] * dim
    for col in reversed(range(dim)):
        # Euclid on the entries of `col` across the remaining rows.
        while True:
            nz = [r for r in work if r[col] != 0]
            if len(nz) <= 1:
                break
            nz.sort(key=lambda r: abs(r[col]))
            small = nz[0]
            for r in nz[1:]:
                q = r[col] // small[col]
                for j in range(dim):
                    r[j] -= q * small[j]
        nz = [r for r in work if r[col] != 0]
        if not nz:
            raise SingularMatrixError("row module does not have full rank")
        piv = nz[0]
        work.remove(piv)
        if piv[col] < 0:
            piv = [-x for x in piv]
        result[col] = piv
    rows_out = [list(r) for r in result]  # type: ignore[arg-type]
    # Reduce below-diagonal entries modulo the pivots of their columns.
    for i in range(dim):
        for j in range(i - 1, -1, -1):
            q = rows_out[i][j] // rows_out[j][j]
            if q:
                for t in range(dim):
                    rows_out[i][t] -= q * rows_out[j][t]
    return rows_out


def hnf(m: IMat2) -> HnfForm:
    """Hermite normal form of the row module of ``m``.

    Returns the canonical lower-triangular basis and a unimodular transform
    U with U*m = H.  Raises :class:`SingularMatrixError` on singular input.
    """
    det = m.det()
    if det == 0:
        raise SingularMatrixError("hnf requires a nonsingular matrix")
    rows = row_hnf([[m.a, m.b], [m.c, m.d]])
    h = IMat2(rows[0][0], rows[0][1], rows[1][0], rows[1][1])
    # U = H * m^-1 = H * adj(m) / det(m), integral unimodular by construction.
    t = h * m.adj()
    assert all(e % det == 0 for e in t.entries())
    t = IMat2(t.a // det, t.b // det, t.c // det, t.d // det)
    assert t.is_unimodular()
    return HnfForm(matrix=h, transform=t)


@dataclass(frozen=True)
class SnfForm:
    """Smith normal form data: left*M*right = diag(d1, d2) with d1 | d2 and
    unimodular transforms."""

    d1: int
    d2: int
    left: IMat2
    right: IMat2

    def diag(self) -> IMat2:
        return imat_diag(self.d1, self.d2)

    @property
    def divisors(self) -> tuple[int, int]:
        return (self.d1, self.d2)


def snf(m: IMat2) -> SnfForm:
    """Smith normal form of a nonsingular 2x2 integer matrix.

    d1 is the gcd of the entries and d1*d2 = |det(m)|.
    """
    det = m.det()
    if det == 0:
        raise SingularMatrixError("snf requires a nonsingular matrix")
    d1 = m.content()
    d2 = abs(det) // d1
    # Build explicit transforms by row/column reduction.
    r = [[m.a, m.b], [m.c, m.d]]
    left = [[1, 0], [0, 1]]
    right = [[1, 0], [0, 1]]

    def rowop(i, j, q):
        r[i][0] -= q * r[j][0]
        r[i][1] -= q * r[j][1]
        left[i][0] -= q * left[j][0]
        left[i][1] -= q * left[j][1]

    def colop(i, j, q):
        # col i -= q*col j
        r[0][i] -= q * r[0][j]
        r[1][i] -= q * r[1][j]
        right[0][i] -= q * right[0][j]
        right[1][i] -= q * right[1][j]

    def rowswap():
        r[0], r[1] = r[1], r[0]
        left[0], left[1] = left[1], left[0]

    def colswap():
        r[0][0], r[0][1] = r[0][1], r[0][0]
        r[1][0], r[1][1] = r[1][1], r[1][0]
        right[0][0], right[0][1] = right[0][1], right[0][0]
        right[1][0], right[1][1] = right[1][1], right[1][0]

    while True:
        # Move a smallest nonzero entry to (0,0).
        entries = [(abs(r[i][j]), i, j) for i in (0, 1) for j in (0, 1) if r[i][j] != 0]
        _, i, j = min(entries)
        if i == 1:
            rowswap()
        if j == 1:
            colswap()
        if r[1][0] % r[0][0] == 0 and r[0][1] % r[0][0] == 0:
            rowop(1, 0, r[1][0] // r[0][0])
            colop(1, 0, r[0][1] // r[0][0])
            if r[1][1] % r[0][0] == 0:
                break
            # Fold the remaining entry into row 0 and continue reducing.
            rowop(0, 1, -1)
        else:
            if r[1][0] % r[0][0] != 0:
                rowop(1, 0, r[1][0] // r[0][0])
            if r[0][1] % r[0][0] != 0:
                colop(1, 0, r[0][1] // r[0][0])
    # Normalize signs of the diagonal.
    if r[0][0] < 0:
        left[0][0], left[0][1] = -left[0][0], -left[0][1]
        r[0][0] = -r[0][0]
    if r[1][1] < 0:
        left[1][0], left[1][1] = -left[1][0], -left[1][1]
        r[1][1] = -r[1][1]
    assert (r[0][0], r[1][1]) == (d1, d2), "smith reduction mismatch"
    lm = IMat2(left[0][0], left[0][1], left[1][0], left[1][1])
    rm = IMat2(right[0][0], right[0][1], right[1][0], right[1][1])
    return SnfForm(d1=d1, d2=d2, left=lm, right=rm)


def elementary_divisors(m: IMat2) -> tuple[int, int]:
    """(d1, d2) with d1 | d2, d1 = gcd of entries, d1*d2 = |det|."""
    det = m.det()
    if det == 0:
        raise SingularMatrixError("elementary divisors require nonsingular input")
    d1 = m.content()
    return (d1, abs(det) // d1)


@dataclass(frozen=True)
class ModMat:
    """2x2 matrix over Z/m, entries reduced into [0, m)."""

    m: int
    a: int
    b: int
    c: int
    d: int

    @staticmethod
    def of(m: int, a: int, b: int, c: int, d: int) -> "ModMat":
        return ModMat(m, a % m, b % m, c % m, d % m)

    @staticmethod
    def from_imat(mat: IMat2, m: int) -> "ModMat":
        return ModMat.of(m, mat.a, mat.b, mat.c, mat.d)

    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.m

    def __mul__(self, other: "ModMat") -> "ModMat":
        assert self.m == other.m
        return ModMat.of(
            self.m,
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "ModMat":
        det = self.a * self.d - self.b * self.c
        dinv = pow(det, -1, self.m)
        return ModMat.of(self.m, dinv * self.d, -dinv * self.b, -dinv * self.c, dinv * self.a)

    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def reduce(self, m2: int) -> "ModMat":
        assert self.m % m2 == 0
        return ModMat.of(m2, self.a, self.b, self.c, self.d)

    def to_imat(self) -> IMat2:
        return IMat2(self.a, self.b, self.c, self.d)


def sl2_order(m: int) -> int:
    """|SL2(Z/m)| by the multiplicative product formula."""
    if m == 1:
        return 1
    order = m**3
    n = m
    p = 2
    while p * p <= n:
        if n % p == 0:
            order = order // (p * p) * (p * p - 1)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        order = order // (n * n) * (n * n - 1)
    return order


def sl2_mod(m: int, cap: int = SL2_ENUM_CAP) -> list[ModMat]:
    """All elements of SL2(Z/m), each exactly once, in lexicographic order.

    The size guard uses the product-formula order; the enumeration itself is
    a direct filter of all matrices over Z/m.
    """
    if m < 1:
        raise ValueError("modulus must be positive")
    if sl2_order(m) > cap:
        raise EnumerationCapError(f"|SL2(Z/{m})| exceeds cap {cap}")
    out = []
    for a in range(m):
        for b in range(m):
            for c in range(m):
                for d in range(m):
                    if (a * d - b * c) % m == 1 % m:
                        out.append(ModMat(m, a, b, c, d))
    return out


def padic_valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero is infinite")
    v = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        v += 1
    return v


@dataclass(frozen=True)
class PadicFactorization:
    """Truncated Smith factorization over Z/p^k:

        unit_left * diag(p^a, p^b) * unit_right == M (mod p^k),

    with both transforms invertible mod p^k and 0 <= a <= b,
    a + b = v_p(det M).  A one-sided form M = r * diag(p^a, p^b) with a
    single unit r does not exist in general (e.g. (2 1 / 0 2) mod 16), so
    the unit part is carried as the two transforms.
    """

    p: int
    k: int
    a: int
    b: int
    unit_left: ModMat
    unit_right: ModMat

    @property
    def exponents(self) -> tuple[int, int]:
        return (self.a, self.b)

    def diag(self) -> ModMat:
        return ModMat.of(self.unit_left.m, self.p**self.a, 0, 0, self.p**self.b)


def padic_snf(m: IMat2, p: int, k: int) -> PadicFactorization:
    """Factor ``m`` as unit * diag(p^a, p^b) * unit modulo p^k.

    Requires v_p(det m) < k; otherwise the matrix is in the p-singular locus
    at this depth and :class:`RegularityError` is raised.
    """
    pk = p**k
    det = m.det()
    if det == 0 or padic_valuation(det, p) >= k:
        raise RegularityError(f"det(m) is 0 mod {p}^{k}")
    vdet = padic_valuation(det, p)
    r = [[m.a % pk, m.b % pk], [m.c % pk, m.d % pk]]
    left = ModMat.of(pk, 1, 0, 0, 1)  # accumulated row transform, left*m*right = r
    right = ModMat.of(pk, 1, 0, 0, 1)

    def vval(x):
        return k if x % pk == 0 else padic_valuation(x % pk, p)

    # Pivot on an entry of minimal valuation; swaps are units mod p^k.
    i0, j0 = min(((i, j) for i in (0, 1) for j in (0, 1)), key=lambda ij: vval(r[ij[0]][ij[1]]))
    if i0 == 1:
        r[0], r[1] = r[1], r[0]
        left = ModMat.of(pk, 0, 1, 1, 0) * left
    if j0 == 1:
        r[0][0], r[0][1] = r[0][1], r[0][0]
        r[1][0], r[1][1] = r[1][1], r[1][0]
        right = right * ModMat.of(pk, 0, 1, 1, 0)
    a = vval(r[0][0])
    a = min(a, vdet)
    b = vdet - a
    pa = p**a
    u = pow(r[0][0] // pa, -1, pk)
    # Clear below and right of the pivot; the quotients are exact because the
    # pivot has minimal valuation.
    q = (r[1][0] // pa * u) % pk
    r[1] = [(r[1][j] - q * r[0][j]) % pk for j in (0, 1)]
    left = ModMat.of(pk, 1, 0, -q, 1) * left
    q = (r[0][1] // pa * u) % pk
    r[0][1] = (r[0][1] - q * r[0][0]) % pk
    r[1][1] = (r[1][1] - q * r[1][0]) % pk
    right = right * ModMat.of(pk, 1, -q, 0, 1)
    # Now r = diag(u0*p^a, u1*p^b); strip the unit factors into `left`.
    u0 = (r[0][0] // pa) % pk
    u1 = (r[1][1] // p**b) % pk
    left = ModMat.of(pk, pow(u0, -1, pk), 0, 0, pow(u1, -1, pk)) * left
    return PadicFactorization(
        p=p, k=k, a=a, b=b, unit_left=left.inverse(), unit_right=right.inverse()
    )
