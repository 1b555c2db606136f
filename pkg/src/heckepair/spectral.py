"""Truncated Hilbert-space pictures of the Hecke algebra.

The representation space has one basis vector per lattice containing
Z^2; a window truncates either by a global index bound B or, for the
p-local picture, by a depth k (index up to p^k).  Operators are exact
rational sparse matrices assembled column by column from the defining
lattice formulas; adjoints are verified transposes, never assumptions.

Truncation only leaks outward: a column whose image would leave the
window is flagged as boundary, and every identity is asserted on a
declared interior where no leakage can occur.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .exact_core import IMat2, ModMat, QMat2, padic_snf, padic_valuation
from .coset import DoubleCoset, classify
from .hecke import HeckeElement
from .lattice import (
    Lattice,
    ZSQUARED,
    act,
    act_integral,
    lattice_from_basis,
    lattice_sum,
    localize,
    superlattices,
    tensor_parts,
)

__all__ = [
    "TruncationWindow",
    "SparseOperator",
    "AdelicPoint",
    "BoundaryError",
    "window_global",
    "window_prime",
    "op_v",
    "op_u",
    "op_v_star",
    "op_H",
    "op_hecke",
    "op_pi_L",
    "op_e_L",
    "op_U",
    "op_identity",
    "projection_identity_check",
    "tensor_factorization_check",
    "matrix_unit_generation_check",
]


class BoundaryError(ValueError):
    """Raised when an operation requires a lattice outside the window interior."""


@dataclass(frozen=True)
class TruncationWindow:
    """Ordered basis of superlattices with a declared interior bound."""

    mode: str  # "global" or "prime"
    basis: tuple[Lattice, ...]
    interior_bound: int
    p: int = 0
    depth: int = 0
    bound: int = 0

    def index_of(self, lat: Lattice) -> int:
        return self._lookup()[lat]

    def __contains__(self, lat: Lattice) -> bool:
        return lat in self._lookup()

    def _lookup(self) -> dict:
        if not hasattr(self, "_cache"):
            object.__setattr__(self, "_cache", {l: i for i, l in enumerate(self.basis)})
        return self._cache

    def interior(self, bound: int | None = None) -> list[int]:
        """Positions of basis lattices with index at most the given bound."""
        b = self.interior_bound if bound is None else bound
        return [i for i, lat in enumerate(self.basis) if _index(lat) <= b]


def window_global(b: int, margin: int = 1) -> TruncationWindow:
    """All L >= Z^2 of index <= b; interior reserves a factor of ``margin``."""
    basis = []
    for n in range(1, b + 1):
        basis.extend(superlattices(n))
    return TruncationWindow("global", tuple(basis), b // margin, bound=b)


def window_prime(p: int, k: int) -> TruncationWindow:
    """All L >= Z^2 of index p^j, j <= k; interior is depth k-1."""
    basis = []
    for j in range(k + 1):
        basis.extend(superlattices(p**j))
    return TruncationWindow("prime", tuple(basis), p ** (k - 1), p=p, depth=k)


@dataclass(frozen=True)
class AdelicPoint:
    """Finite-level integral adele: a residue matrix invertible mod N."""

    w: ModMat

    def __post_init__(self) -> None:
        if gcd(self.w.det(), self.w.m) != 1:
            raise ValueError("residue matrix must be invertible mod N")

    @property
    def modulus(self) -> int:
        return self.w.m


@dataclass
class SparseOperator:
    """Exact sparse matrix over the window basis; entries keyed (row, col)."""

    window: TruncationWindow
    entries: dict
    boundary: frozenset = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        self.entries = {k: Fraction(v) for k, v in self.entries.items() if v}

    def entry(self, row: Lattice, col: Lattice) -> Fraction:
        key = (self.window.index_of(row), self.window.index_of(col))
        return self.entries.get(key, Fraction(0))

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        assert self.window is other.window or self.window == other.window
        by_row: dict[int, list] = {}
        for (i, j), v in self.entries.items():
            by_row.setdefault(j, []).append((i, v))
        out: dict = {}
        for (j, k), v in other.entries.items():
            for i, u in by_row.get(j, ()):
                key = (i, k)
                out[key] = out.get(key, Fraction(0)) + u * v
        return SparseOperator(self.window, out, self.boundary | other.boundary)

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        out = dict(self.entries)
        for k, v in other.entries.items():
            out[k] = out.get(k, Fraction(0)) + v
        return SparseOperator(self.window, out, self.boundary | other.boundary)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        return self + other.scale(-1)

    def scale(self, x) -> "SparseOperator":
        return SparseOperator(
            self.window, {k: Fraction(x) * v for k, v in self.entries.items()},
            self.boundary,
        )

    def transpose(self) -> "SparseOperator":
        return SparseOperator(
            self.window, {(j, i): v for (i, j), v in self.entries.items()},
            self.boundary,
        )

    def restrict(self, bound: int) -> "SparseOperator":
        """Keep entries whose row and column lattices both have index <= bound."""
        keep = set(self.window.interior(bound))
        return SparseOperator(
            self.window,
            {(i, j): v for (i, j), v in self.entries.items()
             if i in keep and j in keep},
        )

    def trace(self) -> Fraction:
        return sum((v for (i, j), v in self.entries.items() if i == j), Fraction(0))

    def same_entries(self, other: "SparseOperator") -> bool:
        return self.entries == other.entries


def op_identity(window: TruncationWindow) -> SparseOperator:
    return SparseOperator(window, {(i, i): Fraction(1) for i in range(len(window.basis))})


def op_v(p: int, window: TruncationWindow) -> SparseOperator:
    """delta_L -> sum of delta_{L'} over L' >= L with [L':L] = p."""
    entries = {}
    boundary = set()
    buckets = _index_buckets(window)
    for j, lat in enumerate(window.basis):
        n = _index(lat)
        ups = [i for i in buckets.get(n * p, ())
               if window.basis[i].contains(lat)]
        if len(ups) < p + 1:
            boundary.add(j)
        for i in ups:
            entries[(i, j)] = Fraction(1)
    return SparseOperator(window, entries, frozenset(boundary))


def op_u(p: int, window: TruncationWindow) -> SparseOperator:
    """delta_L -> delta_{(1/p)L}."""
    scale = QMat2.of(Fraction(1, p), 0, 0, Fraction(1, p))
    entries = {}
    boundary = set()
    for j, lat in enumerate(window.basis):
        img = act(scale, lat)
        if img in window:
            entries[(window.index_of(img), j)] = Fraction(1)
        else:
            boundary.add(j)
    return SparseOperator(window, entries, frozenset(boundary))


def op_v_star(p: int, window: TruncationWindow) -> SparseOperator:
    """delta_L -> sum of delta_{L''} over Z^2 <= L'' <= L with [L:L''] = p."""
    entries = {}
    buckets = _index_buckets(window)
    for j, lat in enumerate(window.basis):
        n = _index(lat)
        if n % p:
            continue
        for i in buckets.get(n // p, ()):
            if lat.contains(window.basis[i]):
                entries[(i, j)] = Fraction(1)
    return SparseOperator(window, entries)


def op_H(window: TruncationWindow) -> SparseOperator:
    """Diagonal of indices [L:Z^2]; exp(-beta*H) is an elementwise power later."""
    return SparseOperator(
        window,
        {(i, i): Fraction(_index(lat)) for i, lat in enumerate(window.basis)},
    )


def op_pi_L(l0: Lattice, window: TruncationWindow) -> SparseOperator:
    """Diagonal projection onto the basis lattices containing l0."""
    return SparseOperator(
        window,
        {(i, i): Fraction(1) for i, lat in enumerate(window.basis) if lat.contains(l0)},
    )


def op_e_L(l0: Lattice, window: TruncationWindow) -> SparseOperator:
    """The projection pi_{l0} - join of pi_{L'} over the p+1 lattices L' with
    [L':l0] = p, computed from the defining formula.

    On a prime window this is the matrix unit at (l0, l0); on a global
    window it projects onto basis lattices whose p-part equals l0.
    """
    if window.mode != "prime":
        raise BoundaryError("e_L requires a prime window")
    p = window.p
    n = _index(l0)
    if n > p ** (window.depth - 1):
        raise BoundaryError("e_L requires an interior lattice")
    ups = [up for up in superlattices(n * p) if up.contains(l0)]
    assert len(ups) == p + 1
    entries = {}
    for i, lat in enumerate(window.basis):
        if lat.contains(l0) and not any(lat.contains(up) for up in ups):
            entries[(i, i)] = Fraction(1)
    out = SparseOperator(window, entries)
    unit = {(window.index_of(l0), window.index_of(l0)): Fraction(1)}
    assert out.entries == unit
    return out


def op_hecke(
    f: HeckeElement,
    window: TruncationWindow,
    w: AdelicPoint | None = None,
) -> SparseOperator:
    """Matrix of pi(f) (or pi_w(f)): entry (L', L) is f evaluated at the pair
    (s L', s w) where s is any matrix with L = s^{-1} Z^2.

    For a basis class [t] the entry is 1 exactly when s L' contains Z^2
    and the elementary-divisor shape of its inverse basis (times w at
    finite level) is t.
    """
    if w is not None:
        _check_level(f, window, w)
    entries: dict = {}
    boundary = set()
    for j, lat in enumerate(window.basis):
        s = lat.basis().inverse()
        maxdet = max((dc.det() for dc, _ in f.terms), default=1)
        if _index(lat) * maxdet > _capacity(window):
            boundary.add(j)
        for i, lat2 in enumerate(window.basis):
            m = act(s, lat2)
            if not m.contains(ZSQUARED):
                continue
            s_col = m.basis().inverse()
            if not s_col.is_integral():
                continue
            shape = _shape(s_col.to_imat(), w)
            c = f.coeff(shape)
            if c:
                entries[(i, j)] = c
    return SparseOperator(window, entries, frozenset(boundary))


def op_U(w: AdelicPoint, window: TruncationWindow) -> SparseOperator:
    """Permutation unitary delta_L -> delta_{wL}."""
    perm = {}
    for j, lat in enumerate(window.basis):
        img = act_integral(w.w, lat)
        perm[j] = window.index_of(img)
    assert sorted(perm.values()) == list(range(len(window.basis)))
    return SparseOperator(window, {(i, j): Fraction(1) for j, i in perm.items()})


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of an exact operator-identity check on a window interior."""

    label: str
    params: tuple
    interior_bound: int
    exact: bool
    mismatches: int
    boundary_entries: int


def projection_identity_check(p: int, k: int) -> IdentityReport:
    """T = v*v - vv* - p(1 - uu*) equals the unit projection e_{Z^2},
    checked entry by entry on the depth k-2 interior."""
    if k < 3:
        raise ValueError("depth must be at least 3")
    win = window_prime(p, k)
    v = op_v(p, win)
    vs = op_v_star(p, win)
    u = op_u(p, win)
    one = op_identity(win)
    t = (vs @ v) - (v @ vs) - (one - (u @ u.transpose())).scale(p)
    bound = p ** (k - 2)
    lhs = t.restrict(bound)
    rhs = op_e_L(ZSQUARED, win).restrict(bound)
    diff = lhs - rhs
    outside = {key for key in t.entries if key not in lhs.entries}
    return IdentityReport(
        "projection_identity", (p, k), bound,
        not diff.entries, len(diff.entries), len(outside),
    )


def tensor_factorization_check(p: int, b: int) -> IdentityReport:
    """Operators for the prime p act as (p-local block) x (identity off p)."""
    if b < p * p:
        raise ValueError("bound must be at least p^2")
    win = window_global(b, margin=p)
    bound = win.interior_bound
    keys = {lat: (localize(lat, p), _off_part(lat, p)) for lat in win.basis}
    mismatches = 0
    checks = [op_u(p, win), op_v(p, win), _global_e_L(p, win)]
    pwin_depth = max(padic_valuation(_index(l), p) if _index(l) % p == 0 else 0
                     for l in win.basis) or 1
    pwin = window_prime(p, pwin_depth + 1)
    locals_ = [op_u(p, pwin), op_v(p, pwin), op_e_L(_first_p_lattice(p), pwin)]
    interior = set(win.interior(bound))
    for big, small in zip(checks, locals_):
        for i in interior:
            for j in interior:
                li, lj = win.basis[i], win.basis[j]
                want = Fraction(0)
                if keys[li][1] == keys[lj][1]:
                    want = small.entry(keys[li][0], keys[lj][0])
                if big.entries.get((i, j), Fraction(0)) != want:
                    mismatches += 1
    return IdentityReport(
        "tensor_factorization", (p, b), bound, mismatches == 0, mismatches, 0,
    )


def matrix_unit_generation_check(p: int, k: int = 3) -> IdentityReport:
    """Constructively generate every interior matrix unit from the p-local
    generators: E_{L0,L1} is a scaled product of e_L, powers of v and their
    transposes through the rank-one partial isometries e_L v^n e_{Z^2}."""
    win = window_prime(p, k)
    v = op_v(p, win)
    e0 = op_e_L(ZSQUARED, win)
    interior = win.interior()
    mismatches = 0
    isometries = {}
    for i in interior:
        lat = win.basis[i]
        n = _depth(lat, p)
        w = op_e_L(lat, win)
        for _ in range(n):
            w = w @ v
        w = w @ e0
        lam = w.entries.get((i, 0), Fraction(0))
        assert lam > 0
        isometries[i] = w.scale(Fraction(1, lam))
    for i in interior:
        for j in interior:
            unit = isometries[i] @ isometries[j].transpose()
            want = {(i, j): Fraction(1)}
            if unit.entries != want:
                mismatches += 1
    return IdentityReport(
        "matrix_units", (p, k), win.interior_bound, mismatches == 0, mismatches, 0,
    )


# -- internal helpers ---------------------------------------------------------


def _index(lat: Lattice) -> int:
    return int(Fraction(1) / lat.covolume())


def _index_buckets(window: TruncationWindow) -> dict[int, list[int]]:
    out: dict[int, list[int]] = {}
    for i, lat in enumerate(window.basis):
        out.setdefault(_index(lat), []).append(i)
    return out


def _depth(lat: Lattice, p: int) -> int:
    return padic_valuation(_index(lat), p) if _index(lat) > 1 else 0


def _capacity(window: TruncationWindow) -> int:
    return window.bound if window.mode == "global" else window.p ** window.depth


def _shape(s_col: IMat2, w: AdelicPoint | None) -> DoubleCoset:
    """Elementary-divisor class of s_col (times w at finite level)."""
    det = s_col.det()
    assert det > 0
    if w is None or det == 1:
        return classify(s_col)
    m = s_col * w.w.to_imat()
    d1 = d2 = 1
    for q in _prime_divisors(det):
        kq = padic_valuation(w.modulus, q)
        fac = padic_snf(m, q, kq)
        d1 *= q ** fac.a
        d2 *= q ** fac.b
    assert d1 * d2 == det
    return DoubleCoset(d1, d2)


def _check_level(f: HeckeElement, window: TruncationWindow, w: AdelicPoint) -> None:
    need = 1
    for lat in window.basis:
        need = max(need, _index(lat))
    for dc, _ in f.terms:
        if w.modulus % (dc.det() * need):
            raise ValueError(
                f"level {w.modulus} too small for class ({dc.d1},{dc.d2}) "
                f"on a window with indices up to {need}"
            )


def _off_part(lat: Lattice, p: int) -> Lattice:
    out = ZSQUARED
    for q, part in tensor_parts(lat).parts:
        if q != p:
            out = lattice_sum(out, part)
    return out


def _global_e_L(p: int, win: TruncationWindow) -> SparseOperator:
    """e_{L0} for the first index-p lattice, from the defining formula, on a
    global window (diagonal projection: p-part of the basis lattice equals L0)."""
    l0 = _first_p_lattice(p)
    ups = [up for up in superlattices(p * p) if up.contains(l0)]
    entries = {}
    for i, lat in enumerate(win.basis):
        if lat.contains(l0) and not any(lat.contains(up) for up in ups):
            entries[(i, i)] = Fraction(1)
    return SparseOperator(win, entries)


def _first_p_lattice(p: int) -> Lattice:
    return lattice_from_basis(QMat2.of(1, 0, 0, Fraction(1, p)))


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
