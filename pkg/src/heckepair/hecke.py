"""The Hecke algebra of (M2(Z)+, SL2(Z)) with exact rational coefficients.

Elements are finite linear combinations of double cosets.  Convolution
is computed by representative-product classification: with right-coset
representatives {r_i}, {s_j} of the two factors, the structure constant
of an output class equals the number of pairs whose product lies in a
fixed right coset of that class.

The algebra is closed under products but not adjoints: the inverse of a
nonunit class leaves the integral semigroup, and the involution raises a
typed error there instead of silently enlarging the algebra.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact_core import IMat2, hnf, padic_valuation
from .coset import DoubleCoset, classify, right_cosets

__all__ = [
    "HeckeElement",
    "SemidirectHeckeElement",
    "EMBEDDING_FLAVORS",
    "AdjointLeavesSemigroupError",
    "hecke_unit",
    "hecke_class",
    "v_class",
    "u_class",
    "convolve",
    "involution",
    "prime_restrict",
    "embed_semidirect",
]

EMBEDDING_FLAVORS = ("plain", "det_inverse", "det_sqrt_modular")


class AdjointLeavesSemigroupError(ArithmeticError):
    """Raised when the adjoint of a class has no representative in M2(Z)+."""


@dataclass(frozen=True)
class HeckeElement:
    """Finitely supported map DoubleCoset -> Fraction; zero coefficients dropped."""

    terms: tuple[tuple[DoubleCoset, Fraction], ...]

    @staticmethod
    def of(coeffs: dict) -> "HeckeElement":
        items = [(dc, Fraction(c)) for dc, c in coeffs.items() if c]
        items.sort(key=lambda t: (t[0].det(), t[0].d1))
        return HeckeElement(tuple(items))

    def coeff(self, dc: DoubleCoset) -> Fraction:
        for d, c in self.terms:
            if d == dc:
                return c
        return Fraction(0)

    def support(self) -> tuple[DoubleCoset, ...]:
        return tuple(d for d, _ in self.terms)

    def __add__(self, other: "HeckeElement") -> "HeckeElement":
        out = dict(self.terms)
        for d, c in other.terms:
            out[d] = out.get(d, Fraction(0)) + c
        return HeckeElement.of(out)

    def scale(self, x) -> "HeckeElement":
        return HeckeElement.of({d: Fraction(x) * c for d, c in self.terms})

    def __mul__(self, other: "HeckeElement") -> "HeckeElement":
        return convolve(self, other)

    def is_zero(self) -> bool:
        return not self.terms


@dataclass(frozen=True)
class SemidirectHeckeElement:
    """Image of a HeckeElement in the semidirect Hecke algebra.

    Supported on the double cosets of (0, s); each class is recorded by
    the elementary divisors of s together with a rescaled coefficient.
    """

    flavor: str
    terms: tuple[tuple[DoubleCoset, Fraction], ...]


def hecke_unit() -> HeckeElement:
    return hecke_class(DoubleCoset(1, 1))


def hecke_class(dc: DoubleCoset) -> HeckeElement:
    return HeckeElement.of({dc: Fraction(1)})


def v_class(p: int) -> HeckeElement:
    """The class of diag(1, p)."""
    return hecke_class(DoubleCoset(1, p))


def u_class(p: int) -> HeckeElement:
    """The class of diag(p, p)."""
    return hecke_class(DoubleCoset(p, p))


def convolve(f1: HeckeElement, f2: HeckeElement) -> HeckeElement:
    out: dict[DoubleCoset, Fraction] = {}
    for d1, c1 in f1.terms:
        for d2, c2 in f2.terms:
            for dc, n in _structure_constants(d1, d2).items():
                out[dc] = out.get(dc, Fraction(0)) + c1 * c2 * n
    return HeckeElement.of(out)


def _structure_constants(a: DoubleCoset, b: DoubleCoset) -> dict[DoubleCoset, int]:
    """Multiplicities of [a]*[b]: pairs of representatives landing in the
    fixed right coset Gamma*diag(d1,d2) of each output class."""
    out: dict[DoubleCoset, int] = {}
    for r in right_cosets(a):
        for s in right_cosets(b):
            prod = r * s
            dc = classify(prod)
            if hnf(prod).matrix == dc.representative():
                out[dc] = out.get(dc, 0) + 1
    return out


def involution(f: HeckeElement) -> HeckeElement:
    """f*(x) = conj(f(x^{-1})); defined only where the inverse class stays integral."""
    for dc, _ in f.terms:
        if (dc.d1, dc.d2) != (1, 1):
            raise AdjointLeavesSemigroupError(
                f"adjoint of class ({dc.d1},{dc.d2}) has determinant "
                f"{Fraction(1, dc.det())} and leaves M2(Z)+"
            )
    return f


def prime_restrict(f: HeckeElement, p: int) -> HeckeElement:
    """Projection onto classes whose determinant is a power of p."""
    kept = {}
    for dc, c in f.terms:
        n = dc.det()
        if n == p ** (padic_valuation(n, p) if n > 1 else 0):
            kept[dc] = c
    return HeckeElement.of(kept)


def embed_semidirect(f: HeckeElement, flavor: str) -> SemidirectHeckeElement:
    """Coefficient-rescaled copy of f supported on semidirect classes (0, s).

    plain keeps coefficients; det_inverse multiplies by det(s)^{-1};
    det_sqrt_modular multiplies by [s(V0):V0]^{-1/2}, which equals
    det(s)^{-1} for this pair since [s(V0):V0] = det(s)^2.
    """
    if flavor not in EMBEDDING_FLAVORS:
        raise ValueError(f"unknown embedding flavor: {flavor!r}")
    terms = []
    for dc, c in f.terms:
        if flavor == "plain":
            terms.append((dc, c))
        else:
            terms.append((dc, c / dc.det()))
    return SemidirectHeckeElement(flavor, tuple(terms))
