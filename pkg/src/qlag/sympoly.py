"""Sparse exact polynomials with Gaussian-rational coefficients.

Monomials are exponent tuples over (x, eta, eps, hbar, a, b, c, d, f, g) plus
a marker slot tagging an attached wavefunction factor (none, psi, psi_x,
psi_xx).  hbar and a take signed exponents (a^-1 is routine).  The truncation
grading used throughout the short-time derivation is deg(eta) + 2*deg(eps).
All arithmetic is exact (fractions.Fraction); nothing here touches floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial

__all__ = [
    "CRational",
    "SymPoly",
    "mono",
    "mono_mul",
    "grade",
    "mono_str",
    "SYMBOL_NAMES",
    "MARK_NONE",
    "MARK_PSI",
    "MARK_PSI_X",
    "MARK_PSI_XX",
    "MARK_NAMES",
]

# Monomial slot layout.
IX_X, IX_ETA, IX_EPS, IX_HBAR, IX_A, IX_B, IX_C, IX_D, IX_F, IX_G, IX_MARK = range(11)
SYMBOL_NAMES = ("x", "eta", "eps", "hbar", "a", "b", "c", "d", "f", "g")

MARK_NONE, MARK_PSI, MARK_PSI_X, MARK_PSI_XX = range(4)
MARK_NAMES = ("", "psi", "psi_x", "psi_xx")

_ZERO_MONO = (0,) * 11


@dataclass(frozen=True)
class CRational:
    """Gaussian rational re + im*i."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(re=0, im=0) -> "CRational":
        return CRational(Fraction(re), Fraction(im))

    @property
    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __add__(self, other: "CRational") -> "CRational":
        return CRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "CRational") -> "CRational":
        return CRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "CRational":
        return CRational(-self.re, -self.im)

    def __mul__(self, other: "CRational") -> "CRational":
        return CRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*i"
        sign = "+" if self.im > 0 else "-"
        return f"({self.re} {sign} {abs(self.im)}*i)"


QQ_ZERO = CRational.of(0)
QQ_ONE = CRational.of(1)
QQ_I = CRational.of(0, 1)


def mono(
    x=0, eta=0, eps=0, hbar=0, a=0, b=0, c=0, d=0, f=0, g=0, mark=MARK_NONE
) -> tuple:
    return (x, eta, eps, hbar, a, b, c, d, f, g, mark)


def mono_mul(m1: tuple, m2: tuple) -> tuple:
    if m1[IX_MARK] and m2[IX_MARK]:
        raise ValueError("cannot multiply two wavefunction factors")
    out = tuple(m1[i] + m2[i] for i in range(10))
    return out + (m1[IX_MARK] or m2[IX_MARK],)


def grade(m: tuple) -> int:
    """Truncation grading: deg(eta) + 2*deg(eps)."""
    return m[IX_ETA] + 2 * m[IX_EPS]


def mono_str(m: tuple) -> str:
    parts = []
    for i, name in enumerate(SYMBOL_NAMES):
        e = m[i]
        if e == 1:
            parts.append(name)
        elif e != 0:
            parts.append(f"{name}^{e}")
    if m[IX_MARK]:
        parts.append(MARK_NAMES[m[IX_MARK]])
    return "*".join(parts) if parts else "1"


class SymPoly:
    """Immutable-by-convention sparse polynomial {monomial: CRational}."""

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        clean = {}
        if terms:
            for m, q in terms.items():
                if not q.is_zero:
                    clean[m] = q
        self.terms = clean

    @staticmethod
    def zero() -> "SymPoly":
        return SymPoly()

    @staticmethod
    def one() -> "SymPoly":
        return SymPoly({_ZERO_MONO: QQ_ONE})

    @staticmethod
    def term(coeff: CRational, **exponents) -> "SymPoly":
        return SymPoly({mono(**exponents): coeff})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def items(self) -> list[tuple[tuple, CRational]]:
        """Terms in a deterministic (sorted-monomial) order."""
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def coeff(self, m: tuple) -> CRational:
        return self.terms.get(m, QQ_ZERO)

    def __eq__(self, other) -> bool:
        return isinstance(other, SymPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: "SymPoly") -> "SymPoly":
        out = dict(self.terms)
        for m, q in other.terms.items():
            s = out.get(m, QQ_ZERO) + q
            if s.is_zero:
                out.pop(m, None)
            else:
                out[m] = s
        return SymPoly(out)

    def __sub__(self, other: "SymPoly") -> "SymPoly":
        return self + (-other)

    def __neg__(self) -> "SymPoly":
        return SymPoly({m: -q for m, q in self.terms.items()})

    def scale(self, coeff: CRational) -> "SymPoly":
        if coeff.is_zero:
            return SymPoly()
        return SymPoly({m: q * coeff for m, q in self.terms.items()})

    def mul(self, other: "SymPoly", max_grade: int | None = None) -> "SymPoly":
        out: dict = {}
        for m1, q1 in self.terms.items():
            for m2, q2 in other.terms.items():
                m = mono_mul(m1, m2)
                if max_grade is not None and grade(m) > max_grade:
                    continue
                s = out.get(m, QQ_ZERO) + q1 * q2
                if s.is_zero:
                    out.pop(m, None)
                else:
                    out[m] = s
        return SymPoly(out)

    def __mul__(self, other: "SymPoly") -> "SymPoly":
        return self.mul(other)

    def truncate(self, max_grade: int) -> "SymPoly":
        return SymPoly({m: q for m, q in self.terms.items() if grade(m) <= max_grade})

    def exp_series(self, max_grade: int) -> "SymPoly":
        """exp of this polynomial, truncated to the grading; every term must have grade >= 1."""
        for m in self.terms:
            if grade(m) < 1:
                raise ValueError(f"exp argument has a grade-0 term: {mono_str(m)}")
        out = SymPoly.one()
        power = SymPoly.one()
        for k in range(1, max_grade + 1):
            power = power.mul(self, max_grade)
            if power.is_zero:
                break
            out = out + power.scale(CRational.of(Fraction(1, factorial(k))))
        return out

    def zero_out(self, symbols) -> "SymPoly":
        """Drop every monomial carrying a positive power of any named symbol."""
        idx = [SYMBOL_NAMES.index(s) for s in symbols]
        return SymPoly(
            {m: q for m, q in self.terms.items() if all(m[i] == 0 for i in idx)}
        )

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{q}*{mono_str(m)}" for m, q in self.items())

    __repr__ = __str__
