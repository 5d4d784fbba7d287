"""Coefficient sets for the quadratic Lagrangian

    L(x, xdot, t) = a(t) xdot^2 + b(t) x xdot + c(t) x^2 + d(t) xdot + f(t) x + g(t)

Each coefficient is a time expression (see expressions).  a(t) must stay
strictly positive on any interval handed to the evolver; ``validate`` checks
that by dense sampling and reports every violation it finds.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .expressions import Bin, Expr, ExprDomainError, Neg, Num, as_expr, eval_expr

__all__ = [
    "CoefficientSet",
    "CoefficientValues",
    "Violation",
    "PresetError",
    "from_standard",
    "preset",
    "PRESET_CASES",
    "validate",
]

COEFF_NAMES = ("a", "b", "c", "d", "f", "g")


class PresetError(ValueError):
    pass


@dataclass(frozen=True)
class CoefficientValues:
    """Point values of the six coefficients at a fixed time."""

    a: float
    b: float
    c: float
    d: float
    f: float
    g: float


@dataclass(frozen=True)
class CoefficientSet:
    a: Expr
    b: Expr
    c: Expr
    d: Expr
    f: Expr
    g: Expr
    hbar: float = 1.0
    label: str = ""

    def __post_init__(self):
        if not (self.hbar > 0.0):
            raise ValueError(f"hbar must be positive, got {self.hbar!r}")

    def at(self, t: float) -> CoefficientValues:
        return CoefficientValues(*(eval_expr(getattr(self, n), t) for n in COEFF_NAMES))

    def with_label(self, label: str) -> "CoefficientSet":
        return replace(self, label=label)


def make(a="0", b="0", c="0", d="0", f="0", g="0", hbar: float = 1.0, label: str = "") -> CoefficientSet:
    """Build a set from strings / numbers / ASTs; omitted coefficients are zero."""
    return CoefficientSet(
        as_expr(a), as_expr(b), as_expr(c), as_expr(d), as_expr(f), as_expr(g), hbar, label
    )


def _neg(node: Expr) -> Expr:
    return node if node == Num(0.0) else Neg(node)


def from_standard(mass, V2="0", V1="0", V0="0", hbar: float = 1.0) -> CoefficientSet:
    """Map a standard-form Lagrangian (m/2) xdot^2 - V2 x^2 - V1 x - V0 onto the general one.

    a = m/2, c = -V2, f = -V1, g = -V0, and b = d = 0.
    """
    half_m = Bin("*", Num(0.5), as_expr(mass))
    return CoefficientSet(
        half_m,
        Num(0.0),
        _neg(as_expr(V2)),
        Num(0.0),
        _neg(as_expr(V1)),
        _neg(as_expr(V0)),
        hbar,
        "standard",
    )


# Special-case zero patterns: which coefficients may be nonzero per case.
PRESET_CASES = {
    "a": frozenset({"a", "f"}),  # linear potential only
    "b": frozenset({"a", "c"}),  # quadratic potential only
    "c": frozenset({"a", "b"}),  # x-xdot cross term only
    "d": frozenset({"a", "d"}),  # constant velocity coupling only
}


def preset(case: str, params: dict, hbar: float = 1.0) -> CoefficientSet:
    """Coefficient set for one of the special cases, enforcing its zero pattern.

    ``params`` maps coefficient names to expressions and must include "a";
    supplying a coefficient the case forces to zero is an error.
    """
    if case not in PRESET_CASES:
        raise PresetError(f"unknown case {case!r}; valid cases: {sorted(PRESET_CASES)}")
    allowed = PRESET_CASES[case]
    bad = sorted(set(params) - allowed)
    if bad:
        raise PresetError(f"case {case!r} forces {bad} to zero; allowed: {sorted(allowed)}")
    if "a" not in params:
        raise PresetError(f"case {case!r} needs an explicit 'a' coefficient")
    exprs = {n: as_expr(params[n]) if n in params else Num(0.0) for n in COEFF_NAMES}
    return CoefficientSet(**exprs, hbar=hbar, label=f"case-{case}")


@dataclass(frozen=True)
class Violation:
    coefficient: str
    time: float
    kind: str  # "nonfinite" | "nonpositive_a"
    detail: str = ""


def validate(coeffs: CoefficientSet, t0: float, t1: float, samples: int = 1000) -> list[Violation]:
    """Dense-sample all six coefficients over [t0, t1]; return every violation found.

    Checks: each coefficient evaluates to a finite float, and a(t) > 0.
    An empty list means the set is usable on the interval.  Sampling cannot
    certify behavior between sample points; the evolver re-checks a(t) at
    every step midpoint it actually uses.
    """
    if t1 < t0:
        raise ValueError(f"bad interval [{t0}, {t1}]")
    n = max(int(samples), 1000)
    ts = np.linspace(t0, t1, n) if t1 > t0 else np.array([t0])
    out: list[Violation] = []
    for name in COEFF_NAMES:
        expr = getattr(coeffs, name)
        for t in ts:
            t = float(t)
            try:
                value = eval_expr(expr, t)
            except ExprDomainError as exc:
                out.append(Violation(name, t, "nonfinite", str(exc)))
                continue
            if name == "a" and not (value > 0.0):
                out.append(Violation("a", t, "nonpositive_a", f"a({t!r}) = {value!r}"))
    return out
