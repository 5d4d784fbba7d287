"""Mechanical audit of the short-time-kernel derivation of the evolution equation.

One propagator slice, after substituting x' = x + eta and pulling out the
Gaussian factor exp(i a eta^2 / (hbar eps)), is the eta-integral of

    F1 F2 F3 F4 F5 F6 F7 F8 F9 * (psi + eta psi_x + eta^2/2 psi_xx)

where the nine elementary factors are exponentials of

    z1 = -i eta b x / hbar          z6 = -i eta d / hbar
    z2 = -i eta^2 b / (2 hbar)      z7 =  i eps f x / hbar
    z3 =  i eps c x^2 / hbar        z8 =  i eps eta f / (2 hbar)
    z4 =  i eps eta^2 c / (4 hbar)  z9 =  i eps g / hbar
    z5 =  i eps eta c x / hbar

Two expansion modes are audited.  "exact" Taylor-expands every factor to the
truncation grading deg(eta) + 2*deg(eps) <= order.  "paper_literal"
transcribes the derivation's own per-factor truncations, which carry a
sign defect in two places: the second-order terms of F1 and F6 enter with
+eta^2 b^2 x^2/(2 hbar^2) and +eta^2 d^2/(2 hbar^2) where Taylor's theorem
gives a minus sign.

After expansion, normalized Gaussian eta-moments replace eta powers

    <eta^0> = 1,  <eta odd> = 0,
    <eta^2> = i hbar eps / (2 a),
    <eta^4> = -3/4 hbar^2 eps^2 / a^2,

the eps^0 sector must collapse to exactly 1*psi (checked), and the eps^1
sector, multiplied by i*hbar, is the evolution equation

    i hbar psi_t = kinetic psi_xx + drift_x x psi_x + drift_const psi_x
                 + pot_x2 x^2 psi + pot_x1 x psi + pot_x0 psi.

Everything here is exact rational arithmetic; the numeric layers never feed
back into this module.  An independent cross-check, weyl_reference_pde,
builds the same equation by Weyl-ordered canonical quantization of
H = (p - b x - d)^2/(4 a) - c x^2 - f x - g and shares nothing with the
kernel pipeline but the polynomial arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .sympoly import (
    CRational,
    IX_EPS,
    IX_ETA,
    IX_MARK,
    IX_X,
    MARK_NONE,
    MARK_PSI,
    MARK_PSI_X,
    MARK_PSI_XX,
    QQ_I,
    QQ_ONE,
    SYMBOL_NAMES,
    SymPoly,
    grade,
    mono,
    mono_str,
)

__all__ = [
    "MODES",
    "ORDERS",
    "MomentOrderError",
    "DerivationError",
    "SymbolicPde",
    "DiscrepancyEntry",
    "DiscrepancyReport",
    "TermFate",
    "factor_arguments",
    "expand_kernel",
    "apply_moments",
    "derive_pde",
    "literal_reference_pde",
    "weyl_reference_pde",
    "compare_modes",
    "audit_term_fates",
    "pde_to_jsonable",
    "pde_to_text",
    "report_to_jsonable",
    "report_to_text",
    "full_audit",
]

MODES = ("paper_literal", "exact")
ORDERS = (2, 3, 4)

PDE_SLOTS = ("kinetic", "drift_x", "drift_const", "pot_x2", "pot_x1", "pot_x0")

# What each slot multiplies in "i hbar psi_t = ...".
SLOT_OPERANDS = {
    "kinetic": "psi_xx",
    "drift_x": "x*psi_x",
    "drift_const": "psi_x",
    "pot_x2": "x^2*psi",
    "pot_x1": "x*psi",
    "pot_x0": "psi",
}


class MomentOrderError(ValueError):
    pass


class DerivationError(RuntimeError):
    """The pipeline produced something structurally impossible; a bug, not an input error."""


def _q(re=0, im=0) -> CRational:
    return CRational.of(re, im)


def factor_arguments() -> list[SymPoly]:
    """The nine exponent polynomials z1..z9, in order."""
    half = Fraction(1, 2)
    quarter = Fraction(1, 4)
    return [
        SymPoly.term(_q(0, -1), eta=1, b=1, x=1, hbar=-1),
        SymPoly.term(_q(0, -half), eta=2, b=1, hbar=-1),
        SymPoly.term(_q(0, 1), eps=1, c=1, x=2, hbar=-1),
        SymPoly.term(_q(0, quarter), eps=1, eta=2, c=1, hbar=-1),
        SymPoly.term(_q(0, 1), eps=1, eta=1, c=1, x=1, hbar=-1),
        SymPoly.term(_q(0, -1), eta=1, d=1, hbar=-1),
        SymPoly.term(_q(0, 1), eps=1, f=1, x=1, hbar=-1),
        SymPoly.term(_q(0, half), eps=1, eta=1, f=1, hbar=-1),
        SymPoly.term(_q(0, 1), eps=1, g=1, hbar=-1),
    ]


def _literal_factors() -> list[SymPoly]:
    """The factor truncations exactly as the audited derivation writes them.

    F1 and F6 keep their defective second-order terms (+1/2 where Taylor
    gives -1/2); every other factor is truncated at first order.
    """
    z = factor_arguments()
    one = SymPoly.one()
    factors = [one + zk for zk in z]
    half = Fraction(1, 2)
    factors[0] = factors[0] + SymPoly.term(_q(half), eta=2, b=2, x=2, hbar=-2)
    factors[5] = factors[5] + SymPoly.term(_q(half), eta=2, d=2, hbar=-2)
    return factors


def _psi_expansion() -> SymPoly:
    """psi(x + eta) to second order: psi + eta psi_x + eta^2/2 psi_xx."""
    return (
        SymPoly.term(QQ_ONE, mark=MARK_PSI)
        + SymPoly.term(QQ_ONE, eta=1, mark=MARK_PSI_X)
        + SymPoly.term(_q(Fraction(1, 2)), eta=2, mark=MARK_PSI_XX)
    )


def _check_order(order: int) -> None:
    if order not in ORDERS:
        raise ValueError(f"order must be one of {ORDERS}, got {order!r}")


def expand_kernel(mode: str, order: int = 4) -> SymPoly:
    """Product of the nine factors and the psi expansion, graded to <= order."""
    _check_order(order)
    if mode == "exact":
        factors = [zk.exp_series(order) for zk in factor_arguments()]
    elif mode == "paper_literal":
        factors = [f.truncate(order) for f in _literal_factors()]
    else:
        raise ValueError(f"unknown mode {mode!r}; valid: {list(MODES)}")
    out = _psi_expansion()
    for f in factors:
        out = out.mul(f, order)
    return out


def _moment_image(m: tuple, q: CRational) -> tuple[tuple, CRational] | None:
    """Image of one monomial under the normalized eta-moment substitution."""
    k = m[IX_ETA]
    if k % 2 == 1:
        return None
    lst = list(m)
    lst[IX_ETA] = 0
    if k == 2:
        q = q * _q(0, Fraction(1, 2))
        lst[3] += 1  # hbar
        lst[2] += 1  # eps
        lst[4] -= 1  # a
    elif k == 4:
        q = q * _q(Fraction(-3, 4))
        lst[3] += 2
        lst[2] += 2
        lst[4] -= 2
    elif k != 0:
        raise MomentOrderError(f"eta^{k} moment requested; only eta^0..eta^4 are defined")
    return tuple(lst), q


def apply_moments(poly: SymPoly) -> SymPoly:
    """Replace eta powers by their normalized Gaussian moments.

    Odd powers vanish; eta^2 -> i hbar eps/(2a); eta^4 -> -3/4 hbar^2 eps^2/a^2.
    Raises MomentOrderError beyond eta^4.
    """
    out = SymPoly.zero()
    acc: dict = {}
    for m, q in poly.terms.items():
        image = _moment_image(m, q)
        if image is None:
            continue
        m2, q2 = image
        prev = acc.get(m2)
        acc[m2] = q2 if prev is None else prev + q2
    out = SymPoly(acc)
    return out


@dataclass(frozen=True)
class SymbolicPde:
    """Slot coefficients of 'i hbar psi_t = ...'; each slot is a SymPoly in hbar,a..g."""

    kinetic: SymPoly
    drift_x: SymPoly
    drift_const: SymPoly
    pot_x2: SymPoly
    pot_x1: SymPoly
    pot_x0: SymPoly
    mode: str = ""
    order: int = 0

    def slots(self) -> dict[str, SymPoly]:
        return {name: getattr(self, name) for name in PDE_SLOTS}

    def same_terms(self, other: "SymbolicPde") -> bool:
        return all(getattr(self, n) == getattr(other, n) for n in PDE_SLOTS)


_SLOT_BY_SHAPE = {
    (MARK_PSI_XX, 0): "kinetic",
    (MARK_PSI_X, 1): "drift_x",
    (MARK_PSI_X, 0): "drift_const",
    (MARK_PSI, 2): "pot_x2",
    (MARK_PSI, 1): "pot_x1",
    (MARK_PSI, 0): "pot_x0",
}


def _strip_to_slot(m: tuple) -> tuple:
    lst = list(m)
    lst[IX_X] = 0
    lst[IX_EPS] = 0
    lst[IX_MARK] = MARK_NONE
    return tuple(lst)


def derive_pde(mode: str, order: int = 4) -> SymbolicPde:
    """Run the full pipeline and collect the eps^1 sector into PDE slots.

    The eps^0 sector must reduce to exactly 1*psi; anything else raises
    DerivationError.  The result is independent of order over {2, 3, 4}
    (higher graded terms all land at eps^2 or beyond).
    """
    after = apply_moments(expand_kernel(mode, order))
    identity = SymPoly({m: q for m, q in after.terms.items() if m[IX_EPS] == 0})
    if identity != SymPoly.term(QQ_ONE, mark=MARK_PSI):
        raise DerivationError(f"eps^0 sector is not 1*psi: {identity}")
    slots = {name: {} for name in PDE_SLOTS}
    for m, q in after.terms.items():
        if m[IX_EPS] != 1:
            continue
        if m[IX_ETA] != 0:
            raise DerivationError(f"eta survived the moment substitution: {mono_str(m)}")
        key = (m[IX_MARK], m[IX_X])
        slot = _SLOT_BY_SHAPE.get(key)
        if slot is None:
            raise DerivationError(f"unclassifiable eps^1 term: {mono_str(m)}")
        # multiply by i*hbar to move from the eps-coefficient to the equation
        m2 = list(_strip_to_slot(m))
        m2[3] += 1
        q2 = q * QQ_I
        m2 = tuple(m2)
        prev = slots[slot].get(m2)
        slots[slot][m2] = q2 if prev is None else prev + q2
    return SymbolicPde(
        **{name: SymPoly(terms) for name, terms in slots.items()}, mode=mode, order=order
    )


def literal_reference_pde() -> SymbolicPde:
    """The final equation of the audited derivation, transcribed term for term.

    derive_pde("paper_literal") must reproduce this exactly; the test suite
    pins that fact.
    """
    q = _q
    quarter = Fraction(1, 4)
    half = Fraction(1, 2)
    return SymbolicPde(
        kinetic=SymPoly.term(q(-quarter), hbar=2, a=-1),
        drift_x=SymPoly.term(q(0, half), hbar=1, a=-1, b=1),
        drift_const=SymPoly.term(q(0, half), hbar=1, a=-1, d=1),
        pot_x2=SymPoly.term(q(-quarter), a=-1, b=2) + SymPoly.term(q(-1), c=1),
        pot_x1=SymPoly.term(q(half), a=-1, b=1, d=1) + SymPoly.term(q(-1), f=1),
        pot_x0=(
            SymPoly.term(q(-quarter), a=-1, d=2)
            + SymPoly.term(q(-1), g=1)
            + SymPoly.term(q(0, quarter), hbar=1, a=-1, b=1)
        ),
        mode="literal_reference",
        order=0,
    )


def _weyl_first_order(coeff: SymPoly, x_pow: int) -> SymPoly:
    """Weyl-ordered x^m p acting on psi: -i hbar x^m psi_x - (i hbar m/2) x^(m-1) psi."""
    out = coeff.mul(SymPoly.term(_q(0, -1), hbar=1, x=x_pow, mark=MARK_PSI_X))
    if x_pow > 0:
        out = out + coeff.mul(
            SymPoly.term(_q(0, -Fraction(x_pow, 2)), hbar=1, x=x_pow - 1, mark=MARK_PSI)
        )
    return out


def weyl_reference_pde() -> SymbolicPde:
    """Weyl-ordered quantization of H = (p - b x - d)^2/(4a) - c x^2 - f x - g.

    Independent of the kernel pipeline: the classical square is expanded in
    commuting variables and each x^m p^n monomial is mapped through the Weyl
    symmetrization rule.  Produces the slots of 'i hbar psi_t = H psi'.
    """
    q = _q
    inv4a = Fraction(1, 4)
    # classical terms of (p - bx - d)^2 / (4a): (coeff_poly, x_power, p_power)
    classical = [
        (SymPoly.term(q(inv4a), a=-1), 0, 2),
        (SymPoly.term(q(-Fraction(1, 2)), a=-1, b=1), 1, 1),
        (SymPoly.term(q(-Fraction(1, 2)), a=-1, d=1), 0, 1),
        (SymPoly.term(q(inv4a), a=-1, b=2), 2, 0),
        (SymPoly.term(q(Fraction(1, 2)), a=-1, b=1, d=1), 1, 0),
        (SymPoly.term(q(inv4a), a=-1, d=2), 0, 0),
        (SymPoly.term(q(-1), c=1), 2, 0),
        (SymPoly.term(q(-1), f=1), 1, 0),
        (SymPoly.term(q(-1), g=1), 0, 0),
    ]
    applied = SymPoly.zero()
    for coeff, x_pow, p_pow in classical:
        if p_pow == 0:
            applied = applied + coeff.mul(SymPoly.term(QQ_ONE, x=x_pow, mark=MARK_PSI))
        elif p_pow == 1:
            applied = applied + _weyl_first_order(coeff, x_pow)
        elif p_pow == 2:
            if x_pow != 0:
                raise DerivationError("x^m p^2 with m > 0 does not occur here")
            applied = applied + coeff.mul(SymPoly.term(q(-1), hbar=2, mark=MARK_PSI_XX))
        else:
            raise DerivationError(f"unexpected p power {p_pow}")
    slots = {name: {} for name in PDE_SLOTS}
    for m, qq in applied.terms.items():
        key = (m[IX_MARK], m[IX_X])
        slot = _SLOT_BY_SHAPE.get(key)
        if slot is None:
            raise DerivationError(f"unclassifiable operator term: {mono_str(m)}")
        m2 = _strip_to_slot(m)
        prev = slots[slot].get(m2)
        slots[slot][m2] = qq if prev is None else prev + qq
    return SymbolicPde(
        **{name: SymPoly(terms) for name, terms in slots.items()},
        mode="weyl_reference",
        order=0,
    )


@dataclass(frozen=True)
class DiscrepancyEntry:
    slot: str
    monomial: str
    literal: str
    exact: str


@dataclass(frozen=True)
class TermFate:
    monomial: str
    fate: str  # odd_eta_moment_zero | eps_order_2_or_higher | identity_sector | kept_in_equation


@dataclass(frozen=True)
class DiscrepancyReport:
    """Where the two expansion modes disagree, slot by slot."""

    entries: tuple[DiscrepancyEntry, ...]
    verdicts: dict[str, str]  # slot -> "match" | "mismatch"
    nonzero: tuple[str, ...]
    dropped: tuple[TermFate, ...]

    @property
    def is_empty(self) -> bool:
        return not self.entries


COEFF_SYMBOLS = ("b", "c", "d", "f", "g")


def audit_term_fates(mode: str = "paper_literal", order: int = 4) -> tuple[TermFate, ...]:
    """Classify the fate of every kernel-expansion monomial, mechanically.

    Fates: odd eta powers integrate to zero; surviving terms land in the
    identity sector (eps^0), the equation (eps^1), or are higher order.
    No other fate exists, so nothing is silently lost.
    """
    fates = []
    for m, _q_unused in expand_kernel(mode, order).items():
        if m[IX_ETA] % 2 == 1:
            fates.append(TermFate(mono_str(m), "odd_eta_moment_zero"))
            continue
        image = _moment_image(m, QQ_ONE)
        assert image is not None
        m2, _ = image
        if m2[IX_EPS] == 0:
            fates.append(TermFate(mono_str(m), "identity_sector"))
        elif m2[IX_EPS] == 1:
            fates.append(TermFate(mono_str(m), "kept_in_equation"))
        else:
            fates.append(TermFate(mono_str(m), "eps_order_2_or_higher"))
    return tuple(fates)


def compare_modes(nonzero=COEFF_SYMBOLS, order: int = 4) -> DiscrepancyReport:
    """Diff the two modes' equations, optionally with some coefficients set to zero.

    ``nonzero`` lists the Lagrangian coefficients kept symbolic; the rest are
    zeroed in both equations before diffing.  With everything symbolic the
    report localizes the disagreement to the x^2 and constant-real potential
    monomials (the b^2/(4a) and d^2/(4a) blocks).
    """
    nonzero = tuple(nonzero)
    for s in nonzero:
        if s not in COEFF_SYMBOLS:
            raise ValueError(f"not a zeroable coefficient symbol: {s!r}")
    zeroed = [s for s in COEFF_SYMBOLS if s not in nonzero]
    lit = derive_pde("paper_literal", order)
    ex = derive_pde("exact", order)
    entries = []
    verdicts = {}
    for slot in PDE_SLOTS:
        pl = getattr(lit, slot).zero_out(zeroed)
        pe = getattr(ex, slot).zero_out(zeroed)
        monos = sorted(set(pl.terms) | set(pe.terms))
        slot_entries = []
        for m in monos:
            ql, qe = pl.coeff(m), pe.coeff(m)
            if ql != qe:
                slot_entries.append(DiscrepancyEntry(slot, mono_str(m), str(ql), str(qe)))
        entries.extend(slot_entries)
        verdicts[slot] = "mismatch" if slot_entries else "match"
    dropped = tuple(f for f in audit_term_fates(order=order) if f.fate not in
                    ("identity_sector", "kept_in_equation"))
    return DiscrepancyReport(tuple(entries), verdicts, nonzero, dropped)


# -- serialization ------------------------------------------------------------


def _poly_jsonable(poly: SymPoly) -> list[dict]:
    return [
        {"monomial": mono_str(m), "re": str(q.re), "im": str(q.im)}
        for m, q in poly.items()
    ]


def pde_to_jsonable(pde: SymbolicPde) -> dict:
    return {
        "mode": pde.mode,
        "order": pde.order,
        "equation": "i*hbar*psi_t = sum(slot * operand)",
        "slots": {
            name: {"operand": SLOT_OPERANDS[name], "terms": _poly_jsonable(poly)}
            for name, poly in pde.slots().items()
        },
    }


def pde_to_text(pde: SymbolicPde) -> str:
    lines = [f"mode: {pde.mode} (grading order {pde.order})", "i*hbar*psi_t ="]
    for name, poly in pde.slots().items():
        lines.append(f"  [{SLOT_OPERANDS[name]:>9}]  {poly}")
    return "\n".join(lines)


def report_to_jsonable(report: DiscrepancyReport) -> dict:
    return {
        "nonzero": list(report.nonzero),
        "verdicts": dict(report.verdicts),
        "entries": [
            {"slot": e.slot, "monomial": e.monomial, "paper_literal": e.literal, "exact": e.exact}
            for e in report.entries
        ],
        "dropped_terms": [{"monomial": t.monomial, "fate": t.fate} for t in report.dropped],
    }


def report_to_text(report: DiscrepancyReport) -> str:
    lines = [f"coefficients kept symbolic: {', '.join(report.nonzero) or '(none)'}"]
    for slot in PDE_SLOTS:
        lines.append(f"  {slot:>11}: {report.verdicts[slot]}")
    if report.is_empty:
        lines.append("modes agree on every slot")
    else:
        lines.append("disagreements (paper_literal vs exact):")
        for e in report.entries:
            lines.append(f"  {e.slot}[{e.monomial}]: {e.literal} vs {e.exact}")
    lines.append(f"dropped-term audit: {len(report.dropped)} monomials, all accounted for")
    return "\n".join(lines)


def full_audit(mode: str = "both", order: int = 4) -> dict:
    """Everything the derivation check can say, as one JSON-ready dict."""
    out: dict = {"order": order}
    want_literal = mode in ("paper_literal", "both")
    want_exact = mode in ("exact", "both")
    if not (want_literal or want_exact):
        raise ValueError(f"unknown mode {mode!r}; valid: paper_literal, exact, both")
    if want_literal:
        lit = derive_pde("paper_literal", order)
        out["paper_literal"] = pde_to_jsonable(lit)
        out["reproduces_reference"] = lit.same_terms(literal_reference_pde())
    if want_exact:
        ex = derive_pde("exact", order)
        out["exact"] = pde_to_jsonable(ex)
        out["matches_weyl_reference"] = ex.same_terms(weyl_reference_pde())
    if want_literal and want_exact:
        out["comparison"] = report_to_jsonable(compare_modes(order=order))
    return out
