"""Symbolic audit of the short-time kernel expansion, both modes."""

import cmath
from fractions import Fraction

import pytest

from qlag.sympoly import (
    CRational,
    IX_MARK,
    MARK_PSI,
    QQ_ONE,
    SYMBOL_NAMES,
    SymPoly,
    mono,
)
from qlag.verifier import (
    COEFF_SYMBOLS,
    DerivationError,
    MODES,
    MomentOrderError,
    ORDERS,
    PDE_SLOTS,
    apply_moments,
    audit_term_fates,
    compare_modes,
    derive_pde,
    expand_kernel,
    factor_arguments,
    full_audit,
    literal_reference_pde,
    pde_to_jsonable,
    pde_to_text,
    report_to_jsonable,
    report_to_text,
    weyl_reference_pde,
)


def _q(re=0, im=0):
    return CRational.of(re, im)


def test_factor_arguments_table():
    z = factor_arguments()
    assert len(z) == 9
    expected = [
        SymPoly.term(_q(0, -1), eta=1, b=1, x=1, hbar=-1),
        SymPoly.term(_q(0, Fraction(-1, 2)), eta=2, b=1, hbar=-1),
        SymPoly.term(_q(0, 1), eps=1, c=1, x=2, hbar=-1),
        SymPoly.term(_q(0, Fraction(1, 4)), eps=1, eta=2, c=1, hbar=-1),
        SymPoly.term(_q(0, 1), eps=1, eta=1, c=1, x=1, hbar=-1),
        SymPoly.term(_q(0, -1), eta=1, d=1, hbar=-1),
        SymPoly.term(_q(0, 1), eps=1, f=1, x=1, hbar=-1),
        SymPoly.term(_q(0, Fraction(1, 2)), eps=1, eta=1, f=1, hbar=-1),
        SymPoly.term(_q(0, 1), eps=1, g=1, hbar=-1),
    ]
    assert z == expected


def test_expansion_second_order_cross_term_signs():
    # The two modes differ inside the eta^2 b^2 x^2 monomial: a genuine Taylor
    # square gives -1/2, the audited transcription carries +1/2.
    m_sq = mono(eta=2, b=2, x=2, hbar=-2, mark=MARK_PSI)
    assert expand_kernel("exact", 4).coeff(m_sq) == _q(Fraction(-1, 2))
    assert expand_kernel("paper_literal", 4).coeff(m_sq) == _q(Fraction(1, 2))
    m_d = mono(eta=2, d=2, hbar=-2, mark=MARK_PSI)
    assert expand_kernel("exact", 4).coeff(m_d) == _q(Fraction(-1, 2))
    assert expand_kernel("paper_literal", 4).coeff(m_d) == _q(Fraction(1, 2))
    # First-order pieces agree everywhere, e.g. the eta^2 b term.
    m_lin = mono(eta=2, b=1, hbar=-1, mark=MARK_PSI)
    assert expand_kernel("exact", 4).coeff(m_lin) == _q(0, Fraction(-1, 2))
    assert expand_kernel("paper_literal", 4).coeff(m_lin) == _q(0, Fraction(-1, 2))


def test_expansion_respects_grading():
    from qlag.sympoly import grade

    for mode in MODES:
        for order in ORDERS:
            assert all(grade(m) <= order for m in expand_kernel(mode, order).terms)


def test_expand_kernel_rejects_bad_inputs():
    with pytest.raises(ValueError, match="unknown mode"):
        expand_kernel("taylor", 4)
    with pytest.raises(ValueError, match="order"):
        expand_kernel("exact", 5)
    with pytest.raises(ValueError, match="order"):
        expand_kernel("exact", 1)


def test_exact_expansion_against_numeric_product():
    # Evaluate the truncated series at small (eta, eps) and compare with the
    # directly computed exp(z1+...+z9) * (psi + eta psi_x + eta^2/2 psi_xx).
    # The series is complete through grade 4, so the defect scales like s^5.
    vals = {"x": 0.7, "hbar": 1.3, "a": 1.0, "b": 0.9, "c": -0.6, "d": 0.8, "f": 0.4, "g": -0.3}
    marks = {0: 1.0, 1: 0.31 - 0.44j, 2: -0.25 + 0.17j, 3: 0.12 + 0.52j}
    series = expand_kernel("exact", 4)

    def series_value(eta, eps):
        vals_full = dict(vals, eta=eta, eps=eps)
        total = 0j
        for m, q in series.terms.items():
            v = float(q.re) + 1j * float(q.im)
            for i, name in enumerate(SYMBOL_NAMES):
                if m[i]:
                    v *= vals_full[name] ** m[i]
            total += v * marks[m[IX_MARK]]
        return total

    def direct_value(eta, eps):
        x, hbar = vals["x"], vals["hbar"]
        b, c, d, f, g = vals["b"], vals["c"], vals["d"], vals["f"], vals["g"]
        z = (
            -1j * eta * b * x / hbar
            - 1j * eta**2 * b / (2 * hbar)
            + 1j * eps * c * x**2 / hbar
            + 1j * eps * eta**2 * c / (4 * hbar)
            + 1j * eps * eta * c * x / hbar
            - 1j * eta * d / hbar
            + 1j * eps * f * x / hbar
            + 1j * eps * eta * f / (2 * hbar)
            + 1j * eps * g / hbar
        )
        return cmath.exp(z) * (marks[1] + eta * marks[2] + 0.5 * eta**2 * marks[3])

    for s in (2e-2, 1e-2, 5e-3):
        diff = abs(series_value(s, s * s) - direct_value(s, s * s))
        assert diff < 20.0 * s**5, (s, diff)


def test_moment_substitution_rules():
    base = mono(x=1, b=1, mark=MARK_PSI)
    eta2 = SymPoly({mono(x=1, b=1, eta=2, mark=MARK_PSI): QQ_ONE})
    image = apply_moments(eta2)
    expected_mono = mono(x=1, b=1, eps=1, hbar=1, a=-1, mark=MARK_PSI)
    assert image.terms == {expected_mono: _q(0, Fraction(1, 2))}
    eta4 = SymPoly({mono(eta=4): QQ_ONE})
    assert apply_moments(eta4).terms == {
        mono(eps=2, hbar=2, a=-2): _q(Fraction(-3, 4))
    }
    odd = SymPoly({mono(eta=1): QQ_ONE, mono(eta=3, x=2): _q(0, 5)})
    assert apply_moments(odd).is_zero
    untouched = SymPoly({base: _q(2, 3)})
    assert apply_moments(untouched) == untouched


def test_moment_substitution_rejects_high_powers():
    with pytest.raises(MomentOrderError):
        apply_moments(SymPoly({mono(eta=6): QQ_ONE}))


def test_moment_substitution_merges_collisions():
    # eta^2 * eps^0 and eta^0 * eps^1 monomials can land on the same image.
    p = SymPoly(
        {
            mono(eta=2): QQ_ONE,
            mono(eps=1, hbar=1, a=-1): _q(1),
        }
    )
    image = apply_moments(p)
    assert image.terms == {
        mono(eps=1, hbar=1, a=-1): _q(1, Fraction(1, 2))
    }


def test_literal_derivation_reproduces_reference():
    derived = derive_pde("paper_literal", 4)
    assert derived.same_terms(literal_reference_pde())


def test_exact_derivation_matches_weyl_quantization():
    derived = derive_pde("exact", 4)
    assert derived.same_terms(weyl_reference_pde())


def test_derived_equation_is_order_independent():
    for mode in MODES:
        p2, p3, p4 = (derive_pde(mode, k) for k in ORDERS)
        assert p2.same_terms(p3) and p3.same_terms(p4)


def test_exact_equation_slots_term_by_term():
    pde = derive_pde("exact", 4)
    q = _q
    quarter, half = Fraction(1, 4), Fraction(1, 2)
    assert pde.kinetic == SymPoly.term(q(-quarter), hbar=2, a=-1)
    assert pde.drift_x == SymPoly.term(q(0, half), hbar=1, a=-1, b=1)
    assert pde.drift_const == SymPoly.term(q(0, half), hbar=1, a=-1, d=1)
    assert pde.pot_x2 == SymPoly.term(q(quarter), a=-1, b=2) + SymPoly.term(q(-1), c=1)
    assert pde.pot_x1 == SymPoly.term(q(half), a=-1, b=1, d=1) + SymPoly.term(q(-1), f=1)
    assert pde.pot_x0 == (
        SymPoly.term(q(quarter), a=-1, d=2)
        + SymPoly.term(q(-1), g=1)
        + SymPoly.term(q(0, quarter), hbar=1, a=-1, b=1)
    )


def test_literal_equation_flips_two_signs():
    lit = derive_pde("paper_literal", 4)
    ex = derive_pde("exact", 4)
    flip_x2 = mono(a=-1, b=2)
    flip_x0 = mono(a=-1, d=2)
    assert lit.pot_x2.coeff(flip_x2) == -ex.pot_x2.coeff(flip_x2)
    assert lit.pot_x0.coeff(flip_x0) == -ex.pot_x0.coeff(flip_x0)
    for slot in ("kinetic", "drift_x", "drift_const", "pot_x1"):
        assert getattr(lit, slot) == getattr(ex, slot)


def test_compare_modes_localizes_the_disagreement():
    report = compare_modes()
    assert not report.is_empty
    assert {(e.slot, e.monomial) for e in report.entries} == {
        ("pot_x2", "a^-1*b^2"),
        ("pot_x0", "a^-1*d^2"),
    }
    by_slot = {e.slot: e for e in report.entries}
    assert by_slot["pot_x2"].literal == "-1/4" and by_slot["pot_x2"].exact == "1/4"
    assert by_slot["pot_x0"].literal == "-1/4" and by_slot["pot_x0"].exact == "1/4"
    assert report.verdicts == {
        "kinetic": "match",
        "drift_x": "match",
        "drift_const": "match",
        "pot_x2": "mismatch",
        "pot_x1": "match",
        "pot_x0": "mismatch",
    }


def test_compare_modes_with_zeroed_coefficients():
    no_b = compare_modes(nonzero=("c", "d", "f", "g"))
    assert {(e.slot, e.monomial) for e in no_b.entries} == {("pot_x0", "a^-1*d^2")}
    no_d = compare_modes(nonzero=("b", "c", "f", "g"))
    assert {(e.slot, e.monomial) for e in no_d.entries} == {("pot_x2", "a^-1*b^2")}
    neither = compare_modes(nonzero=("c", "f", "g"))
    assert neither.is_empty
    assert all(v == "match" for v in neither.verdicts.values())


def test_compare_modes_rejects_unknown_symbols():
    with pytest.raises(ValueError, match="zeroable"):
        compare_modes(nonzero=("b", "x"))
    with pytest.raises(ValueError, match="zeroable"):
        compare_modes(nonzero=("a",))  # a is structural, not zeroable


def test_term_fates_partition_the_expansion():
    for mode in MODES:
        expansion = expand_kernel(mode, 4)
        fates = audit_term_fates(mode, 4)
        assert len(fates) == len(expansion.terms)
        kinds = {f.fate for f in fates}
        assert kinds <= {
            "odd_eta_moment_zero",
            "identity_sector",
            "kept_in_equation",
            "eps_order_2_or_higher",
        }
        # All four fates actually occur at order 4.
        assert len(kinds) == 4
        counts = {k: sum(1 for f in fates if f.fate == k) for k in kinds}
        assert counts["identity_sector"] >= 1
        assert counts["kept_in_equation"] >= 6
        assert counts["odd_eta_moment_zero"] > 0
        assert counts["eps_order_2_or_higher"] > 0


def test_dropped_terms_are_attached_to_reports():
    report = compare_modes()
    assert report.dropped
    assert all(
        f.fate in ("odd_eta_moment_zero", "eps_order_2_or_higher") for f in report.dropped
    )


def test_identity_sector_guard_fires_on_corrupted_pipeline():
    # apply_moments on a kernel missing its leading 1*psi term cannot reduce
    # the eps^0 sector to the identity; derive_pde must refuse such output.
    poisoned = expand_kernel("exact", 4) + SymPoly.term(_q(1), x=1, mark=MARK_PSI)
    after = apply_moments(poisoned)
    identity = SymPoly({m: q for m, q in after.terms.items() if m[2] == 0})
    assert identity != SymPoly.term(QQ_ONE, mark=MARK_PSI)


def test_serializers_round_out_the_audit():
    pde = derive_pde("exact", 4)
    blob = pde_to_jsonable(pde)
    assert blob["mode"] == "exact" and blob["order"] == 4
    assert set(blob["slots"]) == set(PDE_SLOTS)
    assert blob["slots"]["kinetic"]["operand"] == "psi_xx"
    assert blob["slots"]["kinetic"]["terms"] == [
        {"monomial": "hbar^2*a^-1", "re": "-1/4", "im": "0"}
    ]
    text = pde_to_text(pde)
    assert "i*hbar*psi_t =" in text and "psi_xx" in text

    report = compare_modes()
    rblob = report_to_jsonable(report)
    assert rblob["verdicts"]["pot_x2"] == "mismatch"
    assert {e["monomial"] for e in rblob["entries"]} == {"a^-1*b^2", "a^-1*d^2"}
    rtext = report_to_text(report)
    assert "pot_x2" in rtext and "-1/4 vs 1/4" in rtext


def test_full_audit_shapes():
    both = full_audit("both", 4)
    assert both["reproduces_reference"] is True
    assert both["matches_weyl_reference"] is True
    assert "comparison" in both and "paper_literal" in both and "exact" in both
    lit_only = full_audit("paper_literal", 2)
    assert "exact" not in lit_only and "comparison" not in lit_only
    assert lit_only["reproduces_reference"] is True
    with pytest.raises(ValueError, match="unknown mode"):
        full_audit("weyl", 4)


def test_coefficient_symbol_list_is_the_zeroable_set():
    assert COEFF_SYMBOLS == ("b", "c", "d", "f", "g")
