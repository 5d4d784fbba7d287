"""Coefficient sets, the standard-form mapping, presets, and validation."""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qlag.coefficients import (
    CoefficientSet,
    PRESET_CASES,
    PresetError,
    Violation,
    from_standard,
    make,
    preset,
    validate,
)
from qlag.expressions import Num, parse


def test_make_defaults_to_zero():
    coeffs = make(a="0.5")
    vals = coeffs.at(1.7)
    assert vals.a == 0.5
    assert (vals.b, vals.c, vals.d, vals.f, vals.g) == (0.0, 0.0, 0.0, 0.0, 0.0)


def test_make_accepts_numbers_strings_and_asts():
    coeffs = make(a=0.5, b="sin(t)", c=parse("t^2"))
    vals = coeffs.at(2.0)
    assert vals.a == 0.5
    assert vals.b == math.sin(2.0)
    assert vals.c == 4.0


def test_at_evaluates_all_six_at_the_same_time():
    coeffs = make(a="1+t", b="2*t", c="3*t", d="4*t", f="5*t", g="6*t")
    vals = coeffs.at(0.5)
    assert (vals.a, vals.b, vals.c, vals.d, vals.f, vals.g) == (
        1.5,
        1.0,
        1.5,
        2.0,
        2.5,
        3.0,
    )


def test_hbar_must_be_positive():
    with pytest.raises(ValueError):
        make(a="1", hbar=0.0)
    with pytest.raises(ValueError):
        make(a="1", hbar=-1.0)


def test_with_label_preserves_expressions():
    coeffs = make(a="0.5", b="t", label="before")
    renamed = coeffs.with_label("after")
    assert renamed.label == "after"
    assert renamed.a == coeffs.a and renamed.b == coeffs.b


@given(
    st.floats(min_value=0.1, max_value=10),
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=-3, max_value=3),
    st.floats(min_value=-2, max_value=2),
)
def test_from_standard_mapping(mass, v2, v1, v0, t):
    coeffs = from_standard(mass, V2=v2, V1=v1, V0=v0)
    vals = coeffs.at(t)
    assert vals.a == pytest.approx(0.5 * mass, rel=1e-15)
    assert vals.b == 0.0
    assert vals.c == -v2
    assert vals.d == 0.0
    assert vals.f == -v1
    assert vals.g == -v0


def test_from_standard_with_time_dependence():
    coeffs = from_standard("1", V2="0.5*cos(t)")
    assert coeffs.at(0.0).c == -0.5
    assert coeffs.at(math.pi).c == pytest.approx(0.5)


def test_preset_zero_patterns():
    for case, allowed in PRESET_CASES.items():
        params = {name: 0.5 for name in allowed}
        coeffs = preset(case, params)
        vals = coeffs.at(0.3)
        for name in ("a", "b", "c", "d", "f", "g"):
            expected = 0.5 if name in allowed else 0.0
            assert getattr(vals, name) == expected, (case, name)
        assert coeffs.label == f"case-{case}"


def test_preset_rejects_unknown_case():
    with pytest.raises(PresetError, match="unknown case"):
        preset("z", {"a": 1.0})


def test_preset_rejects_forbidden_coefficient():
    with pytest.raises(PresetError, match="forces"):
        preset("a", {"a": 1.0, "b": 1.0})
    with pytest.raises(PresetError, match="forces"):
        preset("c", {"a": 1.0, "d": 0.2})


def test_preset_requires_a():
    with pytest.raises(PresetError, match="explicit 'a'"):
        preset("b", {"c": -0.5})


def test_validate_clean_set_returns_nothing():
    assert validate(make(a="0.5", b="sin(t)", c="-t"), 0.0, 1.0) == []


def test_validate_flags_nonpositive_a():
    violations = validate(make(a="1 - 2*t"), 0.0, 1.0)
    assert violations
    assert all(v.coefficient == "a" and v.kind == "nonpositive_a" for v in violations)
    # a(t) crosses zero at t = 1/2, so only the right half of the interval is bad.
    assert all(v.time >= 0.5 - 1e-9 for v in violations)
    assert min(v.time for v in violations) == pytest.approx(0.5, abs=2e-3)


def test_validate_flags_domain_errors_as_nonfinite():
    violations = validate(make(a="1", g="1/(t - 0.5)"), 0.0, 1.0, samples=1001)
    kinds = {(v.coefficient, v.kind) for v in violations}
    assert kinds == {("g", "nonfinite")}
    assert any(abs(v.time - 0.5) < 1e-9 for v in violations)


def test_validate_flags_overflow():
    violations = validate(make(a="1", f="exp(1000*t)"), 0.0, 1.0)
    assert any(v.coefficient == "f" and v.kind == "nonfinite" for v in violations)


def test_validate_point_interval():
    assert validate(make(a="1"), 2.0, 2.0) == []
    bad = validate(make(a="-1"), 2.0, 2.0)
    assert len(bad) == 1 and bad[0] == Violation("a", 2.0, "nonpositive_a", bad[0].detail)


def test_validate_rejects_reversed_interval():
    with pytest.raises(ValueError):
        validate(make(a="1"), 1.0, 0.0)


def test_coefficient_sets_hash_and_compare():
    one = make(a="0.5", b="t")
    two = make(a="0.5", b="t")
    assert one == two
    assert hash(one) == hash(two)
    assert one != make(a="0.5", b="2*t")


def test_zero_a_everywhere_is_fully_reported():
    violations = validate(CoefficientSet(*(Num(0.0),) * 6), 0.0, 1.0, samples=50)
    assert len(violations) == 1000  # sample floor keeps coverage dense
    assert all(v.kind == "nonpositive_a" for v in violations)
