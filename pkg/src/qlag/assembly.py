"""Assemble the evolution equation's term values from a coefficient set.

The equation evolved everywhere downstream is

    i hbar dpsi/dt = kinetic * psi_xx
                   + i hbar (drift_linear * x + drift_const) * psi_x
                   + (pot_x2 * x^2 + pot_x1 * x + pot_x0_real + i pot_x0_imag) * psi

with, at time t (writing a = a(t) etc.):

    kinetic      = -hbar^2 / (4 a)
    drift_linear = b / (2 a)
    drift_const  = d / (2 a)
    pot_x2       = s * b^2/(4 a) - c        s = -1 literal, +1 rederived
    pot_x1       = b d / (2 a) - f
    pot_x0_real  = s * d^2/(4 a) - g
    pot_x0_imag  = hbar b / (4 a)

The two variants differ only in the sign s of the b^2 and d^2 blocks; the
"rederived" choice is the one an exact second-order expansion of the
short-time kernel produces (and the one matching Weyl-ordered quantization of
the corresponding Hamiltonian; see the symbolic verifier).  In 1D both
variants satisfy pot_x0_imag == hbar * drift_linear / 2, which is exactly the
condition making the drift + imaginary-constant block the anti-Hermitian part
of a symmetrized first-order operator, hence norm-conserving.

The 3D form splits into three identical per-axis term sets; the scalar pieces
g and the imaginary constant are divided evenly across the axes so that the
sum over axes reproduces the full equation, whose single imaginary constant
is hbar b/(4 a).  Per axis that means pot_x0_imag = hbar b/(12 a), which
breaks the Hermiticity identity above whenever b != 0: the 3D equation as
assembled here is honestly non-norm-conserving in that regime.
"""

from __future__ import annotations

from dataclasses import dataclass

from .coefficients import CoefficientSet

__all__ = ["EquationTerms", "AssemblyError", "VARIANTS", "assemble_1d", "assemble_3d"]

VARIANTS = ("paper_literal", "rederived")


class AssemblyError(ValueError):
    pass


@dataclass(frozen=True)
class EquationTerms:
    kinetic: float
    drift_linear: float
    drift_const: float
    pot_x2: float
    pot_x1: float
    pot_x0_real: float
    pot_x0_imag: float
    variant: str
    time: float

    def hermiticity_defect(self, hbar: float) -> float:
        """pot_x0_imag - hbar*drift_linear/2; zero iff the drift block is norm-conserving."""
        return self.pot_x0_imag - 0.5 * hbar * self.drift_linear


def _variant_sign(variant: str) -> float:
    if variant == "paper_literal":
        return -1.0
    if variant == "rederived":
        return 1.0
    raise AssemblyError(f"unknown variant {variant!r}; valid: {list(VARIANTS)}")


def assemble_1d(coeffs: CoefficientSet, t: float, variant: str = "rederived") -> EquationTerms:
    """Term values at time t for the 1D equation."""
    s = _variant_sign(variant)
    v = coeffs.at(t)
    if not (v.a > 0.0):
        raise AssemblyError(f"a(t) must be positive, got a({t!r}) = {v.a!r}")
    hbar = coeffs.hbar
    inv4a = 1.0 / (4.0 * v.a)
    return EquationTerms(
        kinetic=-(hbar * hbar) * inv4a,
        drift_linear=v.b / (2.0 * v.a),
        drift_const=v.d / (2.0 * v.a),
        pot_x2=s * v.b * v.b * inv4a - v.c,
        pot_x1=v.b * v.d / (2.0 * v.a) - v.f,
        pot_x0_real=s * v.d * v.d * inv4a - v.g,
        pot_x0_imag=hbar * v.b * inv4a,
        variant=variant,
        time=t,
    )


def assemble_3d(
    coeffs: CoefficientSet, t: float, variant: str = "rederived"
) -> tuple[EquationTerms, EquationTerms, EquationTerms]:
    """Per-axis term values for the isotropic 3D equation.

    Requires d(t) == f(t) == 0 (the 3D form has no vector analogue of the
    scalar xdot and x couplings).  The x^2 block becomes the r^2 block applied
    per axis; g and the imaginary constant are split evenly so the axis sum
    reproduces the full equation.
    """
    s = _variant_sign(variant)
    v = coeffs.at(t)
    if not (v.a > 0.0):
        raise AssemblyError(f"a(t) must be positive, got a({t!r}) = {v.a!r}")
    if v.d != 0.0 or v.f != 0.0:
        raise AssemblyError(
            f"3D assembly needs d(t) = f(t) = 0, got d({t!r}) = {v.d!r}, f({t!r}) = {v.f!r}"
        )
    hbar = coeffs.hbar
    inv4a = 1.0 / (4.0 * v.a)
    axis = EquationTerms(
        kinetic=-(hbar * hbar) * inv4a,
        drift_linear=v.b / (2.0 * v.a),
        drift_const=0.0,
        pot_x2=s * v.b * v.b * inv4a - v.c,
        pot_x1=0.0,
        pot_x0_real=-v.g / 3.0,
        pot_x0_imag=hbar * v.b * inv4a / 3.0,
        variant=variant,
        time=t,
    )
    return (axis, axis, axis)
