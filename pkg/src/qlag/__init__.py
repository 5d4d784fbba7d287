"""Quantum dynamics under general quadratic Lagrangians.

Three independent routes to the same physics, built to be checked against
each other: an exact-rational symbolic derivation of the evolution equation
from the short-time propagator (with a literal-transcription mode and an
exact-expansion mode whose disagreement is the point), a Crank-Nicolson grid
evolver for the assembled equation in either variant, and closed-form
Gaussian oracles (one-slice propagation and the Riccati flow).
"""

from .assembly import EquationTerms, VARIANTS, assemble_1d, assemble_3d
from .coefficients import CoefficientSet, from_standard, make, preset, validate
from .evolve import EvolveParams, Trajectory, Wave3D, evolve_1d, evolve_3d
from .expressions import eval_expr, parse, to_source
from .grid import GaussianState, GridSpec1D, WaveState
from .oracle import cross_validate, eps_sweep, riccati_evolve, short_time_step
from .scenario import load_scenario, run_scenario
from .verifier import compare_modes, derive_pde

__version__ = "0.1.0"

__all__ = [
    "EquationTerms",
    "VARIANTS",
    "assemble_1d",
    "assemble_3d",
    "CoefficientSet",
    "from_standard",
    "make",
    "preset",
    "validate",
    "EvolveParams",
    "Trajectory",
    "Wave3D",
    "evolve_1d",
    "evolve_3d",
    "eval_expr",
    "parse",
    "to_source",
    "GaussianState",
    "GridSpec1D",
    "WaveState",
    "cross_validate",
    "eps_sweep",
    "riccati_evolve",
    "short_time_step",
    "load_scenario",
    "run_scenario",
    "compare_modes",
    "derive_pde",
    "__version__",
]
