"""Crank-Nicolson evolution of the assembled equation, 1D and isotropic 3D.

The Hamiltonian is discretized on interior points (hard zero walls):

    H = kinetic * D2  +  (i hbar / 2) (G D1 + D1 G)  +  diag(V)

with D2/D1 the standard second/first central differences and
G = diag(drift_linear * x + drift_const).  Writing the drift in the
symmetrized form makes the off-diagonal entries exact conjugates, so H is
Hermitian whenever pot_x0_imag == hbar*drift_linear/2 (true for the 1D
equation in both variants); the remaining imaginary residue
i*(pot_x0_imag - hbar*drift_linear/2) is carried as an explicit diagonal
term, which is exactly zero in 1D and honestly nonzero for the per-axis 3D
terms with b != 0 (that equation does not conserve norm, and neither do we).
Coefficients are sampled at the step midpoint t + dt/2.

Each step costs one tridiagonal solve; 3D uses one sweep per axis and step.
The three per-axis operators act on different tensor legs and therefore
commute, so sequential sweeps reproduce the tensor product of 1D
propagators to roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .assembly import EquationTerms, VARIANTS, assemble_1d, assemble_3d
from .coefficients import CoefficientSet, validate
from .grid import GridSpec1D, ObservableRecord, WaveState, measure

__all__ = [
    "EvolveParams",
    "Trajectory",
    "Wave3D",
    "Record3D",
    "Trajectory3D",
    "GridLeakError",
    "EvolveError",
    "CoefficientValidationError",
    "evolve_1d",
    "evolve_3d",
    "step_interior",
    "MAX_3D_POINTS",
]

MAX_3D_POINTS = 128  # per axis; 128^3 complex is ~33 MB, the supported ceiling


class EvolveError(RuntimeError):
    pass


class CoefficientValidationError(EvolveError):
    def __init__(self, violations):
        self.violations = list(violations)
        lines = ", ".join(
            f"{v.coefficient}@t={v.time:g}:{v.kind}" for v in self.violations[:8]
        )
        more = "" if len(self.violations) <= 8 else f" (+{len(self.violations) - 8} more)"
        super().__init__(f"coefficient validation failed: {lines}{more}")


class GridLeakError(EvolveError):
    """Amplitude reached the boundary region; the walls would start reflecting it."""

    def __init__(self, time: float, fraction: float, trajectory=None):
        self.time = time
        self.fraction = fraction
        self.trajectory = trajectory
        super().__init__(
            f"boundary amplitude fraction {fraction:.3e} exceeded the leak threshold at t = {time:g}"
        )


@dataclass(frozen=True)
class EvolveParams:
    dt: float
    t_final: float
    variant: str = "rederived"
    observe_every: int = 1
    snapshot_every: int = 0  # 0: keep only initial and final states
    leak_threshold: float = 1e-6

    def __post_init__(self):
        if self.dt == 0.0 or not np.isfinite(self.dt):
            raise ValueError(f"bad dt: {self.dt!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}; valid: {list(VARIANTS)}")
        if self.observe_every < 1:
            raise ValueError("observe_every must be >= 1")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be >= 0")
        if not (0.0 < self.leak_threshold < 1.0):
            raise ValueError("leak_threshold must be in (0, 1)")

    def step_count(self, t_start: float) -> int:
        span = self.t_final - t_start
        if span == 0.0:
            return 0
        steps = span / self.dt
        n = int(round(steps))
        if n < 0 or abs(steps - n) > 1e-6 * max(1.0, abs(steps)):
            raise ValueError(
                f"dt = {self.dt!r} does not divide [{t_start!r}, {self.t_final!r}] "
                f"into a whole number of steps"
            )
        return n


@dataclass
class Trajectory:
    records: list[ObservableRecord] = field(default_factory=list)
    states: list[WaveState] = field(default_factory=list)
    variant: str = ""
    dt: float = 0.0
    nsteps: int = 0

    @property
    def initial(self) -> WaveState:
        return self.states[0]

    @property
    def final(self) -> WaveState:
        return self.states[-1]

    @property
    def norm_drift(self) -> float:
        base = self.records[0].norm
        return max(abs(r.norm - base) for r in self.records)


def _tridiag(terms: EquationTerms, grid: GridSpec1D, hbar: float):
    """Interior-point tridiagonal of H: (diag, sup, sub) with sub = conj(sup)."""
    xs = grid.xs()
    dx = grid.dx
    k_over_dx2 = terms.kinetic / (dx * dx)
    gf = terms.drift_linear * xs + terms.drift_const
    xi = xs[1:-1]
    pot = terms.pot_x2 * xi * xi + terms.pot_x1 * xi + terms.pot_x0_real
    residue = terms.pot_x0_imag - 0.5 * hbar * terms.drift_linear
    diag = (-2.0 * k_over_dx2 + pot) + 1j * residue
    coupling = (hbar / (4.0 * dx)) * (gf[1:-2] + gf[2:-1])
    sup = k_over_dx2 + 1j * coupling
    return diag, sup, np.conj(sup)


def step_interior(
    psi_int: np.ndarray, terms: EquationTerms, grid: GridSpec1D, hbar: float, dt: float
) -> np.ndarray:
    """One Crank-Nicolson step on the interior unknowns (walls held at zero)."""
    diag, sup, sub = _tridiag(terms, grid, hbar)
    lam = 1j * dt / (2.0 * hbar)
    rhs = (1.0 - lam * diag) * psi_int
    rhs[:-1] -= lam * sup * psi_int[1:]
    rhs[1:] -= lam * sub * psi_int[:-1]
    m = psi_int.shape[0]
    ab = np.zeros((3, m), dtype=np.complex128)
    ab[0, 1:] = lam * sup
    ab[1, :] = 1.0 + lam * diag
    ab[2, :-1] = lam * sub
    try:
        return solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - not reachable for Hermitian H
        raise EvolveError(f"tridiagonal solve failed at t = {terms.time:g}: {exc}") from exc


def _step_lines(
    lines: np.ndarray, terms: EquationTerms, grid: GridSpec1D, hbar: float, dt: float
) -> np.ndarray:
    """CN step applied to every column of ``lines`` (shape (n, nrhs)) at once."""
    diag, sup, sub = _tridiag(terms, grid, hbar)
    lam = 1j * dt / (2.0 * hbar)
    interior = lines[1:-1, :]
    rhs = (1.0 - lam * diag)[:, None] * interior
    rhs[:-1, :] -= (lam * sup)[:, None] * interior[1:, :]
    rhs[1:, :] -= (lam * sub)[:, None] * interior[:-1, :]
    m = interior.shape[0]
    ab = np.zeros((3, m), dtype=np.complex128)
    ab[0, 1:] = lam * sup
    ab[1, :] = 1.0 + lam * diag
    ab[2, :-1] = lam * sub
    out = np.zeros_like(lines)
    out[1:-1, :] = solve_banded((1, 1), ab, rhs)
    return out


def _leak_fraction_1d(amp: np.ndarray) -> float:
    peak = float(np.max(np.abs(amp)))
    if peak == 0.0:
        return 0.0
    return float(max(abs(amp[1]), abs(amp[-2]))) / peak


def _validate_or_raise(coeffs: CoefficientSet, t0: float, t1: float) -> None:
    lo, hi = (t0, t1) if t0 <= t1 else (t1, t0)
    violations = validate(coeffs, lo, hi)
    if violations:
        raise CoefficientValidationError(violations)


def evolve_1d(initial: WaveState, coeffs: CoefficientSet, params: EvolveParams) -> Trajectory:
    """March the state to params.t_final; dt < 0 runs time in reverse.

    Records observables every ``observe_every`` steps (always including the
    endpoints) and keeps full snapshots every ``snapshot_every`` steps plus
    the initial and final states.  Raises GridLeakError (with the partial
    trajectory attached) when boundary amplitude crosses the threshold.
    """
    t0 = initial.time
    nsteps = params.step_count(t0)
    _validate_or_raise(coeffs, t0, params.t_final)
    traj = Trajectory(variant=params.variant, dt=params.dt, nsteps=nsteps)

    state = initial.copy()
    state.amp[0] = 0.0
    state.amp[-1] = 0.0
    hbar = coeffs.hbar
    traj.records.append(measure(state, hbar))
    traj.states.append(state.copy())

    frac = _leak_fraction_1d(state.amp)
    if frac > params.leak_threshold:
        raise GridLeakError(t0, frac, traj)

    psi_int = state.amp[1:-1].copy()
    for k in range(1, nsteps + 1):
        t_mid = t0 + (k - 0.5) * params.dt
        terms = assemble_1d(coeffs, t_mid, params.variant)
        psi_int = step_interior(psi_int, terms, state.grid, hbar, params.dt)
        state.amp[1:-1] = psi_int
        state.time = t0 + k * params.dt

        frac = _leak_fraction_1d(state.amp)
        last = k == nsteps
        if k % params.observe_every == 0 or last:
            traj.records.append(measure(state, hbar))
        if params.snapshot_every and k % params.snapshot_every == 0 and not last:
            traj.states.append(state.copy())
        if last:
            traj.states.append(state.copy())
        if frac > params.leak_threshold:
            raise GridLeakError(state.time, frac, traj)
    return traj


# -- isotropic 3D -------------------------------------------------------------


@dataclass
class Wave3D:
    grid: GridSpec1D  # shared by all three axes
    amp: np.ndarray  # complex128, shape (n, n, n)
    time: float

    def __post_init__(self):
        n = self.grid.n
        if n > MAX_3D_POINTS:
            raise ValueError(f"3D grids are capped at {MAX_3D_POINTS}^3, got n = {n}")
        self.amp = np.asarray(self.amp, dtype=np.complex128)
        if self.amp.shape != (n, n, n):
            raise ValueError(f"amplitude shape {self.amp.shape} != ({n}, {n}, {n})")


@dataclass(frozen=True)
class Record3D:
    t: float
    norm: float
    mean_x2: tuple[float, float, float]  # per-axis second moments


@dataclass
class Trajectory3D:
    records: list[Record3D] = field(default_factory=list)
    final: Wave3D | None = None
    variant: str = ""
    nsteps: int = 0


def _measure_3d(state: Wave3D) -> Record3D:
    dx = state.grid.dx
    w = np.abs(state.amp) ** 2
    xs2 = state.grid.xs() ** 2

    def _int3(arr):
        return np.trapezoid(
            np.trapezoid(np.trapezoid(arr, dx=dx, axis=2), dx=dx, axis=1), dx=dx, axis=0
        )

    nsq = float(_int3(w))
    moments = tuple(
        float(_int3(w * xs2.reshape([-1 if ax == k else 1 for k in range(3)])))
        / nsq
        for ax in range(3)
    )
    return Record3D(state.time, float(np.sqrt(nsq)), moments)


def _leak_fraction_3d(amp: np.ndarray) -> float:
    peak = float(np.max(np.abs(amp)))
    if peak == 0.0:
        return 0.0
    shell = max(
        float(np.max(np.abs(amp[1, :, :]))),
        float(np.max(np.abs(amp[-2, :, :]))),
        float(np.max(np.abs(amp[:, 1, :]))),
        float(np.max(np.abs(amp[:, -2, :]))),
        float(np.max(np.abs(amp[:, :, 1]))),
        float(np.max(np.abs(amp[:, :, -2]))),
    )
    return shell / peak


def evolve_3d(initial: Wave3D, coeffs: CoefficientSet, params: EvolveParams) -> Trajectory3D:
    """Axis-split CN evolution of the isotropic 3D equation (d = f = 0 required).

    One sweep per axis per step, all lines of an axis solved in a single
    banded call.  Walls are zero on every face.
    """
    t0 = initial.time
    nsteps = params.step_count(t0)
    _validate_or_raise(coeffs, t0, params.t_final)
    n = initial.grid.n
    traj = Trajectory3D(variant=params.variant, nsteps=nsteps)

    amp = initial.amp.copy()
    for face in range(3):
        idx = [slice(None)] * 3
        for end in (0, -1):
            idx[face] = end
            amp[tuple(idx)] = 0.0
    hbar = coeffs.hbar
    state = Wave3D(initial.grid, amp, t0)
    traj.records.append(_measure_3d(state))

    for k in range(1, nsteps + 1):
        t_mid = t0 + (k - 0.5) * params.dt
        per_axis = assemble_3d(coeffs, t_mid, params.variant)
        for axis in range(3):
            lines = np.ascontiguousarray(np.moveaxis(state.amp, axis, 0)).reshape(n, -1)
            lines = _step_lines(lines, per_axis[axis], state.grid, hbar, params.dt)
            state.amp = np.moveaxis(lines.reshape(n, n, n), 0, axis).copy()
        state.time = t0 + k * params.dt

        if k % params.observe_every == 0 or k == nsteps:
            traj.records.append(_measure_3d(state))
        frac = _leak_fraction_3d(state.amp)
        if frac > params.leak_threshold:
            raise GridLeakError(state.time, frac, traj)
    traj.final = state
    return traj
