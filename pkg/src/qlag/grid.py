"""Spatial grids, sampled wavefunctions, Gaussian states, and observables.

Observables integrate with the trapezoid rule and are normalized by the
current squared norm, so roundoff-level norm drift never biases them.
Expectation of momentum uses a centered difference (second-order one-sided at
the walls) and is returned as the full complex integral; for a physical state
its imaginary part is a discretization diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GridSpec1D",
    "WaveState",
    "GaussianState",
    "ObservableRecord",
    "GridMismatchError",
    "DomainCoverageError",
    "norm",
    "expectation_x",
    "expectation_x2",
    "expectation_p",
    "overlap",
    "measure",
    "write_snapshot_csv",
    "write_observables_csv",
]


class GridMismatchError(ValueError):
    pass


class DomainCoverageError(ValueError):
    """The state has not decayed at the domain walls; results would be garbage."""


@dataclass(frozen=True)
class GridSpec1D:
    x_min: float
    x_max: float
    n: int

    def __post_init__(self):
        if not (self.x_min < self.x_max):
            raise ValueError(f"need x_min < x_max, got [{self.x_min}, {self.x_max}]")
        if self.n < 8:
            raise ValueError(f"need at least 8 points, got n = {self.n}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.n)


@dataclass
class WaveState:
    grid: GridSpec1D
    amp: np.ndarray  # complex128, len == grid.n
    time: float

    def __post_init__(self):
        self.amp = np.asarray(self.amp, dtype=np.complex128)
        if self.amp.shape != (self.grid.n,):
            raise ValueError(f"amplitude shape {self.amp.shape} != ({self.grid.n},)")

    def copy(self) -> "WaveState":
        return WaveState(self.grid, self.amp.copy(), self.time)


@dataclass(frozen=True)
class GaussianState:
    """exp(A x^2 + B x + C) with Re(A) < 0 (normalizable)."""

    A: complex
    B: complex
    C: complex

    def __post_init__(self):
        if not (self.A.real < 0.0):
            raise ValueError(f"need Re(A) < 0 for normalizability, got A = {self.A!r}")

    def log_abs(self, x: float) -> float:
        return (self.A * x * x + self.B * x + self.C).real

    def norm_squared(self) -> float:
        # integral of exp(2ReA x^2 + 2ReB x + 2ReC) over the line
        ar, br, cr = self.A.real, self.B.real, self.C.real
        return math.sqrt(math.pi / (-2.0 * ar)) * math.exp(2.0 * cr - br * br / (2.0 * ar))

    def norm(self) -> float:
        return math.sqrt(self.norm_squared())

    def normalized(self) -> "GaussianState":
        return GaussianState(self.A, self.B, self.C - 0.5 * math.log(self.norm_squared()))

    def mean_x(self) -> float:
        return -self.B.real / (2.0 * self.A.real)

    def variance(self) -> float:
        return -1.0 / (4.0 * self.A.real)

    def mean_x2(self) -> float:
        m = self.mean_x()
        return self.variance() + m * m

    def mean_p(self, hbar: float = 1.0) -> float:
        # <p> = Re[-i hbar <2 A x + B>] with <x> the |psi|^2 mean
        return hbar * (2.0 * self.A * self.mean_x() + self.B).imag

    def sample(self, grid: GridSpec1D, time: float = 0.0, coverage: float = 1e-10) -> WaveState:
        """Evaluate on the grid.  The tails must have decayed below ``coverage``
        times the peak amplitude at both walls, or DomainCoverageError is raised."""
        log_peak = self.log_abs(self.mean_x())
        floor = math.log(coverage)
        for edge in (grid.x_min, grid.x_max):
            if self.log_abs(edge) - log_peak >= floor:
                raise DomainCoverageError(
                    f"|psi| at x = {edge} is within {coverage:g} of the peak; widen the domain"
                )
        xs = grid.xs()
        q = self.A * xs * xs + self.B * xs + self.C
        return WaveState(grid, np.exp(q.astype(np.complex128)), time)


def _check_same_grid(s1: WaveState, s2: WaveState) -> None:
    if s1.grid != s2.grid:
        raise GridMismatchError(f"grids differ: {s1.grid} vs {s2.grid}")


def norm(state: WaveState) -> float:
    return float(np.sqrt(np.trapezoid(np.abs(state.amp) ** 2, dx=state.grid.dx)))


def _norm_sq(state: WaveState) -> float:
    return float(np.trapezoid(np.abs(state.amp) ** 2, dx=state.grid.dx))


def expectation_x(state: WaveState) -> float:
    w = np.abs(state.amp) ** 2
    return float(np.trapezoid(state.grid.xs() * w, dx=state.grid.dx)) / _norm_sq(state)


def expectation_x2(state: WaveState) -> float:
    w = np.abs(state.amp) ** 2
    return float(np.trapezoid(state.grid.xs() ** 2 * w, dx=state.grid.dx)) / _norm_sq(state)


def _centered_diff(amp: np.ndarray, dx: float) -> np.ndarray:
    out = np.empty_like(amp)
    out[1:-1] = (amp[2:] - amp[:-2]) / (2.0 * dx)
    out[0] = (-3.0 * amp[0] + 4.0 * amp[1] - amp[2]) / (2.0 * dx)
    out[-1] = (3.0 * amp[-1] - 4.0 * amp[-2] + amp[-3]) / (2.0 * dx)
    return out


def expectation_p(state: WaveState, hbar: float = 1.0) -> complex:
    """Complex momentum integral; Im is a roundoff/discretization diagnostic."""
    dpsi = _centered_diff(state.amp, state.grid.dx)
    integrand = np.conj(state.amp) * (-1j * hbar) * dpsi
    return complex(np.trapezoid(integrand, dx=state.grid.dx)) / _norm_sq(state)


def overlap(s1: WaveState, s2: WaveState) -> complex:
    """<s1|s2> on a shared grid; conjugate-symmetric by construction."""
    _check_same_grid(s1, s2)
    return complex(np.trapezoid(np.conj(s1.amp) * s2.amp, dx=s1.grid.dx))


@dataclass(frozen=True)
class ObservableRecord:
    t: float
    norm: float
    mean_x: float
    mean_x2: float
    mean_p: float  # real part of the complex momentum integral


def measure(state: WaveState, hbar: float = 1.0) -> ObservableRecord:
    return ObservableRecord(
        t=state.time,
        norm=norm(state),
        mean_x=expectation_x(state),
        mean_x2=expectation_x2(state),
        mean_p=expectation_p(state, hbar).real,
    )


def write_snapshot_csv(state: WaveState, path) -> None:
    """Columns x, re_psi, im_psi, abs2; repr floats, LF endings, byte-stable."""
    xs = state.grid.xs()
    with open(path, "w", newline="\n") as fh:
        fh.write("x,re_psi,im_psi,abs2\n")
        for x, psi in zip(xs, state.amp):
            # plain-float repr; numpy scalar reprs are not version-stable
            fh.write(
                f"{float(x)!r},{float(psi.real)!r},{float(psi.imag)!r},"
                f"{float(abs(psi) ** 2)!r}\n"
            )


def write_observables_csv(records, path) -> None:
    """Columns t, norm, mean_x, mean_x2, mean_p; same byte-stability contract."""
    with open(path, "w", newline="\n") as fh:
        fh.write("t,norm,mean_x,mean_x2,mean_p\n")
        for r in records:
            fh.write(f"{r.t!r},{r.norm!r},{r.mean_x!r},{r.mean_x2!r},{r.mean_p!r}\n")
