"""Scenario files: TOML in, deterministic CSV/JSON artifacts out.

A scenario bundles coefficients, a grid, an initial Gaussian, and evolution
parameters.  Loading collects every problem it can find and reports them all
at once rather than stopping at the first.  Running writes observables.csv,
snapshot_<k>.csv for each stored state, and report.json; the CSVs are
byte-identical across reruns (repr floats, fixed ordering, LF endings) and
the wall-clock measurement lives only in report.json.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .assembly import VARIANTS
from .coefficients import COEFF_NAMES, CoefficientSet, validate
from .evolve import (
    EvolveParams,
    GridLeakError,
    Wave3D,
    evolve_1d,
    evolve_3d,
)
from .expressions import ExprError, as_expr, to_source
from .grid import (
    GaussianState,
    GridSpec1D,
    write_observables_csv,
    write_snapshot_csv,
)

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "RunResult",
    "load_scenario",
    "scenario_from_mapping",
    "run_scenario",
    "resolve_out_dir",
    "EXIT_OK",
    "EXIT_CONFIG",
    "EXIT_NUMERICAL",
    "EXIT_LEAK",
]

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_LEAK = 3


class ConfigError(ValueError):
    """Every problem found in a scenario, reported together."""

    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid scenario:\n" + "\n".join(f"  - {e}" for e in self.errors))


@dataclass(frozen=True)
class ScenarioConfig:
    label: str
    variant: str
    dimension: int
    seed: int
    coefficients: CoefficientSet
    grid: GridSpec1D
    initial: GaussianState
    evolve: EvolveParams
    t_start: float
    out_dir: str | None
    echo: dict  # normalized mapping; scenario_from_mapping(echo) reproduces this config


_TOP_KEYS = {"label", "variant", "dimension", "seed", "coefficients", "grid", "initial", "evolve", "output"}
_COEFF_KEYS = set(COEFF_NAMES) | {"hbar"}
_GRID_KEYS = {"x_min", "x_max", "n"}
_INITIAL_KEYS = {"A", "B", "C", "normalize", "preset", "sigma", "center", "momentum"}
_EVOLVE_KEYS = {"dt", "t_final", "t_start", "observe_every", "snapshot_every", "leak_threshold"}
_OUTPUT_KEYS = {"directory"}


class _Collector:
    def __init__(self):
        self.errors: list[str] = []

    def error(self, where: str, message: str) -> None:
        self.errors.append(f"{where}: {message}")

    def number(self, mapping, key, where, default=None, required=False):
        if key not in mapping:
            if required:
                self.error(where, f"missing required key {key!r}")
            return default
        v = mapping[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.error(where, f"{key} must be a number, got {v!r}")
            return default
        v = float(v)
        if not math.isfinite(v):
            self.error(where, f"{key} must be finite, got {v!r}")
            return default
        return v

    def integer(self, mapping, key, where, default=None, required=False):
        if key not in mapping:
            if required:
                self.error(where, f"missing required key {key!r}")
            return default
        v = mapping[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.error(where, f"{key} must be an integer, got {v!r}")
            return default
        return v

    def boolean(self, mapping, key, where, default=False):
        v = mapping.get(key, default)
        if not isinstance(v, bool):
            self.error(where, f"{key} must be true or false, got {v!r}")
            return default
        return v

    def text(self, mapping, key, where, default=None):
        v = mapping.get(key, default)
        if v is not None and not isinstance(v, str):
            self.error(where, f"{key} must be a string, got {v!r}")
            return default
        return v

    def complex_value(self, mapping, key, where, default=0j):
        if key not in mapping:
            return default
        v = mapping[key]
        if isinstance(v, (int, float)) and not isinstance(v, bool):
            return complex(float(v), 0.0)
        if (
            isinstance(v, list)
            and len(v) == 2
            and all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in v)
        ):
            return complex(float(v[0]), float(v[1]))
        self.error(where, f"{key} must be a number or [re, im] pair, got {v!r}")
        return default

    def reject_unknown(self, mapping, allowed, where):
        for key in mapping:
            if key not in allowed:
                self.error(where, f"unknown key {key!r}")


def _parse_coefficients(section, col: _Collector) -> CoefficientSet | None:
    col.reject_unknown(section, _COEFF_KEYS, "coefficients")
    exprs = {}
    for name in COEFF_NAMES:
        raw = section.get(name, "0")
        if isinstance(raw, bool) or not isinstance(raw, (str, int, float)):
            col.error(f"coefficients.{name}", f"must be a string expression or number, got {raw!r}")
            continue
        try:
            exprs[name] = as_expr(raw)
        except ExprError as exc:
            col.error(f"coefficients.{name}", str(exc))
    hbar = col.number(section, "hbar", "coefficients", default=1.0)
    if hbar is not None and hbar <= 0.0:
        col.error("coefficients.hbar", f"must be positive, got {hbar!r}")
        hbar = None
    if len(exprs) != len(COEFF_NAMES) or hbar is None:
        return None
    return CoefficientSet(**exprs, hbar=hbar)


def _parse_grid(section, col: _Collector, dimension: int) -> GridSpec1D | None:
    col.reject_unknown(section, _GRID_KEYS, "grid")
    x_min = col.number(section, "x_min", "grid", required=True)
    x_max = col.number(section, "x_max", "grid", required=True)
    n = col.integer(section, "n", "grid", required=True)
    if None in (x_min, x_max, n):
        return None
    if not (x_min < x_max):
        col.error("grid", f"need x_min < x_max, got [{x_min}, {x_max}]")
        return None
    if n < 8:
        col.error("grid.n", f"need at least 8 points, got {n}")
        return None
    if dimension == 3 and n > 128:
        col.error("grid.n", f"3D grids are capped at 128 per axis, got {n}")
        return None
    return GridSpec1D(x_min, x_max, n)


def _parse_initial(section, col: _Collector, hbar: float) -> GaussianState | None:
    col.reject_unknown(section, _INITIAL_KEYS, "initial")
    preset_name = col.text(section, "preset", "initial")
    if preset_name is not None:
        if preset_name != "packet":
            col.error("initial.preset", f"unknown preset {preset_name!r}; valid: packet")
            return None
        for key in ("A", "B", "C"):
            if key in section:
                col.error("initial", f"preset and explicit {key} cannot be mixed")
        sigma = col.number(section, "sigma", "initial", default=1.0)
        center = col.number(section, "center", "initial", default=0.0)
        momentum = col.number(section, "momentum", "initial", default=0.0)
        if sigma is None or sigma <= 0.0:
            col.error("initial.sigma", f"must be positive, got {sigma!r}")
            return None
        if center is None or momentum is None:
            return None
        A = -1.0 / (4.0 * sigma * sigma)
        B = complex(-2.0 * A * center, momentum / hbar)
        try:
            return GaussianState(complex(A), B, 0j).normalized()
        except ValueError as exc:
            col.error("initial", str(exc))
            return None
    A = col.complex_value(section, "A", "initial", default=None)
    if A is None:
        col.error("initial", "need either preset = \"packet\" or an explicit A")
        return None
    B = col.complex_value(section, "B", "initial")
    C = col.complex_value(section, "C", "initial")
    normalize = col.boolean(section, "normalize", "initial", default=False)
    if not (A.real < 0.0):
        col.error("initial.A", f"need Re(A) < 0 for normalizability, got {A!r}")
        return None
    state = GaussianState(A, B, C)
    return state.normalized() if normalize else state


def _coverage_ok(state: GaussianState, grid: GridSpec1D, col: _Collector) -> None:
    log_peak = state.log_abs(state.mean_x())
    floor = math.log(1e-10)
    for edge in (grid.x_min, grid.x_max):
        if state.log_abs(edge) - log_peak >= floor:
            col.error(
                "initial",
                f"|psi| at the wall x = {edge} is within 1e-10 of the peak; "
                f"widen the grid or narrow the state",
            )
            return


def scenario_from_mapping(mapping: dict, default_label: str = "run") -> ScenarioConfig:
    """Build a validated config from a parsed TOML mapping.

    Raises ConfigError carrying every problem found."""
    col = _Collector()
    if not isinstance(mapping, dict):
        raise ConfigError(["scenario must be a table at the top level"])
    col.reject_unknown(mapping, _TOP_KEYS, "scenario")

    label = col.text(mapping, "label", "label", default=default_label) or default_label
    variant = col.text(mapping, "variant", "variant", default="rederived")
    if variant not in VARIANTS:
        col.error("variant", f"unknown variant {variant!r}; valid: {list(VARIANTS)}")
        variant = "rederived"
    dimension = col.integer(mapping, "dimension", "dimension", default=1)
    if dimension not in (1, 3):
        col.error("dimension", f"must be 1 or 3, got {dimension!r}")
        dimension = 1
    seed = col.integer(mapping, "seed", "seed", default=0)

    coeffs = _parse_coefficients(mapping.get("coefficients", {}), col)
    grid = _parse_grid(mapping.get("grid", {}), col, dimension) if "grid" in mapping else None
    if "grid" not in mapping:
        col.error("grid", "missing required section")
    if "initial" not in mapping:
        col.error("initial", "missing required section")
    hbar = coeffs.hbar if coeffs is not None else 1.0
    initial = _parse_initial(mapping.get("initial", {}), col, hbar) if "initial" in mapping else None

    evolve_section = mapping.get("evolve", {})
    if "evolve" not in mapping:
        col.error("evolve", "missing required section")
    col.reject_unknown(evolve_section, _EVOLVE_KEYS, "evolve")
    dt = col.number(evolve_section, "dt", "evolve", required=True)
    t_final = col.number(evolve_section, "t_final", "evolve", required=True)
    t_start = col.number(evolve_section, "t_start", "evolve", default=0.0)
    observe_every = col.integer(evolve_section, "observe_every", "evolve", default=1)
    snapshot_every = col.integer(evolve_section, "snapshot_every", "evolve", default=0)
    leak_threshold = col.number(evolve_section, "leak_threshold", "evolve", default=1e-6)

    output_section = mapping.get("output", {})
    col.reject_unknown(output_section, _OUTPUT_KEYS, "output")
    out_dir = col.text(output_section, "directory", "output")

    params = None
    if None not in (dt, t_final, t_start, observe_every, snapshot_every, leak_threshold):
        try:
            params = EvolveParams(
                dt=dt,
                t_final=t_final,
                variant=variant,
                observe_every=observe_every,
                snapshot_every=snapshot_every,
                leak_threshold=leak_threshold,
            )
            if t_start is not None:
                params.step_count(t_start)
        except ValueError as exc:
            col.error("evolve", str(exc))
            params = None

    if coeffs is not None and params is not None and t_start is not None:
        lo, hi = sorted((t_start, t_final))
        violations = validate(coeffs, lo, hi)
        for v in violations[:10]:
            col.error(f"coefficients.{v.coefficient}", f"{v.kind} at t = {v.time:g} {v.detail}")
        if len(violations) > 10:
            col.error("coefficients", f"... and {len(violations) - 10} more violations")
        if dimension == 3:
            ts = np.linspace(lo, hi, 257) if hi > lo else [lo]
            from .expressions import eval_expr

            for name in ("d", "f"):
                expr = getattr(coeffs, name)
                bad = next((float(t) for t in ts if eval_expr(expr, float(t)) != 0.0), None)
                if bad is not None:
                    col.error(
                        f"coefficients.{name}",
                        f"must be identically zero for dimension = 3; nonzero at t = {bad:g}",
                    )

    if initial is not None and grid is not None:
        _coverage_ok(initial, grid, col)

    if col.errors:
        raise ConfigError(col.errors)

    echo = {
        "label": label,
        "variant": variant,
        "dimension": dimension,
        "seed": seed,
        "coefficients": {
            **{n: to_source(getattr(coeffs, n)) for n in COEFF_NAMES},
            "hbar": coeffs.hbar,
        },
        "grid": {"x_min": grid.x_min, "x_max": grid.x_max, "n": grid.n},
        "initial": {
            "A": [initial.A.real, initial.A.imag],
            "B": [initial.B.real, initial.B.imag],
            "C": [initial.C.real, initial.C.imag],
            "normalize": False,
        },
        "evolve": {
            "dt": params.dt,
            "t_final": params.t_final,
            "t_start": t_start,
            "observe_every": params.observe_every,
            "snapshot_every": params.snapshot_every,
            "leak_threshold": params.leak_threshold,
        },
        "output": {} if out_dir is None else {"directory": out_dir},
    }
    return ScenarioConfig(
        label=label,
        variant=variant,
        dimension=dimension,
        seed=seed,
        coefficients=coeffs.with_label(label),
        grid=grid,
        initial=initial,
        evolve=params,
        t_start=t_start,
        out_dir=out_dir,
        echo=echo,
    )


def load_scenario(path) -> ScenarioConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            mapping = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError([f"scenario file not found: {path}"])
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"TOML parse error in {path}: {exc}"])
    return scenario_from_mapping(mapping, default_label=path.stem)


def resolve_out_dir(config: ScenarioConfig, override=None, env=None) -> Path:
    """--out beats [output].directory beats $QLAG_OUT/<label> beats ./<label>."""
    import os

    env = os.environ if env is None else env
    if override is not None:
        return Path(override)
    if config.out_dir is not None:
        return Path(config.out_dir)
    root = env.get("QLAG_OUT")
    base = Path(root) if root else Path.cwd()
    return base / config.label


@dataclass
class RunResult:
    status: str  # "ok" | "leak_guard_tripped"
    exit_code: int
    out_dir: Path
    report: dict


def _product_state(initial: GaussianState, grid: GridSpec1D, t_start: float) -> Wave3D:
    u = initial.sample(grid, time=t_start).amp
    amp = np.einsum("i,j,k->ijk", u, u, u)
    return Wave3D(grid, amp, t_start)


def _write_3d_observables(records, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("t,norm,mean_x2_x,mean_x2_y,mean_x2_z\n")
        for r in records:
            m = r.mean_x2
            fh.write(f"{r.t!r},{r.norm!r},{m[0]!r},{m[1]!r},{m[2]!r}\n")


def run_scenario(config: ScenarioConfig, out_dir=None, variant: str | None = None) -> RunResult:
    """Evolve the scenario and write its artifacts.

    A tripped leak guard still writes whatever was recorded, flags the report,
    and returns exit code 3.  Numerical failures return exit code 2."""
    if variant is not None:
        if variant not in VARIANTS:
            raise ConfigError([f"unknown variant {variant!r}; valid: {list(VARIANTS)}"])
        config = replace(
            config,
            variant=variant,
            evolve=replace(config.evolve, variant=variant),
            echo={**config.echo, "variant": variant},
        )
    out = resolve_out_dir(config, out_dir)
    out.mkdir(parents=True, exist_ok=True)

    status = "ok"
    exit_code = EXIT_OK
    failure: dict | None = None
    traj = None
    wall = 0.0
    t0 = time.perf_counter()
    try:
        if config.dimension == 1:
            initial = config.initial.sample(config.grid, time=config.t_start)
            traj = evolve_1d(initial, config.coefficients, config.evolve)
        else:
            initial3 = _product_state(config.initial, config.grid, config.t_start)
            traj = evolve_3d(initial3, config.coefficients, config.evolve)
    except GridLeakError as exc:
        status = "leak_guard_tripped"
        exit_code = EXIT_LEAK
        failure = {"time": exc.time, "boundary_fraction": exc.fraction}
        traj = exc.trajectory
    except Exception as exc:  # domain errors, solver failures: numerical, not config
        status = "numerical_failure"
        exit_code = EXIT_NUMERICAL
        failure = {"error": f"{type(exc).__name__}: {exc}"}
    wall = time.perf_counter() - t0

    outputs: list[str] = []
    records = traj.records if traj is not None else []
    if config.dimension == 1:
        if records:
            write_observables_csv(records, out / "observables.csv")
            outputs.append("observables.csv")
        if traj is not None:
            for k, snap in enumerate(traj.states):
                name = f"snapshot_{k}.csv"
                write_snapshot_csv(snap, out / name)
                outputs.append(name)
    else:
        if records:
            _write_3d_observables(records, out / "observables3d.csv")
            outputs.append("observables3d.csv")

    outputs.append("report.json")
    report: dict = {
        "status": status,
        "label": config.label,
        "variant": config.variant,
        "dimension": config.dimension,
        "config": config.echo,
        "wall_time_s": wall,
        "outputs": outputs,
    }
    if records:
        base = records[0].norm
        report["nsteps"] = traj.nsteps
        report["norm_initial"] = base
        report["norm_final"] = records[-1].norm
        report["norm_drift"] = max(abs(r.norm - base) for r in records)
    if failure is not None:
        report["failure"] = failure
    with open(out / "report.json", "w", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return RunResult(status=status, exit_code=exit_code, out_dir=out, report=report)
