"""Ready-to-run scenario files for the special cases and standard checks."""

from __future__ import annotations

__all__ = ["PRESETS", "preset_names", "preset_text", "preset_description"]

_FREE = """\
# Free packet: a = m/2 with m = 1, everything else zero.
label = "free"
variant = "rederived"

[coefficients]
a = "0.5"

[grid]
x_min = -20.0
x_max = 20.0
n = 2048

[initial]
preset = "packet"
sigma = 1.0

[evolve]
dt = 1e-3
t_final = 1.0
observe_every = 50
"""

_CASE_A = """\
# Linear coupling only: L = a xdot^2 + f x.  The packet accelerates uniformly:
# mean x(t) = x0 + (p0/m) t + (f/2m) t^2.
label = "case-a"
variant = "rederived"

[coefficients]
a = "0.5"
f = "1.0"

[grid]
x_min = -20.0
x_max = 20.0
n = 2048

[initial]
preset = "packet"
sigma = 1.0
momentum = 1.0

[evolve]
dt = 1e-3
t_final = 1.0
observe_every = 50
"""

_CASE_B = """\
# Quadratic coupling only: L = a xdot^2 + c x^2 with c = -m omega^2/2 (omega = 1).
# A = -1/2 is the width that neither breathes nor squeezes; centered at x = 1,
# mean x(t) = cos(t).  t_final is one full period on the dt grid.
label = "case-b"
variant = "rederived"

[coefficients]
a = "0.5"
c = "-0.5"

[grid]
x_min = -20.0
x_max = 20.0
n = 2048

[initial]
A = [-0.5, 0.0]
B = [1.0, 0.0]
normalize = true

[evolve]
dt = 1e-3
t_final = 6.283
observe_every = 50
"""

_CASE_C = """\
# Cross-coupling only: L = a xdot^2 + b x xdot.  Needs the finer grid: the
# evolution is a pure gauge chirp exp(i b x^2/(2 hbar)) on top of free motion
# (in the rederived variant), which raises the local wavenumber.
label = "case-c"
variant = "rederived"

[coefficients]
a = "0.5"
b = "0.5"

[grid]
x_min = -16.0
x_max = 16.0
n = 6144

[initial]
preset = "packet"
sigma = 1.0

[evolve]
dt = 5e-4
t_final = 1.0
observe_every = 100
"""

_CASE_D = """\
# Velocity coupling only: L = a xdot^2 + d xdot.  In the rederived variant this
# is gauge-equivalent to free motion through exp(i d x/hbar).
label = "case-d"
variant = "rederived"

[coefficients]
a = "0.5"
d = "0.5"

[grid]
x_min = -16.0
x_max = 16.0
n = 6144

[initial]
preset = "packet"
sigma = 1.0

[evolve]
dt = 5e-4
t_final = 1.0
observe_every = 100
"""

_ORACLE = """\
# All six coefficients nonzero: the work-out scenario for compare-oracles.
label = "oracle"
variant = "rederived"

[coefficients]
a = "0.5"
b = "1.0"
c = "-0.3"
d = "0.4"
f = "0.2"
g = "0.1"

[grid]
x_min = -14.0
x_max = 14.0
n = 2048

[initial]
A = [-0.6, 0.1]
B = [0.2, 0.3]
normalize = true

[evolve]
dt = 5e-4
t_final = 0.5
observe_every = 50
"""

_THREED = """\
# Isotropic 3D free packet on a 64^3 grid; observables land in observables3d.csv.
label = "threed"
variant = "rederived"
dimension = 3

[coefficients]
a = "0.5"

[grid]
x_min = -12.0
x_max = 12.0
n = 64

[initial]
preset = "packet"
sigma = 1.2

[evolve]
dt = 5e-3
t_final = 0.05
"""

PRESETS: dict[str, tuple[str, str]] = {
    "free": ("free packet, dispersion baseline", _FREE),
    "a": ("linear coupling f only (uniform acceleration)", _CASE_A),
    "b": ("quadratic coupling c only (oscillator, one period)", _CASE_B),
    "c": ("cross-coupling b only (gauge chirp over free motion)", _CASE_C),
    "d": ("velocity coupling d only (gauge boost over free motion)", _CASE_D),
    "oracle": ("all coefficients nonzero, for compare-oracles", _ORACLE),
    "threed": ("isotropic 3D free packet, 64^3", _THREED),
}


def preset_names() -> list[str]:
    return list(PRESETS)


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; valid: {', '.join(PRESETS)}")
    return PRESETS[name][1]


def preset_description(name: str) -> str:
    return PRESETS[name][0]
