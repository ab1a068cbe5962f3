"""Fast Lyapunov indicator computation and 2-D FLI cartography.

The FLI of an orbit is the running supremum of log10 |v(t)| up to the
horizon, where v solves the variational equations along the flow and starts
from a unit vector.  Flow and tangent vector are transported together by
integrating the complex state y = x + i*h*v: with h far below the square
root of the double-precision underflow threshold, the real part reproduces
the flow exactly and Im(y)/h obeys the exact linearized dynamics (the
complex-step rule), bit-reproducibly and without hand-coded Hessians.

Grids evaluate in fixed-size batches of cells so results are bitwise
independent of the thread count.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .averaged import AveragedSystem
from .constants import SIDEREAL_DAY_TU
from .elements import ResonanceId, mean_anomaly_from_sigma
from .errors import DomainError, StepSizeError
from .rk import rk8_step

_CS_H = 1e-200          # complex-step scale
_RENORM_AT = 1e150      # tangent-norm ceiling before renormalizing
_CHUNK = 512            # cells per batch; fixed for determinism

DEFAULT_HORIZON_DAYS = 465.0
DEFAULT_DT_DAYS = 0.01

AXIS_NAMES = ("sigma", "a", "i", "e")

_MIN_E = 1e-4
_MIN_I = math.radians(0.01)


@dataclass(frozen=True)
class AxisSpec:
    name: str
    min: float
    max: float
    count: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise DomainError(f"axis name must be one of {AXIS_NAMES}, got {self.name}")
        if self.count < 1:
            raise DomainError("axis count must be >= 1")
        if self.count > 1 and not self.max > self.min:
            raise DomainError("axis range must be strictly increasing")

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class FliGrid:
    """A 2-D FLI scan. Angles in radians, semimajor axis in km, T/dt in days."""

    x_axis: AxisSpec
    y_axis: AxisSpec
    fixed: dict
    T_days: float
    dt_days: float
    values: np.ndarray = field(default=None)
    failed: np.ndarray = field(default=None)

    @property
    def shape(self):
        return (self.y_axis.count, self.x_axis.count)


def _fli_core(sys: AveragedSystem, y0: np.ndarray, v0: np.ndarray,
              T_tu: float, dt_tu: float) -> np.ndarray:
    """Supremum log10 tangent growth for a batch of initial states.

    y0, v0: shape (6, B). Returns shape (B,).
    """
    if dt_tu <= 0.0:
        raise StepSizeError(f"dt must be positive, got {dt_tu}")
    norm0 = np.sqrt(np.sum(v0 * v0, axis=0))
    if np.any(norm0 == 0.0):
        raise DomainError("initial tangent vector must be nonzero")
    y = y0.astype(complex) + 1j * (_CS_H * (v0 / norm0))
    n_steps = int(round(T_tu / dt_tu))
    log_acc = np.zeros(y0.shape[1])
    sup = np.zeros(y0.shape[1])
    t = 0.0
    for step in range(1, n_steps + 1):
        y = rk8_step(sys.rhs, t, y, dt_tu)
        t = step * dt_tu
        v = y.imag * (1.0 / _CS_H)
        norm = np.sqrt(np.sum(v * v, axis=0))
        with np.errstate(divide="ignore", invalid="ignore"):
            sup = np.maximum(sup, log_acc + np.log10(norm))
        big = norm > _RENORM_AT
        if np.any(big):
            scale = np.where(big, 1.0 / np.where(big, norm, 1.0), 1.0)
            y = y.real + 1j * (y.imag * scale)
            log_acc = log_acc + np.where(big, np.log10(np.where(big, norm, 1.0)), 0.0)
    return sup


def fli(sys: AveragedSystem, state0, v0=None,
        T_days: float = DEFAULT_HORIZON_DAYS, dt_days: float = DEFAULT_DT_DAYS) -> float:
    """FLI of a single trajectory of the averaged system.

    ``v0`` defaults to the unit vector along L.  T and dt are in sidereal
    days; theta(0) = 0.
    """
    y0 = np.asarray(state0, dtype=float).reshape(6, 1)
    if v0 is None:
        v = np.zeros((6, 1))
        v[0, 0] = 1.0
    else:
        v = np.asarray(v0, dtype=float).reshape(6, 1)
    out = _fli_core(sys, y0, v, T_days * SIDEREAL_DAY_TU, dt_days * SIDEREAL_DAY_TU)
    return float(out[0])


def _initial_states(r: ResonanceId, grid: FliGrid, constants) -> np.ndarray:
    """Per-cell Delaunay initial conditions (6, n_cells), row-major cells."""
    xs = grid.x_axis.values()
    ys = grid.y_axis.values()
    xx, yy = np.meshgrid(xs, ys)
    cell = {grid.x_axis.name: xx.ravel(), grid.y_axis.name: yy.ravel()}
    n = xx.size

    def fetch(name, default=None):
        if name in cell:
            return cell[name]
        if name in grid.fixed:
            return np.full(n, float(grid.fixed[name]))
        if default is not None:
            return np.full(n, default)
        raise DomainError(f"grid does not determine element {name!r}")

    a_km = fetch("a")
    e = fetch("e")
    inc = fetch("i")
    omega = np.full(n, float(grid.fixed.get("omega", 0.0)))
    Omega = np.full(n, float(grid.fixed.get("Omega", 0.0)))
    sigma = fetch("sigma", default=None) if ("sigma" in cell or "sigma" in grid.fixed) \
        else None
    if sigma is None:
        raise DomainError("grid must fix or scan the resonant angle sigma")

    if np.any(e < _MIN_E) or np.any(inc < _MIN_I):
        warnings.warn(
            "initial e/i clamped away from the Delaunay chart singularities "
            f"(e >= {_MIN_E}, i >= 0.01 deg)", stacklevel=2)
        e = np.maximum(e, _MIN_E)
        inc = np.maximum(inc, _MIN_I)

    M = (sigma - r.ell * omega - r.j * Omega) / r.ell
    L = np.sqrt(a_km / constants.a_geo)
    G = L * np.sqrt(1.0 - e * e)
    H = G * np.cos(inc)
    return np.stack([L, G, H, M, omega, Omega])


def fli_map(sys: AveragedSystem, x_axis: AxisSpec, y_axis: AxisSpec,
            fixed: dict | None = None,
            T_days: float = DEFAULT_HORIZON_DAYS, dt_days: float = DEFAULT_DT_DAYS,
            threads: int = 1) -> FliGrid:
    """FLI over a 2-D grid of initial conditions.

    Axes may scan sigma [rad], a [km], e, or i [rad]; remaining elements come
    from ``fixed`` (omega/Omega default 0).  Every cell runs with identical
    T/dt and the default tangent direction; cells are processed in fixed
    512-wide batches so the output is bit-identical for any thread count.
    """
    grid = FliGrid(x_axis=x_axis, y_axis=y_axis, fixed=dict(fixed or {}),
                   T_days=T_days, dt_days=dt_days)
    y0 = _initial_states(sys.resonance, grid, sys.constants)
    n = y0.shape[1]
    v0 = np.zeros((6, n))
    v0[0, :] = 1.0
    T_tu = T_days * SIDEREAL_DAY_TU
    dt_tu = dt_days * SIDEREAL_DAY_TU
    out = np.empty(n)

    chunks = [(s, min(s + _CHUNK, n)) for s in range(0, n, _CHUNK)]

    def run(chunk):
        lo, hi = chunk
        with np.errstate(over="ignore", invalid="ignore"):
            out[lo:hi] = _fli_core(sys, y0[:, lo:hi], v0[:, lo:hi], T_tu, dt_tu)

    if threads <= 1:
        for ch in chunks:
            run(ch)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(run, chunks))

    values = out.reshape(grid.shape)
    failed = ~np.isfinite(values)
    return FliGrid(x_axis=x_axis, y_axis=y_axis, fixed=grid.fixed,
                   T_days=T_days, dt_days=dt_days, values=values, failed=failed)
