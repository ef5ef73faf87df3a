"""Quantitative semantics: how far the trace can be translated before the
verdict flips.

For atoms the robustness is the signed distance to the threshold; Boolean
connectives take max/min/negation pointwise.  For a convolution node the
robustness at t is the supremum of all levels r such that the kernel-weighted
coverage of ``{inner robustness > r}`` still meets the threshold.  Coverage
is a nonincreasing step function of r (asserted during bracketing), so the
supremum is found by scanning a coarse r-grid for the sign change and
bisecting down to the configured tolerance; the reported value is the final
bracket midpoint.

The inner robustness of atoms and their Boolean combinations is an exact
piecewise-constant function of time; nested convolution nodes are sampled on
a uniform time grid, one trace per nesting level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import HorizonError, SclError
from .formula import (
    And,
    Atom,
    Const,
    Conv,
    ConvDual,
    Formula,
    Implies,
    Not,
    Or,
    horizon,
)
from .kernels import BoundedKernel
from .signals import PiecewiseConstantSignal

_MASS_SNAP = 1e-9  # coverage sums get snapped onto the exact bounds 0 / 1


@dataclass
class RhoConfig:
    tolerance: float = 1e-6        # bisection resolution in r
    time_grid: float | None = None  # sampling pitch; default: window width / 1000
    grid_points: int = 16          # initial r-grid size
    max_expansions: int = 32       # outward doublings before giving up

    def __post_init__(self) -> None:
        if self.tolerance <= 0:
            raise SclError("tolerance must be positive")
        if self.time_grid is not None and self.time_grid <= 0:
            raise SclError("time grid must be positive")
        if self.grid_points < 2:
            raise SclError("r grid needs at least two points")


@dataclass(frozen=True)
class RobustnessTrace:
    """Sampled robustness t -> rho(t) with the bisection tolerance used."""

    times: np.ndarray
    values: np.ndarray
    tolerance: float

    def __post_init__(self) -> None:
        if len(self.times) != len(self.values):
            raise SclError("times and values must have equal length")
        if self.tolerance <= 0:
            raise SclError("tolerance must be positive")


class _StepFunction:
    """Piecewise-constant real function on [start, end], right-continuous."""

    def __init__(self, start: float, end: float, times: np.ndarray, values: np.ndarray):
        self.start = float(start)
        self.end = float(end)
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if len(self.times) == 0 or self.times[0] != self.start:
            raise SclError("step function must start at its domain start")

    def negated(self) -> "_StepFunction":
        return _StepFunction(self.start, self.end, self.times, -self.values)

    def restricted(self, end: float) -> "_StepFunction":
        if end >= self.end:
            return self
        keep = self.times <= end
        return _StepFunction(self.start, end, self.times[keep], self.values[keep])

    def combined(self, other: "_StepFunction", op) -> "_StepFunction":
        end = min(self.end, other.end)
        times = np.unique(np.concatenate([self.times, other.times]))
        times = times[times <= end]
        mine = self.values[np.searchsorted(self.times, times, side="right") - 1]
        theirs = other.values[np.searchsorted(other.times, times, side="right") - 1]
        return _StepFunction(self.start, end, times, op(mine, theirs))

    def value_at(self, t: float) -> float:
        idx = int(np.searchsorted(self.times, t, side="right")) - 1
        return float(self.values[max(idx, 0)])

    def window_segments(self, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Segment bounds and values covering [lo, hi] exactly."""
        i = int(np.searchsorted(self.times, lo, side="right")) - 1
        j = int(np.searchsorted(self.times, hi, side="left"))
        cuts = np.concatenate([[lo], self.times[i + 1:j], [hi]])
        vals = self.values[i:j] if j > i else self.values[i:i + 1]
        return cuts[:-1], cuts[1:], vals


def _coverage_supremum(kernel: BoundedKernel, threshold: float,
                       inner: _StepFunction, t: float, cfg: RhoConfig) -> float:
    """sup { r | kernel-weighted measure of {inner > r} in the window >= threshold }."""
    lo, hi = t + kernel.lower, t + kernel.upper
    eps = 1e-9 * max(1.0, abs(inner.start), abs(inner.end))
    if lo < inner.start - eps or hi > inner.end + eps:
        raise HorizonError(
            f"window [{lo}, {hi}] outside robustness signal domain "
            f"[{inner.start}, {inner.end}]"
        )
    seg_lo, seg_hi, seg_vals = inner.window_segments(max(lo, inner.start),
                                                     min(hi, inner.end))
    masses = np.asarray(kernel.mass_clipped(
        np.clip(seg_lo - t, kernel.lower, kernel.upper),
        np.clip(seg_hi - t, kernel.lower, kernel.upper),
    ), dtype=float)

    def coverage(r: float) -> float:
        total = float(np.sum(masses[seg_vals > r]))
        if abs(total) <= _MASS_SNAP:
            return 0.0
        if abs(total - 1.0) <= _MASS_SNAP:
            return 1.0
        return total

    finite = np.isfinite(seg_vals)
    top = float(np.sum(masses[seg_vals == np.inf]))       # coverage above all finite levels
    bottom = float(np.sum(masses[seg_vals > -np.inf]))    # coverage below all finite levels
    if abs(top - 1.0) <= _MASS_SNAP:
        top = 1.0
    if abs(bottom - 1.0) <= _MASS_SNAP:
        bottom = 1.0
    if top >= threshold:
        return math.inf
    if bottom < threshold:
        return -math.inf
    vmin = float(np.min(seg_vals[finite]))
    vmax = float(np.max(seg_vals[finite]))

    r_lo, r_hi = vmin - 1.0, vmax + 1.0
    for _ in range(cfg.max_expansions + 1):
        grid = np.linspace(r_lo, r_hi, cfg.grid_points)
        cov = np.array([coverage(r) for r in grid])
        if np.any(np.diff(cov) > 1e-12):
            raise SclError("coverage is not nonincreasing in r; bracketing is unsound")
        below = np.nonzero(cov < threshold)[0]
        if cov[0] >= threshold and len(below):
            lo_r = float(grid[below[0] - 1])
            hi_r = float(grid[below[0]])
            while hi_r - lo_r > cfg.tolerance:
                mid = 0.5 * (lo_r + hi_r)
                if coverage(mid) >= threshold:
                    lo_r = mid
                else:
                    hi_r = mid
            return 0.5 * (lo_r + hi_r)
        span = r_hi - r_lo
        r_lo, r_hi = r_lo - span, r_hi + span
    raise SclError(
        f"no robustness bracket found after {cfg.max_expansions} grid expansions"
    )


def _atom_step_function(trace: PiecewiseConstantSignal, atom: Atom) -> _StepFunction:
    vals = trace.variable_values(atom.variable)
    signed = vals - atom.threshold if atom.op in (">=", ">") else atom.threshold - vals
    return _StepFunction(0.0, trace.duration, trace.times, signed)


def _rho_signal(trace: PiecewiseConstantSignal, f: Formula,
                cfg: RhoConfig) -> _StepFunction:
    match f:
        case Const(value):
            v = math.inf if value else -math.inf
            return _StepFunction(0.0, trace.duration, np.array([0.0]), np.array([v]))
        case Atom():
            return _atom_step_function(trace, f)
        case Not(child):
            return _rho_signal(trace, child, cfg).negated()
        case Or(left, right):
            return _rho_signal(trace, left, cfg).combined(
                _rho_signal(trace, right, cfg), np.maximum)
        case And(left, right):
            return _rho_signal(trace, left, cfg).combined(
                _rho_signal(trace, right, cfg), np.minimum)
        case Implies(left, right):
            return _rho_signal(trace, left, cfg).negated().combined(
                _rho_signal(trace, right, cfg), np.maximum)
        case Conv(kernel, threshold, child):
            inner = _rho_signal(trace, child, cfg)
            end = inner.end - kernel.upper
            if end < inner.start - 1e-12:
                raise HorizonError(
                    f"trace too short for nested window [{kernel.lower}, {kernel.upper}]"
                )
            end = max(end, inner.start)
            pitch = cfg.time_grid if cfg.time_grid is not None else kernel.width / 1000.0
            n = int(math.floor((end - inner.start) / pitch)) if end > inner.start else 0
            ts = inner.start + pitch * np.arange(n + 1)
            if ts[-1] < end - 1e-12:
                ts = np.append(ts, end)
            vals = np.array([
                _coverage_supremum(kernel, threshold, inner, t, cfg) for t in ts
            ])
            return _StepFunction(inner.start, end, ts, vals)
        case ConvDual(kernel, threshold, child):
            return _rho_signal(
                trace, Not(Conv(kernel, 1.0 - threshold, Not(child))), cfg)
    raise SclError(f"not a formula: {f!r}")


def rho(trace: PiecewiseConstantSignal, f: Formula, t: float = 0.0,
        config: RhoConfig | None = None) -> float:
    """Robustness of ``f`` at time ``t``."""
    cfg = config or RhoConfig()
    needed = horizon(f)
    if t < 0 or t > trace.duration - needed + 1e-12:
        raise HorizonError(
            f"time {t} outside evaluable horizon [0, {trace.duration - needed:.6g}] "
            f"(formula horizon {needed:.6g})"
        )
    match f:
        case Const(value):
            return math.inf if value else -math.inf
        case Atom():
            return float(trace.value_at(t, f.variable) - f.threshold) \
                if f.op in (">=", ">") \
                else float(f.threshold - trace.value_at(t, f.variable))
        case Not(child):
            return -rho(trace, child, t, cfg)
        case Or(left, right):
            return max(rho(trace, left, t, cfg), rho(trace, right, t, cfg))
        case And(left, right):
            return min(rho(trace, left, t, cfg), rho(trace, right, t, cfg))
        case Implies(left, right):
            return max(-rho(trace, left, t, cfg), rho(trace, right, t, cfg))
        case Conv(kernel, threshold, child):
            inner = _rho_signal(trace, child, cfg)
            return _coverage_supremum(kernel, threshold, inner, t, cfg)
        case ConvDual(kernel, threshold, child):
            return rho(trace, Not(Conv(kernel, 1.0 - threshold, Not(child))), t, cfg)
    raise SclError(f"not a formula: {f!r}")


def rho_trace(trace: PiecewiseConstantSignal, f: Formula,
              config: RhoConfig | None = None) -> RobustnessTrace:
    """Robustness sampled on a uniform time grid over the evaluable horizon."""
    cfg = config or RhoConfig()
    needed = horizon(f)
    if needed > trace.duration + 1e-12:
        raise HorizonError(
            f"formula horizon {needed:.6g} exceeds trace duration {trace.duration:.6g}"
        )
    end = max(trace.duration - needed, 0.0)
    sf = _rho_signal(trace, f, cfg)
    pitch = cfg.time_grid
    if pitch is None:
        pitch = _default_pitch(f, end)
    n = int(math.floor(end / pitch)) if end > 0 and pitch > 0 else 0
    ts = pitch * np.arange(n + 1) if n else np.array([0.0])
    if ts[-1] < end - 1e-12:
        ts = np.append(ts, end)
    vals = np.array([sf.value_at(t) for t in ts])
    return RobustnessTrace(ts, vals, cfg.tolerance)


def _default_pitch(f: Formula, span: float) -> float:
    """Narrowest per-node default step among the windowed operators."""
    widths: list[float] = []

    def walk(g: Formula) -> None:
        match g:
            case Conv(kernel, _, child) | ConvDual(kernel, _, child):
                widths.append(kernel.width)
                walk(child)
            case Not(child):
                walk(child)
            case Or(left, right) | And(left, right) | Implies(left, right):
                walk(left)
                walk(right)
            case _:
                pass

    walk(f)
    if widths:
        return min(widths) / 1000.0
    return span / 1000.0 if span > 0 else 1.0
