"""Boolean monitoring: truth signals for formulas over piecewise-constant traces.

Three evaluators compute the convolution value H(t) (kernel-weighted coverage
of the child truth signal in the window anchored at t) and threshold it:

* :func:`eval_conv_oracle` -- brute force: H on a uniform grid via window
  integrals, crossings by linear interpolation.  Ground truth for the others.
* :func:`eval_conv_efficient` -- sliding window: integration is split into
  stretches bounded by the events where a window boundary meets a true-interval
  edge, so the edge set inside the window is constant per stretch; within a
  stretch H is advanced on substeps of at most ``max_step`` using the exact
  mass flux of the edges (for flat kernels this equals the first-order update,
  which is exact there).  Threshold crossings are located by bisection
  (closed form for flat kernels) to 1e-9 in time.
* :func:`eval_conv_incremental` -- flat/exponential kernels only: H is slid
  along using edge-strip masses (flat) or the semigroup rescale
  ``H(t+h) = exp(-rate*h) * (H(t) - left_strip + right_strip)`` (exponential),
  with re-anchoring for growth-direction rates to keep drift small.

The dual operator is evaluated structurally as the complement of the
complemented child at threshold ``1 - p``, which realizes its strict
comparison up to sets of measure zero.

Verdicts carry a ``stable_until`` time: extending the trace can never change
the verdict before it.  Only the final integration stretch (or oracle grid
cell) touches the current trace end, and only threshold-delicate content
there can still move; everything else is reproduced bit-for-bit on any
longer trace.  The streaming facade emits up to this boundary, which makes
online output exactly equal to offline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

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
from .kernels import BoundedKernel, ExponentialKernel, FlatKernel
from .signals import (
    BooleanSignal,
    PiecewiseConstantSignal,
    boolean_and,
    boolean_not,
    boolean_or,
    restrict_domain,
)

_SNAP = 1e-12          # distance within which H snaps to the exact bounds 0 / 1
_ZERO_BAND = 1e-12     # |H - p| below this counts as sitting exactly on the threshold
_TIME_TOL = 1e-9       # crossing location tolerance
_H_DRIFT = 1e-6        # hard bound on numerical drift of H outside [0, 1]


@dataclass
class MonitorConfig:
    """Knobs for :func:`monitor`.

    ``delta`` is the maximum integration step (default: window width / 1000,
    chosen per convolution node); ``oracle_grid`` the sampling pitch of the
    brute-force evaluator (default ``delta / 2``).
    """

    evaluator: str = "efficient"   # efficient | oracle | incremental
    delta: float | None = None
    oracle_grid: float | None = None

    def __post_init__(self) -> None:
        if self.evaluator not in ("efficient", "oracle", "incremental"):
            raise SclError(f"unknown evaluator {self.evaluator!r}")
        if self.delta is not None and self.delta <= 0:
            raise SclError("delta must be positive")
        if self.oracle_grid is not None and self.oracle_grid <= 0:
            raise SclError("oracle grid must be positive")


@dataclass(frozen=True)
class VerdictSignal:
    """Truth signal of a formula over its evaluable horizon.

    ``crossings`` are the times where the convolution value of the outermost
    windowed operator met its threshold (exact-equality plateau edges
    included); the verdict only flips there or at the domain bounds.
    ``stable_until`` bounds the prefix that cannot change when the trace is
    extended (see module docstring).
    """

    signal: BooleanSignal
    crossings: tuple[float, ...] = ()
    stable_until: float = math.inf

    @property
    def domain(self) -> tuple[float, float]:
        return self.signal.domain

    def value_at(self, t: float) -> bool:
        return self.signal.value_at(t)

    @property
    def satisfied_at_zero(self) -> bool:
        return self.signal.value_at(self.signal.start)


@dataclass(frozen=True)
class ConvEvaluation:
    """A verdict plus the H samples the evaluator actually computed."""

    verdict: VerdictSignal
    times: np.ndarray
    values: np.ndarray


def _snap01(h: float) -> float:
    if abs(h) <= _SNAP:
        return 0.0
    if abs(h - 1.0) <= _SNAP:
        return 1.0
    return h


def _snap01_array(h: np.ndarray) -> np.ndarray:
    h[np.abs(h) <= _SNAP] = 0.0
    h[np.abs(h - 1.0) <= _SNAP] = 1.0
    return h


def _theta(h: float, p: float) -> float:
    d = h - p
    return 0.0 if abs(d) <= _ZERO_BAND else d


def _verdict_span(kernel: BoundedKernel, sig: BooleanSignal) -> tuple[float, float]:
    t0 = sig.start
    t_end = sig.end - kernel.upper
    if t_end < t0 - 1e-12:
        raise HorizonError(
            f"signal domain [{sig.start}, {sig.end}] too short for window "
            f"[{kernel.lower}, {kernel.upper}]: needs {kernel.upper - (sig.end - sig.start):.6g} more"
        )
    return t0, max(t_end, t0)


class _TruthRuns:
    """Accumulates contiguous truth pieces and merges them into intervals."""

    def __init__(self, start: float):
        self._pos = start
        self._truth: bool | None = None
        self._run_start = start
        self._true_runs: list[tuple[float, float]] = []

    def push(self, end: float, truth: bool) -> None:
        if self._truth is None:
            self._truth = truth
            self._run_start = self._pos
        elif truth != self._truth:
            if self._truth:
                self._true_runs.append((self._run_start, self._pos))
            self._truth = truth
            self._run_start = self._pos
        self._pos = end

    def finish(self) -> list[tuple[float, float]]:
        if self._truth:
            self._true_runs.append((self._run_start, self._pos))
        return self._true_runs


def _point_verdict(kernel: BoundedKernel, p: float, sig: BooleanSignal,
                   t0: float) -> ConvEvaluation:
    h = _snap01(kernel.weighted_integral(sig, t0))
    truth = _theta(h, p) >= 0.0
    signal = BooleanSignal.from_intervals(t0, t0, [(t0, t0)] if truth else [])
    return ConvEvaluation(VerdictSignal(signal, (), t0), np.array([t0]), np.array([h]))


def eval_atom(trace: PiecewiseConstantSignal, atom: Atom) -> BooleanSignal:
    """Truth signal of a threshold comparison over ``[0, duration]``."""
    vals = trace.variable_values(atom.variable)
    if atom.op in (">=", ">"):
        mask = vals >= atom.threshold
    else:
        mask = vals <= atom.threshold
    bounds = trace.segment_bounds()
    intervals = [
        (bounds[i], bounds[i + 1])
        for i in range(len(bounds) - 1)
        if mask[i]
    ]
    return BooleanSignal.from_intervals(0.0, trace.duration, intervals)


def eval_conv_oracle(kernel: BoundedKernel, threshold: float, sig: BooleanSignal,
                     grid: float) -> ConvEvaluation:
    """Brute-force reference: H on a uniform grid, thresholded with linear
    interpolation of the crossing times."""
    if grid <= 0:
        raise SclError("oracle grid must be positive")
    t0, t_end = _verdict_span(kernel, sig)
    if t_end == t0:
        return _point_verdict(kernel, threshold, sig, t0)
    n = int(math.floor((t_end - t0) / grid))
    ts = t0 + grid * np.arange(n + 1)
    if ts[-1] < t_end - 1e-12 * max(1.0, abs(t_end)):
        ts = np.append(ts, t_end)
    else:
        ts[-1] = t_end
    # per-point evaluation (not the batched variant): each value is then
    # independent of how many out-of-reach intervals the signal carries,
    # which keeps prefixes of a growing trace bit-identical
    hs = _snap01_array(np.array([kernel.weighted_integral(sig, float(t)) for t in ts]))
    thetas = hs - threshold
    thetas[np.abs(thetas) <= _ZERO_BAND] = 0.0
    truths = thetas >= 0.0
    runs = _TruthRuns(t0)
    crossings: list[float] = []
    for i in range(len(ts) - 1):
        if truths[i + 1] != truths[i]:
            th0, th1 = thetas[i], thetas[i + 1]
            if th1 == th0:
                root = float(ts[i + 1])
            else:
                root = float(ts[i] + (ts[i + 1] - ts[i]) * (0.0 - th0) / (th1 - th0))
            root = min(max(root, float(ts[i])), float(ts[i + 1]))
            crossings.append(root)
            runs.push(root, bool(truths[i]))
            runs.push(float(ts[i + 1]), bool(truths[i + 1]))
        else:
            runs.push(float(ts[i + 1]), bool(truths[i]))
    signal = BooleanSignal.from_intervals(t0, t_end, runs.finish())
    # the final grid cell ends at the trace-dependent t_end, so crossings
    # interpolated inside it may move when the trace is extended
    stable = float(ts[-2]) if len(ts) >= 2 else t0
    verdict = VerdictSignal(signal, tuple(crossings), stable)
    return ConvEvaluation(verdict, ts, hs)


def _locate_root(phi_theta: Callable[[float], float], x_lo: float, x_hi: float,
                 th_lo: float, th_hi: float, linear: bool) -> float:
    """One sign change of theta inside [x_lo, x_hi]; returns the root."""
    if linear and th_hi != th_lo:
        root = x_lo + (x_hi - x_lo) * (0.0 - th_lo) / (th_hi - th_lo)
        return min(max(root, x_lo), x_hi)
    lo_truth = th_lo >= 0.0
    while x_hi - x_lo > _TIME_TOL:
        xm = 0.5 * (x_lo + x_hi)
        if (phi_theta(xm) >= 0.0) == lo_truth:
            x_lo = xm
        else:
            x_hi = xm
    return 0.5 * (x_lo + x_hi)


def _sub_crossings(phi: Callable[[float], float], p: float, x_lo: float, x_hi: float,
                   th_lo: float, th_hi: float, linear: bool) -> list[float]:
    """Threshold-touch points within one substep, by subdivision + root finding."""
    xs = [x_lo, x_lo + 0.25 * (x_hi - x_lo), 0.5 * (x_lo + x_hi),
          x_lo + 0.75 * (x_hi - x_lo), x_hi]
    ths = [th_lo] + [_theta(phi(x), p) for x in xs[1:-1]] + [th_hi]
    roots: list[float] = []
    for i in range(4):
        a, b = ths[i], ths[i + 1]
        if (a >= 0.0) != (b >= 0.0) or (a == 0.0) != (b == 0.0):
            roots.append(
                _locate_root(lambda x: _theta(phi(x), p), xs[i], xs[i + 1], a, b, linear)
            )
    return roots


def _integrate_conv(kernel: BoundedKernel, p: float, sig: BooleanSignal,
                    max_step: float, make_stretch: Callable,
                    re_anchor: Callable | None = None,
                    max_stretch: float = math.inf) -> ConvEvaluation:
    """Event-aligned driver shared by the efficient and incremental schemes.

    ``make_stretch(t, stretch_end, h_now)`` must return ``(phi_vec, phi,
    bound_rate)``: the exact H at ``t + x`` for a vector / scalar of offsets
    ``x`` within the stretch, and a bound on ``|dH/dx|`` there.
    """
    if max_step <= 0:
        raise SclError("integration step must be positive")
    t0, t_end = _verdict_span(kernel, sig)
    if t_end == t0:
        return _point_verdict(kernel, p, sig, t0)

    edges = np.concatenate([sig.starts_array, sig.ends_array])
    events = np.concatenate([edges - kernel.lower, edges - kernel.upper])
    events = np.unique(events[(events > t0 + 1e-15) & (events < t_end - 1e-15)])

    h_now = _snap01(kernel.weighted_integral(sig, t0))
    times_parts = [np.array([t0])]
    values_parts = [np.array([h_now])]
    runs = _TruthRuns(t0)
    crossings: list[float] = []
    linear = isinstance(kernel, FlatKernel)
    stable_until = t_end

    t = t0
    ev_idx = 0
    while t < t_end:
        next_event = float(events[ev_idx]) if ev_idx < len(events) else math.inf
        stretch_end = min(next_event, t + max_stretch, t_end)
        if stretch_end == next_event:
            ev_idx += 1
        span = stretch_end - t
        if span <= 0:
            t = stretch_end
            continue
        n_sub = max(1, math.ceil(span / max_step - 1e-12))
        xs = max_step * np.arange(1.0, n_sub + 1.0)
        np.minimum(xs, span, out=xs)
        xs[-1] = span

        phi_vec, phi, bound_rate = make_stretch(t, stretch_end, h_now)
        hs = phi_vec(xs)
        if hs.min() < -_H_DRIFT or hs.max() > 1.0 + _H_DRIFT:
            raise SclError("convolution value drifted out of [0, 1]")

        xs_list = xs.tolist()
        hs_list = hs.tolist()
        th_prev = _theta(h_now, p)
        x_prev = 0.0
        delicate = abs(th_prev) <= 1e-11
        for j in range(n_sub):
            x_j = xs_list[j]
            sub_w = x_j - x_prev
            if sub_w <= 0.0:
                continue
            th_j = _theta(hs_list[j], p)
            flip = (th_prev >= 0.0) != (th_j >= 0.0)
            risky = flip or abs(th_prev) <= max(bound_rate * sub_w, 1e-11)
            delicate = delicate or risky or abs(th_j) <= 1e-11
            if risky:
                roots = _sub_crossings(phi, p, x_prev, x_j, th_prev, th_j, linear)
                if roots:
                    bounds = [x_prev] + roots + [x_j]
                    for i in range(len(bounds) - 1):
                        if bounds[i + 1] <= bounds[i]:
                            continue
                        xm = 0.5 * (bounds[i] + bounds[i + 1])
                        runs.push(t + bounds[i + 1], _theta(phi(xm), p) >= 0.0)
                    for r in roots:
                        rt = t + r
                        if not crossings or abs(rt - crossings[-1]) > _ZERO_BAND:
                            crossings.append(rt)
                else:
                    rep = th_prev if th_prev != 0.0 else th_j
                    runs.push(t + x_j, rep >= 0.0)
            else:
                runs.push(t + x_j, th_prev >= 0.0)
            x_prev = x_j
            th_prev = th_j

        if stretch_end == t_end and delicate:
            # this stretch's windows reach the trace end, so extending the
            # trace can perturb its H values at rounding level; anything
            # threshold-delicate here is not final yet
            stable_until = min(stable_until, t)

        times_parts.append(t + xs)
        values_parts.append(hs)
        h_last = hs_list[-1]
        if re_anchor is not None:
            h_last = re_anchor(stretch_end, h_last)
        h_now = h_last
        t = stretch_end

    signal = BooleanSignal.from_intervals(t0, t_end, runs.finish())
    verdict = VerdictSignal(signal, tuple(crossings), stable_until)
    return ConvEvaluation(verdict, np.concatenate(times_parts),
                          np.concatenate(values_parts))


def eval_conv_efficient(kernel: BoundedKernel, threshold: float, sig: BooleanSignal,
                        max_step: float | None = None) -> ConvEvaluation:
    """Sliding-window evaluator: event-aligned stretches, exact edge flux."""
    if max_step is None:
        max_step = kernel.width / 1000.0
    starts = sig.starts_array
    ends = sig.ends_array
    n = len(starts)
    ptr = {"lo": 0, "hi": -1}
    k_lo, k_hi = kernel.lower, kernel.upper
    sup_k = kernel.sup_density()

    def make_stretch(t: float, stretch_end: float, h_now: float):
        while ptr["lo"] < n and ends[ptr["lo"]] < t + k_lo:
            ptr["lo"] += 1
        while ptr["hi"] + 1 < n and starts[ptr["hi"] + 1] <= stretch_end + k_hi:
            ptr["hi"] += 1
        lo, hi = ptr["lo"], ptr["hi"]
        s_loc = starts[lo:hi + 1] - t
        e_loc = ends[lo:hi + 1] - t
        s_clip = np.clip(s_loc, k_lo, k_hi)
        e_clip = np.clip(e_loc, k_lo, k_hi)
        m = hi - lo + 1

        def phi_vec(xs: np.ndarray) -> np.ndarray:
            a_s = np.clip(s_loc[:, None] - xs[None, :], k_lo, k_hi)
            a_e = np.clip(e_loc[:, None] - xs[None, :], k_lo, k_hi)
            gained = kernel.mass_clipped(a_s, s_clip[:, None]).sum(axis=0)
            lost = kernel.mass_clipped(a_e, e_clip[:, None]).sum(axis=0)
            return _snap01_array(h_now + gained - lost)

        def phi(x: float) -> float:
            a_s = np.clip(s_loc - x, k_lo, k_hi)
            a_e = np.clip(e_loc - x, k_lo, k_hi)
            gained = float(np.sum(kernel.mass_clipped(a_s, s_clip)))
            lost = float(np.sum(kernel.mass_clipped(a_e, e_clip)))
            return _snap01(h_now + gained - lost)

        return phi_vec, phi, 2.0 * max(m, 1) * sup_k

    return _integrate_conv(kernel, threshold, sig, max_step, make_stretch)


def eval_conv_incremental(kernel: BoundedKernel, threshold: float, sig: BooleanSignal,
                          max_step: float | None = None) -> ConvEvaluation:
    """Sliding update reusing H(t): constant work per substep for flat and
    exponential kernels (the shapes with a semigroup structure)."""
    if not isinstance(kernel, (FlatKernel, ExponentialKernel)):
        raise SclError(
            f"incremental evaluation supports flat and exponential kernels, "
            f"not {type(kernel).__name__}"
        )
    if max_step is None:
        max_step = kernel.width / 1000.0
    k_lo, k_hi = kernel.lower, kernel.upper
    sup_k = kernel.sup_density()

    def truth_mid(a: float, b: float) -> bool:
        return sig.value_at(min(max(0.5 * (a + b), sig.start), sig.end))

    if isinstance(kernel, FlatKernel):
        k0 = 1.0 / kernel.width

        def make_stretch(t: float, stretch_end: float, h_now: float):
            chi_left = truth_mid(t + k_lo, stretch_end + k_lo)
            chi_right = truth_mid(t + k_hi, stretch_end + k_hi)
            slope = k0 * (float(chi_right) - float(chi_left))

            def phi_vec(xs: np.ndarray) -> np.ndarray:
                return _snap01_array(h_now + slope * xs)

            def phi(x: float) -> float:
                return _snap01(h_now + slope * x)

            return phi_vec, phi, abs(slope)

        return _integrate_conv(kernel, threshold, sig, max_step, make_stretch)

    # Exponential kernel: semigroup rescale plus edge-strip masses.  Strip
    # integrals use the kernel in the original window coordinates, analytically
    # continued past the upper bound for the entering strip; stretches are
    # capped so the continuation stays well-scaled.
    rate = kernel.rate
    anchor = {"t": None}

    def make_stretch(t: float, stretch_end: float, h_now: float):
        span = stretch_end - t
        chi_left = truth_mid(t + k_lo, stretch_end + k_lo)
        chi_right = truth_mid(t + k_hi, stretch_end + k_hi)

        def phi_vec(xs: np.ndarray) -> np.ndarray:
            left = kernel.mass_clipped(k_lo, k_lo + xs) if chi_left else 0.0
            right = kernel.mass_clipped(k_hi, k_hi + xs) if chi_right else 0.0
            return _snap01_array(np.exp(-rate * xs) * (h_now - left + right))

        def phi(x: float) -> float:
            left = float(kernel.mass_clipped(k_lo, k_lo + x)) if chi_left else 0.0
            right = float(kernel.mass_clipped(k_hi, k_hi + x)) if chi_right else 0.0
            return _snap01(math.exp(-rate * x) * (h_now - left + right))

        amp = math.exp(abs(rate) * span)
        bound_rate = abs(rate) * amp * max(abs(h_now), 1.0) + 2.0 * sup_k * amp
        return phi_vec, phi, bound_rate

    def re_anchor(t_next: float, h_next: float) -> float:
        # Backward-leaning kernels amplify drift through exp(-rate*h) > 1;
        # refresh H from scratch before the amplification wipes precision.
        if anchor["t"] is None:
            anchor["t"] = t_next
            return h_next
        if abs(rate) * (t_next - anchor["t"]) > 7.0:  # amplification > ~1e3
            anchor["t"] = t_next
            return _snap01(kernel.weighted_integral(sig, t_next))
        return h_next

    return _integrate_conv(kernel, threshold, sig, max_step, make_stretch,
                           re_anchor=re_anchor if rate < 0 else None,
                           max_stretch=5.0 / abs(rate))


def _conv_dispatch(kernel: BoundedKernel, threshold: float, sig: BooleanSignal,
                   config: MonitorConfig) -> ConvEvaluation:
    delta = config.delta if config.delta is not None else kernel.width / 1000.0
    if config.evaluator == "oracle":
        grid = config.oracle_grid if config.oracle_grid is not None else delta / 2.0
        return eval_conv_oracle(kernel, threshold, sig, grid)
    if config.evaluator == "incremental" and isinstance(kernel, (FlatKernel, ExponentialKernel)):
        return eval_conv_incremental(kernel, threshold, sig, delta)
    return eval_conv_efficient(kernel, threshold, sig, delta)


def _align(a: BooleanSignal, b: BooleanSignal) -> tuple[BooleanSignal, BooleanSignal]:
    end = min(a.end, b.end)
    if a.end != end:
        a = restrict_domain(a, (a.start, end))
    if b.end != end:
        b = restrict_domain(b, (b.start, end))
    return a, b


def _eval_node(trace: PiecewiseConstantSignal, f: Formula, config: MonitorConfig,
               ) -> tuple[BooleanSignal, tuple[float, ...], float]:
    match f:
        case Const(value):
            full = BooleanSignal.always if value else BooleanSignal.never
            return full(0.0, trace.duration), (), math.inf
        case Atom():
            return eval_atom(trace, f), (), math.inf
        case Not(child):
            sig, _, stable = _eval_node(trace, child, config)
            return boolean_not(sig), (), stable
        case Or(left, right) | And(left, right) | Implies(left, right):
            a, _, stable_a = _eval_node(trace, left, config)
            b, _, stable_b = _eval_node(trace, right, config)
            a, b = _align(a, b)
            stable = min(stable_a, stable_b)
            if isinstance(f, Or):
                return boolean_or(a, b), (), stable
            if isinstance(f, And):
                return boolean_and(a, b), (), stable
            return boolean_or(boolean_not(a), b), (), stable
        case Conv(kernel, threshold, child):
            sig, _, child_stable = _eval_node(trace, child, config)
            ev = _conv_dispatch(kernel, threshold, sig, config)
            stable = min(ev.verdict.stable_until, child_stable - kernel.upper)
            return ev.verdict.signal, ev.verdict.crossings, stable
        case ConvDual(kernel, threshold, child):
            sig, _, child_stable = _eval_node(trace, child, config)
            ev = _conv_dispatch(kernel, 1.0 - threshold, boolean_not(sig), config)
            stable = min(ev.verdict.stable_until, child_stable - kernel.upper)
            return boolean_not(ev.verdict.signal), ev.verdict.crossings, stable
    raise SclError(f"not a formula: {f!r}")


def monitor(trace: PiecewiseConstantSignal, f: Formula,
            config: MonitorConfig | None = None) -> VerdictSignal:
    """Truth signal of ``f`` over ``[0, duration - horizon(f)]``.

    The formula is satisfied by the trace iff the verdict holds at time 0.
    """
    config = config or MonitorConfig()
    needed = horizon(f)
    if needed > trace.duration + 1e-12:
        raise HorizonError(
            f"formula horizon {needed:.6g} exceeds trace duration "
            f"{trace.duration:.6g} by {needed - trace.duration:.6g}"
        )
    signal, crossings, stable = _eval_node(trace, f, config)
    return VerdictSignal(signal, crossings, min(stable, signal.end))
