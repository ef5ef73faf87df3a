"""Quantitative semantics: value checks against enumeration oracles,
soundness and perturbation-stability properties."""

import math

import numpy as np
import pytest

from sclmon import (
    Atom,
    Conv,
    ConvDual,
    FlatKernel,
    HorizonError,
    Not,
    Or,
    PiecewiseConstantSignal,
    RhoConfig,
    SclError,
    eventually,
    globally,
    monitor,
    parse,
    rho,
    rho_trace,
)
from conftest import random_kernel, random_trace, rho_conv_enumeration

TOL = 1e-6


def constant_trace(value, duration, variable="v"):
    return PiecewiseConstantSignal(
        (variable,), np.array([0.0]), np.array([[value]]), duration)


class TestRhoValues:
    def test_constant_trace_distance_to_threshold(self):
        rng = np.random.default_rng(7)
        for _ in range(20):
            c = float(rng.uniform(-3, 3))
            p = float(rng.uniform(0.05, 1.0))
            k = random_kernel(rng, 0.0, float(rng.uniform(0.5, 2)))
            trace = constant_trace(c, k.upper + 1.0)
            f = Conv(k, p, Atom("v", ">=", 0.0))
            assert rho(trace, f, 0.0) == pytest.approx(c, abs=TOL)

    def test_negation_flips_sign(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            trace = random_trace(rng, 4.0, 10)
            f = Conv(FlatKernel(0, 1), 0.4, Atom("v", ">", 0.0))
            assert rho(trace, Not(f), 0.0) == pytest.approx(-rho(trace, f, 0.0), abs=1e-12)

    def test_two_level_trace_supremum(self):
        # two-level inner robustness: coverage drops 1.0 -> 0.3 at level 0.2
        # and 0.3 -> 0 at level 1.0, so the 0.3 threshold holds up to 1.0
        trace = PiecewiseConstantSignal(
            ("v",), np.array([0.0, 0.9]), np.array([[1.0], [0.2]]), 3.0)
        f = Conv(FlatKernel(0.0, 3.0), 0.3, Atom("v", ">", 0.0))
        assert rho(trace, f, 0.0) == pytest.approx(1.0, abs=TOL)

    def test_atoms_and_connectives(self):
        trace = PiecewiseConstantSignal(
            ("v", "w"), np.array([0.0]), np.array([[3.0, -1.0]]), 1.0)
        assert rho(trace, Atom("v", ">=", 1.0), 0.0) == 2.0
        assert rho(trace, Atom("v", "<=", 1.0), 0.0) == -2.0
        assert rho(trace, Or(Atom("v", ">=", 1.0), Atom("w", ">=", 0.0)), 0.0) == 2.0
        assert rho(trace, parse("true"), 0.0) == math.inf
        assert rho(trace, parse("false"), 0.0) == -math.inf

    def test_matches_enumeration_oracle(self):
        rng = np.random.default_rng(13)
        for _ in range(40):
            trace = random_trace(rng, 5.0, 8)
            k = random_kernel(rng, 0.0, float(rng.uniform(0.5, 3)))
            p = float(rng.uniform(0.05, 0.95))
            f = Conv(k, p, Atom("v", ">", 0.0))
            t = float(rng.uniform(0, 5.0 - k.upper))
            got = rho(trace, f, t)
            bounds = np.append(trace.times, trace.duration)
            expected = rho_conv_enumeration(k, p, bounds, trace.values[:, 0], t)
            if math.isfinite(expected):
                assert got == pytest.approx(expected, abs=1e-4)
            else:
                assert got == expected

    def test_dual_equals_complement_chain(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            trace = random_trace(rng, 4.0, 10)
            k = random_kernel(rng, 0.0, 1.0)
            p = float(rng.uniform(0.1, 0.9))
            a = Atom("v", ">", 0.0)
            lhs = rho(trace, ConvDual(k, p, a), 0.0)
            rhs = rho(trace, Not(Conv(k, 1.0 - p, Not(a))), 0.0)
            assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_windowed_always_is_infimum(self):
        rng = np.random.default_rng(19)
        for _ in range(25):
            trace = random_trace(rng, 4.0, 12)
            lo, hi = 0.0, float(rng.uniform(0.5, 2.0))
            t = float(rng.uniform(0, 4.0 - hi))
            f = globally(lo, hi, Atom("v", ">", 0.0))
            got = rho(trace, f, t)
            # direct min-over-window of the signed distance
            bounds = np.append(trace.times, trace.duration)
            xs = np.linspace(t + lo, t + hi, 4001)
            idx = np.clip(np.searchsorted(bounds, xs, side="right") - 1, 0,
                          len(trace.values) - 1)
            expected = float(np.min(trace.values[idx, 0]))
            assert got == pytest.approx(expected, abs=max(TOL, 1e-3))

    def test_windowed_sometime_is_supremum(self):
        rng = np.random.default_rng(23)
        for _ in range(25):
            trace = random_trace(rng, 4.0, 12)
            hi = float(rng.uniform(0.5, 2.0))
            t = float(rng.uniform(0, 4.0 - hi))
            f = eventually(0.0, hi, Atom("v", ">", 0.0))
            bounds = np.append(trace.times, trace.duration)
            xs = np.linspace(t, t + hi, 4001)
            idx = np.clip(np.searchsorted(bounds, xs, side="right") - 1, 0,
                          len(trace.values) - 1)
            expected = float(np.max(trace.values[idx, 0]))
            assert rho(trace, f, t) == pytest.approx(expected, abs=max(TOL, 1e-3))

    def test_outside_horizon_rejected(self):
        trace = constant_trace(1.0, 2.0)
        with pytest.raises(HorizonError):
            rho(trace, globally(0, 1, Atom("v", ">", 0)), 1.5)

    def test_nested_coverage_robustness(self):
        # windowed-always over a coverage node: rho is the minimum of the
        # inner robustness over the outer window, up to the sampling pitch
        rng = np.random.default_rng(53)
        cfg = RhoConfig(time_grid=0.01)
        for _ in range(10):
            trace = random_trace(rng, 4.0, 10)
            inner = Conv(FlatKernel(0.0, 1.0), 0.5, Atom("v", ">", 0.0))
            nested = globally(0.0, 1.0, inner)
            got = rho(trace, nested, 0.0, cfg)
            taus = np.arange(0.0, 1.0 + 1e-12, 0.05)
            expected = min(rho(trace, inner, float(tau), cfg) for tau in taus)
            assert got == pytest.approx(expected, abs=5e-2)

    def test_nested_multivariable_implication(self):
        # pump interlock shape: low glucose coverage forces pump-off coverage
        times = np.arange(0.0, 30.5, 0.5)
        g = np.where((times >= 10.0) & (times < 12.0), 60.0, 110.0)
        i = np.where((times >= 10.0) & (times < 12.5), 0.0, 1.5)
        trace = PiecewiseConstantSignal(
            ("G", "I"), times, np.column_stack([g, i]), 30.0)
        f = parse("G[0,20] (<flat[0,1], 0.9> (G <= 70) -> <flat[0,1], 0.9> (I <= 0.2))")
        assert monitor(trace, f).satisfied_at_zero
        r = rho(trace, f, 0.0)
        assert r == pytest.approx(0.2, abs=1e-4)
        # break the interlock: pump restarts while glucose is still low
        i_bad = np.where((times >= 10.0) & (times < 10.8), 0.0, 1.5)
        bad = PiecewiseConstantSignal(
            ("G", "I"), times, np.column_stack([g, i_bad]), 30.0)
        assert not monitor(bad, f).satisfied_at_zero
        assert rho(bad, f, 0.0) < 0


class TestRhoTrace:
    def test_constant_trace_constant_rho(self):
        trace = constant_trace(2.5, 3.0)
        rt = rho_trace(trace, Conv(FlatKernel(0, 1), 0.5, Atom("v", ">=", 0.0)),
                       RhoConfig(time_grid=0.25))
        assert np.allclose(rt.values, 2.5, atol=TOL)
        assert rt.times[0] == 0.0 and rt.times[-1] == pytest.approx(2.0)

    def test_sign_agrees_with_boolean_verdict(self):
        rng = np.random.default_rng(29)
        for _ in range(30):
            trace = random_trace(rng, 4.0, 10)
            k = random_kernel(rng, 0.0, 1.0)
            f = Conv(k, float(rng.uniform(0.1, 0.9)), Atom("v", ">", 0.0))
            rt = rho_trace(trace, f, RhoConfig(time_grid=0.2))
            verdict = monitor(trace, f).signal
            for t, r in zip(rt.times, rt.values):
                if r > TOL:
                    assert verdict.value_at(float(t))
                elif r < -TOL:
                    assert not verdict.value_at(float(t))

    def test_time_shift_consistency(self):
        rng = np.random.default_rng(31)
        shift = 0.75
        trace = random_trace(rng, 4.0, 10)
        shifted = PiecewiseConstantSignal(
            ("v",),
            np.concatenate([[0.0], trace.times + shift]),
            np.vstack([trace.values[:1], trace.values]),
            trace.duration + shift,
        )
        f = Conv(FlatKernel(0, 1), 0.4, Atom("v", ">", 0.0))
        cfg = RhoConfig(time_grid=0.5)
        base = rho_trace(trace, f, cfg)
        for t, r in zip(base.times, base.values):
            assert rho(shifted, f, float(t) + shift, cfg) == pytest.approx(r, abs=2 * TOL)


class TestSoundnessAndCorrectness:
    def _random_formula(self, rng, trace_duration):
        k = random_kernel(rng, 0.0, float(rng.uniform(0.4, min(2.0, trace_duration))))
        p = float(rng.uniform(0.05, 0.95))
        atom = Atom("v", str(rng.choice([">=", "<=", ">", "<"])),
                    float(rng.uniform(-1, 1)))
        f = (Conv if rng.random() < 0.7 else ConvDual)(k, p, atom)
        if rng.random() < 0.3:
            f = Not(f)
        return f

    def test_soundness_on_random_instances(self):
        rng = np.random.default_rng(37)
        checked = 0
        for _ in range(250):
            trace = random_trace(rng, 4.0, 10)
            f = self._random_formula(rng, 4.0)
            r = rho(trace, f, 0.0)
            sat = monitor(trace, f).satisfied_at_zero
            if r > TOL:
                assert sat, f"rho={r} but verdict false for {f}"
                checked += 1
            elif r < -TOL:
                assert not sat, f"rho={r} but verdict true for {f}"
                checked += 1
        assert checked > 150

    def test_uniform_shift_below_rho_preserves_verdict(self):
        rng = np.random.default_rng(41)
        for _ in range(120):
            trace = random_trace(rng, 4.0, 10)
            f = self._random_formula(rng, 4.0)
            r = rho(trace, f, 0.0)
            if not math.isfinite(r) or abs(r) < 1e-3:
                continue
            sat = monitor(trace, f).satisfied_at_zero
            amp = abs(r) * float(rng.uniform(0.2, 0.9))
            for sign in (1.0, -1.0):
                shifted = PiecewiseConstantSignal(
                    ("v",), trace.times, trace.values + sign * amp, trace.duration)
                assert monitor(shifted, f).satisfied_at_zero == sat

    def test_adversarial_shift_beyond_rho_flips_threshold_formulas(self):
        rng = np.random.default_rng(43)
        flipped = 0
        for _ in range(60):
            trace = random_trace(rng, 4.0, 10)
            f = self._random_formula(rng, 4.0)
            r = rho(trace, f, 0.0)
            if not math.isfinite(r) or abs(r) < 1e-3:
                continue
            sat = monitor(trace, f).satisfied_at_zero
            amp = abs(r) + max(10 * TOL, 1e-4)
            outcomes = []
            for sign in (1.0, -1.0):
                shifted = PiecewiseConstantSignal(
                    ("v",), trace.times, trace.values + sign * amp, trace.duration)
                outcomes.append(monitor(shifted, f).satisfied_at_zero)
            assert any(o != sat for o in outcomes), \
                f"no flip at amplitude {amp} beyond rho {r} for {f}"
            flipped += 1
        assert flipped > 30

    def test_coverage_monotonicity_guard_is_active(self):
        # the bracketing asserts nonincreasing coverage; exercised on a case
        # with many distinct levels
        rng = np.random.default_rng(47)
        trace = random_trace(rng, 6.0, 40)
        f = Conv(FlatKernel(0, 2), 0.5, Atom("v", ">", 0.0))
        value = rho(trace, f, 0.0)
        assert math.isfinite(value)


class TestConfigValidation:
    def test_bad_tolerance(self):
        with pytest.raises(SclError):
            RhoConfig(tolerance=0.0)

    def test_bad_grid(self):
        with pytest.raises(SclError):
            RhoConfig(time_grid=-1.0)
