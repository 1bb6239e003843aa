import numpy as np
import pytest
from scipy.optimize import fsolve

from rydgate.dynamics import propagate
from rydgate.errors import ConfigError
from rydgate.fidelity import (bell_fidelity, evaluate, sweep, rydberg_time,
                              wrap_cphase, write_sweep_csv)
from rydgate.pulses import GateConfig, Pulse

from test_dynamics import config_for, random_pulse


def brute_force_f(a00, a01, a10, a11, n=1_000_000):
    th = np.linspace(-np.pi, np.pi, n, endpoint=False)
    vals = np.abs(a00 + np.exp(1j * th) * (a01 + a10)
                  - np.exp(2j * th) * a11) ** 2 / 16
    return vals.max()


class TestBellFidelity:
    def test_exact_cz(self):
        f, theta = bell_fidelity(1, 1, 1, -1)
        assert f == pytest.approx(1.0, abs=1e-12)
        assert theta == pytest.approx(0.0, abs=1e-9)

    def test_identity_gate(self):
        f, theta = bell_fidelity(1, 1, 1, 1)
        assert f == pytest.approx(0.5, abs=1e-12)
        assert abs(abs(theta) - np.pi / 2) < 1e-9

    def test_uniform_damping(self):
        for g in (0.9, 0.5, 0.1):
            f, _ = bell_fidelity(g, g, g, -g)
            assert f == pytest.approx(g * g, abs=1e-12)

    def test_global_phase_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            amps = rng.normal(size=4) + 1j * rng.normal(size=4)
            amps /= max(np.abs(amps))
            f1, _ = bell_fidelity(*amps)
            phase = np.exp(1j * rng.uniform(-np.pi, np.pi))
            f2, _ = bell_fidelity(*(phase * amps))
            assert abs(f1 - f2) < 1e-12

    def test_matches_brute_force(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            amps = rng.normal(size=4) + 1j * rng.normal(size=4)
            amps /= 2 * max(np.abs(amps))
            f, _ = bell_fidelity(*amps)
            assert abs(f - brute_force_f(*amps)) < 1e-9


class TestWrap:
    def test_wrap_range(self):
        assert wrap_cphase(2.5 * np.pi) == pytest.approx(0.5 * np.pi)
        assert wrap_cphase(-2.5 * np.pi) == pytest.approx(-0.5 * np.pi)
        assert wrap_cphase(np.pi) == pytest.approx(np.pi)


def solve_lp_style_pulse(v_int):
    """Two detuned square segments with a detuning kick between them, tuned
    so both sectors return with the CZ phase condition.

    Serves as an analytic-construction oracle: a pulse satisfying the phase
    equation with unit populations, independent of the optimizer.  The free
    parameters (Rabi amplitude, detuning, kick area) are all continuous so a
    root finder can drive the residuals to machine precision.
    """
    dt = 0.01
    n_half = 480
    kick_steps = 5

    def build(params):
        amp, d, xi = params
        amp = min(max(amp, 0.0), 1.0)
        omega = np.concatenate([np.full(n_half, amp), np.zeros(kick_steps),
                                np.full(n_half, amp)])
        kick = xi / (kick_steps * dt)
        delta = np.concatenate([np.full(n_half, d), np.full(kick_steps, kick),
                                np.full(n_half, d)])
        return Pulse(omega.size, dt, omega, delta)

    def residual(params):
        pulse = build(params)
        rec = propagate(pulse, config_for(v_int))
        phi = rec.phi11 - 2 * rec.phi01
        dphi = (phi - np.pi) - 2 * np.pi * np.round((phi - np.pi) / (2 * np.pi))
        return [1.0 - abs(rec.a01) ** 2, 1.0 - abs(rec.a11) ** 2, dphi]

    # seeded near the known two-pulse working point (pulse area ~ 4.3 per
    # segment at detuning ~ 0.38 Omega)
    sol = fsolve(residual, x0=np.array([0.90, 0.34, 3.50]), xtol=1e-13)
    res = residual(sol)
    assert max(abs(r) for r in res) < 1e-9, res
    return build(sol)


class TestEvaluate:
    def test_zero_pulse(self):
        p = Pulse(10, 0.1, np.zeros(10), np.zeros(10))
        rep = evaluate(p, config_for(10.0))
        assert rep.f == pytest.approx(0.5, abs=1e-12)
        assert rep.p_tot == pytest.approx(4.0, abs=1e-12)
        assert rep.t_bar_r == 0.0

    def test_perfect_blockade_cz_construction(self):
        # At a perfect-blockade surrogate, a pulse satisfying the phase
        # condition with full population return scores F >= 1 - 1e-8.
        pulse = solve_lp_style_pulse(v_int=1e4)
        rep = evaluate(pulse, config_for(1e4))
        assert rep.f >= 1.0 - 1e-8
        assert abs(rep.p_tot - 4.0) < 1e-8
        assert abs(abs(rep.phi) - np.pi) < 1e-7

    def test_rydberg_time_from_trajectory(self):
        rng = np.random.default_rng(2)
        p = random_pulse(rng)
        rec = propagate(p, config_for(8.0))
        assert rydberg_time(rec) == pytest.approx(
            (2 * rec.t_r_01 + rec.t_r_11) / 3)

    def test_decay_reduces_f(self):
        pulse = solve_lp_style_pulse(v_int=1e4)
        clean = evaluate(pulse, config_for(1e4)).f
        lossy = evaluate(pulse, config_for(1e4, gamma_dimensionless=1e-3)).f
        assert lossy < clean


class TestSweep:
    def test_single_cell_matches_evaluate(self):
        rng = np.random.default_rng(3)
        p = random_pulse(rng, n_steps=30)
        cfg = config_for(9.0, 0.01)
        grid = sweep(p, cfg, [0.0], [0.0])
        assert grid.values.shape == (1, 1)
        assert grid.values[0, 0] == evaluate(p, cfg).f

    def test_time_reversal_symmetry(self):
        rng = np.random.default_rng(4)
        p = random_pulse(rng, n_steps=40)
        rev = Pulse(p.n_steps, p.dt, p.omega[::-1], p.delta[::-1])
        cfg = config_for(11.0, 0.02)
        axis_om = np.linspace(-0.05, 0.05, 5)
        axis_de = np.linspace(-0.02, 0.02, 3)
        g1 = sweep(p, cfg, axis_om, axis_de)
        g2 = sweep(rev, cfg, axis_om, axis_de)
        assert np.max(np.abs(g1.values - g2.values)) < 1e-10

    def test_axis_validation(self):
        p = Pulse(4, 0.1, np.zeros(4), np.zeros(4))
        with pytest.raises(ConfigError):
            sweep(p, config_for(5.0), [0.0, 0.0], [0.0])

    def test_csv_format(self, tmp_path):
        p = Pulse(4, 0.1, np.zeros(4), np.zeros(4))
        grid = sweep(p, config_for(5.0), [-0.01, 0.01], [0.0])
        path = tmp_path / "grid.csv"
        write_sweep_csv(grid, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "domega/ddelta,0"
        assert len(lines) == 3
        assert lines[1].split(",")[0] == "-0.01"
