import numpy as np
import pytest

from rydgate.errors import (PulseBoundError, PulseFormatError,
                            PulseVersionError)
from rydgate.pulses import (GateConfig, Pulse, controls_of,
                            default_sr61_config, integrate_controls,
                            load_pulse, resample, save_pulse, write_pulse_csv)


def triangle_derivs(n, c):
    half = n // 2
    return np.array([[c, 0.0]] * half + [[-c, 0.0]] * half)


class TestIntegrateControls:
    def test_zero_derivatives_identity(self):
        p = integrate_controls(np.zeros((10, 2)), dt=0.1)
        assert p.n_steps == 11
        assert np.all(p.omega == 0.0)
        assert np.all(p.delta == 0.0)

    def test_triangle_peak(self):
        n, c, dt = 100, 0.15, 0.1
        p = integrate_controls(triangle_derivs(n, c), dt=dt)
        assert p.omega[n // 2] == pytest.approx(c * n * dt / 2, rel=1e-12)
        assert p.omega[-1] == pytest.approx(0.0, abs=1e-12)

    def test_bound_violation_names_step(self):
        derivs = np.array([[0.5, 0.0]] * 30)  # omega reaches 1.2 at step 24
        with pytest.raises(PulseBoundError) as err:
            integrate_controls(derivs, dt=0.1)
        assert err.value.step == 21  # 21 * 0.05 = 1.05 > 1

    def test_delta_bound_checked_when_given(self):
        derivs = np.array([[0.0, 1.0]] * 10)
        with pytest.raises(PulseBoundError):
            integrate_controls(derivs, dt=0.5, delta_bound=2.0)
        integrate_controls(derivs, dt=0.1, delta_bound=2.0)

    def test_exactly_invertible(self):
        rng = np.random.default_rng(3)
        derivs = rng.uniform(-0.4, 0.4, size=(50, 2))
        derivs[:, 0] = np.abs(derivs[:, 0]) * 0.02  # keep omega in range
        p = integrate_controls(derivs, dt=0.07, initial=(0.0, -0.3))
        rec, init = controls_of(p)
        assert init == (0.0, -0.3)
        assert np.allclose(rec, derivs, rtol=1e-12, atol=1e-12)


class TestResample:
    def test_constant_pulse(self):
        p = Pulse(5, 0.2, [0.4] * 5, [-0.1] * 5)
        q = resample(p, 17)
        assert np.all(q.omega == 0.4)
        assert np.all(q.delta == -0.1)
        assert q.duration == pytest.approx(p.duration, rel=1e-15)

    def test_triangle_preserves_peak_at_4x(self):
        p = integrate_controls(triangle_derivs(100, 0.15), dt=0.1)
        q = resample(p, 4 * p.n_steps)
        assert abs(q.omega.max() - p.omega.max()) < 1e-12

    def test_identity_resample(self):
        p = Pulse(2, 0.5, [0.1, 0.2], [0.0, 0.3])
        q = resample(p, 2)
        assert np.array_equal(q.omega, p.omega)
        assert np.array_equal(q.delta, p.delta)

    def test_down_up_roundtrip(self):
        p = integrate_controls(triangle_derivs(40, 0.2), dt=0.2)
        q = resample(resample(p, 4 * p.n_steps), p.n_steps)
        assert np.allclose(q.omega, p.omega, atol=1e-12)
        assert np.allclose(q.delta, p.delta, atol=1e-12)

    def test_rejects_tiny_grid(self):
        p = Pulse(4, 0.1, [0.0] * 4, [0.0] * 4)
        with pytest.raises(PulseFormatError):
            resample(p, 1)


class TestPulseFile:
    def test_roundtrip_value_exact(self, tmp_path):
        rng = np.random.default_rng(11)
        p = Pulse(33, 0.12345678901234567, rng.uniform(0, 1, 33),
                  rng.uniform(-3, 3, 33), meta="delta_bound=3.25; test")
        path = tmp_path / "p.json"
        save_pulse(p, path)
        q = load_pulse(path)
        assert q.n_steps == p.n_steps
        assert q.dt == p.dt
        assert np.array_equal(q.omega, p.omega)
        assert np.array_equal(q.delta, p.delta)
        assert q.meta == p.meta

    def test_missing_field_named(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"version": 1, "units": "omega_max", "n_steps": 2, '
                        '"dt": 0.1, "omega": [0, 0]}')
        with pytest.raises(PulseFormatError) as err:
            load_pulse(path)
        assert err.value.field == "delta"

    def test_length_mismatch(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"version": 1, "units": "omega_max", "n_steps": 3, '
                        '"dt": 0.1, "omega": [0, 0], "delta": [0, 0]}')
        with pytest.raises(PulseFormatError):
            load_pulse(path)

    def test_version_mismatch(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"version": 2, "units": "omega_max", "n_steps": 2, '
                        '"dt": 0.1, "omega": [0, 0], "delta": [0, 0]}')
        with pytest.raises(PulseVersionError):
            load_pulse(path)

    def test_csv_export(self, tmp_path):
        p = Pulse(3, 0.1, [0.0, 0.5, 0.0], [0.1, -0.1, 0.0])
        path = tmp_path / "p.csv"
        write_pulse_csv(p, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "step,t,omega,delta"
        assert len(lines) == 4
        assert lines[1].startswith("0,0,0,")


class TestGateConfig:
    def test_v_int_recomputed(self):
        cfg = default_sr61_config()
        assert cfg.v_int == -cfg.c6 / cfg.distance_r**6
        # Sr anchor: |v| / omega_max about 14.48
        assert cfg.v_int_dimensionless == pytest.approx(14.48, abs=0.01)

    def test_table_anchor_values(self):
        cfg = default_sr61_config()
        assert cfg.omega_max == pytest.approx(2 * np.pi * 6.8e6)
        assert cfg.gamma == pytest.approx(1 / 96.5e-6)
        assert cfg.distance_r == 3.5e-6

    def test_validation(self):
        with pytest.raises(PulseFormatError):
            GateConfig(omega_max=0.0, gamma=1.0, c6=-1.0, distance_r=1.0)
        with pytest.raises(PulseFormatError):
            GateConfig(omega_max=1.0, gamma=-1.0, c6=-1.0, distance_r=1.0)


class TestPulseInvariants:
    def test_omega_bound_enforced(self):
        with pytest.raises(PulseBoundError):
            Pulse(2, 0.1, [0.0, 1.2], [0.0, 0.0])
        with pytest.raises(PulseBoundError):
            Pulse(2, 0.1, [-0.1, 0.5], [0.0, 0.0])

    def test_immutable_arrays(self):
        p = Pulse(2, 0.1, [0.0, 0.5], [0.0, 0.0])
        with pytest.raises(ValueError):
            p.omega[0] = 0.3
