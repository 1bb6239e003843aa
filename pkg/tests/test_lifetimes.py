import numpy as np
import pytest

from rydgate.atomic import (WavefunctionCache, angular_line_factor,
                            hydrogen_series, lifetime_scan, load_series_table,
                            spontaneous_width, thermal_occupation, total_width)
from rydgate.atomic.constants import AU_TIME_S
from rydgate.errors import ConfigError, EnergyOrderError, FitError

TABLE = load_series_table()
SR_3S1 = TABLE["3S1"]
SR_3P = [TABLE["3P0"], TABLE["3P1"], TABLE["3P2"]]


@pytest.fixture(scope="module")
def cache():
    return WavefunctionCache()


class TestSpontaneousWidth:
    def test_hydrogen_2p_lifetime(self, cache):
        # 2p -> 1s is the only channel; textbook lifetime 1.596 ns.
        h_s = hydrogen_series(0, label="H_s12")
        # hydrogen-like spin-half machinery: S = 1/2, J = l +- 1/2
        from rydgate.atomic.defects import DefectModel
        s_series = DefectModel(label="h_s", l=0, s=1, j=1, delta0=0, delta2=0,
                               delta4=0, n_min=1)
        # use the true spin-1/2 coupling of hydrogen
        s_half = DefectModel(label="h_s_half", l=0, s=0.5, j=0.5, delta0=0,
                             delta2=0, delta4=0, n_min=1)
        p_half = DefectModel(label="h_p_half", l=1, s=0.5, j=1.5, delta0=0,
                             delta2=0, delta4=0, n_min=2)
        rec = spontaneous_width(p_half, 2, s_half, 1, cache=cache)
        tau_ns = 1.0 / rec.gamma_sp * AU_TIME_S * 1e9
        assert tau_ns == pytest.approx(1.596, rel=5e-3)

    def test_omega_cubed_scaling(self, cache):
        rec = spontaneous_width(SR_3S1, 61, TABLE["3P1"], 5, cache=cache)
        manual = (4 * 7.2973525693e-3**3 / 3.0) * abs(rec.omega_ab) ** 3 \
            * angular_line_factor(SR_3S1, TABLE["3P1"]) * rec.rdme**2
        assert rec.gamma_sp == pytest.approx(manual, rel=1e-12)

    def test_upward_rejected(self, cache):
        with pytest.raises(EnergyOrderError):
            spontaneous_width(TABLE["3P1"], 5, SR_3S1, 61, cache=cache)

    def test_branching_ratios_near_statistical(self, cache):
        # 61 3S1 -> 5p 3P_J widths scale close to (2J+1): 1 : 3 : 5
        widths = [spontaneous_width(SR_3S1, 61, s, 5, cache=cache).gamma_sp
                  for s in SR_3P]
        total = sum(widths)
        ratios = [w / total for w in widths]
        for ratio, expected in zip(ratios, (1 / 9, 3 / 9, 5 / 9)):
            assert ratio == pytest.approx(expected, abs=0.03)


class TestTotalWidth:
    def test_sr61_lifetime_band(self, cache):
        _, tau = total_width(SR_3S1, 61, 300.0, SR_3P, cache=cache)
        assert 80e-6 <= tau <= 115e-6

    def test_zero_temperature_is_spontaneous_only(self, cache):
        g_sp, tau_sp = total_width(SR_3S1, 61, 0.0, SR_3P, cache=cache)
        g_300, tau_300 = total_width(SR_3S1, 61, 300.0, SR_3P, cache=cache)
        assert tau_300 < tau_sp
        assert g_300 > g_sp

    def test_lifetime_shrinks_with_temperature_everywhere(self, cache):
        for n in (45, 61, 90):
            tau_cold = total_width(SR_3S1, n, 0.0, SR_3P, cache=cache)[1]
            tau_warm = total_width(SR_3S1, n, 300.0, SR_3P, cache=cache)[1]
            assert tau_warm < tau_cold

    def test_empty_channels_rejected(self, cache):
        with pytest.raises(ConfigError):
            total_width(SR_3S1, 61, 300.0, [], cache=cache)

    def test_occupation_limits(self):
        assert thermal_occupation(0.1, 0.0) == 0.0
        assert thermal_occupation(1e-6, 300.0) > 100.0


class TestLifetimeScan:
    def test_fit_quality_high_n(self, cache):
        scan = lifetime_scan(SR_3S1, range(40, 121, 5), 300.0, SR_3P,
                             cache=cache)
        high = scan.n_values >= 60
        assert scan.residuals[high].max() <= 0.05

    def test_spontaneous_slope_cubic(self, cache):
        scan = lifetime_scan(SR_3S1, range(40, 121, 10), 0.0, SR_3P,
                             cache=cache)
        slope = np.polyfit(np.log(scan.n_star), np.log(scan.lifetimes_s), 1)[0]
        assert slope == pytest.approx(3.0, abs=0.2)

    def test_bbr_dominated_slope_quadratic(self, cache):
        scan = lifetime_scan(SR_3S1, range(40, 121, 10), 1e5, SR_3P,
                             cache=cache)
        slope = np.polyfit(np.log(scan.n_star), np.log(scan.lifetimes_s), 1)[0]
        assert slope == pytest.approx(2.0, abs=0.2)

    def test_short_range_rejected(self, cache):
        with pytest.raises(FitError):
            lifetime_scan(SR_3S1, [60, 61, 62], 300.0, SR_3P, cache=cache)
