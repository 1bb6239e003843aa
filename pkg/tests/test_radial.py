import numpy as np
import pytest
from scipy.integrate import simpson

from rydgate.atomic import (WavefunctionCache, hydrogen_series, level,
                            load_series_table, radial_wavefunction, rdme,
                            rdme_wavefunctions, turning_point)
from rydgate.errors import SelectionRuleError, SeriesDomainError

H_S = hydrogen_series(0)
H_P = hydrogen_series(1)


class TestLevels:
    def test_hydrogen_n2_energy(self):
        lv = level(H_S, 2)
        assert lv.energy == pytest.approx(-0.125)
        assert lv.n_star == 2.0

    def test_defect_shifts_energy(self):
        table = load_series_table()
        lv = table.level("3S1", 10)
        # delta0 = 3.371 plus Ritz corrections
        assert lv.n_star == pytest.approx(10 - 3.371, abs=0.05)
        assert lv.energy == pytest.approx(-0.5 / lv.n_star**2)

    def test_ritz_correction_decreases_with_n(self):
        table = load_series_table()
        series = table["3P1"]
        d = [abs(series.defect(n) - series.delta0) for n in (10, 20, 40, 80)]
        assert d == sorted(d, reverse=True)

    def test_below_floor_rejected(self):
        table = load_series_table()
        with pytest.raises(SeriesDomainError):
            table.level("3S1", 5)


class TestWavefunctions:
    def test_hydrogen_1s_overlap_with_analytic(self):
        wf = radial_wavefunction(level(H_S, 1))
        x = wf.x
        u_exact = 2.0 * x**2 * np.exp(-(x**2))     # u(r) = 2 r e^-r at r = x^2
        overlap = simpson(2.0 * x**1.5 * wf.w * u_exact, x=x)
        assert overlap >= 1.0 - 1e-6

    def test_hydrogen_orthogonality(self):
        w2s = radial_wavefunction(level(H_S, 2))
        w3s = radial_wavefunction(level(H_S, 3))
        assert abs(w2s.overlap(w3s)) <= 1e-4

    def test_normalization(self):
        for lv in (level(H_S, 5), level(H_P, 12)):
            wf = radial_wavefunction(lv)
            assert wf.norm() == pytest.approx(1.0, abs=1e-6)

    def test_node_count_hydrogenic(self):
        for n, l, series in ((1, 0, H_S), (3, 0, H_S), (5, 1, H_P), (6, 1, H_P)):
            wf = radial_wavefunction(level(series, n))
            body = wf.w[np.abs(wf.w) > 1e-6 * np.abs(wf.w).max()]
            nodes = int(np.sum(np.diff(np.sign(body)) != 0))
            assert nodes == n - l - 1

    def test_turning_point_values(self):
        assert turning_point(2.0, 1) == pytest.approx(4 - 2 * np.sqrt(2))
        assert turning_point(5.0, 0) == 0.0


class TestRdme:
    def test_hydrogen_1s_2p(self):
        value = rdme(H_S, 1, H_P, 2)
        assert value == pytest.approx(128 * np.sqrt(6) / 243, abs=1e-4)

    def test_symmetric(self):
        cache = WavefunctionCache()
        a = rdme(H_S, 4, H_P, 5, cache=cache)
        b = rdme(H_P, 5, H_S, 4, cache=cache)
        assert a == pytest.approx(b, abs=1e-10)

    def test_selection_rule(self):
        with pytest.raises(SelectionRuleError):
            rdme(H_S, 3, H_S, 4)

    def test_high_n_scaling(self):
        # neighboring-state RDME grows as (n*)^2 for a zero-defect series
        cache = WavefunctionCache()
        vals = {n: abs(rdme(H_S, n, H_P, n + 1, cache=cache))
                for n in (40, 70, 100)}
        for n1, n2 in ((40, 70), (70, 100)):
            ratio = vals[n2] / vals[n1]
            expected = (n2 / n1) ** 2
            assert ratio == pytest.approx(expected, rel=0.10)

    def test_grid_refinement_stability(self):
        table = load_series_table()
        pairs = [(H_S, 1, H_P, 2), (H_S, 30, H_P, 30),
                 (table["3S1"], 61, table["3P1"], 60)]
        for sa, na, sb, nb in pairs:
            coarse = WavefunctionCache()
            fine = WavefunctionCache(points_per_x=2 * coarse.points_per_x,
                                     min_points=2 * coarse.min_points)
            v1 = coarse.rdme(sa, na, sb, nb)
            v2 = fine.rdme(sa, na, sb, nb)
            assert abs(v2 - v1) <= 1e-5 * abs(v1)
