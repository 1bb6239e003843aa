from fractions import Fraction

import numpy as np
import pytest

from rydgate.atomic.wigner import wigner3j, wigner6j
from rydgate.errors import ConfigError


def racah_6j_bruteforce(j1, j2, j3, j4, j5, j6):
    """Independent 6j via the full contraction of four 3j symbols.

    Phase is (-1)^(sum of j_k - m_k over all six entries); the first triad's
    m values sum to zero, so that part contributes (-1)^(j1+j2+j3).
    """
    def rng(j):
        return np.arange(-j, j + 1)

    total = 0.0
    for m1 in rng(j1):
        for m2 in rng(j2):
            m3 = -(m1 + m2)
            if abs(m3) > j3:
                continue
            for m4 in rng(j4):
                for m5 in rng(j5):
                    for m6 in rng(j6):
                        phase = (-1) ** int(j1 + j2 + j3 + (j4 - m4)
                                            + (j5 - m5) + (j6 - m6))
                        total += (phase
                                  * wigner3j(j1, j2, j3, -m1, -m2, -m3)
                                  * wigner3j(j1, j5, j6, m1, -m5, m6)
                                  * wigner3j(j4, j2, j6, m4, m2, -m6)
                                  * wigner3j(j4, j5, j3, -m4, m5, m3))
    return total


class TestWigner6j:
    def test_all_ones(self):
        assert wigner6j(1, 1, 1, 1, 1, 1) == pytest.approx(Fraction(1, 6), abs=1e-15)

    def test_triangle_violation_zero(self):
        assert wigner6j(1, 1, 3, 1, 1, 1) == 0.0
        assert wigner6j(0.5, 0.5, 0.5, 0.5, 0.5, 0.5) == 0.0  # half-int perimeter

    def test_against_bruteforce_contraction(self):
        cases = [(1, 1, 1, 1, 1, 1), (2, 1, 1, 1, 2, 2), (1.5, 0.5, 1, 1, 1.5, 0.5),
                 (2, 2, 2, 2, 2, 2), (3, 2, 1, 2, 1, 2)]
        for args in cases:
            assert wigner6j(*args) == pytest.approx(
                racah_6j_bruteforce(*args), abs=1e-12)

    def test_orthogonality_sum_rule(self):
        # sum_x (2x+1) {a b x; c d p}{a b x; c d q} = delta_pq / (2p+1);
        # p couples to the (a,d) and (c,b) triads, x to (a,b) and (c,d).
        rng = np.random.default_rng(0)
        checked = 0
        while checked < 12:
            a, b, c, d = rng.integers(0, 11, size=4)
            ps = [p for p in np.arange(abs(a - d), a + d + 1)
                  if abs(c - b) <= p <= c + b]
            if len(ps) < 2:
                continue
            p, q = ps[0], ps[-1]
            xs = np.arange(max(abs(a - b), abs(c - d)),
                           min(a + b, c + d) + 1)
            for target in ((p, p), (p, q)):
                s = sum((2 * x + 1) * wigner6j(a, b, x, c, d, target[0])
                        * wigner6j(a, b, x, c, d, target[1])
                        for x in xs)
                expected = (1.0 / (2 * target[0] + 1)
                            if target[0] == target[1] else 0.0)
                assert s == pytest.approx(expected, abs=1e-12)
            checked += 1

    def test_regge_symmetry(self):
        rng = np.random.default_rng(1)
        count = 0
        while count < 10:
            j = rng.integers(0, 13, size=6) / 2.0
            val = wigner6j(*j)
            s = (j[1] + j[2] + j[4] + j[5]) / 2
            regge = (j[0], s - j[1], s - j[2], j[3], s - j[4], s - j[5])
            if any(x < 0 or abs(2 * x - round(2 * x)) > 1e-9 for x in regge):
                continue
            assert wigner6j(*regge) == pytest.approx(val, abs=1e-13)
            count += 1

    def test_column_permutation_symmetry(self):
        args = (2, 1.5, 2.5, 1, 1.5, 1.5)
        v = wigner6j(*args)
        assert wigner6j(args[1], args[0], args[2], args[4], args[3],
                        args[5]) == pytest.approx(v, abs=1e-15)

    def test_rejects_bad_input(self):
        with pytest.raises(ConfigError):
            wigner6j(0.3, 1, 1, 1, 1, 1)
        with pytest.raises(ConfigError):
            wigner6j(-1, 1, 1, 1, 1, 1)


class TestWigner3j:
    def test_known_values(self):
        assert wigner3j(1, 1, 0, 0, 0, 0) == pytest.approx(-1 / np.sqrt(3))
        assert wigner3j(2, 1, 1, 0, 0, 0) == pytest.approx(np.sqrt(2.0 / 15.0))
        assert wigner3j(1, 1, 2, 1, -1, 0) == pytest.approx(1 / np.sqrt(30))
        assert wigner3j(1, 1, 1, 1, 0, -1) == pytest.approx(-1 / np.sqrt(6))

    def test_m_sum_selection(self):
        assert wigner3j(1, 1, 1, 1, 1, 1) == 0.0
        assert wigner3j(1, 1, 1, 1, 0, -1) != 0.0

    def test_orthogonality(self):
        # sum over all (m1, m2) of the squared 3j equals 1 for each j3
        j1, j2 = 2, 1.5
        for j3 in np.arange(abs(j1 - j2), j1 + j2 + 1):
            total = 0.0
            for m1 in np.arange(-j1, j1 + 1):
                for m2 in np.arange(-j2, j2 + 1):
                    total += wigner3j(j1, j2, j3, m1, m2, -(m1 + m2)) ** 2
            assert total == pytest.approx(1.0, abs=1e-12)
