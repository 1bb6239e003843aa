"""Coulomb-approximation radial wavefunctions (Numerov) and dipole integrals.

The reduced radial equation u'' = 2(V_eff - E) u with V_eff = -1/r +
l(l+1)/(2 r^2) is integrated inward on a square-root-scaled grid: with
x = sqrt(r) and w(x) = u(x^2)/sqrt(x),

    w'' = [ -8 E x^2 - 8 + (4 l (l+1) + 3/4) / x^2 ] w,

which keeps a roughly constant number of points per local de Broglie
wavelength for a Coulomb potential.  For non-hydrogenic effective quantum
numbers the solution diverges inside the classical inner turning point; the
integration is cut at the onset of that divergence (for integer n* the
regular solution survives to the origin and no cut occurs).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit
from scipy.integrate import simpson
from scipy.interpolate import CubicSpline

from ..errors import RadialIntegrationError, SelectionRuleError
from .defects import DefectModel, RydbergLevel, level

# Innermost radius ever used (Bohr radii); keeps the centrifugal-free s-wave
# integration away from r = 0 while losing < 1e-7 of hydrogenic norm.
CORE_FLOOR = 0.005

# Grid density: points per unit of x = sqrt(r), and a floor on the total.
POINTS_PER_X = 130.0
MIN_POINTS = 10001

DIVERGENCE_LIMIT = 1e10


@njit(cache=True)
def _numerov_inward(g, h):
    """Integrate w'' = g w from the last grid point inward.

    The equation is linear, so whenever the amplitude exceeds the guard the
    whole computed tail is rescaled (deep classically-forbidden stretches
    grow by hundreds of decades); normalization restores the scale later.
    Returns the rescale count so pathological runaways can be rejected.
    """
    n = g.shape[0]
    w = np.zeros(n)
    w[n - 1] = 0.0
    w[n - 2] = 1e-12
    c = h * h / 12.0
    rescales = 0
    for i in range(n - 2, 0, -1):
        w[i - 1] = ((2.0 + 10.0 * c * g[i]) * w[i]
                    - (1.0 - c * g[i + 1]) * w[i + 1]) / (1.0 - c * g[i - 1])
        if abs(w[i - 1]) > DIVERGENCE_LIMIT:
            for k in range(i - 1, n):
                w[k] *= 1e-10
            rescales += 1
    return w, rescales


@dataclass(frozen=True)
class RadialWavefunction:
    """Reduced radial amplitude u(r) sampled on a sqrt-scaled grid."""

    level: RydbergLevel
    x: np.ndarray          # sqrt(r) grid, uniform
    w: np.ndarray          # u / sqrt(x) on that grid
    inner_cutoff: float
    outer_cutoff: float

    @property
    def r(self) -> np.ndarray:
        return self.x**2

    @property
    def u(self) -> np.ndarray:
        return np.sqrt(self.x) * self.w

    def norm(self) -> float:
        return float(simpson(2.0 * self.x**2 * self.w**2, x=self.x))

    def overlap(self, other: "RadialWavefunction") -> float:
        """<u_a|u_b> = int u_a u_b dr."""
        return _pair_integral(self, other, power=0)


def turning_point(n_star: float, l: int) -> float:
    """Classical inner turning point of the Coulomb motion (0 for l = 0)."""
    disc = n_star * n_star - l * (l + 1)
    if disc <= 0:
        return n_star * n_star
    return n_star * n_star - n_star * math.sqrt(disc)


def radial_wavefunction(lvl: RydbergLevel, points_per_x: float = POINTS_PER_X,
                        min_points: int = MIN_POINTS) -> RadialWavefunction:
    """Numerov-integrate and normalize the reduced radial wavefunction."""
    n_star, l = lvl.n_star, lvl.l
    energy = lvl.energy
    r_out = 2.0 * lvl.n * (lvl.n + 15.0)
    r_tp = turning_point(n_star, l)
    x_in = math.sqrt(CORE_FLOOR)
    x_out = math.sqrt(r_out)
    npts = max(min_points, int(points_per_x * (x_out - x_in)))
    x = np.linspace(x_in, x_out, npts)
    g = -8.0 * energy * x * x - 8.0 + (4.0 * l * (l + 1) + 0.75) / (x * x)
    w, rescales = _numerov_inward(g, x[1] - x[0])
    if rescales > 100:
        raise RadialIntegrationError(
            f"Numerov integration is running away ({rescales} rescales) for "
            f"{lvl.series_label} n={lvl.n}")
    x_tp = math.sqrt(r_tp) if r_tp > 0 else x_in

    # Cut at the divergence onset: inside the inner turning point the
    # irregular Coulomb solution takes over and |w| starts growing again as
    # r decreases.  Hydrogenic (integer n*) states decay all the way in.
    i_tp = int(np.searchsorted(x, x_tp))
    i_cut = min(max(i_tp, 1), npts - 2)
    absw = np.abs(w)
    while i_cut > 0 and absw[i_cut - 1] <= absw[i_cut]:
        i_cut -= 1
    if i_cut > 0:
        w = w.copy()
        w[:i_cut] = 0.0

    norm = simpson(2.0 * x * x * w * w, x=x)
    if not (norm > 0 and math.isfinite(norm)):
        raise RadialIntegrationError(
            f"normalization failed for {lvl.series_label} n={lvl.n}")
    w = w / math.sqrt(norm)
    # Sign convention: outermost lobe positive.
    i_peak = int(np.argmax(np.abs(w)))
    if w[i_peak] < 0:
        w = -w
    w.setflags(write=False)
    x.setflags(write=False)
    return RadialWavefunction(level=lvl, x=x, w=w,
                              inner_cutoff=float(x[i_cut] ** 2),
                              outer_cutoff=r_out)


def _pair_integral(a: RadialWavefunction, b: RadialWavefunction, power: int) -> float:
    """int u_a u_b r^power dr on the common support, finer grid wins.

    In x-coordinates the integrand is 2 x^(2 power + 2) w_a w_b; the coarser
    function is cubic-spline interpolated onto the finer grid.
    """
    lo = max(a.x[0], b.x[0], math.sqrt(max(a.inner_cutoff, b.inner_cutoff)))
    hi = min(a.x[-1], b.x[-1])
    if hi <= lo:
        return 0.0
    fine, coarse = (a, b) if (a.x[1] - a.x[0]) <= (b.x[1] - b.x[0]) else (b, a)
    mask = (fine.x >= lo) & (fine.x <= hi)
    xg = fine.x[mask]
    if xg.size < 8:
        return 0.0
    w1 = fine.w[mask]
    w2 = CubicSpline(coarse.x, coarse.w)(xg)
    return float(simpson(2.0 * xg ** (2 * power + 2) * w1 * w2, x=xg))


def rdme_wavefunctions(a: RadialWavefunction, b: RadialWavefunction) -> float:
    """Radial dipole matrix element int u_a(r) u_b(r) r dr (atomic units)."""
    if abs(a.level.l - b.level.l) != 1:
        raise SelectionRuleError(
            f"dipole-forbidden pair: l = {a.level.l} and l = {b.level.l}")
    return _pair_integral(a, b, power=1)


class WavefunctionCache:
    """Memoized wavefunctions keyed by (series label, n).

    Warm-up is single-threaded in practice; after that reads are safe to
    share across threads.
    """

    def __init__(self, points_per_x: float = POINTS_PER_X,
                 min_points: int = MIN_POINTS):
        self.points_per_x = points_per_x
        self.min_points = min_points
        self._store: dict = {}

    def get(self, series: DefectModel, n: int) -> RadialWavefunction:
        key = (series.label, n)
        wf = self._store.get(key)
        if wf is None:
            wf = radial_wavefunction(level(series, n), self.points_per_x,
                                     self.min_points)
            self._store[key] = wf
        return wf

    def rdme(self, series_a: DefectModel, na: int,
             series_b: DefectModel, nb: int) -> float:
        return rdme_wavefunctions(self.get(series_a, na), self.get(series_b, nb))


def rdme(series_a: DefectModel, na: int, series_b: DefectModel, nb: int,
         cache: WavefunctionCache | None = None) -> float:
    """Radial dipole matrix element between two series members."""
    if cache is not None:
        return cache.rdme(series_a, na, series_b, nb)
    wa = radial_wavefunction(level(series_a, na))
    wb = radial_wavefunction(level(series_b, nb))
    return rdme_wavefunctions(wa, wb)
