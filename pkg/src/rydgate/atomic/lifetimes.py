"""Spontaneous and blackbody decay widths, lifetimes, and scaling fits.

Widths follow the single-channel reduction of the multichannel natural-width
formula with all channel fractions set to one: for a transition a -> b,

    Gamma_ab = (4 alpha / 3 c^2) |omega_ab|^3 S_ang R_ab^2

with S_ang the 6j-weighted angular line factor and R_ab the radial dipole
integral.  The expression is symmetric under a <-> b, so the same quantity
multiplied by the thermal occupation drives blackbody absorption to higher
states with the correct degeneracy weighting built in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, EnergyOrderError, FitError
from .constants import AU_TIME_S, FINE_STRUCTURE, KB_AU_PER_K
from .defects import DefectModel, RydbergLevel, level
from .radial import WavefunctionCache
from .wigner import wigner6j

# BBR sums extend this far above the initial n by default.
BBR_N_EXTRA = 40


@dataclass(frozen=True)
class TransitionRecord:
    """A single dipole transition with its frequency, RDME, and width."""

    from_level: RydbergLevel
    to_level: RydbergLevel
    omega_ab: float      # E_b - E_a, atomic units
    rdme: float          # atomic units (e a0)
    gamma_sp: float      # atomic units

    def __post_init__(self):
        if self.gamma_sp < 0:
            raise ConfigError("gamma_sp must be nonnegative")


def angular_line_factor(a: DefectModel | RydbergLevel,
                        b: DefectModel | RydbergLevel) -> float:
    """Single-channel angular factor of the width formula.

    max(l_a, l_b) (2L_b+1)(2J_b+1)(2L_a+1) {J_b 1 J_a; L_a S_a L_b}^2
    {L_b 1 L_a; l_a l_core l_b}^2 with an s-state core (l_core = 0, L = l).
    """
    la, sa, ja = a.l, a.s, a.j
    lb, jb = b.l, b.j
    six_j = wigner6j(jb, 1, ja, la, sa, lb)
    six_l = wigner6j(lb, 1, la, la, 0, lb)
    return (max(la, lb) * (2 * lb + 1) * (2 * jb + 1) * (2 * la + 1)
            * six_j**2 * six_l**2)


def _width_symmetric(lvl_a: RydbergLevel, lvl_b: RydbergLevel,
                     rdme_value: float) -> float:
    omega = lvl_b.energy - lvl_a.energy
    return ((4.0 * FINE_STRUCTURE**3 / 3.0) * abs(omega) ** 3
            * angular_line_factor(lvl_a, lvl_b) * rdme_value**2)


def spontaneous_width(series_a: DefectModel, na: int,
                      series_b: DefectModel, nb: int,
                      cache: WavefunctionCache | None = None) -> TransitionRecord:
    """Spontaneous emission width for the downward transition a -> b."""
    lvl_a = level(series_a, na)
    lvl_b = level(series_b, nb)
    if lvl_a.energy <= lvl_b.energy:
        raise EnergyOrderError(
            f"{series_a.label} n={na} does not lie above {series_b.label} "
            f"n={nb}; spontaneous emission needs E_a > E_b")
    cache = cache or WavefunctionCache()
    r = cache.rdme(series_a, na, series_b, nb)
    return TransitionRecord(
        from_level=lvl_a, to_level=lvl_b,
        omega_ab=lvl_b.energy - lvl_a.energy, rdme=r,
        gamma_sp=_width_symmetric(lvl_a, lvl_b, r))


def thermal_occupation(omega: float, temperature: float) -> float:
    """Planck occupation 1/(exp(|omega|/kT) - 1); zero at T = 0."""
    if temperature <= 0.0:
        return 0.0
    x = abs(omega) / (KB_AU_PER_K * temperature)
    if x > 500.0:
        return 0.0
    return 1.0 / math.expm1(x)


def total_width(series_a: DefectModel, na: int, temperature: float,
                final_series, n_extra: int = BBR_N_EXTRA,
                cache: WavefunctionCache | None = None):
    """Total width (spontaneous + BBR) and lifetime of a level.

    Sums Gamma_sp (1 + n_bar) over all lower states of the given final
    series and Gamma_sp n_bar over the higher ones, with final n running
    from each series floor to na + n_extra.  Returns ``(gamma_total_au,
    lifetime_seconds)``.
    """
    if temperature < 0:
        raise ConfigError("temperature must be nonnegative")
    final_series = list(final_series)
    if not final_series:
        raise ConfigError("no decay channels given")
    cache = cache or WavefunctionCache()
    lvl_a = level(series_a, na)
    total = 0.0
    for series_b in final_series:
        if abs(series_b.l - series_a.l) != 1:
            continue
        for nb in range(series_b.n_min, na + n_extra + 1):
            lvl_b = level(series_b, nb)
            omega = lvl_b.energy - lvl_a.energy
            if omega == 0.0:
                continue
            width = _width_symmetric(lvl_a, lvl_b,
                                     cache.rdme(series_a, na, series_b, nb))
            nbar = thermal_occupation(omega, temperature)
            if lvl_b.energy < lvl_a.energy:
                total += width * (1.0 + nbar)
            else:
                total += width * nbar
    if total <= 0:
        raise ConfigError(
            f"no open decay channels found for {series_a.label} n={na}")
    lifetime_s = (1.0 / total) * AU_TIME_S
    return total, lifetime_s


@dataclass(frozen=True)
class LifetimeScan:
    """Lifetimes over an n range with the inverse-polynomial scaling fit.

    The fit is 1/tau = A (n*)^-2 + B (n*)^-3 (linear least squares in A, B);
    ``residuals`` are relative errors of the fitted tau per point.
    """

    n_values: np.ndarray
    n_star: np.ndarray
    lifetimes_s: np.ndarray
    fit_a: float
    fit_b: float
    residuals: np.ndarray

    def fitted_lifetime(self, n_star) -> np.ndarray:
        return 1.0 / (self.fit_a * np.asarray(n_star) ** -2.0
                      + self.fit_b * np.asarray(n_star) ** -3.0)


def lifetime_scan(series_a: DefectModel, n_values, temperature: float,
                  final_series, n_extra: int = BBR_N_EXTRA,
                  cache: WavefunctionCache | None = None) -> LifetimeScan:
    n_values = np.asarray(sorted(n_values), dtype=int)
    if n_values.size < 5:
        raise FitError("lifetime scan needs at least 5 n values")
    cache = cache or WavefunctionCache()
    taus = np.empty(n_values.size)
    nstars = np.empty(n_values.size)
    for i, n in enumerate(n_values):
        nstars[i] = level(series_a, int(n)).n_star
        taus[i] = total_width(series_a, int(n), temperature, final_series,
                              n_extra, cache)[1]
    # 1/tau in 1/s against the two scaling basis functions.
    basis = np.stack([nstars**-2.0, nstars**-3.0], axis=1)
    rhs = 1.0 / taus
    coeffs, _, rank, _ = np.linalg.lstsq(basis, rhs, rcond=None)
    if rank < 2:
        raise FitError("degenerate n range: scaling fit is singular")
    fit = basis @ coeffs
    residuals = np.abs(1.0 / fit - taus) / taus
    return LifetimeScan(n_values=n_values, n_star=nstars, lifetimes_s=taus,
                        fit_a=float(coeffs[0]), fit_b=float(coeffs[1]),
                        residuals=residuals)


def write_lifetime_csv(scan: LifetimeScan, path, timestamp: str | None = None,
                       header_note: str | None = None) -> None:
    lines = []
    if timestamp is not None:
        lines.append(f"# generated {timestamp}")
    if header_note:
        lines.append(f"# {header_note}")
    lines.append(f"# fit: 1/tau = A n*^-2 + B n*^-3, A = {scan.fit_a:.9g} 1/s, "
                 f"B = {scan.fit_b:.9g} 1/s")
    lines.append("n,n_star,value,fit_residual")
    for i, n in enumerate(scan.n_values):
        lines.append(f"{n},{scan.n_star[i]:.9g},{scan.lifetimes_s[i]:.9g},"
                     f"{scan.residuals[i]:.9g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
