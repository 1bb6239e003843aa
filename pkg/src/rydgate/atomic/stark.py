"""DC Stark maps and scalar polarisabilities by basis diagonalization.

The Hamiltonian H0 + E z is diagonalized in a truncated single-channel basis
of triplet levels around the target state (principal quantum numbers within
a window, l up to l_max, one m_j block).  The target eigenvalue is tracked
adiabatically across field values by maximal eigenvector overlap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError, NonQuadraticRegimeError
from .constants import EFIELD_AU_V_M
from .defects import DefectModel, RydbergLevel, level
from .radial import WavefunctionCache
from .wigner import wigner3j, wigner6j

STARK_WINDOW = 6
STARK_L_MAX = 4
STARK_M_J = 1


def reduced_c1(a, b) -> float:
    """Reduced matrix element <b||C^1||a> in the LS-coupled triplet basis.

    The dipole acts on the outer electron's orbital part; the spin and the
    s-state core are spectators, so L = l throughout.
    """
    la, sa, ja = a.l, a.s, a.j
    lb, sb, jb = b.l, b.s, b.j
    if sa != sb or abs(la - lb) != 1:
        return 0.0
    orbital = ((-1) ** lb * math.sqrt((2 * la + 1) * (2 * lb + 1))
               * wigner3j(lb, 1, la, 0, 0, 0))
    spin_recoupling = ((-1) ** (lb + sa + ja + 1)
                       * math.sqrt((2 * ja + 1) * (2 * jb + 1))
                       * wigner6j(lb, jb, sa, ja, la, 1))
    return spin_recoupling * orbital


def angular_z(a, b, m_j) -> float:
    """Angular factor of <b m_j|z/r|a m_j> (Wigner-Eckart, q = 0)."""
    return ((-1) ** (b.j - m_j) * wigner3j(b.j, 1, a.j, -m_j, 0, m_j)
            * reduced_c1(a, b))


def _basis_levels(series_table, target: RydbergLevel, window: int,
                  l_max: int, m_j: float):
    levels = []
    for model in series_table.models():
        if model.s != target.s or model.l > l_max or model.j < m_j:
            continue
        for n in range(max(model.n_min, target.n - window),
                       target.n + window + 1):
            levels.append(level(model, n))
    if not levels:
        raise ConfigError("empty Stark basis; check window and l_max")
    return levels


def _build_matrices(series_table, target: RydbergLevel, window, l_max, m_j,
                    cache: WavefunctionCache):
    levels = _basis_levels(series_table, target, window, l_max, m_j)
    dim = len(levels)
    h0 = np.diag([lv.energy for lv in levels])
    zmat = np.zeros((dim, dim))
    table = {m.label: m for m in series_table.models()}
    for i, a in enumerate(levels):
        for k in range(i + 1, dim):
            b = levels[k]
            if abs(a.l - b.l) != 1:
                continue
            ang = angular_z(a, b, m_j)
            if ang == 0.0:
                continue
            r = cache.rdme(table[a.series_label], a.n,
                           table[b.series_label], b.n)
            zmat[i, k] = zmat[k, i] = ang * r
    idx = next(i for i, lv in enumerate(levels)
               if (lv.series_label, lv.n) == (target.series_label, target.n))
    return levels, h0, zmat, idx


@dataclass(frozen=True)
class StarkMap:
    """Adiabatically tracked energy of one level against field magnitude."""

    level: RydbergLevel
    fields_v_m: np.ndarray
    energies: np.ndarray         # tracked eigenvalue, atomic units
    shifts: np.ndarray           # energies - zero-field energy
    window: int
    l_max: int
    m_j: float
    converged: bool = True       # False when a window-growth check moved shifts > 1%


def stark_map(series_table, series_label: str, n: int, fields_v_m,
              window: int = STARK_WINDOW, l_max: int = STARK_L_MAX,
              m_j: float = STARK_M_J, cache: WavefunctionCache | None = None,
              check_window: bool = False) -> StarkMap:
    """Diagonalize H0 + E z over a field axis and track the target level.

    ``fields_v_m`` must be nonnegative and strictly increasing.  With
    ``check_window`` the map is recomputed with the window grown by 2 and
    flagged unconverged when the largest shift moves by more than 1%.
    """
    fields = np.asarray(fields_v_m, dtype=float)
    if fields.size == 0 or np.any(fields < 0) or (
            fields.size > 1 and np.any(np.diff(fields) <= 0)):
        raise ConfigError("field axis must be nonnegative and increasing")
    cache = cache or WavefunctionCache()
    target = series_table.level(series_label, n)
    levels, h0, zmat, idx = _build_matrices(series_table, target, window,
                                            l_max, m_j, cache)
    energies = np.empty(fields.size)
    previous = np.zeros(len(levels))
    previous[idx] = 1.0
    for i, f in enumerate(fields):
        h = h0 + (f / EFIELD_AU_V_M) * zmat
        vals, vecs = np.linalg.eigh(h)
        overlaps = np.abs(previous @ vecs)
        k = int(np.argmax(overlaps))
        energies[i] = vals[k]
        previous = vecs[:, k]
    shifts = energies - target.energy
    converged = True
    if check_window:
        wider = stark_map(series_table, series_label, n, fields,
                          window + 2, l_max, m_j, cache, check_window=False)
        scale = np.max(np.abs(wider.shifts))
        if scale > 0:
            converged = np.max(np.abs(shifts - wider.shifts)) <= 0.01 * scale
    return StarkMap(level=target, fields_v_m=fields, energies=energies,
                    shifts=shifts, window=window, l_max=l_max, m_j=m_j,
                    converged=converged)


def stark_shift_perturbative(series_table, series_label: str, n: int,
                             field_v_m: float, window: int = STARK_WINDOW,
                             l_max: int = STARK_L_MAX, m_j: float = STARK_M_J,
                             cache: WavefunctionCache | None = None) -> float:
    """Second-order perturbation-theory shift; oracle for small fields."""
    cache = cache or WavefunctionCache()
    target = series_table.level(series_label, n)
    levels, h0, zmat, idx = _build_matrices(series_table, target, window,
                                            l_max, m_j, cache)
    f_au = field_v_m / EFIELD_AU_V_M
    shift = 0.0
    for k, lv in enumerate(levels):
        if k == idx:
            continue
        v = f_au * zmat[idx, k]
        if v:
            shift += v * v / (target.energy - lv.energy)
    return shift


def default_field_axis(series_table, series_label: str, n: int,
                       n_points: int = 8) -> np.ndarray:
    """Fields (V/m) safely inside the quadratic regime for this level.

    Scales with the Inglis-Teller field 1/(3 n*^5): the axis tops out at a
    small fraction of it.
    """
    n_star = series_table.level(series_label, n).n_star
    e_it_au = 1.0 / (3.0 * n_star**5)
    e_max = 0.05 * e_it_au * EFIELD_AU_V_M
    return np.linspace(0.0, e_max, n_points)


@dataclass(frozen=True)
class PolarisabilityFit:
    """Quadratic Stark fit: shift = -1/2 alpha E^2 (atomic units)."""

    level: RydbergLevel
    alpha_au: float
    r_squared: float
    fields_v_m: np.ndarray
    shifts_au: np.ndarray


R_SQUARED_MIN = 0.9999
QUARTIC_FRACTION_MAX = 0.01


def polarisability(series_table, series_label: str, n: int,
                   fields_v_m=None, window: int = STARK_WINDOW,
                   l_max: int = STARK_L_MAX, m_j: float = STARK_M_J,
                   cache: WavefunctionCache | None = None) -> PolarisabilityFit:
    """Extract the scalar polarisability from a quadratic Stark-shift fit.

    Validates the quadratic regime: the quartic term fitted alongside must
    stay below 1% of the quadratic one at the largest field, and the pure
    quadratic fit must reach R^2 >= 0.9999.
    """
    if fields_v_m is None:
        fields_v_m = default_field_axis(series_table, series_label, n)
    smap = stark_map(series_table, series_label, n, fields_v_m, window,
                     l_max, m_j, cache)
    f_au = smap.fields_v_m / EFIELD_AU_V_M
    shifts = smap.shifts
    if np.count_nonzero(f_au) < 3:
        raise ConfigError("need at least 3 nonzero field values")
    # Quadratic-regime validation with a quartic companion term.
    basis4 = np.stack([f_au**2, f_au**4], axis=1)
    c2, c4 = np.linalg.lstsq(basis4, shifts, rcond=None)[0]
    fmax = f_au[-1]
    if abs(c4) * fmax**4 > QUARTIC_FRACTION_MAX * abs(c2) * fmax**2:
        raise NonQuadraticRegimeError(
            f"quartic Stark term is {abs(c4) * fmax ** 2 / abs(c2):.1%} of the "
            f"quadratic one at E = {smap.fields_v_m[-1]:.3g} V/m; "
            "use smaller fields")
    # Pure quadratic fit and its R^2.
    coeff = float(np.dot(f_au**2, shifts) / np.dot(f_au**2, f_au**2))
    fit = coeff * f_au**2
    ss_res = float(np.sum((shifts - fit) ** 2))
    ss_tot = float(np.sum((shifts - np.mean(shifts)) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    if r2 < R_SQUARED_MIN:
        raise NonQuadraticRegimeError(
            f"quadratic Stark fit R^2 = {r2:.6f} below {R_SQUARED_MIN}; "
            "use smaller fields")
    return PolarisabilityFit(level=smap.level, alpha_au=-2.0 * coeff,
                             r_squared=r2, fields_v_m=smap.fields_v_m,
                             shifts_au=shifts)


def write_stark_csv(smap: StarkMap, path, timestamp: str | None = None) -> None:
    lines = []
    if timestamp is not None:
        lines.append(f"# generated {timestamp}")
    lines.append(f"# level {smap.level.series_label} n={smap.level.n}, "
                 f"window=+-{smap.window}, l_max={smap.l_max}, m_j={smap.m_j}, "
                 f"converged={smap.converged}")
    lines.append("field_v_m,energy_au,shift_au")
    for i, f in enumerate(smap.fields_v_m):
        lines.append(f"{f:.9g},{smap.energies[i]:.12g},{smap.shifts[i]:.9g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_polarisability_csv(fits, path, timestamp: str | None = None) -> None:
    """Table of polarisabilities: n,n_star,value,fit_residual (1 - R^2)."""
    lines = []
    if timestamp is not None:
        lines.append(f"# generated {timestamp}")
    lines.append("n,n_star,value,fit_residual")
    for fit in fits:
        lines.append(f"{fit.level.n},{fit.level.n_star:.9g},"
                     f"{fit.alpha_au:.9g},{1.0 - fit.r_squared:.3g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
