"""Rydberg-state ranking: how gate fidelity trades decay against stray-field
Stark shifts as the principal quantum number varies.

A fixed dimensionless pulse is reused across n; the physics enters through
the scaling of the Rabi frequency (fixed laser power), the van der Waals
blockade, the computed lifetimes, and the DC Stark detuning offset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .atomic.constants import AU_TIME_S, EFIELD_AU_V_M, HARTREE_RAD_S
from .atomic.defects import SeriesTable, load_series_table
from .atomic.lifetimes import total_width
from .atomic.radial import WavefunctionCache
from .atomic.stark import polarisability
from .errors import ConfigError
from .fidelity import evaluate
from .pulses import GateConfig, Pulse

# Blockade scaling exponent for C6 with effective principal quantum number;
# standard van der Waals scaling, applied to the anchor coefficient.
C6_SCALING_EXPONENT = 11.0

RABI_SCALING_EXPONENT = -1.5

SCALING_NOTE = ("scaling: Omega ~ (n*)^-3/2 at fixed laser power; "
                f"C6 ~ (n*)^{C6_SCALING_EXPONENT:g}; stray field enters as a "
                "static detuning offset -alpha_s E^2 / 2")


@dataclass
class RankConfig:
    """Anchor parameters and scan axes for the state ranking."""

    n_anchor: int = 61
    omega_max_anchor: float = 2 * math.pi * 6.8e6       # rad/s
    c6_anchor: float = -2 * math.pi * 181e9 * 1e-36     # rad/s m^6
    distance_r: float = 3.5e-6                          # m
    series_label: str = "3S1"
    decay_series: tuple = ("3P0", "3P1", "3P2")
    temperature_k: float = 300.0
    n_axis: tuple = tuple(range(40, 121))
    series_table: SeriesTable | None = None

    def __post_init__(self):
        if self.series_table is None:
            self.series_table = load_series_table()
        if not self.n_axis:
            raise ConfigError("empty n axis")


class RankEngine:
    """Caches the per-n atomic quantities behind the ranking scans."""

    def __init__(self, config: RankConfig):
        self.config = config
        self.table = config.series_table
        self.cache = WavefunctionCache()
        self._nstar = {}
        self._gamma = {}
        self._alpha = {}

    def n_star(self, n: int) -> float:
        if n not in self._nstar:
            self._nstar[n] = self.table.level(self.config.series_label, n).n_star
        return self._nstar[n]

    def omega_max(self, n: int) -> float:
        """Rabi frequency at fixed laser power, rad/s."""
        ratio = self.n_star(n) / self.n_star(self.config.n_anchor)
        return self.config.omega_max_anchor * ratio**RABI_SCALING_EXPONENT

    def v_int(self, n: int) -> float:
        """Blockade shift -C6(n)/R^6 with C6 scaled from the anchor, rad/s."""
        ratio = self.n_star(n) / self.n_star(self.config.n_anchor)
        c6 = self.config.c6_anchor * ratio**C6_SCALING_EXPONENT
        return -c6 / self.config.distance_r**6

    def gamma(self, n: int) -> float:
        """Total decay rate 1/tau(n) at the configured temperature, 1/s."""
        if n not in self._gamma:
            series = self.table[self.config.series_label]
            finals = [self.table[lab] for lab in self.config.decay_series]
            _, tau_s = total_width(series, n, self.config.temperature_k,
                                   finals, cache=self.cache)
            self._gamma[n] = 1.0 / tau_s
        return self._gamma[n]

    def alpha_s(self, n: int) -> float:
        """Scalar polarisability, atomic units."""
        if n not in self._alpha:
            fit = polarisability(self.table, self.config.series_label, n,
                                 cache=self.cache)
            self._alpha[n] = fit.alpha_au
        return self._alpha[n]

    def dc_shift_rad_s(self, n: int, e_mv_cm: float) -> float:
        """DC Stark detuning offset -1/2 alpha_s E^2, rad/s (signed)."""
        e_au = (e_mv_cm * 0.1) / EFIELD_AU_V_M     # mV/cm -> V/m -> a.u.
        return -0.5 * self.alpha_s(n) * e_au**2 * HARTREE_RAD_S

    def gate_config(self, n: int) -> GateConfig:
        c6_n = -self.v_int(n) * self.config.distance_r**6
        return GateConfig(omega_max=self.omega_max(n), gamma=self.gamma(n),
                          c6=c6_n, distance_r=self.config.distance_r)


def scale_rabi(n: int, config: RankConfig, engine: RankEngine | None = None) -> float:
    engine = engine or RankEngine(config)
    return engine.omega_max(n)


def scale_blockade(n: int, config: RankConfig, engine: RankEngine | None = None) -> float:
    engine = engine or RankEngine(config)
    return engine.v_int(n)


def dc_detuning_offset(n: int, e_mv_cm: float, config: RankConfig,
                       engine: RankEngine | None = None) -> float:
    """Stark offset in units of Omega_max(n), ready to use as a delta offset."""
    if e_mv_cm < 0:
        raise ConfigError("field magnitude must be nonnegative")
    engine = engine or RankEngine(config)
    return engine.dc_shift_rad_s(n, e_mv_cm) / engine.omega_max(n)


@dataclass(frozen=True)
class RankRow:
    n: int
    omega_max: float       # rad/s
    gamma: float           # 1/s
    alpha_s: float         # atomic units
    dc_shift: float        # rad/s
    fidelity: float

    def __post_init__(self):
        if not (0.0 <= self.fidelity <= 1.0):
            raise ConfigError(f"fidelity {self.fidelity} outside [0, 1]")


def fidelity_vs_n(pulse: Pulse, config: RankConfig, e_mv_cm: float,
                  engine: RankEngine | None = None) -> list[RankRow]:
    """Evaluate the fixed pulse across the n axis at one stray-field value."""
    engine = engine or RankEngine(config)
    rows = []
    for n in config.n_axis:
        gate = engine.gate_config(n)
        d_delta = engine.dc_shift_rad_s(n, e_mv_cm) / engine.omega_max(n)
        report = evaluate(pulse, gate, d_omega=0.0, d_delta=d_delta)
        rows.append(RankRow(n=n, omega_max=engine.omega_max(n),
                            gamma=engine.gamma(n), alpha_s=engine.alpha_s(n),
                            dc_shift=engine.dc_shift_rad_s(n, e_mv_cm),
                            fidelity=report.f))
    return rows


def optimal_state(pulse: Pulse, config: RankConfig, e_mv_cm: float,
                  engine: RankEngine | None = None):
    """(n_opt, F_max) over the n axis; ties break toward smaller n."""
    rows = fidelity_vs_n(pulse, config, e_mv_cm, engine)
    best = max(rows, key=lambda r: (r.fidelity, -r.n))
    return best.n, best.fidelity


@dataclass(frozen=True)
class IntersectionResult:
    e_int_mv_cm: float
    found: bool
    degenerate: bool = False


E_INT_LO = 0.4
E_INT_HI = 10.0
E_INT_RESOLUTION = 0.1


def intersection_field(pulse: Pulse, config: RankConfig, n_ref: int = 61,
                       engine: RankEngine | None = None) -> IntersectionResult:
    """Field where the best achievable fidelity descends to the reference n.

    F_max(E) >= F_ref(E) by construction, so the curves meet where the
    argmax reaches n_ref; bisection on that predicate to 0.1 mV/cm.
    """
    engine = engine or RankEngine(config)

    def above(e):
        n_opt, _ = optimal_state(pulse, config, e, engine)
        return n_opt > n_ref

    lo, hi = E_INT_LO, E_INT_HI
    if not above(lo):
        return IntersectionResult(e_int_mv_cm=lo, found=True, degenerate=True)
    if above(hi):
        return IntersectionResult(e_int_mv_cm=hi, found=False)
    while hi - lo > E_INT_RESOLUTION:
        mid = 0.5 * (lo + hi)
        if above(mid):
            lo = mid
        else:
            hi = mid
    return IntersectionResult(e_int_mv_cm=0.5 * (lo + hi), found=True)


def write_rank_csv(rows, path, e_mv_cm: float, timestamp: str | None = None) -> None:
    """CSV: n,omega_max_hz,gamma_hz,alpha_s_au,dc_shift_hz,fidelity.

    Angular rates are written divided by 2 pi.  The header records the
    scaling assumptions and flags the argmax row.
    """
    best = max(rows, key=lambda r: (r.fidelity, -r.n))
    lines = []
    if timestamp is not None:
        lines.append(f"# generated {timestamp}")
    lines.append(f"# {SCALING_NOTE}")
    lines.append(f"# stray field E = {e_mv_cm:g} mV/cm; argmax n = {best.n} "
                 f"with F = {best.fidelity:.9g}")
    lines.append("n,omega_max_hz,gamma_hz,alpha_s_au,dc_shift_hz,fidelity")
    two_pi = 2 * math.pi
    for r in rows:
        lines.append(f"{r.n},{r.omega_max / two_pi:.9g},{r.gamma / two_pi:.9g},"
                     f"{r.alpha_s:.9g},{r.dc_shift / two_pi:.9g},"
                     f"{r.fidelity:.9g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
