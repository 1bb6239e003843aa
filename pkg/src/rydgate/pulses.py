"""Pulse and gate-configuration types, control integration, and pulse file I/O.

All dynamical quantities are dimensionless: Rabi amplitudes in units of the
maximum Rabi frequency, detunings likewise, and times in units of the inverse
maximum Rabi frequency.  Conversion to and from SI happens only at the
:class:`GateConfig` boundary.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import PulseBoundError, PulseFormatError, PulseVersionError

PULSE_FILE_VERSION = 1

# Slack allowed on the hard control bounds; optimiser output is projected to
# satisfy the bounds exactly, so this only absorbs floating-point round-off.
BOUND_TOL = 1e-9


def _readonly(a):
    arr = np.asarray(a, dtype=float).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Pulse:
    """Discretized control trajectory.

    Sample ``k`` holds the Rabi amplitude ``omega[k]`` and detuning
    ``delta[k]`` applied over the interval ``[k*dt, (k+1)*dt)``, so the total
    duration is ``n_steps * dt``.
    """

    n_steps: int
    dt: float
    omega: np.ndarray
    delta: np.ndarray
    meta: str = ""

    def __post_init__(self):
        object.__setattr__(self, "omega", _readonly(self.omega))
        object.__setattr__(self, "delta", _readonly(self.delta))
        if self.n_steps < 1:
            raise PulseFormatError("n_steps must be positive", field="n_steps")
        if not (self.dt > 0):
            raise PulseFormatError("dt must be positive", field="dt")
        if len(self.omega) != self.n_steps or len(self.delta) != self.n_steps:
            raise PulseFormatError(
                f"n_steps={self.n_steps} does not match array lengths "
                f"omega={len(self.omega)}, delta={len(self.delta)}",
                field="n_steps",
            )
        if not (np.all(np.isfinite(self.omega)) and np.all(np.isfinite(self.delta))):
            raise PulseFormatError("non-finite sample values", field="omega")
        bad = np.nonzero((self.omega < -BOUND_TOL) | (self.omega > 1.0 + BOUND_TOL))[0]
        if bad.size:
            k = int(bad[0])
            raise PulseBoundError(
                f"omega[{k}] = {self.omega[k]!r} outside [0, 1]", step=k
            )

    @property
    def duration(self) -> float:
        return self.n_steps * self.dt

    @property
    def times(self) -> np.ndarray:
        """Left edge of each sample interval."""
        return np.arange(self.n_steps) * self.dt

    def with_meta(self, meta: str) -> "Pulse":
        return replace(self, meta=meta)


@dataclass(frozen=True)
class GateConfig:
    """Physical context for a gate: laser, decay, and interaction parameters.

    ``omega_max`` and ``gamma`` are angular rates (rad/s); ``c6`` is the van
    der Waals coefficient in rad/s * m^6 with its sign carried through;
    ``distance_r`` is the interatomic distance in metres.  The interaction
    ``v_int = -c6 / R^6`` is always recomputed from these, never stored.
    """

    omega_max: float
    gamma: float
    c6: float
    distance_r: float

    def __post_init__(self):
        if not (self.omega_max > 0):
            raise PulseFormatError("omega_max must be positive", field="omega_max")
        if self.gamma < 0:
            raise PulseFormatError("gamma must be nonnegative", field="gamma")
        if not (self.distance_r > 0):
            raise PulseFormatError("distance_r must be positive", field="distance_r")

    @property
    def v_int(self) -> float:
        """Interaction shift of the doubly-excited state, rad/s."""
        return -self.c6 / self.distance_r**6

    @property
    def gamma_dimensionless(self) -> float:
        return self.gamma / self.omega_max

    @property
    def v_int_dimensionless(self) -> float:
        return self.v_int / self.omega_max

    def without_decay(self) -> "GateConfig":
        return replace(self, gamma=0.0)


def default_sr61_config() -> GateConfig:
    """Sr parameters at n = 61: Rabi 2pi x 6.8 MHz, lifetime 96.5 us,
    C6 = -2pi x 181 GHz um^6, R = 3.5 um."""
    return GateConfig(
        omega_max=2 * math.pi * 6.8e6,
        gamma=1.0 / 96.5e-6,
        c6=-2 * math.pi * 181e9 * 1e-36,
        distance_r=3.5e-6,
    )


def integrate_controls(derivatives, dt, initial=(0.0, 0.0), delta_bound=None,
                       meta="") -> Pulse:
    """Accumulate derivative controls into a pulse by forward Euler.

    ``derivatives`` is a sequence of ``(dOmega/dt, dDelta/dt)`` pairs; the
    returned pulse has ``len(derivatives) + 1`` samples starting at
    ``initial``.  Accumulated values outside the Rabi bound ``[0, 1]`` (or
    ``|delta| > delta_bound`` when a bound is given) raise
    :class:`PulseBoundError` naming the first offending step.
    """
    derivs = np.asarray(derivatives, dtype=float)
    if derivs.ndim != 2 or derivs.shape[1] != 2 or derivs.shape[0] == 0:
        raise PulseFormatError("derivatives must be a non-empty list of pairs")
    if not (dt > 0):
        raise PulseFormatError("dt must be positive", field="dt")
    m = derivs.shape[0]
    omega = np.empty(m + 1)
    delta = np.empty(m + 1)
    omega[0], delta[0] = initial
    omega[1:] = initial[0] + np.cumsum(derivs[:, 0]) * dt
    delta[1:] = initial[1] + np.cumsum(derivs[:, 1]) * dt
    bad = np.nonzero((omega < -BOUND_TOL) | (omega > 1.0 + BOUND_TOL))[0]
    if bad.size:
        k = int(bad[0])
        raise PulseBoundError(f"accumulated omega[{k}] = {omega[k]!r} outside [0, 1]",
                              step=k)
    if delta_bound is not None:
        bad = np.nonzero(np.abs(delta) > delta_bound + BOUND_TOL)[0]
        if bad.size:
            k = int(bad[0])
            raise PulseBoundError(
                f"accumulated delta[{k}] = {delta[k]!r} outside "
                f"[-{delta_bound}, {delta_bound}]", step=k)
    return Pulse(n_steps=m + 1, dt=dt, omega=omega, delta=delta, meta=meta)


def controls_of(pulse: Pulse):
    """Inverse of :func:`integrate_controls`: finite-difference the samples.

    Returns ``(derivatives, initial)`` such that integrating them reproduces
    the pulse to round-off.
    """
    do = np.diff(pulse.omega) / pulse.dt
    dd = np.diff(pulse.delta) / pulse.dt
    return np.stack([do, dd], axis=1), (float(pulse.omega[0]), float(pulse.delta[0]))


def resample(pulse: Pulse, new_n_steps: int) -> Pulse:
    """Linearly interpolate the samples onto a new grid of the same duration."""
    if new_n_steps < 2:
        raise PulseFormatError("new_n_steps must be >= 2", field="n_steps")
    if new_n_steps == pulse.n_steps:
        return replace(pulse)
    t_old = np.arange(pulse.n_steps) * pulse.dt
    new_dt = pulse.duration / new_n_steps
    t_new = np.arange(new_n_steps) * new_dt
    omega = np.interp(t_new, t_old, pulse.omega)
    delta = np.interp(t_new, t_old, pulse.delta)
    return Pulse(n_steps=new_n_steps, dt=new_dt, omega=omega, delta=delta,
                 meta=pulse.meta)


def save_pulse(pulse: Pulse, path) -> None:
    doc = {
        "version": PULSE_FILE_VERSION,
        "units": "omega_max",
        "n_steps": pulse.n_steps,
        "dt": pulse.dt,
        "omega": [float(v) for v in pulse.omega],
        "delta": [float(v) for v in pulse.delta],
        "meta": pulse.meta,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def load_pulse(path) -> Pulse:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PulseFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise PulseFormatError("pulse file must contain a JSON object")
    for key in ("version", "units", "n_steps", "dt", "omega", "delta"):
        if key not in doc:
            raise PulseFormatError(f"missing field {key!r}", field=key)
    if doc["version"] != PULSE_FILE_VERSION:
        raise PulseVersionError(
            f"unsupported pulse file version {doc['version']!r} "
            f"(expected {PULSE_FILE_VERSION})", field="version")
    if doc["units"] != "omega_max":
        raise PulseFormatError(f"unsupported units {doc['units']!r}", field="units")
    n = doc["n_steps"]
    if not isinstance(n, int):
        raise PulseFormatError("n_steps must be an integer", field="n_steps")
    if len(doc["omega"]) != n or len(doc["delta"]) != n:
        raise PulseFormatError(
            f"n_steps={n} inconsistent with array lengths "
            f"omega={len(doc['omega'])}, delta={len(doc['delta'])}",
            field="n_steps")
    return Pulse(n_steps=n, dt=float(doc["dt"]), omega=doc["omega"],
                 delta=doc["delta"], meta=str(doc.get("meta", "")))


def write_pulse_csv(pulse: Pulse, path, timestamp: str | None = None) -> None:
    """CSV export: columns step,t,omega,delta at full double precision."""
    lines = []
    if timestamp is not None:
        lines.append(f"# generated {timestamp}")
    lines.append("step,t,omega,delta")
    for k in range(pulse.n_steps):
        t = k * pulse.dt
        lines.append(f"{k},{t:.17g},{pulse.omega[k]:.17g},{pulse.delta[k]:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
