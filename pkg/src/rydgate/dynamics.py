"""Sector Hamiltonians and trajectory propagation.

The two-atom gate dynamics decompose into two decoupled sectors: the
singly-occupied sector spanned by {|01>, |0r>} and the doubly-occupied
symmetric sector spanned by {|11>, |b>, |rr>} with |b> = (|1r>+|r1>)/sqrt(2).
The full 9-dimensional two-atom propagation is kept as a correctness oracle.

Everything here is dimensionless (rates in units of the maximum Rabi
frequency, time in its inverse); decay enters as a non-Hermitian width so
norm loss is population lost from the computational subspace.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import NumericError
from .pulses import GateConfig, Pulse

SQRT2 = np.sqrt(2.0)


def h01(omega, delta, gamma=0.0):
    """Single-excitation sector Hamiltonian over {|01>, |0r>}."""
    return np.array(
        [[0.0, omega / 2.0],
         [omega / 2.0, -delta - 0.5j * gamma]],
        dtype=complex,
    )


def h11(omega, delta, gamma=0.0, v_int=0.0):
    """Symmetric double-excitation sector over {|11>, |b>, |rr>}.

    The bright state couples with sqrt(2) enhancement on both legs; |rr>
    carries twice the single-atom width (two excited atoms).
    """
    c = SQRT2 * omega / 2.0
    return np.array(
        [[0.0, c, 0.0],
         [c, -delta - 0.5j * gamma, c],
         [0.0, c, v_int - 2.0 * delta - 1.0j * gamma]],
        dtype=complex,
    )


def h_single_atom(omega, delta, gamma=0.0):
    """Three-level single-atom Hamiltonian over {|0>, |1>, |r>}; |0> is dark."""
    h = np.zeros((3, 3), dtype=complex)
    h[1, 2] = h[2, 1] = omega / 2.0
    h[2, 2] = -delta - 0.5j * gamma
    return h


def h_full(omega, delta, gamma=0.0, v_int=0.0):
    """Two-atom Hamiltonian on the 9-dim product basis (oracle path)."""
    h1 = h_single_atom(omega, delta, gamma)
    eye = np.eye(3)
    h = np.kron(h1, eye) + np.kron(eye, h1)
    h[8, 8] += v_int
    return h


# Rydberg-number operator diagonals per basis dimension.
_NDIAG = {
    2: np.array([0.0, 1.0]),
    3: np.array([0.0, 1.0, 2.0]),
    9: np.array([0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0]),
}


def rydberg_population(state) -> float:
    """Expectation of the Rydberg-number operator in the state's sector basis."""
    state = np.asarray(state)
    diag = _NDIAG[state.shape[0]]
    return float(np.real(np.sum(diag * np.abs(state) ** 2)))


def step_propagate(h, state, dt):
    """Apply the exact piecewise-constant step exp(-i H dt) to a state."""
    h = np.asarray(h, dtype=complex)
    state = np.asarray(state, dtype=complex)
    if not (dt > 0):
        raise NumericError("dt must be positive")
    if not (np.all(np.isfinite(h.view(float))) and np.all(np.isfinite(state.view(float)))):
        raise NumericError("non-finite entries in Hamiltonian or state")
    return expm(-1j * dt * h) @ state


# Control-derivative blocks dH/dOmega and dH/dDelta for each sector.
_DH01_OMEGA = np.array([[0.0, 0.5], [0.5, 0.0]], dtype=complex)
_DH01_DELTA = np.diag([0.0, -1.0]).astype(complex)
_DH11_OMEGA = (SQRT2 / 2.0) * np.array(
    [[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]], dtype=complex)
_DH11_DELTA = np.diag([0.0, -1.0, -2.0]).astype(complex)


def _augmented_generator(h, with_delta):
    """Block upper-triangular generator propagating (s_omega[, s_delta], psi).

    The sensitivity states obey i ds/dt = H s + (dH/dmu) psi, which together
    with i dpsi/dt = H psi is generated exactly by this block matrix.
    """
    dim = h.shape[0]
    h_om = _DH01_OMEGA if dim == 2 else _DH11_OMEGA
    h_de = _DH01_DELTA if dim == 2 else _DH11_DELTA
    z = np.zeros((dim, dim), dtype=complex)
    if with_delta:
        return np.block([[h, z, h_om], [z, h, h_de], [z, z, h]])
    return np.block([[h, h_om], [z, h]])


@dataclass(frozen=True)
class SensitivityBundle:
    """Terminal parameter-sensitivity states d(psi)/d(offset) per sector."""

    s_omega_01: np.ndarray
    s_omega_11: np.ndarray
    s_delta_01: np.ndarray
    s_delta_11: np.ndarray


@dataclass(frozen=True)
class TrajectoryRecord:
    """Outcome of propagating both sectors through a pulse."""

    state01: np.ndarray
    state11: np.ndarray
    sensitivities: SensitivityBundle | None
    t_r_01: float
    t_r_11: float
    phi01: float
    phi11: float
    history01: np.ndarray | None = None
    history11: np.ndarray | None = None

    @property
    def a01(self) -> complex:
        return complex(self.state01[0])

    @property
    def a11(self) -> complex:
        return complex(self.state11[0])


def _propagate_sector(dim, omega, delta, gamma, v_int, dt,
                      want_sensitivities, want_history):
    """Run one sector; returns (psi, s_om, s_de, t_r, history)."""
    build = (lambda w, d: h01(w, d, gamma)) if dim == 2 else (
        lambda w, d: h11(w, d, gamma, v_int))
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1.0
    s_om = np.zeros(dim, dtype=complex)
    s_de = np.zeros(dim, dtype=complex)
    t_r = 0.0
    history = [psi.copy()] if want_history else None
    for k in range(len(omega)):
        h = build(omega[k], delta[k])
        n_before = rydberg_population(psi)
        if want_sensitivities:
            gen = _augmented_generator(h, with_delta=True)
            z = np.concatenate([s_om, s_de, psi])
            z = step_propagate(gen, z, dt)
            s_om, s_de, psi = z[:dim], z[dim:2 * dim], z[2 * dim:]
        else:
            psi = step_propagate(h, psi, dt)
        t_r += 0.5 * dt * (n_before + rydberg_population(psi))
        if want_history:
            history.append(psi.copy())
    return psi, s_om, s_de, t_r, (np.array(history) if want_history else None)


def propagate(pulse: Pulse, config: GateConfig, offsets=(0.0, 0.0),
              want_sensitivities=False, want_history=False) -> TrajectoryRecord:
    """Propagate both sectors through the pulse with static control offsets.

    ``offsets = (d_omega, d_delta)`` shift every sample, modelling constant
    deviations of the Rabi frequency and detuning.  Sensitivities are taken
    with respect to these offsets and start at zero.
    """
    d_om, d_de = offsets
    omega = pulse.omega + d_om
    delta = pulse.delta + d_de
    gamma = config.gamma_dimensionless
    v_int = config.v_int_dimensionless

    psi1, s_om1, s_de1, tr1, hist1 = _propagate_sector(
        2, omega, delta, gamma, v_int, pulse.dt, want_sensitivities, want_history)
    psi2, s_om2, s_de2, tr2, hist2 = _propagate_sector(
        3, omega, delta, gamma, v_int, pulse.dt, want_sensitivities, want_history)

    sens = None
    if want_sensitivities:
        sens = SensitivityBundle(s_omega_01=s_om1, s_omega_11=s_om2,
                                 s_delta_01=s_de1, s_delta_11=s_de2)
    return TrajectoryRecord(
        state01=psi1, state11=psi2, sensitivities=sens,
        t_r_01=tr1, t_r_11=tr2,
        phi01=float(np.angle(psi1[0])), phi11=float(np.angle(psi2[0])),
        history01=hist1, history11=hist2,
    )


def propagate_full(pulse: Pulse, config: GateConfig, initial_state,
                   offsets=(0.0, 0.0)):
    """Oracle: propagate a 9-dim two-atom state through the pulse."""
    d_om, d_de = offsets
    gamma = config.gamma_dimensionless
    v_int = config.v_int_dimensionless
    psi = np.asarray(initial_state, dtype=complex).copy()
    for k in range(pulse.n_steps):
        h = h_full(pulse.omega[k] + d_om, pulse.delta[k] + d_de, gamma, v_int)
        psi = step_propagate(h, psi, pulse.dt)
    return psi


def write_history_csv(record: TrajectoryRecord, dt, path,
                      timestamp: str | None = None) -> None:
    """Dump the per-step state history: step,t,re/im of each sector amplitude."""
    if record.history01 is None or record.history11 is None:
        raise NumericError("trajectory was propagated without history")
    lines = []
    if timestamp is not None:
        lines.append(f"# generated {timestamp}")
    cols = ["step", "t"]
    cols += [f"{p}_{name}" for name in ("a01", "a0r") for p in ("re", "im")]
    cols += [f"{p}_{name}" for name in ("a11", "ab", "arr") for p in ("re", "im")]
    lines.append(",".join(cols))
    for k in range(record.history01.shape[0]):
        row = [str(k), f"{k * dt:.17g}"]
        for v in record.history01[k]:
            row += [f"{v.real:.17g}", f"{v.imag:.17g}"]
        for v in record.history11[k]:
            row += [f"{v.real:.17g}", f"{v.imag:.17g}"]
        lines.append(",".join(row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
