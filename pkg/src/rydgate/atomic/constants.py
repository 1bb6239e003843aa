"""Physical constants in atomic units (CODATA 2018)."""

from __future__ import annotations

from dataclasses import dataclass

# Fine-structure constant and derived speed of light (1/alpha in a.u.).
FINE_STRUCTURE = 7.2973525693e-3
SPEED_OF_LIGHT_AU = 1.0 / FINE_STRUCTURE

# Boltzmann constant in Hartree per kelvin.
KB_AU_PER_K = 3.166811563e-6

# Atomic unit of time in seconds.
AU_TIME_S = 2.4188843265857e-17

# Hartree energy as an angular frequency (rad/s) and in wavenumbers.
HARTREE_RAD_S = 4.1341373335e16
HARTREE_CM1 = 219474.6313632

# Atomic unit of electric field in V/m.
EFIELD_AU_V_M = 5.14220674763e11


@dataclass(frozen=True)
class Constants:
    """Constant set used by the width and blackbody formulas."""

    alpha: float = FINE_STRUCTURE
    c: float = SPEED_OF_LIGHT_AU
    temperature_k: float = 300.0

    @property
    def kbt(self) -> float:
        """k_B * T in Hartree."""
        return KB_AU_PER_K * self.temperature_k
