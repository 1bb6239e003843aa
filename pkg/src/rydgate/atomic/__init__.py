"""Single-channel quantum-defect engine: levels, wavefunctions, widths, Stark."""

from .constants import Constants
from .defects import (DefectModel, RydbergLevel, SeriesTable, hydrogen_series,
                      level, load_series_table)
from .lifetimes import (LifetimeScan, TransitionRecord, angular_line_factor,
                        lifetime_scan, spontaneous_width, thermal_occupation,
                        total_width, write_lifetime_csv)
from .radial import (RadialWavefunction, WavefunctionCache, radial_wavefunction,
                     rdme, rdme_wavefunctions, turning_point)
from .stark import (PolarisabilityFit, StarkMap, default_field_axis,
                    polarisability, stark_map, stark_shift_perturbative,
                    write_polarisability_csv, write_stark_csv)
from .wigner import wigner3j, wigner6j

__all__ = [
    "Constants", "DefectModel", "RydbergLevel", "SeriesTable",
    "hydrogen_series", "level", "load_series_table",
    "LifetimeScan", "TransitionRecord", "angular_line_factor",
    "lifetime_scan", "spontaneous_width", "thermal_occupation", "total_width",
    "write_lifetime_csv",
    "RadialWavefunction", "WavefunctionCache", "radial_wavefunction", "rdme",
    "rdme_wavefunctions", "turning_point",
    "PolarisabilityFit", "StarkMap", "default_field_axis", "polarisability",
    "stark_map", "stark_shift_perturbative", "write_polarisability_csv",
    "write_stark_csv",
    "wigner3j", "wigner6j",
]
