"""Robust Rydberg CZ gate pulses: synthesis, evaluation, and atomic scans."""

from .dynamics import (SensitivityBundle, TrajectoryRecord, h01, h11, h_full,
                       propagate, propagate_full, rydberg_population,
                       step_propagate)
from .fidelity import (FidelityReport, SweepGrid, bell_fidelity, evaluate,
                       rydberg_time, sweep)
from .optimizer import (CostWeights, OptimizationProblem, SolveReport,
                        alm_solve, cost, gradient, init_controls,
                        multistart_solve, problem_preset)
from .pulses import (GateConfig, Pulse, controls_of, default_sr61_config,
                     integrate_controls, load_pulse, resample, save_pulse)
from .staterank import (RankConfig, RankEngine, RankRow, dc_detuning_offset,
                        fidelity_vs_n, intersection_field, optimal_state,
                        scale_blockade, scale_rabi)

__version__ = "0.1.0"

__all__ = [
    "CostWeights", "FidelityReport", "GateConfig", "OptimizationProblem",
    "Pulse", "RankConfig", "RankEngine", "RankRow", "SensitivityBundle",
    "SolveReport", "SweepGrid", "TrajectoryRecord", "alm_solve",
    "bell_fidelity", "controls_of", "cost", "dc_detuning_offset",
    "default_sr61_config", "evaluate", "fidelity_vs_n", "gradient", "h01",
    "h11", "h_full", "init_controls", "integrate_controls",
    "intersection_field", "load_pulse", "multistart_solve", "optimal_state",
    "problem_preset", "propagate", "propagate_full", "resample",
    "rydberg_population", "rydberg_time", "save_pulse", "scale_blockade",
    "scale_rabi", "step_propagate", "sweep",
]
