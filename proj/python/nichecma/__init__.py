"""Niching CMA-ES on tunable composite multimodal benchmarks.

Thin layer over the compiled ``_core`` module; see ``help(nichecma._core)``.
"""

from ._core import (
    CmaParams,
    Error,
    Problem,
    Strategy,
    base_eval,
    derive_params,
    epsilon_f,
    expected_norm,
    f1_score,
    hardness,
    match_peaks,
    niching_radius,
    overall_score,
    run,
    suite,
)

__all__ = [
    "CmaParams",
    "Error",
    "Problem",
    "Strategy",
    "base_eval",
    "derive_params",
    "epsilon_f",
    "expected_norm",
    "f1_score",
    "hardness",
    "match_peaks",
    "niching_radius",
    "overall_score",
    "run",
    "suite",
]

__version__ = "0.1.0"
