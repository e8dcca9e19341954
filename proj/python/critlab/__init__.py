"""Python bindings for the critlab simulation library."""

from ._critlab import (
    AdaptationLaw,
    AffineLawParams,
    CritlabError,
    Interval,
    balance_prediction,
    fixed_point,
    log_uniform_grid,
    run_cli,
    simulate_autonomous,
    simulate_driven,
    simulate_oscillator,
)

__all__ = [
    "AdaptationLaw",
    "AffineLawParams",
    "CritlabError",
    "Interval",
    "balance_prediction",
    "fixed_point",
    "log_uniform_grid",
    "run_cli",
    "simulate_autonomous",
    "simulate_driven",
    "simulate_oscillator",
]
