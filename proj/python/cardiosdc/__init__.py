"""SDC time stepping with algebraic adaptivity for monodomain and EMI cardiac models."""

from ._core import (
    Config,
    DropMode,
    ModelKind,
    Simulation,
    benchmark,
    check_termination,
    collocation_matrices,
    default_config,
    drop_tolerance,
    estimate_rho,
    i_ion,
    load_config,
    parse_config,
    r_gate,
    radau_iia_nodes,
    required_sweeps,
    run,
)

__all__ = [
    "Config",
    "DropMode",
    "ModelKind",
    "Simulation",
    "benchmark",
    "check_termination",
    "collocation_matrices",
    "default_config",
    "drop_tolerance",
    "estimate_rho",
    "i_ion",
    "load_config",
    "parse_config",
    "r_gate",
    "radau_iia_nodes",
    "required_sweeps",
    "run",
]
