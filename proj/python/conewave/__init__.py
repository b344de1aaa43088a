"""Spectral Besov spaces on Siegel-type nilpotent groups."""

from ._core import (
    ConeKind,
    ConfigError,
    DomainError,
    IoError,
    NumericalError,
    Side,
    delta_power,
    experiment_names,
    gamma_cone,
    invariant_distance,
    make_cone,
    membership,
    run_config_file,
    run_config_text,
)

__all__ = [
    "ConeKind",
    "ConfigError",
    "DomainError",
    "IoError",
    "NumericalError",
    "Side",
    "delta_power",
    "experiment_names",
    "gamma_cone",
    "invariant_distance",
    "make_cone",
    "membership",
    "run_config_file",
    "run_config_text",
]
