"""Symmetric inclusion process simulator and verification studies."""

from ._core import (
    ConfigError,
    DomainError,
    Error,
    __version__,
    d_single,
    default_config,
    density,
    detailed_balance_ratio,
    duality_function,
    exact_dual_expectation,
    marginal_pmf,
    run_study,
    studies,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Error",
    "__version__",
    "d_single",
    "default_config",
    "density",
    "detailed_balance_ratio",
    "duality_function",
    "exact_dual_expectation",
    "marginal_pmf",
    "run_study",
    "studies",
]
