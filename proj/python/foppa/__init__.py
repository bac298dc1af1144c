"""Turns TED award tables into a relational database of lots, agents and criteria."""

from ._foppa import (
    ConfigError,
    InputError,
    InvariantViolation,
    department_of,
    name_similarity,
    normalize_address,
    normalize_name,
    normalize_weights,
    run,
    validate_config,
)

__all__ = [
    "ConfigError",
    "InputError",
    "InvariantViolation",
    "department_of",
    "name_similarity",
    "normalize_address",
    "normalize_name",
    "normalize_weights",
    "run",
    "validate_config",
]
