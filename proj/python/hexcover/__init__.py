"""Hexagonal coverage path planning: instance generation, heuristics and policy inference."""

from ._hexcover import (
    BudgetExhausted,
    ConfigError,
    DataError,
    Instance,
    LogicError,
    audit,
    generate_corpus,
    methods,
    read_corpus,
    score,
    solve,
    solve_policy,
    turn_penalty,
)

__all__ = [
    "BudgetExhausted",
    "ConfigError",
    "DataError",
    "Instance",
    "LogicError",
    "audit",
    "generate_corpus",
    "methods",
    "read_corpus",
    "score",
    "solve",
    "solve_policy",
    "turn_penalty",
]

__version__ = "0.1.0"
