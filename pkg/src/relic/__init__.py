"""Executable algebra of non-deterministic programs over finite state spaces."""

from .relations import (
    UNDEFINED,
    Relation,
    SpaceMismatchError,
    StateSpace,
    diagonal,
    empty,
    fail_all,
    full,
    make_space,
)

__all__ = [
    "UNDEFINED",
    "Relation",
    "SpaceMismatchError",
    "StateSpace",
    "diagonal",
    "empty",
    "fail_all",
    "full",
    "make_space",
]

__version__ = "0.1.0"
