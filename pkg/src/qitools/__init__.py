"""Finite-dimensional quantum information toolkit."""

from . import (
    channels,
    discrimination,
    entanglement,
    instruments,
    linalg,
    observables,
    protocols,
    rand,
    states,
)
from .linalg import ATOL

__all__ = [
    "ATOL",
    "channels",
    "discrimination",
    "entanglement",
    "instruments",
    "linalg",
    "observables",
    "protocols",
    "rand",
    "states",
]
