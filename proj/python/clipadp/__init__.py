"""Clipped adaptive dynamic programming."""

from ._clipadp import (
    Error,
    UsageError,
    check_clipping,
    check_mlp,
    clipping_fraction,
    run,
    step,
)

__all__ = [
    "Error",
    "UsageError",
    "check_clipping",
    "check_mlp",
    "clipping_fraction",
    "run",
    "step",
]
