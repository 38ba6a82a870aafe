"""Minmod slope reconstruction and its mesh-dependent modification."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np


class LimiterKind(Enum):
    ZERO = "zero"
    MINMOD = "minmod"
    MINMOD_MODIFIED = "minmod-modified"


@dataclass(frozen=True)
class LimiterConfig:
    """Slope limiter selection.

    The modified variant appends sign(forward jump) * k_tilde * dx**alpha as
    a fourth minmod argument, capping every slope at k_tilde * dx**alpha;
    alpha must lie strictly inside (2/3, 1).
    """

    kind: LimiterKind = LimiterKind.MINMOD
    k_tilde: float = 1.0
    alpha: float = 0.75

    def __post_init__(self):
        if self.k_tilde <= 0:
            raise ValueError("k_tilde must be positive")
        if self.kind is LimiterKind.MINMOD_MODIFIED and not (2.0 / 3.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie strictly in (2/3, 1) for the modified limiter")


def minmod(args: Sequence[float]) -> float:
    """Smallest-magnitude argument if all share a strict sign, else 0."""
    if len(args) == 0:
        raise ValueError("minmod needs at least one argument")
    if all(a > 0 for a in args):
        return min(args)
    if all(a < 0 for a in args):
        return max(args)
    return 0.0


def _minmod_columns(cols: np.ndarray) -> np.ndarray:
    """Columnwise minmod of a (m, n) stack; a zero entry forces 0."""
    pos = np.all(cols > 0, axis=0)
    neg = np.all(cols < 0, axis=0)
    mags = np.min(np.abs(cols), axis=0)
    return np.where(pos, mags, 0.0) - np.where(neg, mags, 0.0)


def slopes(values: np.ndarray, dx: float, cfg: LimiterConfig) -> np.ndarray:
    """Limited slopes per cell (first and last entries are 0).

    Interior slopes are minmod(u[j+1]-u[j], (u[j+1]-u[j-1])/2, u[j]-u[j-1]);
    callers supply ghost cells when boundary slopes matter.
    """
    values = np.asarray(values, dtype=float)
    if len(values) < 3:
        raise ValueError("need at least 3 values for interior slopes")
    out = np.zeros_like(values)
    if cfg.kind is LimiterKind.ZERO:
        return out
    fwd = values[2:] - values[1:-1]
    bwd = values[1:-1] - values[:-2]
    ctr = 0.5 * (values[2:] - values[:-2])
    cols = [fwd, ctr, bwd]
    if cfg.kind is LimiterKind.MINMOD_MODIFIED:
        cols.append(np.sign(fwd) * (cfg.k_tilde * dx**cfg.alpha))
    out[1:-1] = _minmod_columns(np.stack(cols))
    return out
