"""Staggered central time steps and the marching driver.

Both schemes evolve cell averages onto the opposite-parity grid:

    first order:   v = (uL + uR)/2 - lam*(f(kR, uR) - f(kL, uL))
    second order:  v = (uL + uR)/2 - (sR - sL)/8
                       - lam*(f(kR, mR) - f(kL, mL))

with limited slopes s, mid-time values m = u - (lam/2) f_u(k, u) s, and
lam = dt/dx held fixed.  The second-order update is algebraically a
first-order step plus differenced correction terms

    a = lam*(f(k, m) - f(k, u)) + s/8,

which `predictor_corrector_step` evaluates directly.  Absorbing boundaries
are realized by ghost replication; each step lands exactly on the natural
grid of the new parity (n values on Base, n-1 on Half).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .diagnostics import Diagnostic, DiagnosticsCollector, DiagnosticsReport
from .flux_model import Coefficient, FluxModel
from .grid import Parity, StaggeredState, cell_average_coefficient, extend_absorbing
from .limiter import LimiterConfig, slopes

log = logging.getLogger(__name__)

CFL_TOL = 1e-12


class Scheme(Enum):
    LAX_FRIEDRICHS = "lax-friedrichs"
    NESSYAHU_TADMOR = "nessyahu-tadmor"


class CflLevel(Enum):
    MAX_PRINCIPLE = "max-principle"
    ONE_SIDED = "one-sided"
    CUBIC_ESTIMATE = "cubic-estimate"
    MANUAL = "manual"


class CflError(RuntimeError):
    """Raised when lam * sup|f_u| exceeds the admissible bound."""

    def __init__(self, kappa_used: float, kappa_bound: float, level: CflLevel):
        self.kappa_used = kappa_used
        self.kappa_bound = kappa_bound
        self.level = level
        super().__init__(
            f"CFL violation: kappa_used={kappa_used:.6g} exceeds "
            f"kappa_bound={kappa_bound:.6g} at level {level.value}")


@dataclass(frozen=True)
class SchemeConfig:
    """Scheme selection, mesh ratio lam = dt/dx, limiter, and diagnostic toggles."""

    scheme: Scheme = Scheme.NESSYAHU_TADMOR
    limiter: LimiterConfig = field(default_factory=LimiterConfig)
    lam: float = 0.05
    cfl_level: CflLevel = CflLevel.MAX_PRINCIPLE
    collect_diagnostics: bool = True
    window_x: float | None = None
    entropy_c_count: int = 11

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError("lam must be positive")


@dataclass(frozen=True)
class CorrectionTerms:
    """Per-cell correction values a_j of the predictor-corrector form."""

    a: np.ndarray


def cfl_bound(model: FluxModel, level: CflLevel) -> float:
    """Admissible kappa = lam * sup|f_u| for the requested guarantee level.

    MAX_PRINCIPLE keeps the solution inside [u_lo, u_hi]; ONE_SIDED
    additionally yields the one-sided jump decay; CUBIC_ESTIMATE the cubic
    and quadratic accumulator bounds.  MANUAL returns infinity and leaves
    the choice to the caller.
    """
    if level is CflLevel.MANUAL:
        return math.inf
    if level is CflLevel.MAX_PRINCIPLE:
        return (math.sqrt(2.0) - 1.0) / 2.0
    one_sided = min(model.gamma1 / (7500.0 * model.gamma2), 1.0 / 4000.0)
    if level is CflLevel.ONE_SIDED:
        return one_sided
    c = model.c_u0
    chi = 228.0 + 13.0 * c + 174.0 * c * model.gamma2 + 12.0 * c**2 * model.gamma2
    return min(one_sided, 7.0 / (85.0 + 16.0 * c), model.gamma1 / (model.gamma2 * chi))


def _check_cfl(model: FluxModel, lam: float, level: CflLevel) -> tuple[float, float]:
    kappa_used = lam * model.sup_fu
    kappa = cfl_bound(model, level)
    if kappa_used > kappa + CFL_TOL:
        raise CflError(kappa_used, kappa, level)
    return kappa_used, kappa


def _advance(state: StaggeredState, coeff: Coefficient, v: np.ndarray, lam: float) -> StaggeredState:
    """Wrap stepped values into a natural-width state on the flipped parity."""
    mesh = state.mesh
    if state.parity is Parity.BASE:
        new_parity = Parity.HALF
        v = v[1:-1]  # drop the staggered values outside the natural half grid
    else:
        new_parity = Parity.BASE
    return StaggeredState(
        mesh=mesh,
        values=v,
        kbar=cell_average_coefficient(mesh, coeff, new_parity),
        parity=new_parity,
        time=state.time + lam * mesh.dx,
        step_index=state.step_index + 1,
    )


def lf_step(state: StaggeredState, model: FluxModel, coeff: Coefficient, lam: float,
            cfl_level: CflLevel = CflLevel.MAX_PRINCIPLE) -> StaggeredState:
    """One first-order staggered step onto the opposite-parity grid."""
    _check_cfl(model, lam, cfl_level)
    ev, ek = extend_absorbing(state, 1)
    fl = model.eval(ek, ev)
    v = 0.5 * (ev[:-1] + ev[1:]) - lam * (fl[1:] - fl[:-1])
    return _advance(state, coeff, v, lam)


def mid_time_values(state: StaggeredState, model: FluxModel, slopes_arr: np.ndarray,
                    lam: float) -> np.ndarray:
    """Half-step predicted values u - (lam/2) f_u(k, u) * slope."""
    if len(slopes_arr) != len(state.values):
        raise ValueError("slopes must align with state values")
    return _mid_values(state.values, state.kbar, slopes_arr, model, lam)


def _mid_values(u, k, sig, model, lam):
    return u - 0.5 * lam * np.asarray(model.d_u(k, u), dtype=float) * sig


def _nt_ingredients(state: StaggeredState, model: FluxModel, cfg: SchemeConfig):
    """Extended arrays, slopes, mid values, and correction terms for one step."""
    ev, ek = extend_absorbing(state, 2)
    sig = slopes(ev, state.mesh.dx, cfg.limiter)
    mid = _mid_values(ev, ek, sig, model, cfg.lam)
    f_mid = np.asarray(model.eval(ek, mid), dtype=float)
    f_now = np.asarray(model.eval(ek, ev), dtype=float)
    a = cfg.lam * (f_mid - f_now) + sig / 8.0
    return ev, sig, f_mid, f_now, a


def nt_step(state: StaggeredState, model: FluxModel, coeff: Coefficient,
            cfg: SchemeConfig) -> tuple[StaggeredState, CorrectionTerms]:
    """One second-order staggered step; also returns the correction terms.

    With the Zero limiter the update reduces to the first-order step
    exactly, and the corrections vanish.
    """
    _check_cfl(model, cfg.lam, cfg.cfl_level)
    ev, sig, f_mid, _, a = _nt_ingredients(state, model, cfg)
    v = (0.5 * (ev[1:-2] + ev[2:-1])
         - 0.125 * (sig[2:-1] - sig[1:-2])
         - cfg.lam * (f_mid[2:-1] - f_mid[1:-2]))
    return _advance(state, coeff, v, cfg.lam), CorrectionTerms(a=a[2:-2])


def predictor_corrector_step(state: StaggeredState, model: FluxModel, coeff: Coefficient,
                             cfg: SchemeConfig) -> StaggeredState:
    """Second-order step evaluated as first-order predictor plus corrections.

    Computes v = v_first_order - a[right] + a[left]; an exact algebraic
    rearrangement of the direct update, so outputs agree to rounding.
    """
    _check_cfl(model, cfg.lam, cfg.cfl_level)
    ev, _, _, f_now, a = _nt_ingredients(state, model, cfg)
    ubar = 0.5 * (ev[1:-2] + ev[2:-1]) - cfg.lam * (f_now[2:-1] - f_now[1:-2])
    v = ubar - (a[2:-1] - a[1:-2])
    return _advance(state, coeff, v, cfg.lam)


def snap_steps(t_start: float, t_end: float, dt: float) -> int:
    """Largest even step count whose end time does not exceed t_end."""
    if t_end < t_start:
        raise ValueError("t_end must not precede the state's current time")
    n = int(math.floor((t_end - t_start) / dt + 1e-9))
    return n - (n % 2)


def march(initial: StaggeredState, model: FluxModel, coeff: Coefficient,
          cfg: SchemeConfig, t_end: float,
          observers: Sequence[Diagnostic] = ()) -> tuple[StaggeredState, DiagnosticsReport]:
    """Advance to the even-step snap of t_end, feeding observers each transition.

    The target time snaps to the nearest even multiple of dt = lam*dx at or
    below t_end (recorded in the report), so the final state is always on
    Base parity.
    """
    if initial.mesh.n_cells < 2:
        raise ValueError("marching needs at least 2 cells")
    if initial.parity is not Parity.BASE:
        raise ValueError("march starts from Base-parity states")
    kappa_used, kappa = _check_cfl(model, cfg.lam, cfg.cfl_level)
    if cfg.cfl_level is CflLevel.MANUAL:
        log.warning("manual CFL level: lam*sup|f_u| = %.6g is not checked", kappa_used)
    collector = DiagnosticsCollector(model, coeff, cfg, initial, full=cfg.collect_diagnostics)
    collector.report.kappa_used = kappa_used
    collector.report.kappa_bound = kappa

    dt = cfg.lam * initial.mesh.dx
    n_steps = snap_steps(initial.time, t_end, dt)
    state = initial
    for _ in range(n_steps):
        if cfg.scheme is Scheme.NESSYAHU_TADMOR:
            new, corrections = nt_step(state, model, coeff, cfg)
        else:
            new = lf_step(state, model, coeff, cfg.lam, cfg.cfl_level)
            corrections = None
        collector.observe(state, new, corrections)
        for obs in observers:
            obs.observe(state, new, corrections)
        state = new
    return state, collector.report
