"""Canned experiment setups, reference runs, L1 errors, refinement studies."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .diagnostics import Diagnostic, DiagnosticsReport
from .flux_model import Coefficient, FluxModel, make_model
from .grid import Mesh, Parity, StaggeredState, initial_state
from .limiter import LimiterConfig
from .schemes import CflLevel, Scheme, SchemeConfig, march, snap_steps


@dataclass(frozen=True)
class InitialData:
    """Initial profile with its jump locations (for exact cell averaging)."""

    fn: Callable[[np.ndarray], np.ndarray]
    jumps: tuple[float, ...] = ()

    @classmethod
    def constant(cls, value: float) -> "InitialData":
        return cls(fn=lambda x: np.full_like(np.asarray(x, dtype=float), value))

    @classmethod
    def step(cls, left: float, right: float, at: float = 0.0) -> "InitialData":
        return cls(fn=lambda x: np.where(np.asarray(x) <= at, left, right), jumps=(at,))


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to rerun one canned experiment."""

    name: str
    model_name: str
    model_params: dict = field(default_factory=dict)
    x_min: float = -1.0
    x_max: float = 1.0
    dx: float = 0.04
    lam: float = 1.0 / 30.0
    u0: InitialData = field(default_factory=lambda: InitialData.constant(0.0))
    output_times: tuple[float, ...] = ()
    reference_dx: float = 0.002

    def __post_init__(self):
        if any(t < 0 for t in self.output_times):
            raise ValueError("output times must be nonnegative")
        ratio = self.dx / self.reference_dx
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError("reference_dx must divide dx (nested grids)")

    def build(self) -> tuple[FluxModel, Coefficient]:
        return make_model(self.model_name, **self.model_params)

    def mesh(self, dx: float | None = None) -> Mesh:
        dx = self.dx if dx is None else dx
        n = round((self.x_max - self.x_min) / dx)
        return Mesh.from_cells(self.x_min, self.x_max, n)

    def initial(self, mesh: Mesh, coeff: Coefficient) -> StaggeredState:
        return initial_state(mesh, coeff, self.u0.fn, jumps=self.u0.jumps)


def example_1() -> ExperimentSpec:
    """Multiplicative flux k*u*(1-u), k jumping 3 -> 1 at x = 0, u0 = 0.15."""
    return ExperimentSpec(
        name="example-1",
        model_name="multiplicative",
        model_params={"k_left": 3.0, "k_right": 1.0},
        x_min=-1.0, x_max=1.0,
        dx=2.0 / 50.0,
        lam=(1.0 / 750.0) / (2.0 / 50.0),
        u0=InitialData.constant(0.15),
        output_times=(0.8, 1.6),
        reference_dx=2.0 / 1000.0,
    )


def example_2() -> ExperimentSpec:
    """Two-flux rational model with a Riemann initial profile 0.9 / 0.2."""
    return ExperimentSpec(
        name="example-2",
        model_name="two-flux-rational",
        x_min=-4.0, x_max=4.0,
        dx=8.0 / 50.0,
        lam=0.008 / (8.0 / 50.0),
        u0=InitialData.step(0.9, 0.2, at=0.0),
        output_times=(1.0, 2.0),
        reference_dx=8.0 / 2000.0,
    )


EXAMPLES = {1: example_1, 2: example_2}


class SnapshotObserver(Diagnostic):
    """Captures states whose step index matches a requested output time."""

    def __init__(self, wanted: dict[int, float]):
        self.wanted = wanted
        self.states: dict[float, StaggeredState] = {}

    def observe(self, prev, next, corrections):
        if next.step_index in self.wanted:
            self.states[self.wanted[next.step_index]] = next


@dataclass
class ExperimentRun:
    spec: ExperimentSpec
    scheme: Scheme
    states: dict[float, StaggeredState]
    final: StaggeredState
    report: DiagnosticsReport


def run_experiment(spec: ExperimentSpec, scheme: Scheme, dx: float | None = None,
                   times: tuple[float, ...] | None = None,
                   limiter: LimiterConfig | None = None,
                   collect_diagnostics: bool = True) -> ExperimentRun:
    """March one scheme through all requested output times in a single run."""
    model, coeff = spec.build()
    mesh = spec.mesh(dx)
    state0 = spec.initial(mesh, coeff)
    cfg = SchemeConfig(scheme=scheme, lam=spec.lam,
                       limiter=limiter or LimiterConfig(),
                       cfl_level=CflLevel.MAX_PRINCIPLE,
                       collect_diagnostics=collect_diagnostics)
    times = spec.output_times if times is None else times
    dt = cfg.lam * mesh.dx
    wanted = {snap_steps(0.0, t, dt): t for t in times if t > 0}
    snap = SnapshotObserver(wanted)
    t_final = max(times) if times else 0.0
    final, report = march(state0, model, coeff, cfg, t_final, observers=(snap,))
    states = dict(snap.states)
    for t in times:
        if t == 0.0:
            states[t] = state0
    return ExperimentRun(spec=spec, scheme=scheme, states=states, final=final, report=report)


def l1_error(coarse: StaggeredState, reference: StaggeredState) -> float:
    """L1 distance of a coarse state from a nested fine reference.

    The coarse solution is treated as piecewise constant; the error is
    dx_ref * sum |u_ref - u_coarse(cell containing x_ref)| over reference
    cells.  Grids must be nested and both states on Base parity, at times
    within one coarse time step of each other.
    """
    cm, rm = coarse.mesh, reference.mesh
    if coarse.parity is not Parity.BASE or reference.parity is not Parity.BASE:
        raise ValueError("l1_error compares Base-parity states")
    ratio = cm.dx / rm.dx
    if abs(ratio - round(ratio)) > 1e-9 or abs(cm.x_min - rm.x_min) > 1e-12 \
            or abs(cm.x_max - rm.x_max) > 1e-12:
        raise ValueError("grids are not nested")
    if abs(coarse.time - reference.time) > cm.dx + 1e-12:
        raise ValueError("states are too far apart in time to compare")
    xr = rm.centers(Parity.BASE)
    idx = np.clip(np.floor((xr - cm.x_min) / cm.dx + 1e-12).astype(int), 0, cm.n_cells - 1)
    return float(rm.dx * np.sum(np.abs(reference.values - coarse.values[idx])))


@dataclass(frozen=True)
class ErrorRow:
    dx: float
    scheme: str
    time: float
    l1_error: float
    observed_order: float | None = None


@dataclass
class ErrorTable:
    rows: list[ErrorRow] = field(default_factory=list)

    def to_csv_text(self) -> str:
        lines = ["dx,scheme,time,l1_error,observed_order"]
        for r in self.rows:
            order = "" if r.observed_order is None else f"{r.observed_order:.16e}"
            lines.append(f"{r.dx:.16e},{r.scheme},{r.time:.16e},{r.l1_error:.16e},{order}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_csv_text())


def reference_run(spec: ExperimentSpec, times: tuple[float, ...] | None = None) -> ExperimentRun:
    """Fine-grid first-order reference solution (diagnostics off for speed)."""
    return run_experiment(spec, Scheme.LAX_FRIEDRICHS, dx=spec.reference_dx,
                          times=times, collect_diagnostics=False)


def refinement_study(spec: ExperimentSpec, scheme: Scheme, halvings: int,
                     time: float | None = None,
                     reference: ExperimentRun | None = None) -> ErrorTable:
    """Errors and observed orders across successive mesh halvings.

    Runs the scheme at dx, dx/2, ..., dx/2^(halvings-1) against the
    first-order fine reference; the reference mesh must nest every level.
    Orders are log2(e_i / e_{i+1}); the finest row is left blank.
    """
    if halvings < 2:
        raise ValueError("halvings must be >= 2")
    t = spec.output_times[0] if time is None else time
    if reference is None:
        reference = reference_run(spec, times=(t,))
    ref_state = reference.states[t]
    runs = []
    for i in range(halvings):
        run = run_experiment(spec, scheme, dx=spec.dx / 2**i, times=(t,),
                             collect_diagnostics=False)
        state = run.states[t]
        runs.append((spec.dx / 2**i, state.time, l1_error(state, ref_state)))
    table = ErrorTable()
    for i, (dx, at, err) in enumerate(runs):
        order = None
        if i + 1 < len(runs) and runs[i + 1][2] > 0:
            order = math.log2(err / runs[i + 1][2])
        table.rows.append(ErrorRow(dx=dx, scheme=scheme.value, time=at,
                                   l1_error=err, observed_order=order))
    return table
