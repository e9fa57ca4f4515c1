"""Explicit finite-difference time stepping of the coupled network.

Only the membrane potential diffuses; the ionic components and the
memductance follow pointwise ODEs. The scheme is forward Euler with a
5-point Laplacian and zero-flux (mirror ghost cell) boundaries, matching the
reference numerical setup this package is regression-tested against. Within
a step every neuron is updated independently from the previous state, so the
per-neuron work may run on a thread pool without changing a single bit of
the result.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import diagnostics
from .errors import ConfigurationError, SimulationBlowupError, StabilityError
from .grids import FieldGrid, NetworkState, NeuronFields, init_random
from .models import CouplingParams, ReactionModel, gamma


def _laplacian(vals: np.ndarray, dx: float) -> np.ndarray:
    """5-point stencil with mirror ghost cells (ghost = adjacent interior)."""
    p = np.pad(vals, 1, mode="edge")
    return (
        p[:-2, 1:-1] + p[2:, 1:-1] + p[1:-1, :-2] + p[1:-1, 2:] - 4.0 * vals
    ) / (dx * dx)


def laplacian_neumann(fieldgrid: FieldGrid) -> FieldGrid:
    """Discrete Laplacian with homogeneous Neumann (zero-flux) boundaries.

    Mirror ghost cells reproduce the even extension of cell-centered data, so
    the operator is second-order accurate up to the boundary and conserves
    the discrete integral exactly.
    """
    if fieldgrid.nx < 3 or fieldgrid.ny < 3:
        raise ValueError("laplacian requires at least a 3x3 grid")
    return fieldgrid.like(_laplacian(fieldgrid.values, fieldgrid.dx))


def coupling_field(state: NetworkState, coupling: CouplingParams) -> FieldGrid:
    """Shared sigmoid sum S(x) = sum_j gamma(u_j(x)); computed once per step.

    The per-cell summands are sorted before accumulation, so the result is
    bit-identical under any permutation of the neurons (the network dynamics
    are symmetric; the discrete arithmetic should be too).
    """
    ref = state.neurons[0].u
    gam = np.stack([gamma(n.u.values, coupling.r, coupling.V) for n in state.neurons])
    gam.sort(axis=0, kind="stable")
    return ref.like(gam.sum(axis=0))


@dataclass(frozen=True)
class StabilityReport:
    ratio: float
    passed: bool

    def describe(self) -> str:
        verdict = "stable" if self.passed else "UNSTABLE"
        return f"4 eta dt / dx^2 = {self.ratio:g} ({verdict}, bound 1.0)"


def stability_check(eta: float, dx: float, dt: float) -> StabilityReport:
    """Explicit 2-D diffusion bound: pass iff 4 eta dt / dx^2 <= 1."""
    if eta <= 0 or dx <= 0 or dt <= 0:
        raise ValueError("eta, dx, dt must all be positive")
    ratio = 4.0 * eta * dt / (dx * dx)
    return StabilityReport(ratio=ratio, passed=ratio <= 1.0)


def _neuron_derivative(neuron, model, coupling, S, include_self):
    """Raw derivative arrays (du, [dz_c...], drho) for one neuron."""
    u = neuron.u.values
    z = np.stack([g.values for g in neuron.z])
    rho = neuron.rho.values
    S_i = S if include_self else S - gamma(u, coupling.r, coupling.V)
    drive = u if coupling.u_e is None else u - coupling.u_e
    du = (
        model.eta * _laplacian(u, neuron.u.dx)
        + model.f(u, z)
        - model.k * np.tanh(rho) * u
        - coupling.P * drive * S_i
    )
    dz = model.lambda_apply(z) + model.h(u, z)
    drho = model.a * u - model.b * rho
    return du, dz, drho


_TERM_NAMES = ("diffusion", "reaction f", "memristor -k tanh(rho) u", "coupling", "ionic Lambda z + h", "memductance a u - b rho")


@np.errstate(over="ignore", invalid="ignore")
def _diagnose_nonfinite(state, model, coupling, include_self):
    """Locate the first non-finite derivative term for the abort message."""
    try:
        S = coupling_field(state, coupling).values
    except ValueError:
        return "state already non-finite before the step"
    for i, n in enumerate(state.neurons):
        u, rho = n.u.values, n.rho.values
        z = np.stack([g.values for g in n.z])
        S_i = S if include_self else S - gamma(u, coupling.r, coupling.V)
        drive = u if coupling.u_e is None else u - coupling.u_e
        terms = (
            model.eta * _laplacian(u, n.u.dx),
            np.asarray(model.f(u, z)),
            -model.k * np.tanh(rho) * u,
            -coupling.P * drive * S_i,
            model.lambda_apply(z) + model.h(u, z),
            model.a * u - model.b * rho,
        )
        for name, term in zip(_TERM_NAMES, terms):
            if not np.isfinite(term).all():
                cell = np.argwhere(~np.isfinite(term))[0]
                return f"neuron {i}, term '{name}', cell {tuple(int(c) for c in cell[-2:])}"
    return "non-finite value (term not identified)"


def rhs(
    state: NetworkState,
    model: ReactionModel,
    coupling: CouplingParams,
    include_self: bool = True,
) -> NetworkState:
    """Time derivative of every field, shaped like the state (t unchanged).

    Per neuron i:
      du_i   = eta lap(u_i) + f(u_i, z_i) - k tanh(rho_i) u_i - P (u_i - u_e?) S
      dz_i   = Lambda z_i + h(u_i, z_i)
      drho_i = a u_i - b rho_i
    where S sums gamma over all neurons (``include_self=False`` drops the
    self term) and the u_e offset applies only when the coupling carries a
    reversal potential.
    """
    if model.ell != state.ell:
        raise ConfigurationError(
            f"model has ell={model.ell} but state carries ell={state.ell}"
        )
    S = coupling_field(state, coupling).values
    neurons = []
    with np.errstate(over="ignore", invalid="ignore"):
        for n in state.neurons:
            du, dz, drho = _neuron_derivative(n, model, coupling, S, include_self)
            try:
                neurons.append(
                    NeuronFields(
                        n.u.like(du),
                        [n.u.like(dz[c]) for c in range(model.ell)],
                        n.u.like(drho),
                    )
                )
            except ValueError as exc:
                where = _diagnose_nonfinite(state, model, coupling, include_self)
                raise SimulationBlowupError(f"non-finite derivative: {where}") from exc
    return NetworkState(neurons, t=state.t)


def step_euler(
    state: NetworkState,
    model: ReactionModel,
    coupling: CouplingParams,
    dt: float,
    include_self: bool = True,
    workers: int = 1,
) -> NetworkState:
    """One forward-Euler step: state + dt * rhs(state); t advances by dt.

    Deterministic for fixed inputs regardless of ``workers``: each neuron's
    update reads only the previous state and writes its own slot.
    """
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if model.ell != state.ell:
        raise ConfigurationError(
            f"model has ell={model.ell} but state carries ell={state.ell}"
        )
    S = coupling_field(state, coupling).values

    def advance(n):
        du, dz, drho = _neuron_derivative(n, model, coupling, S, include_self)
        u = n.u.values + dt * du
        z = [n.z[c].values + dt * dz[c] for c in range(model.ell)]
        rho = n.rho.values + dt * drho
        return u, z, rho

    with np.errstate(over="ignore", invalid="ignore"):
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                raw = list(pool.map(advance, state.neurons))
        else:
            raw = [advance(n) for n in state.neurons]

    neurons = []
    for n, (u, z, rho) in zip(state.neurons, raw):
        try:
            neurons.append(
                NeuronFields(n.u.like(u), [n.u.like(zc) for zc in z], n.u.like(rho))
            )
        except ValueError as exc:
            where = _diagnose_nonfinite(state, model, coupling, include_self)
            raise SimulationBlowupError(f"non-finite state after step: {where}") from exc
    return NetworkState(neurons, t=state.t + dt)


@dataclass
class Scenario:
    """Everything needed to run one simulation."""

    model: ReactionModel
    coupling: CouplingParams
    nx: int = 32
    ny: int = 32
    dx: float = 1.0
    dt: float = 0.00025
    n_steps: int = 2000
    m: int = 4
    seed: int = 0
    amplitude: float = 0.1
    initial_state: NetworkState | None = None
    record_every: int = 1
    include_self: bool = True
    workers: int = 1
    allow_unstable: bool = False
    probe: tuple[int, int] | None = None
    checkpoint_steps: tuple[int, ...] = ()

    def __post_init__(self):
        if self.dt <= 0:
            raise ConfigurationError(f"dt must be positive, got {self.dt}")
        if self.n_steps < 1:
            raise ConfigurationError(f"n_steps must be >= 1, got {self.n_steps}")
        if self.m < 2:
            raise ConfigurationError(f"m must be >= 2, got {self.m}")
        if self.record_every < 1:
            raise ConfigurationError(f"record_every must be >= 1, got {self.record_every}")
        if self.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {self.workers}")
        if self.probe is not None:
            ix, iy = self.probe
            if not (0 <= ix < self.nx and 0 <= iy < self.ny):
                raise ConfigurationError(f"probe {self.probe} outside {self.nx}x{self.ny} grid")

    @property
    def area(self) -> float:
        return self.nx * self.dx * self.ny * self.dx

    def build_initial_state(self) -> NetworkState:
        if self.initial_state is not None:
            st = self.initial_state
            if st.m != self.m or st.grid_shape != (self.nx, self.ny) or st.ell != self.model.ell:
                raise ConfigurationError(
                    "explicit initial state does not match scenario grid/m/ell"
                )
            return st.copy()
        return init_random(
            self.nx, self.ny, self.dx, self.m, self.model.ell, self.amplitude, self.seed
        )


@dataclass(frozen=True)
class StepRecord:
    """Diagnostics snapshot at one recorded instant."""

    step: int
    t: float
    u_norms: tuple[float, ...]
    z_norms: tuple[tuple[float, ...], ...]
    rho_norms: tuple[float, ...]
    energy_sq: float
    l4_sum: float
    sup_sum: float
    diffs: tuple[diagnostics.DiffRecord, ...]
    probe: tuple[tuple[float, ...], ...] | None = None


@dataclass
class Trajectory:
    """Recorded instants plus optional full-state checkpoints."""

    times: list[float] = field(default_factory=list)
    records: list[StepRecord] = field(default_factory=list)
    checkpoints: dict[int, NetworkState] = field(default_factory=dict)

    def append(self, rec: StepRecord):
        if self.times and rec.t <= self.times[-1]:
            raise ValueError("recorded times must be strictly increasing")
        self.times.append(rec.t)
        self.records.append(rec)

    @property
    def initial(self) -> StepRecord:
        return self.records[0]

    @property
    def final(self) -> StepRecord:
        return self.records[-1]

    def diff_series(self, i: int, j: int) -> tuple[list[float], list[float]]:
        """(times, total difference norms) for the pair (i, j)."""
        vals = []
        for rec in self.records:
            hit = [d for d in rec.diffs if d.i == i and d.j == j]
            if not hit:
                raise KeyError(f"pair ({i}, {j}) not recorded")
            vals.append(hit[0].total)
        return list(self.times), vals


def _snapshot(state: NetworkState, step: int, probe) -> StepRecord:
    u_norms, z_norms, rho_norms = [], [], []
    for n in state.neurons:
        u_norms.append(diagnostics.l2_norm(n.u))
        z_norms.append(tuple(diagnostics.l2_norm(g) for g in n.z))
        rho_norms.append(diagnostics.l2_norm(n.rho))
    energy = math.fsum(
        [x * x for x in u_norms]
        + [v * v for comps in z_norms for v in comps]
        + [x * x for x in rho_norms]
    )
    l4 = math.fsum(diagnostics.l4_norm4(n.u) for n in state.neurons)
    sup = diagnostics.sup_potential_sum(state)
    probe_vals = None
    if probe is not None:
        ix, iy = probe
        probe_vals = tuple(
            (float(n.u.values[ix, iy]),)
            + tuple(float(g.values[ix, iy]) for g in n.z)
            + (float(n.rho.values[ix, iy]),)
            for n in state.neurons
        )
    return StepRecord(
        step=step,
        t=state.t,
        u_norms=tuple(u_norms),
        z_norms=tuple(z_norms),
        rho_norms=tuple(rho_norms),
        energy_sq=energy,
        l4_sum=l4,
        sup_sum=sup,
        diffs=tuple(diagnostics.pairwise_diff_norms(state)),
        probe=probe_vals,
    )


def run(scenario: Scenario) -> Trajectory:
    """Integrate the scenario, recording diagnostics every ``record_every`` steps.

    Step 0 and the final step are always recorded. A numeric blow-up raises
    :class:`SimulationBlowupError` with the failing step index and the partial
    trajectory attached for post-mortem inspection.
    """
    report = stability_check(scenario.model.eta, scenario.dx, scenario.dt)
    if not report.passed and not scenario.allow_unstable:
        raise StabilityError(
            f"time step violates the diffusion stability bound: {report.describe()}"
        )
    state = scenario.build_initial_state()
    traj = Trajectory()
    traj.append(_snapshot(state, 0, scenario.probe))
    if 0 in scenario.checkpoint_steps:
        traj.checkpoints[0] = state.copy()
    for step in range(1, scenario.n_steps + 1):
        try:
            state = step_euler(
                state,
                scenario.model,
                scenario.coupling,
                scenario.dt,
                include_self=scenario.include_self,
                workers=scenario.workers,
            )
        except SimulationBlowupError as exc:
            exc.step = step
            exc.trajectory = traj
            exc.args = (f"step {step}: {exc.args[0]}",)
            raise
        if step % scenario.record_every == 0 or step == scenario.n_steps:
            traj.append(_snapshot(state, step, scenario.probe))
        if step in scenario.checkpoint_steps:
            traj.checkpoints[step] = state.copy()
    return traj
