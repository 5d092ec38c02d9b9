"""Explicit, positivity-preserving time integration."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from . import diagnostics, grid
from .errors import BlowUpError, DomainError, NumericalFailure, PositivityViolation
from .grid import Domain
from .model import ModelParams, _kinetics, _per_capita


@dataclass(frozen=True)
class SimState:
    t: float
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    @classmethod
    def homogeneous(cls, domain: Domain, triple, t: float = 0.0) -> SimState:
        u, v, w = triple
        return cls(float(t), domain.field(u), domain.field(v), domain.field(w))

    def fields(self):
        return self.u, self.v, self.w

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(f)) for f in self.fields())

    def validate(self, domain: Domain) -> SimState:
        for name, f in zip("uvw", self.fields()):
            domain.check(f)
            if not np.all(np.isfinite(f)):
                raise DomainError(f"{name} has non-finite values")
            if np.any(f < 0):
                raise DomainError(f"{name} has negative values")
        return self


@dataclass(frozen=True)
class StepControl:
    """Time-step controls.

    The combined outflow fraction of one cell is bounded by
    cfl_safety * (1 + dim + reaction_rate_cap), so the default safety of 0.25
    keeps every update a positive combination in 1D and 2D.
    ``fixed_dt`` bypasses the CFL logic entirely (testing and diagnosis only).
    """

    cfl_safety: float = 0.25
    dt_max: float = 0.05
    clip_epsilon: float = 1e-13
    reaction_rate_cap: float = 0.5
    fixed_dt: float | None = None

    def __post_init__(self):
        if not 0 < self.cfl_safety <= 1:
            raise DomainError("cfl_safety must lie in (0, 1]")
        if not self.dt_max > 0:
            raise DomainError("dt_max must be > 0")
        if not self.clip_epsilon >= 0:
            raise DomainError("clip_epsilon must be >= 0")
        if not self.reaction_rate_cap > 0:
            raise DomainError("reaction_rate_cap must be > 0")
        if self.fixed_dt is not None and not self.fixed_dt > 0:
            raise DomainError("fixed_dt must be > 0 when given")

    def replace(self, **changes) -> StepControl:
        return dataclasses.replace(self, **changes)


def _taxis_face_velocities(state: SimState, p: ModelParams, domain: Domain):
    vel_v = grid.face_velocity(state.u, domain, p.xi) if p.xi else []
    vel_w = grid.face_velocity(state.u * state.v, domain, p.chi) if p.chi else []
    return vel_v, vel_w


def dt_bounds(state: SimState, p: ModelParams, domain: Domain, c: StepControl):
    """The three unscaled step limits (diffusion, advection, reaction)."""
    dx = domain.dx
    diff = dx * dx / (2 * domain.dim * max(p.d1, p.d2, p.d3))
    vel_v, vel_w = _taxis_face_velocities(state, p, domain)
    vmax = max((float(np.abs(a).max()) for a in (*vel_v, *vel_w) if a.size), default=0.0)
    adv = dx / (2 * vmax) if vmax > 0 else math.inf
    decay = max(float(np.max(-r)) for r in _per_capita(state.u, state.v, state.w, p))
    react = c.reaction_rate_cap / decay if decay > 0 else math.inf
    return diff, adv, react


def stable_dt(state: SimState, p: ModelParams, domain: Domain, c: StepControl) -> float:
    if not state.is_finite():
        raise NumericalFailure(f"non-finite state at t={state.t:.6g}")
    if c.fixed_dt is not None:
        return c.fixed_dt
    return min(c.cfl_safety * min(dt_bounds(state, p, domain, c)), c.dt_max)


def rhs(state: SimState, p: ModelParams, domain: Domain):
    """Time derivatives (u_t, v_t, w_t) of the semi-discrete system."""
    u, v, w = state.fields()
    f, g, h = _kinetics(u, v, w, p)
    vel_v, vel_w = _taxis_face_velocities(state, p, domain)
    du = grid.laplacian_neumann(u, domain, p.d1) + f
    dv = grid.laplacian_neumann(v, domain, p.d2) + g
    dw = grid.laplacian_neumann(w, domain, p.d3) + h
    if p.xi:
        dv -= grid.upwind_advection_divergence(v, vel_v, domain)
    if p.chi:
        dw -= grid.upwind_advection_divergence(w, vel_w, domain)
    return du, dv, dw


def step(state: SimState, p: ModelParams, domain: Domain, c: StepControl,
         dt: float | None = None) -> SimState:
    """One forward-Euler step; ``dt`` defaults to :func:`stable_dt`."""
    if dt is None:
        dt = stable_dt(state, p, domain, c)
    t_new = state.t + dt
    new = []
    for name, s, ds in zip("uvw", state.fields(), rhs(state, p, domain)):
        s_new = s + dt * ds
        lowest = s_new.min()
        if lowest < 0:
            if lowest < -c.clip_epsilon or not np.isfinite(lowest):
                idx = np.unravel_index(int(np.argmin(s_new)), s_new.shape)
                raise PositivityViolation(name, tuple(int(i) for i in idx), t_new, float(lowest))
            s_new = np.maximum(s_new, 0.0)
        elif not np.isfinite(s_new).all():
            raise NumericalFailure(f"{name} became non-finite at t={t_new:.6g}")
        new.append(s_new)
    return SimState(t_new, *new)


@dataclass
class RunResult:
    final: SimState
    records: list
    snapshots: list  # SimState at each sampled time, if requested


def run(initial: SimState, p: ModelParams, domain: Domain, c: StepControl,
        t_end: float, sample_every: float, reference=None,
        keep_snapshots: bool = False, on_sample=None) -> RunResult:
    """Integrate to ``t_end``, recording diagnostics every ``sample_every``.

    Sample times are hit exactly by shortening the step that would cross
    them. ``on_sample(state, record)`` is called at each sample.
    """
    if t_end < initial.t:
        raise DomainError("t_end must not precede the initial time")
    if not sample_every > 0:
        raise DomainError("sample_every must be > 0")
    initial.validate(domain)
    targets = diagnostics.BoundTargets.from_initial(initial.u, initial.v, domain, p)
    guard = 10.0 * max(1.0, float(initial.u.max()))

    records, snaps = [], []

    def sample(s):
        rec = diagnostics.make_record(s, domain, reference, targets)
        records.append(rec)
        if keep_snapshots:
            snaps.append(s)
        if on_sample is not None:
            on_sample(s, rec)

    state = initial
    sample(state)
    k = 1
    while state.t < t_end:
        t_next = min(initial.t + k * sample_every, t_end)
        while state.t < t_next:
            dt = stable_dt(state, p, domain, c)
            remaining = t_next - state.t
            # avoid a sliver step just before the sample time
            if dt >= remaining or remaining - dt < 1e-12 * max(1.0, t_next):
                state = step(state, p, domain, c, remaining)
                state = dataclasses.replace(state, t=t_next)
            else:
                state = step(state, p, domain, c, dt)
            umax = float(state.u.max())
            if umax > guard:
                raise BlowUpError(state.t, umax, guard)
        sample(state)
        k += 1
    return RunResult(state, records, snaps)
