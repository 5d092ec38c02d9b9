"""Norms, Lyapunov functionals, bound checks and decay-rate fitting."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import grid
from .errors import DomainError, InsufficientDataError
from .grid import Domain
from .model import ModelParams

# column order of the diagnostics CSV; the first 13 are the documented core,
# the rest are appended extras used by bound checks and rate fits
CSV_COLUMNS = (
    "t",
    "Linf_u", "Linf_v", "Linf_w",
    "L1_v", "L1_w",
    "L2_u", "L2_v", "L2_w",
    "grad_Linf_u", "grad_Linf_v",
    "E", "F",
    "L1_u",
    "min_u", "min_v", "min_w",
    "dev_Linf_u", "dev_Linf_v", "dev_Linf_w",
)


@dataclass
class DiagnosticsRecord:
    t: float
    Linf_u: float
    Linf_v: float
    Linf_w: float
    L1_v: float
    L1_w: float
    L2_u: float
    L2_v: float
    L2_w: float
    grad_Linf_u: float
    grad_Linf_v: float
    E: float = math.nan
    F: float = math.nan
    L1_u: float = math.nan
    min_u: float = math.nan
    min_v: float = math.nan
    min_w: float = math.nan
    dev_Linf_u: float = math.nan
    dev_Linf_v: float = math.nan
    dev_Linf_w: float = math.nan
    bound_flags: dict = field(default_factory=dict)

    def row(self) -> list[float]:
        return [getattr(self, c) for c in CSV_COLUMNS]

    @classmethod
    def from_row(cls, row: dict) -> DiagnosticsRecord:
        return cls(**{c: float(row[c]) for c in CSV_COLUMNS if c in row})


@dataclass(frozen=True)
class BoundTargets:
    """Per-trajectory constants of the a-priori bounds."""

    K: float  # sup bound on u: max(1, ||u0||_inf)
    K1: float  # L1 bound on v

    @classmethod
    def from_initial(cls, u0, v0, domain: Domain, p: ModelParams) -> BoundTargets:
        K = max(1.0, float(np.max(u0)))
        K1 = grid.norms(v0, domain)[0] + (p.mu2 + K + 1.0) ** 2 * domain.measure / (2.0 * p.mu2)
        return cls(K, K1)


def _x_minus_log1p(x: np.ndarray) -> np.ndarray:
    # series branch keeps full relative accuracy near x = 0
    small = np.abs(x) < 1e-2
    xs = np.where(small, x, 0.0)
    series = xs * xs * (
        0.5 - xs * (1 / 3 - xs * (0.25 - xs * (0.2 - xs * (1 / 6 - xs * (1 / 7 - xs / 8)))))
    )
    xl = np.where(small, 0.0, x)
    return np.where(small, series, xl - np.log1p(xl))


def entropy_density(s, s_star: float) -> np.ndarray:
    """Pointwise s - s* - s* ln(s/s*)."""
    s = np.asarray(s, dtype=float)
    if not s_star > 0:
        raise DomainError(f"reference value must be > 0, got {s_star!r}")
    if np.any(s <= 0):
        raise DomainError("relative entropy needs a strictly positive density")
    return s_star * _x_minus_log1p((s - s_star) / s_star)


def lyapunov_entropy(s, s_star: float, domain: Domain) -> float:
    return grid.integrate(entropy_density(domain.check(s), s_star), domain)


def lyapunov_energy(state, steady: Sequence[float], domain: Domain) -> float:
    """Sum of the three relative-entropy integrals."""
    return sum(
        lyapunov_entropy(s, s_star, domain)
        for s, s_star in zip((state.u, state.v, state.w), steady)
    )


def dissipation(state, steady: Sequence[float], domain: Domain) -> float:
    """Integrated squared deviation from the constant steady state."""
    return sum(
        grid.integrate((s - s_star) ** 2, domain)
        for s, s_star in zip((state.u, state.v, state.w), steady)
    )


# the food-chain and intraguild functionals only differ in the reference state
E1 = E2 = lyapunov_energy
F1 = F2 = dissipation


def sandwich_constants(steady: Sequence[float]) -> tuple[float, float]:
    """(alpha1, alpha2) with alpha1 F <= E <= alpha2 F near the steady state."""
    return min(2.0 / (9.0 * s) for s in steady), max(2.0 / s for s in steady)


def make_record(state, domain: Domain, reference=None, targets: BoundTargets | None = None):
    nu = grid.norms(state.u, domain)
    nv = grid.norms(state.v, domain)
    nw = grid.norms(state.w, domain)
    gu = grid.gradient_centered(state.u, domain)
    gv = grid.gradient_centered(state.v, domain)
    rec = DiagnosticsRecord(
        t=float(state.t),
        Linf_u=nu[2], Linf_v=nv[2], Linf_w=nw[2],
        L1_v=nv[0], L1_w=nw[0],
        L2_u=nu[1], L2_v=nv[1], L2_w=nw[1],
        grad_Linf_u=float(np.sqrt((gu * gu).sum(axis=0)).max()),
        grad_Linf_v=float(np.sqrt((gv * gv).sum(axis=0)).max()),
        L1_u=nu[0],
        min_u=float(state.u.min()), min_v=float(state.v.min()), min_w=float(state.w.min()),
    )
    if reference is not None:
        rec.F = dissipation(state, reference, domain)
        rec.dev_Linf_u = float(np.abs(state.u - reference[0]).max())
        rec.dev_Linf_v = float(np.abs(state.v - reference[1]).max())
        rec.dev_Linf_w = float(np.abs(state.w - reference[2]).max())
        if min(rec.min_u, rec.min_v, rec.min_w) > 0 and min(reference) > 0:
            rec.E = lyapunov_energy(state, reference, domain)
    if targets is not None:
        rec.bound_flags = {
            "u_sup": "pass" if rec.Linf_u <= targets.K + 1e-6 else "fail",
            "v_L1": "pass" if rec.L1_v <= targets.K1 else "fail",
        }
    return rec


def _entry(margins):
    if not margins:
        return {"status": "n-a", "worst_margin": None}
    worst = min(margins)
    return {"status": "pass" if worst >= 0 else "fail", "worst_margin": worst}


def check_bounds(records, initial, domain: Domain, p: ModelParams,
                 burn_in: float = 100.0, slack: float = 0.01, sup_tol: float = 1e-6) -> dict:
    """Check the headline a-priori bounds along a sampled trajectory.

    Returns ``{name: {"status": pass|fail|n-a, "worst_margin": float|None}}``;
    a positive margin means the inequality holds with room to spare. Never
    raises on a violated bound.
    """
    records = list(records)
    if not records:
        return {}
    targets = BoundTargets.from_initial(initial.u, initial.v, domain, p)
    report = {}

    report["finite"] = _entry([
        0.0 if all(math.isfinite(x) for x in (r.Linf_u, r.Linf_v, r.Linf_w,
                                               r.grad_Linf_u, r.grad_Linf_v)) else -1.0
        for r in records
    ])
    report["u_sup_K"] = _entry([targets.K + sup_tol - r.Linf_u for r in records])
    report["u_sup_K"]["K"] = targets.K
    report["u_limsup"] = _entry([1.0 + slack - r.Linf_u for r in records if r.t >= burn_in])
    report["v_L1_K1"] = _entry([targets.K1 - r.L1_v for r in records])
    report["v_L1_K1"]["K1"] = targets.K1

    v_sup = max(r.Linf_v for r in records)
    floor = 1.0 - p.b3 - p.b1 * v_sup
    late = [r for r in records if r.t >= burn_in]
    if floor > 0 and late and not math.isnan(late[0].min_u):
        bound = min(late[0].min_u, floor)
        report["u_lower"] = _entry([r.min_u - bound + sup_tol for r in late])
        report["u_lower"]["bound"] = bound
    else:
        report["u_lower"] = _entry([])
    return report


class DecayFit(NamedTuple):
    sigma: float
    C: float
    r_squared: float


def fit_decay_rate(t, values, window: tuple[float, float]) -> DecayFit:
    """Least-squares fit of ln(value) = ln C - sigma t on ``window``.

    A constant series returns sigma = 0 and r_squared = NaN, since the
    coefficient of determination is undefined when there is no variance.
    """
    t = np.asarray(t, dtype=float)
    values = np.asarray(values, dtype=float)
    lo, hi = window
    mask = (t >= lo) & (t <= hi)
    ts, ys = t[mask], values[mask]
    if ts.size < 5:
        raise InsufficientDataError(f"need >= 5 samples in window, got {ts.size}")
    if np.any(~(ys > 0)):
        raise DomainError("decay fit needs strictly positive values in the window")
    logy = np.log(ys)
    ss_tot = float(np.sum((logy - logy.mean()) ** 2))
    if ss_tot <= 1e-28 * ts.size:
        return DecayFit(0.0, float(np.exp(logy.mean())), math.nan)
    A = np.column_stack([ts, np.ones_like(ts)])
    (slope, intercept), *_ = np.linalg.lstsq(A, logy, rcond=None)
    resid = logy - (slope * ts + intercept)
    ss_res = float(np.sum(resid**2))
    return DecayFit(float(-slope), float(math.exp(intercept)), 1.0 - ss_res / ss_tot)


def series(records, column: str):
    """(t, values) arrays for one diagnostics column."""
    return (np.array([r.t for r in records]),
            np.array([getattr(r, column) for r in records], dtype=float))


def record_as_dict(rec: DiagnosticsRecord) -> dict:
    return dataclasses.asdict(rec)
