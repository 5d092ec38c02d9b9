"""Model parameters, kinetics and taxis velocities of the alarm-taxis system.

    u_t = d1 Lap u + mu1 u (1 - u) - b1 u v - b3 uw/(u+w)
    v_t = d2 Lap v - div(xi v grad u) + mu2 v (1 - v) + u v - b2 v w
    w_t = d3 Lap w - div(chi w grad(uv)) + mu3 w (1 - w) + v w + c3 uw/(u+w)

with zero-flux boundaries. ``d3`` is 1 in the nondimensional system but is
kept as a parameter.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_POSITIVE = ("d1", "d2", "d3", "mu1", "mu2", "mu3", "b1", "b2")
_NONNEGATIVE = ("b3", "c3", "xi", "chi")


@dataclass(frozen=True)
class ModelParams:
    d1: float = 1.0
    d2: float = 1.0
    d3: float = 1.0
    xi: float = 0.0
    chi: float = 0.0
    mu1: float = 1.0
    mu2: float = 1.0
    mu3: float = 1.0
    b1: float = 1.0
    b2: float = 1.0
    b3: float = 0.0
    c3: float = 0.0

    def __post_init__(self):
        for name in _POSITIVE:
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be > 0, got {val!r}")
        for name in _NONNEGATIVE:
            val = getattr(self, name)
            if not (np.isfinite(val) and val >= 0):
                raise DomainError(f"{name} must be >= 0, got {val!r}")

    @property
    def normalized(self) -> bool:
        return self.mu1 == 1.0 and self.mu2 == 1.0 and self.mu3 == 1.0

    def replace(self, **changes) -> ModelParams:
        return dataclasses.replace(self, **changes)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def _check_nonnegative(**arrays):
    for name, a in arrays.items():
        if np.any(np.asarray(a) < 0):
            raise DomainError(f"{name} must be nonnegative")


def _ratio_fraction(num, u, w):
    """num/(u+w) with the value 0 where u+w == 0."""
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    s = u + w
    safe = np.where(s == 0, 1.0, s)
    out = np.where(s == 0, 0.0, np.asarray(num, dtype=float) / safe)
    return out if out.ndim else float(out)


def ratio_response(u, w):
    """Ratio-dependent response uw/(u+w), extended by 0 at u = w = 0."""
    _check_nonnegative(u=u, w=w)
    u = np.asarray(u, dtype=float)
    w = np.asarray(w, dtype=float)
    # min * (max/(u+w)) stays <= min(u, w) even when u*w is subnormal
    return _ratio_fraction(np.maximum(u, w), u, w) * np.minimum(u, w)


def per_capita_rates(u, v, w, p: ModelParams):
    """Per-capita growth rates (R_u, R_v, R_w) such that f = u R_u etc."""
    _check_nonnegative(u=u, v=v, w=w)
    return _per_capita(u, v, w, p)


def _per_capita(u, v, w, p):
    r_u = p.mu1 * (1.0 - u) - p.b1 * v
    r_v = p.mu2 * (1.0 - v) + u - p.b2 * w
    r_w = p.mu3 * (1.0 - w) + v
    # the ratio terms are skipped entirely in the food-chain case
    if p.b3:
        r_u = r_u - p.b3 * _ratio_fraction(w, u, w)
    if p.c3:
        r_w = r_w + p.c3 * _ratio_fraction(u, u, w)
    return r_u, r_v, r_w


def reaction_terms(u, v, w, p: ModelParams):
    """Kinetic right-hand sides (f, g, h) for nonnegative densities."""
    _check_nonnegative(u=u, v=v, w=w)
    return _kinetics(u, v, w, p)


def _kinetics(u, v, w, p):
    # no sign check: steady-state residuals are also evaluated at
    # non-physical (negative) roots
    r_u, r_v, r_w = _per_capita(u, v, w, p)
    return u * r_u, v * r_v, w * r_w


def taxis_velocity_v(grad_u, p: ModelParams):
    """Advective velocity of the primary predator, xi grad u."""
    return p.xi * np.asarray(grad_u, dtype=float)


def taxis_velocity_w(u, v, grad_u, grad_v, p: ModelParams):
    """Advective velocity of the secondary predator, chi (v grad u + u grad v).

    ``grad_u`` and ``grad_v`` carry the spatial components on their leading
    axis; ``u`` and ``v`` broadcast against the trailing axes.
    """
    _check_nonnegative(u=u, v=v)
    grad_u = np.asarray(grad_u, dtype=float)
    grad_v = np.asarray(grad_v, dtype=float)
    return p.chi * (np.asarray(v) * grad_u + np.asarray(u) * grad_v)
