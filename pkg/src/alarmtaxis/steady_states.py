"""Homogeneous steady states of the normalised system (all mu_i = 1).

The coexistence states are evaluated from their closed forms; every state
carries the residual of the simulator's own kinetics at the triple.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from types import SimpleNamespace

from .errors import DegenerateParametersError, DomainError, NoRealRootError, UnsupportedRegimeError
from .model import ModelParams, _kinetics

# box of "small" (b1, b3) used when no threshold is supplied
SMALL_B_BOX = (0.0, 0.05)


@dataclass(frozen=True)
class SteadyState:
    label: str
    u: float
    v: float
    w: float
    positive: bool
    residual: float
    real: bool = True

    @property
    def triple(self) -> tuple[float, float, float]:
        return (self.u, self.v, self.w)

    def as_json(self) -> dict:
        d = asdict(self)
        if not self.real:
            d.update(u=None, v=None, w=None, residual=None)
        return d


def residual(triple, p: ModelParams) -> float:
    """Max-norm of the kinetic right-hand sides at a constant triple."""
    u, v, w = (float(x) for x in triple)
    return max(abs(float(x)) for x in _kinetics(u, v, w, p))


def _kinetic_params(b1, b2, b3=0.0, c3=0.0):
    # unvalidated stand-in so limits such as b1 = 0 can still be checked
    return SimpleNamespace(mu1=1.0, mu2=1.0, mu3=1.0, b1=b1, b2=b2, b3=b3, c3=c3)


def _make(label, triple, p) -> SteadyState:
    u, v, w = triple
    return SteadyState(label, u, v, w, positive=u > 0 and v > 0 and w > 0,
                       residual=residual(triple, p))


def _not_real(label) -> SteadyState:
    nan = math.nan
    return SteadyState(label, nan, nan, nan, positive=False, residual=nan, real=False)


def foodchain_triple(b1: float, b2: float) -> tuple[float, float, float]:
    den = 1.0 + b1 + b2
    return ((1.0 + b1 * b2 + b2 - b1) / den, (2.0 - b2) / den, (3.0 + b1) / den)


def coexistence_foodchain(b1: float, b2: float) -> SteadyState:
    """Coexistence state of the food-chain case (b3 = c3 = 0)."""
    return _make("coexistence-foodchain", foodchain_triple(b1, b2), _kinetic_params(b1, b2))


def intraguild_radicand(b1: float, b2: float, b3: float) -> float:
    return (20 + 12 * b2 + b2**2 + 4 * b1**2 * (b2**2 - 1)
            + 4 * b1 * (3 + b2) * (b2 - b3) - 20 * b3 - 14 * b2 * b3 + b3**2)


def intraguild_branch(b1: float, b2: float, b3: float, sign: int):
    """One root of the intraguild coexistence system (c3 = 1).

    ``sign=+1`` is the branch that is positive for small b1, b3; ``sign=-1``
    flips only the square-root term.
    """
    if b1 < 0 or b2 < 0 or b3 < 0:
        raise DomainError("b1, b2, b3 must be nonnegative")
    rad = intraguild_radicand(b1, b2, b3)
    if rad < 0:
        raise NoRealRootError(f"radicand {rad:.6g} < 0 for b=({b1}, {b2}, {b3})")
    den = 2 * (1 + b1 + b2) * (1 + b1 * (1 + b2) + (2 + b2) * b3)
    if den == 0:
        raise DegenerateParametersError("zero denominator in intraguild steady state")
    root = sign * math.sqrt(rad)
    u = (2 * b1**2 * (b2**2 - 1) + b1 * (b2 + 2) * (b2 - 3 * b3 + 2 * b2 * b3)
         + (1 + b2) * (2 + (b2 - 2) * b3 - b3**2)
         + (b1 * b2 + b2 * b3 + b3) * root) / den
    v = (4 + 2 * b2 + b2**2 + 2 * b3 - 4 * b2 * b3 - 4 * b2**2 * b3 - b3**2
         - 2 * b1 * (1 + b2) * (b2 + b3 - 2)
         + (b3 - b2) * root) / den
    w = (2 + 4 * b1 + 2 * b1**2 - b2 + 5 * b1 * b2 + 2 * b1**2 * b2 + 9 * b3 + 5 * b1 * b3
         + 7 * b2 * b3 + 2 * b1 * b2 * b3 - b3**2
         + (1 + b1 + b3) * root) / den
    return u, v, w


def coexistence_intraguild(b1: float, b2: float, b3: float) -> tuple[SteadyState, SteadyState]:
    """Both closed-form roots of the intraguild coexistence system, c3 = 1."""
    p = _kinetic_params(b1, b2, b3, 1.0)
    return (
        _make("coexistence-intraguild-branch1", intraguild_branch(b1, b2, b3, +1), p),
        _make("coexistence-intraguild-branch2", intraguild_branch(b1, b2, b3, -1), p),
    )


def catalog(p: ModelParams) -> list[SteadyState]:
    """Every listed homogeneous steady state for the parameter regime.

    Supported regimes: food chain (b3 = c3 = 0) and intraguild predation
    (b3 > 0, c3 = 1), both with mu1 = mu2 = mu3 = 1.
    """
    if not p.normalized:
        raise UnsupportedRegimeError("catalog requires mu1 = mu2 = mu3 = 1")
    b1, b2, b3 = p.b1, p.b2, p.b3
    semi_pv = ((1 - b1) / (1 + b1), 2 / (1 + b1), 0.0)
    semi_vw = (0.0, (1 - b2) / (1 + b2), 2 / (1 + b2))

    if b3 == 0 and p.c3 == 0:
        triples = [
            ("trivial-extinction", (0.0, 0.0, 0.0)),
            ("trivial-prey", (1.0, 0.0, 0.0)),
            ("trivial-predator", (0.0, 1.0, 0.0)),
            ("trivial-secondary", (0.0, 0.0, 1.0)),
            ("semitrivial-prey-secondary", (1.0, 0.0, 1.0)),
            ("semitrivial-prey-predator", semi_pv),
            ("semitrivial-predator-secondary", semi_vw),
            ("coexistence-foodchain", foodchain_triple(b1, b2)),
        ]
        return [_make(label, t, p) for label, t in triples]

    if b3 > 0 and p.c3 == 1:
        out = [
            _make("trivial-secondary", (0.0, 0.0, 1.0), p),
            _make("trivial-prey", (1.0, 0.0, 0.0), p),
            _make("semitrivial-predator-secondary", semi_vw, p),
            _make("semitrivial-prey-predator", semi_pv, p),
        ]
        label = "semitrivial-prey-secondary-intraguild"
        if b3 <= 1:
            s = math.sqrt(2 * (1 - b3))
            out.append(_make(label, (1 - 2 * b3 + (2 * b3**2 + b3 * s) / (1 + b3), 0.0,
                                     (2 * b3 + s) / (1 + b3)), p))
        else:
            out.append(_not_real(label))
        try:
            out.extend(coexistence_intraguild(b1, b2, b3))
        except (NoRealRootError, DegenerateParametersError):
            out.append(_not_real("coexistence-intraguild-branch1"))
            out.append(_not_real("coexistence-intraguild-branch2"))
        return out

    raise UnsupportedRegimeError(
        "catalog covers b3 = c3 = 0 (food chain) or b3 > 0 with c3 = 1 (intraguild)"
    )


def reference_state(p: ModelParams) -> SteadyState:
    """The positive coexistence state the stability theory targets."""
    if p.b3 == 0 and p.c3 == 0:
        return coexistence_foodchain(p.b1, p.b2)
    if p.b3 > 0 and p.c3 == 1:
        return coexistence_intraguild(p.b1, p.b2, p.b3)[0]
    raise UnsupportedRegimeError("no coexistence formula for this (b3, c3) regime")
