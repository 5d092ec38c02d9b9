"""Algebraic stability conditions and Lyapunov dissipation matrices.

The B-matrices are evaluated at sup-norm bounds of (u, v) instead of
pointwise, which is the worst case used to establish definiteness.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateParametersError, DomainError, InapplicableError
from .model import ModelParams
from .steady_states import SMALL_B_BOX

MINOR_SLACK = 1e-14
# lower bound of u + w used by the intraguild argument
UW_LOWER_DEFAULT = math.sqrt(2.0) / 2.0


def leading_minors(m: np.ndarray) -> tuple[float, float, float]:
    m = np.asarray(m, dtype=float)
    return (
        float(m[0, 0]),
        float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]),
        det3(m),
    )


def det3(m) -> float:
    """Cofactor expansion of a 3x3 determinant along the first row."""
    m = np.asarray(m, dtype=float)
    return float(
        m[0, 0] * (m[1, 1] * m[2, 2] - m[1, 2] * m[2, 1])
        - m[0, 1] * (m[1, 0] * m[2, 2] - m[1, 2] * m[2, 0])
        + m[0, 2] * (m[1, 0] * m[2, 1] - m[1, 1] * m[2, 0])
    )


def is_positive_definite(m, minors=None, slack: float = MINOR_SLACK) -> bool:
    """Sylvester's criterion; minors within ``slack`` of zero count as zero."""
    if minors is None:
        minors = leading_minors(m)
    return all(x > slack for x in minors)


def check_gs1(b1: float, b2: float) -> bool:
    """Positivity condition of the food-chain coexistence state."""
    return 0 < b2 < 2 and 0 < b1 < 1 + b1 * b2 + b2


def check_gs2(b1: float, b2: float) -> bool:
    """Disc condition (b1-1)^2 + (b2-1)^2 < 4."""
    return (b1 - 1) ** 2 + (b2 - 1) ** 2 < 4


def check_small_intraguild(b1: float, b2: float, b3: float,
                           small_box: tuple[float, float] = SMALL_B_BOX) -> bool:
    """Intraguild condition with "sufficiently small" read as b1, b3 in the box."""
    lo, hi = small_box
    return lo < b1 <= hi and lo < b3 <= hi and 0.1 <= b2 < math.sqrt(2)


def matrix_A1(b1: float, b2: float):
    """Reaction dissipation matrix of the food-chain case.

    Returns ``(A, det, pd)``; the determinant is the closed form
    (4 - (b1-1)^2 - (b2-1)^2)/4.
    """
    a, c = (b1 - 1) / 2, (b2 - 1) / 2
    A = np.array([[1.0, a, 0.0], [a, 1.0, c], [0.0, c, 1.0]])
    det = (4 - (b1 - 1) ** 2 - (b2 - 1) ** 2) / 4
    minors = (1.0, (3 - b1) * (1 + b1) / 4, det)
    return A, det, is_positive_definite(A, minors)


def _sup_args(u_sup, v_sup):
    if not (u_sup > 0 and v_sup > 0):
        raise DomainError("sup bounds must be > 0")


def _matrix_B(p: ModelParams, u_sup: float, v_sup: float, steady):
    us, vs, ws = steady
    if min(us, vs, ws) <= 0:
        raise DomainError("B-matrices need a positive steady state")
    _sup_args(u_sup, v_sup)
    a = -p.xi * vs * u_sup / 2
    b = -p.chi * ws * u_sup * v_sup / 2
    B = np.array([[p.d1 * us, a, b], [a, p.d2 * vs, b], [b, b, ws]])
    minor2 = vs * (4 * p.d1 * p.d2 * us - p.xi**2 * vs * u_sup**2) / 4
    det = -ws / 4 * (
        p.xi * p.chi**2 * vs * ws * u_sup**3 * v_sup**2
        + p.chi**2 * ws * (p.d1 * us + p.d2 * vs) * u_sup**2 * v_sup**2
        + p.xi**2 * vs**2 * u_sup**2
        - 4 * p.d1 * p.d2 * us * vs
    )
    return B, is_positive_definite(B, (p.d1 * us, minor2, det))


def matrix_B1(p: ModelParams, u_sup: float, v_sup: float, steady):
    """Gradient dissipation matrix at the sup-norm worst case: ``(B, psd)``."""
    return _matrix_B(p, u_sup, v_sup, steady)


def matrix_B2(p: ModelParams, u_sup: float, v_sup: float, steady):
    """Intraguild analogue of :func:`matrix_B1` (identical structure)."""
    return _matrix_B(p, u_sup, v_sup, steady)


def taxis_thresholds(p: ModelParams, u_sup: float, v_sup: float, steady):
    """Example thresholds (xi1, chi1) below which the B-matrix is definite.

    chi1 depends on the run's own ``p.xi``. Other valid pairs exist.
    """
    us, vs, ws = steady
    _sup_args(u_sup, v_sup)
    num = 2 * p.d1 * p.d2 * us
    den_xi = vs * u_sup**2
    den_chi = u_sup**2 * v_sup**2 * (p.xi * vs * ws * u_sup + ws * (p.d1 * us + p.d2 * vs))
    if den_xi <= 0 or den_chi <= 0 or us <= 0:
        raise DegenerateParametersError("threshold formula has a zero denominator")
    return math.sqrt(num / den_xi), math.sqrt(num * vs / den_chi)


def matrix_A2(b1: float, b2: float, b3: float, steady, uw_sum: float = UW_LOWER_DEFAULT):
    """Reaction dissipation matrix of the intraguild case at a given u + w.

    Returns ``(A, pd)``.
    """
    if not uw_sum > 0:
        raise DomainError("uw_sum must be > 0")
    us, vs, ws = steady
    if min(us, vs, ws) <= 0:
        raise DomainError("A2 needs a positive steady state")
    q = (us + ws) * uw_sum
    a, c = (b1 - 1) / 2, (b2 - 1) / 2
    e = (b3 * us - ws) / (2 * q)
    A = np.array([
        [1 - b3 * ws / q, a, e],
        [a, 1.0, c],
        [e, c, 1 + us / q],
    ])
    return A, is_positive_definite(A)


def det_A2_reduced(b2: float, steady, uw_sum: float) -> float:
    """Closed form of 4 det(A2) when b1 = b3 = 0."""
    us, _, ws = steady
    q = (us + ws) * uw_sum
    return 3 - (b2 - 1) ** 2 - ws**2 / q**2 + (3 * us + (b2 - 1) * ws) / q


def lower_bound_u(b1: float, b3: float, v_sup: float, u_bar: float) -> float:
    """Eventual lower bound min(u_bar, 1 - b3 - b1 v_sup) on the prey density."""
    k = 1 - b3 - b1 * v_sup
    if not k > 0:
        raise InapplicableError(f"1 - b3 - b1*||v||_inf = {k:.6g} is not positive")
    return min(u_bar, k)


@dataclass
class StabilityReport:
    gs1: bool
    gs2: bool
    condition_1_10: bool
    detA1: float
    A1_pd: bool
    B1_psd_at_supnorms: bool
    xi1: float
    chi1: float
    alpha: float  # smallest eigenvalue of A1
    notes: list = field(default_factory=list)

    def as_json(self) -> dict:
        return asdict(self)


def stability_report(p: ModelParams, u_sup: float, v_sup: float, steady=None) -> StabilityReport:
    from .steady_states import reference_state

    if steady is None:
        steady = reference_state(p).triple
    A, det, pd = matrix_A1(p.b1, p.b2)
    notes = []
    try:
        _, b_pd = matrix_B1(p, u_sup, v_sup, steady)
        xi1, chi1 = taxis_thresholds(p, u_sup, v_sup, steady)
    except (DomainError, DegenerateParametersError) as exc:
        b_pd, xi1, chi1 = False, math.nan, math.nan
        notes.append(str(exc))
    if p.b3 == 0 and p.c3 == 0:
        cond = False
        notes.append("the small-coefficient condition applies to the intraguild case only")
    else:
        cond = check_small_intraguild(p.b1, p.b2, p.b3)
    return StabilityReport(
        gs1=check_gs1(p.b1, p.b2), gs2=check_gs2(p.b1, p.b2), condition_1_10=cond,
        detA1=det, A1_pd=pd, B1_psd_at_supnorms=b_pd, xi1=xi1, chi1=chi1,
        alpha=float(np.linalg.eigvalsh(A)[0]), notes=notes,
    )


def scan_axis(lo: float, hi: float, n: int) -> np.ndarray:
    """n samples of the half-open range (lo, hi]: lo + (hi-lo) k/n, k = 1..n."""
    return lo + (hi - lo) * np.arange(1, n + 1) / n


@dataclass
class RegionScan:
    b1: np.ndarray
    b2: np.ndarray
    gs1: np.ndarray  # shape (len(b1), len(b2))
    gs2: np.ndarray

    @property
    def admissible(self) -> np.ndarray:
        return self.gs1 & self.gs2

    def nearest(self, b1: float, b2: float) -> tuple[int, int]:
        return int(np.abs(self.b1 - b1).argmin()), int(np.abs(self.b2 - b2).argmin())

    def n_components(self) -> int:
        from scipy import ndimage

        _, n = ndimage.label(self.admissible)
        return int(n)

    def to_csv(self) -> str:
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["b1", "b2", "gs1", "gs2", "admissible"])
        adm = self.admissible
        for i, b1 in enumerate(self.b1):
            for j, b2 in enumerate(self.b2):
                wr.writerow([f"{b1:.17g}", f"{b2:.17g}", str(bool(self.gs1[i, j])).lower(),
                             str(bool(self.gs2[i, j])).lower(), str(bool(adm[i, j])).lower()])
        return buf.getvalue()


def region_scan(b1_range=(0.0, 4.0), b2_range=(0.0, 3.0), resolution=200) -> RegionScan:
    """Sample the coexistence and disc conditions on a resolution x resolution (b1, b2) grid."""
    if isinstance(resolution, int):
        resolution = (resolution, resolution)
    for lo, hi in (b1_range, b2_range):
        if not (0 <= lo < hi):
            raise DomainError("ranges must satisfy 0 <= lo < hi")
    b1 = scan_axis(*b1_range, resolution[0])
    b2 = scan_axis(*b2_range, resolution[1])
    B1, B2 = np.meshgrid(b1, b2, indexing="ij")
    gs1 = (B2 > 0) & (B2 < 2) & (B1 > 0) & (B1 < 1 + B1 * B2 + B2)
    gs2 = (B1 - 1) ** 2 + (B2 - 1) ** 2 < 4
    return RegionScan(b1, b2, gs1, gs2)
