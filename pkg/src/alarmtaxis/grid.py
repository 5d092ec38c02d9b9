"""Cell-centred finite-volume mesh on an interval or rectangle.

Fields are plain ``float64`` arrays of shape ``domain.shape``; axis 0 is x and
axis 1 (2D only) is y. Every operator treats the boundary as a zero-flux wall
by mirroring the boundary cell into a ghost cell, which makes all discrete
fluxes through boundary faces exactly zero.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Domain:
    dim: int
    lx: float
    nx: int
    ly: float | None = None
    ny: int | None = None

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DomainError(f"dim must be 1 or 2, got {self.dim!r}")
        if not self.lx > 0:
            raise DomainError("lx must be > 0")
        if int(self.nx) != self.nx or self.nx < 4:
            raise DomainError("nx must be an integer >= 4")
        if self.dim == 2:
            if self.ly is None or not self.ly > 0:
                raise DomainError("ly must be > 0 in 2D")
            if self.ny is None or int(self.ny) != self.ny or self.ny < 4:
                raise DomainError("ny must be an integer >= 4 in 2D")
            if not math.isclose(self.lx / self.nx, self.ly / self.ny, rel_tol=1e-12):
                raise DomainError("2D mesh must be uniform: lx/nx == ly/ny")
        elif self.ly is not None or self.ny is not None:
            raise DomainError("ly/ny only apply to 2D domains")

    @classmethod
    def interval(cls, lx: float, nx: int) -> Domain:
        return cls(1, float(lx), int(nx))

    @classmethod
    def rectangle(cls, lx: float, ly: float, nx: int, ny: int) -> Domain:
        return cls(2, float(lx), int(nx), float(ly), int(ny))

    @property
    def dx(self) -> float:
        return self.lx / self.nx

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.nx,) if self.dim == 1 else (self.nx, self.ny)

    @property
    def cell_volume(self) -> float:
        return self.dx**self.dim

    @property
    def measure(self) -> float:
        return self.lx if self.dim == 1 else self.lx * self.ly

    def refined(self, factor: int = 2) -> Domain:
        if self.dim == 1:
            return dataclasses.replace(self, nx=self.nx * factor)
        return dataclasses.replace(self, nx=self.nx * factor, ny=self.ny * factor)

    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Cell-centre coordinates broadcast to ``shape`` (x first)."""
        x = (np.arange(self.nx) + 0.5) * self.dx
        if self.dim == 1:
            return (x,)
        y = (np.arange(self.ny) + 0.5) * self.dx
        xx, yy = np.meshgrid(x, y, indexing="ij")
        return xx, yy

    def field(self, value: float = 0.0) -> np.ndarray:
        return np.full(self.shape, float(value))

    def check(self, f: np.ndarray) -> np.ndarray:
        f = np.asarray(f, dtype=float)
        if f.shape != self.shape:
            raise DomainError(f"field shape {f.shape} does not match domain {self.shape}")
        return f


def _pad_faces(flux: np.ndarray, axis: int) -> np.ndarray:
    """Append zero-flux boundary faces on both ends of ``axis``."""
    shape = list(flux.shape)
    shape[axis] += 2
    out = np.zeros(shape)
    inner = [slice(None)] * flux.ndim
    inner[axis] = slice(1, -1)
    out[tuple(inner)] = flux
    return out


def laplacian_neumann(f, domain: Domain, d: float = 1.0) -> np.ndarray:
    """d * Lap f with the 3/5-point stencil and mirrored ghost cells."""
    f = domain.check(f)
    inv = d / domain.dx**2
    out = np.zeros_like(f)
    for axis in range(domain.dim):
        faces = _pad_faces(np.diff(f, axis=axis), axis)
        out += np.diff(faces, axis=axis)
    return inv * out


def face_velocity(psi, domain: Domain, coef: float = 1.0) -> list[np.ndarray]:
    """coef * grad(psi) on interior faces, one array per axis.

    Each array has one fewer entry than the mesh along its own axis; boundary
    faces are implicit and carry zero velocity.
    """
    psi = domain.check(psi)
    return [coef * np.diff(psi, axis=axis) / domain.dx for axis in range(domain.dim)]


def upwind_advection_divergence(rho, velocity, domain: Domain) -> np.ndarray:
    """Donor-cell discretisation of div(rho * velocity).

    ``velocity`` is a list of interior-face arrays as produced by
    :func:`face_velocity`. First order; nonnegative ``rho`` stays nonnegative
    under the usual CFL restriction.
    """
    rho = domain.check(rho)
    out = np.zeros_like(rho)
    n = rho.ndim
    for axis, vel in enumerate(velocity):
        lo = [slice(None)] * n
        hi = [slice(None)] * n
        lo[axis] = slice(None, -1)
        hi[axis] = slice(1, None)
        donor = np.where(vel > 0, rho[tuple(lo)], rho[tuple(hi)])
        out += np.diff(_pad_faces(vel * donor, axis), axis=axis)
    return out / domain.dx


def gradient_centered(f, domain: Domain) -> np.ndarray:
    """Cell-centred gradient, shape ``(dim, *domain.shape)``.

    Central differences in the interior; at boundary cells the mirrored ghost
    value is used, i.e. a half-weight one-sided difference consistent with a
    zero normal derivative on the boundary face.
    """
    f = domain.check(f)
    comps = []
    for axis in range(domain.dim):
        width = [(0, 0)] * f.ndim
        width[axis] = (1, 1)
        g = np.pad(f, width, mode="edge")
        hi = [slice(None)] * f.ndim
        lo = [slice(None)] * f.ndim
        hi[axis] = slice(2, None)
        lo[axis] = slice(None, -2)
        comps.append((g[tuple(hi)] - g[tuple(lo)]) / (2.0 * domain.dx))
    return np.stack(comps)


def integrate(f, domain: Domain) -> float:
    """Midpoint-rule integral over the domain."""
    return float(np.sum(domain.check(f)) * domain.cell_volume)


def norms(f, domain: Domain) -> tuple[float, float, float]:
    """(L1, L2, Linf) norms."""
    f = domain.check(f)
    a = np.abs(f)
    return (
        float(np.sum(a) * domain.cell_volume),
        float(math.sqrt(np.sum(f * f) * domain.cell_volume)),
        float(a.max()),
    )


def field_to_csv_rows(f, domain: Domain):
    """Yield ``(x[, y], value)`` tuples in row-major order."""
    f = domain.check(f)
    coords = [c.ravel() for c in domain.coordinates()]
    for row in zip(*coords, f.ravel()):
        yield row
