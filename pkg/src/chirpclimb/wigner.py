"""Wigner quasi-probability function of an energy-basis state.

Production path: the closed-form Fock cross-terms (associated Laguerre
times Gaussian), summed over matrix diagonals with overflow-safe
recurrences (see _kernels.wigner_grid).  Validation path: the defining
integral W(x,p) = (1/pi) * Int ds psi*(x+s) psi(x-s) e^{2ips}, evaluated
with Hermite-function eigenstates and adaptive quadrature.  The two share
no code, so agreement is a genuine cross-check.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import _kernels
from .errors import GridCoverageError
from .propagator import StateVector

__all__ = [
    "PhaseSpaceGrid",
    "WignerField",
    "default_grid",
    "wigner_from_state",
    "direct_wigner_oracle",
    "oracle_point",
    "hermite_function",
    "position_wavefunction",
    "write_wigner_csv",
]

GRID_MASS_TOLERANCE = 0.05  # max phase-space mass allowed off-grid


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """Rectangular sampling grid in (x, p)."""

    x_min: float
    x_max: float
    p_min: float
    p_max: float
    nx: int = 129
    np: int = 129

    def __post_init__(self):
        if self.nx < 32 or self.np < 32:
            raise ValueError("grid needs at least 32 samples per axis")
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise ValueError("grid extents must be nonempty")

    def xs(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    def ps(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.np)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / (self.np - 1)


@dataclass(frozen=True)
class WignerField:
    """W(x_i, p_j) samples; values[j, i] pairs p_j (row) with x_i (column)."""

    grid: PhaseSpaceGrid
    values: np.ndarray

    def mass(self) -> float:
        """Riemann-sum normalization Int W dx dp on the grid."""
        return float(self.values.sum() * self.grid.dx * self.grid.dp)

    def purity(self) -> float:
        """(2*pi) * Int W^2 dx dp; equals 1 for a pure state on an adequate grid."""
        return float(2.0 * math.pi * (self.values ** 2).sum() * self.grid.dx * self.grid.dp)

    def marginal_x(self) -> np.ndarray:
        """Int W dp, the position density."""
        return self.values.sum(axis=0) * self.grid.dp


def default_grid(state: StateVector, n_points: int = 129) -> PhaseSpaceGrid:
    """Square grid reaching sqrt(2*N_occ) + 3, N_occ the top populated level."""
    pops = state.populations()
    occupied = np.nonzero(pops > 1e-3)[0]
    n_occ = int(occupied[-1]) if len(occupied) else 0
    half = math.sqrt(2.0 * (n_occ + 1)) + 3.0
    return PhaseSpaceGrid(-half, half, -half, half, n_points, n_points)


def wigner_from_state(
    state: StateVector,
    grid: PhaseSpaceGrid,
    check_mass: bool = True,
) -> WignerField:
    """Evaluate W on the grid via the Laguerre cross-term sum.

    Raises GridCoverageError when the on-grid mass differs from 1 by more
    than 5%, which signals that the state extends beyond the grid.
    """
    amps = np.ascontiguousarray(state.amps, dtype=np.complex128)
    values = _kernels.wigner_grid(amps, grid.xs(), grid.ps())
    field = WignerField(grid=grid, values=values)
    if check_mass:
        norm = state.norm()
        off_grid = abs(field.mass() - norm)
        if off_grid > GRID_MASS_TOLERANCE * norm:
            raise GridCoverageError(
                f"estimated {off_grid / norm:.1%} of the phase-space mass lies "
                "outside the grid; enlarge the extents"
            )
    return field


def hermite_function(n: int, x) -> np.ndarray:
    """Orthonormal oscillator eigenfunction psi_n(x), stable to large n.

    Uses the normalized recurrence
    psi_{k+1} = x*sqrt(2/(k+1))*psi_k - sqrt(k/(k+1))*psi_{k-1}.
    """
    x = np.asarray(x, dtype=float)
    psi_prev = np.zeros_like(x)
    psi = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    for k in range(n):
        psi_next = x * math.sqrt(2.0 / (k + 1)) * psi - math.sqrt(k / (k + 1.0)) * psi_prev
        psi_prev, psi = psi, psi_next
    return psi


def position_wavefunction(state: StateVector, x) -> np.ndarray:
    """psi(x) = sum_n c_n psi_n(x) built from Hermite functions."""
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=np.complex128)
    for n, c in enumerate(state.amps):
        if abs(c) > 1e-16:
            out += c * hermite_function(n, x)
    return out


def oracle_point(state: StateVector, x: float, p: float,
                 epsabs: float = 1e-10) -> complex:
    """Direct-integral W(x, p) as a complex number (imaginary part ~ 0).

    Integrates (1/pi) psi*(x+s) psi(x-s) e^{2ips} over s by adaptive
    quadrature; the support bound uses the highest occupied level's
    classical turning point.
    """
    occupied = np.nonzero(np.abs(state.amps) > 1e-14)[0]
    n_top = int(occupied[-1]) if len(occupied) else 0
    s_max = math.sqrt(2.0 * n_top + 1.0) + 8.0 + abs(x)

    def integrand_re(s):
        val = (np.conj(position_wavefunction(state, x + s))
               * position_wavefunction(state, x - s) * np.exp(2j * p * s))
        return float(np.real(val))

    def integrand_im(s):
        val = (np.conj(position_wavefunction(state, x + s))
               * position_wavefunction(state, x - s) * np.exp(2j * p * s))
        return float(np.imag(val))

    re, _ = quad(integrand_re, -s_max, s_max, epsabs=epsabs, limit=300)
    im, _ = quad(integrand_im, -s_max, s_max, epsabs=epsabs, limit=300)
    return complex(re / math.pi, im / math.pi)


def direct_wigner_oracle(state: StateVector, grid: PhaseSpaceGrid) -> WignerField:
    """Quadrature evaluation of W on the whole grid (slow; small N only)."""
    xs, ps = grid.xs(), grid.ps()
    values = np.empty((grid.np, grid.nx))
    for j, p in enumerate(ps):
        for i, x in enumerate(xs):
            values[j, i] = oracle_point(state, float(x), float(p)).real
    return WignerField(grid=grid, values=values)


def write_wigner_csv(path, field: WignerField, meta_path=None) -> None:
    """CSV matrix (rows = p index, cols = x index) plus a JSON grid header."""
    with open(path, "w") as fh:
        for row in field.values:
            fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")
    if meta_path is not None:
        g = field.grid
        meta = {
            "x_min": g.x_min, "x_max": g.x_max,
            "p_min": g.p_min, "p_max": g.p_max,
            "nx": g.nx, "np": g.np,
            "layout": "rows are p samples, columns are x samples",
        }
        with open(meta_path, "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
