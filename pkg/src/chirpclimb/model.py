"""Static problem data for the chirped-driven weakly nonlinear oscillator.

The oscillator Hamiltonian, in dimensionless form, is

    H = (p^2 + x^2)/2 + lam*x^3/3 + beta*x^4/4 + drive*x*cos(phi_d(t)),

with a slowly chirped drive phase phi_d.  Everything the propagator needs
that does not change during a run is built here: the truncated energy
spectrum, the banded position-coupling matrix, the chirp schedule, and the
dimensionless parameter group (P1, P2, ...) that organizes the
phase-locking physics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

__all__ = [
    "ResonanceMode",
    "CouplingOrder",
    "PhysicalParams",
    "DimensionlessParams",
    "EnergyLadder",
    "CouplingMatrix",
    "ChirpSchedule",
    "anharmonicity",
    "build_ladder",
    "build_coupling",
    "drive_phase",
    "dimensionless",
    "effective_drive",
    "drive_amplitude",
    "effective_twin",
    "chirp_schedule",
    "default_t0",
]


class ResonanceMode(str, Enum):
    """Which resonance the chirp sweeps through.

    FUNDAMENTAL drives at omega_d = 1 + alpha*t, SUBHARMONIC2 at half that
    (the two-photon, 1:2 resonance).  EFFECTIVE_FUNDAMENTAL is the
    fundamental chirp driven with the rescaled two-photon amplitude
    (8/9)*epsilon^2*lam; it is the isomorphic twin of SUBHARMONIC2.
    """

    FUNDAMENTAL = "fundamental"
    SUBHARMONIC2 = "subharmonic2"
    EFFECTIVE_FUNDAMENTAL = "effective_fundamental"


class CouplingOrder(str, Enum):
    """Position matrix elements: harmonic only, or with anharmonic corrections."""

    LINEAR = "linear"
    FULL = "full"


@dataclass(frozen=True)
class PhysicalParams:
    """The four drive/nonlinearity knobs plus the resonance mode.

    alpha   -- chirp rate (> 0)
    beta    -- quartic potential coefficient
    lam     -- cubic potential coefficient
    epsilon -- drive amplitude (>= 0)
    mode    -- resonance mode (see ResonanceMode)
    phase_offset -- drive phase at the start time (phi_d(t0) = phase_offset);
        the default convention is 0, the offset exists for sensitivity studies.
    """

    alpha: float
    beta: float
    lam: float
    epsilon: float
    mode: ResonanceMode = ResonanceMode.SUBHARMONIC2
    phase_offset: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"chirp rate alpha must be positive, got {self.alpha}")
        if self.epsilon < 0:
            raise ValueError(f"drive amplitude epsilon must be >= 0, got {self.epsilon}")

    @property
    def gamma(self) -> float:
        return anharmonicity(self.beta, self.lam)


@dataclass(frozen=True)
class DimensionlessParams:
    """Dimensionless parameter group controlling the phase-locking transition.

    P1 = epsilon/sqrt(2*alpha) measures the drive, P2 = 2*gamma/sqrt(alpha)
    the nonlinearity.  P1_tilde = (8/9)*epsilon*lam*P1 is the drive rescaled
    for the two-photon resonance.  mu (mu_tilde) = P1*sqrt(P2)/2 is the
    single classical parameter of the fundamental (subharmonic) problem.
    T_NL, T_R, T_S are the nonlinear, Rabi, and sweep time scales; the
    identities P1 = T_S/T_R and P2 = T_NL/T_S hold by construction.
    """

    P1: float
    P2: float
    P1_tilde: float
    mu: float
    mu_tilde: float
    T_NL: float
    T_R: float
    T_S: float


def anharmonicity(beta: float, lam: float) -> float:
    """Anharmonicity gamma = (3/8)*beta - (5/12)*lam^2 of the energy ladder."""
    return 0.375 * beta - (5.0 / 12.0) * lam * lam


@dataclass(frozen=True)
class EnergyLadder:
    """Truncated spectrum E_0..E_{N-1} of the undriven oscillator.

    Levels follow the weak-nonlinearity expansion
    E_n = n + 1/2 + gamma*(n^2 + n) + (3/16)*beta - (11/72)*lam^2,
    so the level spacing E_{n+1} - E_n = 1 + 2*gamma*(n+1) is affine in n.
    """

    levels: np.ndarray
    gamma: float

    def __post_init__(self):
        self.levels.setflags(write=False)

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    def spacing(self) -> np.ndarray:
        return np.diff(self.levels)


def build_ladder(params: PhysicalParams, n_basis: int) -> EnergyLadder:
    """Build the energy ladder for the first `n_basis` levels."""
    if n_basis < 2:
        raise ValueError(f"need at least 2 basis levels, got {n_basis}")
    gamma = anharmonicity(params.beta, params.lam)
    n = np.arange(n_basis, dtype=np.float64)
    shift = (3.0 / 16.0) * params.beta - (11.0 / 72.0) * params.lam ** 2
    levels = n + 0.5 + gamma * (n * n + n) + shift
    return EnergyLadder(levels=levels, gamma=gamma)


@dataclass(frozen=True)
class CouplingMatrix:
    """Banded symmetric matrix of position matrix elements <k|x|n>.

    Only offsets -3..+3 are ever nonzero.  `bands[i, n]` stores the entry
    at (row, col) = (n + offsets[i], n), zero-padded where the row index
    falls outside the matrix.  LINEAR order keeps the harmonic +-1 band;
    FULL order adds the first-order anharmonic corrections, which populate
    offsets 0, +-2 (cubic) and +-1, +-3 (quartic).
    """

    order: CouplingOrder
    bands: np.ndarray  # shape (7, N)

    offsets = (-3, -2, -1, 0, 1, 2, 3)

    def __post_init__(self):
        self.bands.setflags(write=False)

    @property
    def n_basis(self) -> int:
        return self.bands.shape[1]

    def entry(self, k: int, n: int) -> float:
        off = k - n
        if abs(off) > 3:
            return 0.0
        return float(self.bands[off + 3, n])

    def toarray(self) -> np.ndarray:
        n_b = self.n_basis
        out = np.zeros((n_b, n_b))
        for i, off in enumerate(self.offsets):
            for n in range(n_b):
                k = n + off
                if 0 <= k < n_b:
                    out[k, n] = self.bands[i, n]
        return out

    def upper_bands(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """The four independent diagonals (offsets 0..3), padded to length N."""
        return (
            np.ascontiguousarray(self.bands[3]),
            np.ascontiguousarray(self.bands[4]),
            np.ascontiguousarray(self.bands[5]),
            np.ascontiguousarray(self.bands[6]),
        )

    def max_row_sum(self) -> float:
        """Max over rows of sum_k |entry(row, k)|; bounds the coupling norm."""
        return float(np.abs(self.toarray()).sum(axis=1).max())


def build_coupling(
    n_basis: int,
    order: CouplingOrder = CouplingOrder.FULL,
    beta: float = 0.0,
    lam: float = 0.0,
) -> CouplingMatrix:
    """Build the banded coupling matrix at the requested order.

    The harmonic band is <n|x|n+1> = sqrt((n+1)/2).  At FULL order the
    cubic term contributes (lam/6)*[-3(2n+1) on the diagonal,
    sqrt((n+1)(n+2)) at offset 2] and the quartic term
    (beta/(24*sqrt(2)))*[-2(2n+3)sqrt(n+1) at offset 1,
    3*sqrt((n+1)(n+2)(n+3)) at offset 3].
    """
    min_n = 4 if order is CouplingOrder.FULL else 2
    if n_basis < min_n:
        raise ValueError(f"{order.value} coupling needs at least {min_n} levels, got {n_basis}")
    n = np.arange(n_basis, dtype=np.float64)
    bands = np.zeros((7, n_basis))

    up1 = np.sqrt((n + 1) / 2.0)
    up1[-1] = 0.0
    if order is CouplingOrder.FULL:
        up0 = -lam * (2 * n + 1) / 2.0
        up2 = lam * np.sqrt((n + 1) * (n + 2)) / 6.0
        up2[-2:] = 0.0
        up3 = beta * np.sqrt((n + 1) * (n + 2) * (n + 3)) / (8.0 * math.sqrt(2.0))
        up3[-3:] = 0.0
        corr1 = -beta * (2 * n + 3) * np.sqrt(n + 1) / (12.0 * math.sqrt(2.0))
        corr1[-1] = 0.0
        up1 = up1 + corr1
        bands[3] = up0
        bands[6] = up3
        bands[0, 3:] = up3[:-3]
        bands[5] = up2
        bands[1, 2:] = up2[:-2]
    bands[4] = up1
    bands[2, 1:] = up1[:-1]
    return CouplingMatrix(order=order, bands=bands)


@dataclass(frozen=True)
class ChirpSchedule:
    """Drive frequency and phase as closed-form functions of time.

    omega_d(t) = omega0 + 2*accel*t and
    phi_d(t)   = phi0 + omega0*(t - t0) + accel*(t^2 - t0^2),
    so the phase is the exact integral of the frequency from t0 (never
    accumulated numerically).  For the fundamental chirp omega0 = 1,
    accel = alpha/2; for the 1:2 subharmonic omega0 = 1/2, accel = alpha/4.
    """

    mode: ResonanceMode
    alpha: float
    t0: float
    phi0: float = 0.0

    @property
    def omega0(self) -> float:
        return 0.5 if self.mode is ResonanceMode.SUBHARMONIC2 else 1.0

    @property
    def accel(self) -> float:
        return self.alpha / 4.0 if self.mode is ResonanceMode.SUBHARMONIC2 else self.alpha / 2.0

    def omega_d(self, t):
        return self.omega0 + 2.0 * self.accel * np.asarray(t, dtype=float)

    def phi_d(self, t):
        t = np.asarray(t, dtype=float)
        return self.phi0 + self.omega0 * (t - self.t0) + self.accel * (t * t - self.t0 * self.t0)


def drive_phase(schedule: ChirpSchedule, t: float) -> tuple[float, float]:
    """Drive frequency and accumulated phase at time t (t >= schedule.t0)."""
    return float(schedule.omega_d(t)), float(schedule.phi_d(t))


def default_t0(alpha: float) -> float:
    """Run start time t0 = -10/sqrt(alpha), well before the resonance crossing."""
    return -10.0 / math.sqrt(alpha)


def chirp_schedule(params: PhysicalParams, t0: float | None = None) -> ChirpSchedule:
    """The chirp schedule implied by the parameter set."""
    if t0 is None:
        t0 = default_t0(params.alpha)
    return ChirpSchedule(mode=params.mode, alpha=params.alpha, t0=t0, phi0=params.phase_offset)


def effective_drive(params: PhysicalParams) -> float:
    """Two-photon effective drive amplitude (8/9)*epsilon^2*lam."""
    return (8.0 / 9.0) * params.epsilon ** 2 * params.lam


def drive_amplitude(params: PhysicalParams) -> float:
    """Drive amplitude actually applied by the propagator for this mode."""
    if params.mode is ResonanceMode.EFFECTIVE_FUNDAMENTAL:
        return effective_drive(params)
    return params.epsilon


def effective_twin(params: PhysicalParams) -> PhysicalParams:
    """The EFFECTIVE_FUNDAMENTAL twin of a subharmonic parameter set."""
    return replace(params, mode=ResonanceMode.EFFECTIVE_FUNDAMENTAL)


def dimensionless(params: PhysicalParams) -> DimensionlessParams:
    """Evaluate the dimensionless parameter group for this parameter set."""
    gamma = anharmonicity(params.beta, params.lam)
    sqa = math.sqrt(params.alpha)
    P1 = params.epsilon / math.sqrt(2.0 * params.alpha)
    P2 = 2.0 * gamma / sqa
    P1_tilde = (8.0 / 9.0) * params.epsilon * params.lam * P1
    T_NL = 2.0 * gamma / params.alpha
    T_R = math.sqrt(2.0) / params.epsilon if params.epsilon > 0 else math.inf
    T_S = 1.0 / sqa
    sqrtP2 = math.sqrt(P2) if P2 >= 0 else float("nan")
    return DimensionlessParams(
        P1=P1,
        P2=P2,
        P1_tilde=P1_tilde,
        mu=0.5 * P1 * sqrtP2,
        mu_tilde=0.5 * P1_tilde * sqrtP2,
        T_NL=T_NL,
        T_R=T_R,
        T_S=T_S,
    )
