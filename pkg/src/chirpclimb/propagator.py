"""Energy-basis propagation of the chirped-driven oscillator.

Integrates i*dc_n/dt = E_n c_n + drive*cos(phi_d(t)) * sum_k K_kn c_k with
fixed-step RK4, either directly (Schrodinger picture) or with the stiff
diagonal factored out analytically (interaction picture).  No
rotating-wave approximation is made anywhere: the two-photon physics lives
in the fast terms, so the full equation is stepped as written.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import BasisTruncationError, NormDriftError
from .model import (
    ChirpSchedule,
    CouplingMatrix,
    CouplingOrder,
    EnergyLadder,
    PhysicalParams,
    build_coupling,
    build_ladder,
    chirp_schedule,
    default_t0,
    drive_amplitude,
)

__all__ = [
    "Picture",
    "StateVector",
    "IntegratorConfig",
    "Trajectory",
    "initial_state",
    "rhs",
    "step",
    "propagate",
    "default_dt",
    "write_trajectory_csv",
    "write_amplitudes_csv",
]

TOP_LEVEL_POPULATION_LIMIT = 1e-3  # truncation monitor on the top 3 levels


class Picture(str, Enum):
    SCHRODINGER = "schrodinger"
    INTERACTION = "interaction"


@dataclass
class StateVector:
    """N complex amplitudes in the energy basis, tagged with their time."""

    amps: np.ndarray
    t: float

    @property
    def n_basis(self) -> int:
        return len(self.amps)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def populations(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def copy(self) -> "StateVector":
        return StateVector(amps=self.amps.copy(), t=self.t)


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration and sampling controls.

    dt=None picks the step automatically: dt*E_max <= 0.1 in the
    Schrodinger picture; in the interaction picture the step resolves both
    the drive term (dt <= 0.05/(drive*max coupling row sum)) and the
    fastest residual oscillation (dt <= 0.1/omega_fast).  The chosen step
    is then rounded so an integer number of steps lands exactly on each
    sampling instant.
    """

    tau_end: float
    dt: float | None = None
    picture: Picture = Picture.INTERACTION
    norm_drift_budget: float = 1e-6
    sample_interval: float = 0.01
    snapshot_taus: tuple[float, ...] = ()


@dataclass
class Trajectory:
    """Observables sampled on the slow-time grid, plus requested snapshots."""

    taus: np.ndarray
    energies: np.ndarray
    norms: np.ndarray
    populations: np.ndarray  # shape (n_samples, N)
    final_state: StateVector
    snapshots: dict[float, StateVector] = field(default_factory=dict)

    @property
    def max_norm_drift(self) -> float:
        return float(np.abs(self.norms - 1.0).max())


def initial_state(n_basis: int, alpha: float) -> StateVector:
    """Ground state at the run start time t0 = -10/sqrt(alpha)."""
    if n_basis < 2:
        raise ValueError(f"need at least 2 basis levels, got {n_basis}")
    amps = np.zeros(n_basis, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(amps=amps, t=default_t0(alpha))


def rhs(
    state: StateVector,
    ladder: EnergyLadder,
    coupling: CouplingMatrix,
    drive_amp: float,
    schedule: ChirpSchedule,
) -> np.ndarray:
    """dc/dt = -i*(E*c + drive*cos(phi_d)*K@c), touching only the 7 stored bands."""
    c = state.amps
    up0, up1, up2, up3 = coupling.upper_bands()
    v = up0 * c
    v[:-1] += up1[:-1] * c[1:]
    v[1:] += up1[:-1] * c[:-1]
    v[:-2] += up2[:-2] * c[2:]
    v[2:] += up2[:-2] * c[:-2]
    v[:-3] += up3[:-3] * c[3:]
    v[3:] += up3[:-3] * c[:-3]
    phi = schedule.phi_d(state.t)
    return -1j * (ladder.levels * c + drive_amp * math.cos(phi) * v)


def _rk4_python(state, dt, ladder, coupling, drive_amp, schedule):
    """One plain RK4 step through the numpy rhs (reference path)."""
    c0, t = state.amps, state.t
    k1 = rhs(state, ladder, coupling, drive_amp, schedule)
    k2 = rhs(StateVector(c0 + 0.5 * dt * k1, t + 0.5 * dt), ladder, coupling, drive_amp, schedule)
    k3 = rhs(StateVector(c0 + 0.5 * dt * k2, t + 0.5 * dt), ladder, coupling, drive_amp, schedule)
    k4 = rhs(StateVector(c0 + dt * k3, t + dt), ladder, coupling, drive_amp, schedule)
    return StateVector(c0 + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4), t + dt)


def step(
    state: StateVector,
    dt: float,
    ladder: EnergyLadder,
    coupling: CouplingMatrix,
    drive_amp: float,
    schedule: ChirpSchedule,
    picture: Picture = Picture.SCHRODINGER,
    n_steps: int = 1,
) -> StateVector:
    """Advance `n_steps` RK4 steps of size dt; returns a new StateVector.

    In the interaction picture the diagonal phases are applied exactly and
    only the residual coupling is stepped, so larger dt remain accurate.
    """
    if picture is Picture.SCHRODINGER:
        guard = dt * float(ladder.levels[-1])
        if not guard < 0.5:
            raise ValueError(
                f"dt*E_max = {guard:.3g} >= 0.5: unstable Schrodinger-picture step"
            )
    up0, up1, up2, up3 = coupling.upper_bands()
    y = state.amps.astype(np.complex128, copy=True)
    args = (state.t, dt, n_steps, ladder.levels, up0, up1, up2, up3,
            drive_amp, schedule.omega0, schedule.accel, schedule.t0, schedule.phi0)
    if picture is Picture.SCHRODINGER:
        y = _kernels.rk4_schrodinger(y, *args)
    else:
        phases = np.exp(1j * ladder.levels * state.t)
        y = _kernels.rk4_interaction(y * phases, *args)
        t_end = state.t + n_steps * dt
        y *= np.exp(-1j * ladder.levels * t_end)
    return StateVector(amps=y, t=state.t + n_steps * dt)


def default_dt(
    ladder: EnergyLadder,
    coupling: CouplingMatrix,
    drive_amp: float,
    schedule: ChirpSchedule,
    picture: Picture,
    t_end: float,
) -> float:
    """Automatic step size per the rules described on IntegratorConfig."""
    e_max = float(ladder.levels[-1])
    if picture is Picture.SCHRODINGER:
        return 0.1 / e_max
    row_sum = coupling.max_row_sum()
    drive_limit = 0.05 / max(drive_amp * row_sum, 1e-30)
    n_b = ladder.n_levels
    band_gap = float(ladder.levels[-1] - ladder.levels[-4]) if n_b >= 4 else 2.0
    omega_fast = band_gap + float(
        max(schedule.omega_d(schedule.t0), schedule.omega_d(t_end))
    )
    return min(drive_limit, 0.1 / omega_fast)


def propagate(
    params: PhysicalParams,
    n_basis: int,
    config: IntegratorConfig,
    sink: Callable[[float, np.ndarray, float, float], None] | None = None,
    coupling_order: CouplingOrder = CouplingOrder.FULL,
) -> Trajectory:
    """Run from t0 = -10/sqrt(alpha) to tau_end/sqrt(alpha).

    Samples (tau, populations, mean energy, norm) every sample_interval of
    slow time, invoking `sink` with each sample.  Raises NormDriftError if
    |norm - 1| exceeds the budget and BasisTruncationError if the top three
    levels accumulate more than 1e-3 population (reflection off the basis
    edge would follow).
    """
    ladder = build_ladder(params, n_basis)
    coupling = build_coupling(n_basis, coupling_order, params.beta, params.lam)
    schedule = chirp_schedule(params)
    drive = drive_amplitude(params)
    sqa = math.sqrt(params.alpha)
    tau0 = schedule.t0 * sqa  # exactly -10 up to rounding
    if config.tau_end <= tau0:
        raise ValueError(f"tau_end = {config.tau_end} must exceed start tau = {tau0}")

    dt = config.dt
    if dt is None:
        dt = default_dt(ladder, coupling, drive, schedule, config.picture,
                        config.tau_end / sqa)
    if config.picture is Picture.SCHRODINGER and not dt * ladder.levels[-1] < 0.5:
        raise ValueError("dt*E_max >= 0.5: unstable Schrodinger-picture step")

    sample_fast = config.sample_interval / sqa
    steps_per_sample = max(1, round(sample_fast / dt))
    dt = sample_fast / steps_per_sample
    n_samples = round((config.tau_end - tau0) / config.sample_interval)

    state0 = initial_state(n_basis, params.alpha)
    t0 = state0.t
    up0, up1, up2, up3 = coupling.upper_bands()
    levels = ladder.levels

    interaction = config.picture is Picture.INTERACTION
    y = state0.amps.copy()
    if interaction:
        y *= np.exp(1j * levels * t0)

    snapshot_map: dict[int, float] = {}
    for tau_snap in config.snapshot_taus:
        idx = round((tau_snap - tau0) / config.sample_interval)
        if not 0 <= idx <= n_samples:
            raise ValueError(f"snapshot tau {tau_snap} outside run range")
        snapshot_map[idx] = tau_snap

    taus = tau0 + config.sample_interval * np.arange(n_samples + 1)
    energies = np.empty(n_samples + 1)
    norms = np.empty(n_samples + 1)
    pops = np.empty((n_samples + 1, n_basis))
    snapshots: dict[float, StateVector] = {}

    kernel = _kernels.rk4_interaction if interaction else _kernels.rk4_schrodinger
    kern_args = (levels, up0, up1, up2, up3, drive,
                 schedule.omega0, schedule.accel, schedule.t0, schedule.phi0)

    def record(i: int) -> None:
        t_i = t0 + i * steps_per_sample * dt
        p = np.abs(y) ** 2
        pops[i] = p
        norm = float(p.sum())
        norms[i] = norm
        energies[i] = float(p @ levels)
        if abs(norm - 1.0) > config.norm_drift_budget:
            raise NormDriftError(
                f"norm drift {abs(norm - 1.0):.3e} exceeds budget "
                f"{config.norm_drift_budget:.1e} at tau = {taus[i]:.3f}"
            )
        if p[-3:].sum() > TOP_LEVEL_POPULATION_LIMIT:
            raise BasisTruncationError(
                f"top-3-level population {p[-3:].sum():.3e} exceeds "
                f"{TOP_LEVEL_POPULATION_LIMIT:.0e} at tau = {taus[i]:.3f}; "
                f"increase the basis size (N = {n_basis})"
            )
        if i in snapshot_map:
            amps = y.copy()
            if interaction:
                amps *= np.exp(-1j * levels * t_i)
            snapshots[snapshot_map[i]] = StateVector(amps=amps, t=t_i)
        if sink is not None:
            sink(float(taus[i]), p, float(energies[i]), norm)

    record(0)
    for i in range(n_samples):
        t_block = t0 + i * steps_per_sample * dt
        kernel(y, t_block, dt, steps_per_sample, *kern_args)
        record(i + 1)

    t_end = t0 + n_samples * steps_per_sample * dt
    amps = y.copy()
    if interaction:
        amps *= np.exp(-1j * levels * t_end)
    final = StateVector(amps=amps, t=t_end)
    return Trajectory(
        taus=taus,
        energies=energies,
        norms=norms,
        populations=pops,
        final_state=final,
        snapshots=snapshots,
    )


def write_trajectory_csv(path, trajectory: Trajectory, smoothed: np.ndarray) -> None:
    """CSV with columns tau, norm, mean_energy, smoothed_energy, p_0..p_{N-1}."""
    n_b = trajectory.populations.shape[1]
    header = ["tau", "norm", "mean_energy", "smoothed_energy"]
    header += [f"p_{n}" for n in range(n_b)]
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for i in range(len(trajectory.taus)):
            row = [trajectory.taus[i], trajectory.norms[i],
                   trajectory.energies[i], smoothed[i]]
            row.extend(trajectory.populations[i])
            fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")


def write_amplitudes_csv(path, state: StateVector) -> None:
    """CSV of (n, Re c_n, Im c_n) for one amplitude snapshot."""
    with open(path, "w") as fh:
        fh.write("n,re,im\n")
        for n, a in enumerate(state.amps):
            fh.write(f"{n},{format(a.real, '.17g')},{format(a.imag, '.17g')}\n")
