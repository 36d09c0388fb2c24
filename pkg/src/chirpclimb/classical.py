"""Classical limit: Hamilton's equations for the driven oscillator.

An independent witness for the subharmonic autoresonance physics: the same
Hamiltonian, integrated as a classical trajectory instead of a quantum
state.  Capture is judged against the ideal autoresonant energy implied by
frequency locking, E_ar(tau) = tau/P2, which follows from the affine
frequency-energy relation omega(E) = 1 + 2*gamma*E meeting the swept
two-photon resonance condition omega = 2*omega_d(tau).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import BracketError
from .model import (
    ChirpSchedule,
    PhysicalParams,
    chirp_schedule,
    dimensionless,
)
from .observables import smooth_values
from .threshold import realize_params

__all__ = [
    "ClassicalState",
    "ClassicalTrace",
    "classical_rhs",
    "classical_capture",
    "classical_threshold",
    "classical_lambda_for",
    "write_trace_csv",
]

DIVERGENCE_BOUND = 1e6


@dataclass
class ClassicalState:
    x: float
    p: float
    t: float


@dataclass
class ClassicalTrace:
    """Sampled classical trajectory with raw and smoothed oscillator energy."""

    taus: np.ndarray
    xs: np.ndarray
    ps: np.ndarray
    energies: np.ndarray
    smoothed: np.ndarray
    captured: bool
    diverged: bool


def classical_rhs(
    state: ClassicalState,
    params: PhysicalParams,
    schedule: ChirpSchedule,
) -> tuple[float, float]:
    """(dx/dt, dp/dt) = (p, -x - lam*x^2 - beta*x^3 - epsilon*cos(phi_d))."""
    x = state.x
    phi = float(schedule.phi_d(state.t))
    dp = -x - params.lam * x * x - params.beta * x ** 3 - params.epsilon * math.cos(phi)
    return state.p, dp


def _oscillator_energy(x: float, p: float, params: PhysicalParams) -> float:
    return 0.5 * (p * p + x * x) + params.lam * x ** 3 / 3.0 + params.beta * x ** 4 / 4.0


def classical_capture(
    params: PhysicalParams,
    tau_end: float,
    dt: float = 0.01,
    sample_interval: float = 0.01,
    window: float = 0.1,
) -> tuple[bool, ClassicalTrace]:
    """Integrate from rest at t0 = -10/sqrt(alpha); judge capture at tau_end.

    Captured means the smoothed energy, averaged over the final slow-time
    unit, exceeds half the ideal autoresonant energy E_ar(tau_end) =
    tau_end/P2.  A diverging trajectory counts as not captured.
    """
    dims = dimensionless(params)
    if dims.P2 <= 0:
        raise ValueError("capture criterion needs positive anharmonicity (P2 > 0)")
    schedule = chirp_schedule(params)
    sqa = math.sqrt(params.alpha)
    tau0 = schedule.t0 * sqa
    if tau_end <= tau0:
        raise ValueError(f"tau_end = {tau_end} must exceed start tau = {tau0}")
    sample_fast = sample_interval / sqa
    steps = max(1, round(sample_fast / dt))
    dt = sample_fast / steps
    n_samples = round((tau_end - tau0) / sample_interval)

    state = np.zeros(2)
    taus = tau0 + sample_interval * np.arange(n_samples + 1)
    xs = np.zeros(n_samples + 1)
    ps = np.zeros(n_samples + 1)
    energies = np.zeros(n_samples + 1)
    diverged = False
    t0 = schedule.t0
    for i in range(n_samples):
        _kernels.rk4_classical(
            state, t0 + i * steps * dt, dt, steps,
            params.lam, params.beta, params.epsilon,
            schedule.omega0, schedule.accel, schedule.t0, schedule.phi0,
        )
        x, p = float(state[0]), float(state[1])
        if not (math.isfinite(x) and math.isfinite(p)) or abs(x) > DIVERGENCE_BOUND:
            diverged = True
            xs, ps = xs[: i + 1], ps[: i + 1]
            energies, taus = energies[: i + 1], taus[: i + 1]
            break
        xs[i + 1] = x
        ps[i + 1] = p
        energies[i + 1] = _oscillator_energy(x, p, params)

    if diverged:
        smoothed = energies.copy()
        captured = False
    else:
        smoothed = smooth_values(energies, sample_interval, window)
        tail = max(1, round(1.0 / sample_interval))
        e_ar = tau_end / dims.P2
        captured = bool(smoothed[-tail:].mean() > 0.5 * e_ar)
    trace = ClassicalTrace(
        taus=taus, xs=xs, ps=ps, energies=energies, smoothed=smoothed,
        captured=captured, diverged=diverged,
    )
    return captured, trace


def classical_lambda_for(P2: float, tau_end: float | None = None,
                         lam_max: float = 0.0155, amp_coupling_max: float = 0.2) -> float:
    """Cubic coefficient keeping lam*amplitude small over the whole climb.

    The locked trajectory reaches amplitude ~sqrt(2*tau_end/P2); the cubic
    correction lam*a must stay small for the affine frequency model behind
    the capture criterion to hold.
    """
    if tau_end is None:
        tau_end = max(10.0, 3.0 * P2)
    a_max = math.sqrt(2.0 * tau_end / P2)
    return min(lam_max, amp_coupling_max / a_max)


def classical_threshold(
    P2: float,
    alpha: float = 1e-6,
    lam: float | None = None,
    tol: float = 0.02,
    n_phases: int = 8,
    tau_end: float | None = None,
    dt: float = 0.01,
) -> float:
    """Bisect P1_tilde to the point where half the drive-phase ensemble captures.

    A single trajectory from rest is phase-sensitive near threshold (the
    sudden drive turn-on leaves a free oscillation whose phase at the
    resonance crossing decides marginal captures), so the 50% point is
    taken over an ensemble of n_phases drive phase offsets, mirroring the
    phase-symmetric quantum ground state.  Valid deep in the classical
    regime (P2 <= 0.3).
    """
    if P2 > 0.3:
        raise ValueError(f"classical threshold is meaningful for P2 <= 0.3, got {P2}")
    if lam is None:
        lam = classical_lambda_for(P2, tau_end)
    if tau_end is None:
        tau_end = max(10.0, 3.0 * P2)

    def fraction(P1_tilde: float) -> float:
        base = realize_params(P1_tilde, P2, alpha, lam)
        captured = 0
        for k in range(n_phases):
            params = replace(base, phase_offset=2.0 * math.pi * k / n_phases)
            cap, _ = classical_capture(params, tau_end, dt=dt)
            captured += cap
        return captured / n_phases

    estimate = 0.82 / math.sqrt(P2)
    lo = 0.5 * estimate
    hi = None
    p = lo
    for _ in range(40):
        if fraction(p) >= 0.5:
            hi = p
            break
        lo = p
        p *= 1.3
    if hi is None:
        raise BracketError(f"no ensemble capture found up to P1_tilde = {p / 1.3:.3g}")
    if hi == 0.5 * estimate:
        raise BracketError("ensemble already captures at half the expected threshold")
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if fraction(mid) >= 0.5:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def write_trace_csv(path, trace: ClassicalTrace) -> None:
    """CSV columns: tau, x, p, energy, smoothed_energy."""
    with open(path, "w") as fh:
        fh.write("tau,x,p,energy,smoothed_energy\n")
        for i in range(len(trace.taus)):
            row = (trace.taus[i], trace.xs[i], trace.ps[i],
                   trace.energies[i], trace.smoothed[i])
            fh.write(",".join(format(float(v), ".17g") for v in row) + "\n")
