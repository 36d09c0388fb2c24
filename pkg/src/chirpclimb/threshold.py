"""Phase-locking threshold mapping in the (P1_tilde, P2) plane.

Targets in the dimensionless plane are realized as physical parameter
sets, propagated, and reduced to a capture probability; bisection on the
rescaled drive P1_tilde locates the 50%-capture threshold for each P2.
The two asymptotic theory lines are 0.82/sqrt(P2) (classical) and the
constant 0.79 (quantum), separated near P2 = P1_tilde + 1.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Callable, NamedTuple, Sequence

from .errors import BracketError
from .model import (
    PhysicalParams,
    ResonanceMode,
    dimensionless,
    effective_twin,
)
from .observables import capture_probability
from .propagator import IntegratorConfig, Picture, propagate

__all__ = [
    "Regime",
    "ThresholdPoint",
    "TheoryLines",
    "IsomorphismResult",
    "realize_params",
    "column_alpha",
    "basis_size_for",
    "capture_at",
    "bisect_threshold",
    "theory_threshold",
    "isomorphism_check",
    "threshold_map",
    "write_threshold_csv",
    "write_capture_curve_csv",
]

CLASSICAL_THRESHOLD_COEFF = 0.82  # classical line 0.82/sqrt(P2)
QUANTUM_THRESHOLD = 0.79          # quantum plateau

# Realization guard rails: keep the realized parameters in the
# weak-nonlinearity domain where the truncated model is trustworthy.
GAMMA_TARGET = 0.005   # cap on the realized anharmonicity
EPSILON_TARGET = 0.45  # cap on the realized drive at the expected threshold
ALPHA_MAX = 1e-4


class Regime(str, Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"


class TheoryLines(NamedTuple):
    classical_line: float
    quantum_line: float
    regime: Regime


@dataclass
class ThresholdPoint:
    P2: float
    P1_tilde_cr: float
    capture_curve: list[tuple[float, float]]
    regime: Regime
    alpha: float
    lam: float


@dataclass
class IsomorphismResult:
    capture_subharmonic: float
    capture_effective: float

    @property
    def delta(self) -> float:
        return self.capture_effective - self.capture_subharmonic


def realize_params(
    P1_tilde: float,
    P2: float,
    alpha: float,
    lam: float,
    mode: ResonanceMode = ResonanceMode.SUBHARMONIC2,
) -> PhysicalParams:
    """Invert the dimensionless definitions to a physical parameter set.

    beta = (8/3)*(gamma + (5/12)*lam^2) with gamma = P2*sqrt(alpha)/2, and
    epsilon = sqrt(P1_tilde*sqrt(2*alpha)*9/(8*lam)), so that
    dimensionless(result) reproduces the targets to machine precision.
    """
    if alpha <= 0 or lam <= 0:
        raise ValueError("alpha and lam must be positive")
    if P1_tilde < 0 or P2 <= 0:
        raise ValueError("targets must be positive (P1_tilde may be 0)")
    gamma = 0.5 * P2 * math.sqrt(alpha)
    beta = (8.0 / 3.0) * (gamma + (5.0 / 12.0) * lam * lam)
    epsilon = math.sqrt(P1_tilde * math.sqrt(2.0 * alpha) * 9.0 / (8.0 * lam))
    if epsilon * lam >= 1.0 or abs(beta) >= 1.0:
        raise ValueError(
            f"realized parameters leave the weak-nonlinearity domain "
            f"(epsilon*lam = {epsilon * lam:.3g}, beta = {beta:.3g})"
        )
    return PhysicalParams(alpha=alpha, beta=beta, lam=lam, epsilon=epsilon, mode=mode)


def _expected_threshold(P2: float) -> float:
    return max(QUANTUM_THRESHOLD, CLASSICAL_THRESHOLD_COEFF / math.sqrt(P2))


def column_alpha(P2: float, lam: float = 0.05) -> float:
    """Chirp rate for a threshold column at this P2.

    Chosen so the realized gamma stays at or below GAMMA_TARGET and the
    realized drive at ~1.3x the expected threshold stays below
    EPSILON_TARGET; otherwise the perturbative spectrum and coupling
    corrections grow large enough to displace the measured threshold.
    """
    alpha_gamma = (2.0 * GAMMA_TARGET / P2) ** 2
    sq2a = EPSILON_TARGET ** 2 * 8.0 * lam / (9.0 * 1.3 * _expected_threshold(P2))
    alpha_eps = 0.5 * sq2a ** 2
    return min(ALPHA_MAX, alpha_gamma, alpha_eps)


def default_tau_end(P2: float) -> float:
    """At least 3 ladder rungs (quantum) or the full locking transient."""
    return max(10.0, 3.0 * P2)


def basis_size_for(P2: float, tau_end: float) -> int:
    """Enough levels to hold the locked packet at tau_end, with headroom."""
    n_ideal = tau_end / P2
    return max(24, math.ceil(1.7 * n_ideal) + 30)


def capture_at(
    P1_tilde: float,
    P2: float,
    alpha: float,
    lam: float,
    tau_end: float | None = None,
    n_basis: int | None = None,
    sample_interval: float = 0.05,
) -> float:
    """Capture probability of the realized subharmonic run at tau_end."""
    if tau_end is None:
        tau_end = default_tau_end(P2)
    if n_basis is None:
        n_basis = basis_size_for(P2, tau_end)
    params = realize_params(P1_tilde, P2, alpha, lam)
    config = IntegratorConfig(
        tau_end=tau_end,
        picture=Picture.INTERACTION,
        sample_interval=sample_interval,
    )
    trajectory = propagate(params, n_basis, config)
    return capture_probability(trajectory.final_state, tau_end, P2)


def bisect_threshold(
    P2: float,
    alpha: float | None = None,
    lam: float = 0.05,
    tol: float = 0.04,
    tau_end: float | None = None,
    n_basis: int | None = None,
    prescan_factor: float = 1.5,
    prescan_start: float | None = None,
    capture_fn: Callable[[float], float] | None = None,
) -> ThresholdPoint:
    """Bisect P1_tilde to the 50%-capture point at fixed P2.

    A geometric pre-scan (factor `prescan_factor`) walks up from
    `prescan_start` until capture reaches 0.5, giving the bracket; plain
    bisection then narrows it below `tol` (relative).  `capture_fn`
    replaces the propagation-backed evaluator (used for synthetic tests).
    Raises BracketError when no capture is found or the final bracket is
    inconsistent (retry with a finer pre-scan).
    """
    if alpha is None:
        alpha = column_alpha(P2, lam)
    if tau_end is None:
        tau_end = default_tau_end(P2)
    if capture_fn is None:
        def capture_fn(p1t: float) -> float:
            return capture_at(p1t, P2, alpha, lam, tau_end, n_basis)
    curve: list[tuple[float, float]] = []

    def evaluate(p1t: float) -> float:
        cap = capture_fn(p1t)
        curve.append((p1t, cap))
        return cap

    start = prescan_start if prescan_start is not None else 0.45 * _expected_threshold(P2)
    lo = None
    hi = None
    p = start
    for _ in range(60):
        cap = evaluate(p)
        if cap >= 0.5:
            hi = p
            break
        lo = p
        p *= prescan_factor
    if hi is None:
        raise BracketError(f"no capture >= 0.5 found up to P1_tilde = {p / prescan_factor:.3g}")
    if lo is None:
        lo = hi / prescan_factor
        if evaluate(lo) >= 0.5:
            raise BracketError(
                "pre-scan start already captures; lower prescan_start or refine"
            )
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if evaluate(mid) >= 0.5:
            hi = mid
        else:
            lo = mid
    cross = 0.5 * (lo + hi)
    regime = Regime.QUANTUM if P2 > cross + 1.0 else Regime.CLASSICAL
    curve.sort()
    return ThresholdPoint(
        P2=P2,
        P1_tilde_cr=cross,
        capture_curve=curve,
        regime=regime,
        alpha=alpha,
        lam=lam,
    )


def theory_threshold(P2: float) -> TheoryLines:
    """Both asymptotic threshold lines and the regime the separator assigns.

    The separator P2 = P1_tilde + 1, evaluated on the quantum plateau,
    puts P2 > 1.79 in the quantum ladder-climbing regime.
    """
    if P2 <= 0:
        raise ValueError("P2 must be positive")
    classical_line = CLASSICAL_THRESHOLD_COEFF / math.sqrt(P2)
    regime = Regime.QUANTUM if P2 > QUANTUM_THRESHOLD + 1.0 else Regime.CLASSICAL
    return TheoryLines(classical_line=classical_line, quantum_line=QUANTUM_THRESHOLD, regime=regime)


def isomorphism_check(
    params: PhysicalParams,
    n_basis: int,
    tau_end: float,
    sample_interval: float = 0.01,
    rule=None,
) -> IsomorphismResult:
    """Capture of a subharmonic run and of its rescaled-fundamental twin.

    The twin keeps the chirp through the fundamental resonance but drives
    with (8/9)*epsilon^2*lam; the two-photon isomorphism predicts similar
    capture probabilities.
    """
    if params.mode is not ResonanceMode.SUBHARMONIC2:
        raise ValueError("isomorphism_check expects subharmonic parameters")
    P2 = dimensionless(params).P2
    config = IntegratorConfig(tau_end=tau_end, sample_interval=sample_interval)
    captures = []
    for p in (params, effective_twin(params)):
        trajectory = propagate(p, n_basis, config)
        captures.append(capture_probability(trajectory.final_state, tau_end, P2, rule))
    return IsomorphismResult(capture_subharmonic=captures[0], capture_effective=captures[1])


def threshold_map(
    P2_values: Sequence[float],
    lam: float = 0.05,
    tol: float = 0.04,
    workers: int = 1,
) -> list[ThresholdPoint | Exception]:
    """Bisect every P2 column; failures are returned in place, not raised.

    Columns run on a thread pool (the stepping kernels release the GIL);
    results come back in input order regardless of scheduling.
    """
    def run_one(P2: float):
        try:
            return bisect_threshold(P2, lam=lam, tol=tol)
        except Exception as exc:  # recorded per point, sweep continues
            return exc

    if workers <= 1:
        return [run_one(P2) for P2 in P2_values]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_one, P2_values))


def write_threshold_csv(path, results: Sequence[ThresholdPoint]) -> None:
    """CSV columns: P2, P1_tilde_cr, theory_classical, theory_quantum, regime."""
    with open(path, "w") as fh:
        fh.write("P2,P1_tilde_cr,theory_classical,theory_quantum,regime\n")
        for point in results:
            lines = theory_threshold(point.P2)
            fh.write(
                f"{format(point.P2, '.17g')},{format(point.P1_tilde_cr, '.17g')},"
                f"{format(lines.classical_line, '.17g')},"
                f"{format(lines.quantum_line, '.17g')},{point.regime.value}\n"
            )


def write_capture_curve_csv(path, point: ThresholdPoint) -> None:
    """The (P1_tilde, capture) pairs evaluated while bisecting one column."""
    with open(path, "w") as fh:
        fh.write("P1_tilde,capture\n")
        for p1t, cap in point.capture_curve:
            fh.write(f"{format(p1t, '.17g')},{format(cap, '.17g')}\n")
