"""Trajectory diagnostics: smoothed energy, capture probability, step times."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .model import EnergyLadder, PhysicalParams, dimensionless
from .propagator import StateVector, Trajectory

__all__ = [
    "TrajectorySeries",
    "series_from_trajectory",
    "smooth",
    "smooth_values",
    "default_capture_cutoff",
    "capture_probability",
    "ladder_step_times",
    "write_summary_json",
]


@dataclass(frozen=True)
class TrajectorySeries:
    """Slow-time samples of mean energy and per-level populations."""

    taus: np.ndarray
    energies: np.ndarray
    populations: np.ndarray

    def __post_init__(self):
        if not np.all(np.diff(self.taus) > 0):
            raise ValueError("taus must be strictly increasing")
        sums = self.populations.sum(axis=1)
        if np.abs(sums - 1.0).max() > 1e-6:
            raise ValueError("population rows must each sum to 1 within 1e-6")

    @property
    def sample_interval(self) -> float:
        return float(self.taus[1] - self.taus[0])


def series_from_trajectory(trajectory: Trajectory) -> TrajectorySeries:
    return TrajectorySeries(
        taus=trajectory.taus,
        energies=trajectory.energies,
        populations=trajectory.populations,
    )


def smooth_values(values: np.ndarray, sample_interval: float, window: float = 0.1) -> np.ndarray:
    """Centered boxcar average of width `window`; endpoints shrink one-sidedly."""
    if window < 2 * sample_interval:
        raise ValueError(
            f"window {window} must be at least twice the sample interval {sample_interval}"
        )
    half = round(window / (2 * sample_interval))
    n = len(values)
    csum = np.concatenate(([0.0], np.cumsum(values)))
    out = np.empty(n)
    for i in range(n):
        lo = max(0, i - half)
        hi = min(n, i + half + 1)
        out[i] = (csum[hi] - csum[lo]) / (hi - lo)
    return out


def smooth(series: TrajectorySeries, window: float = 0.1) -> TrajectorySeries:
    """Series with the energy track boxcar-averaged over `window` of slow time."""
    smoothed = smooth_values(series.energies, series.sample_interval, window)
    return replace(series, energies=smoothed)


def default_capture_cutoff(tau_f: float, P2: float) -> int:
    """Half the ideal ladder level at tau_f, but at least 1.

    The ideal phase-locked ladder sits at level n = tau_f/P2; population at
    or above half that level is counted as captured.  The rule is
    insensitive to +-1 shifts at the parameter sets of interest.
    """
    n_ideal = tau_f / P2
    return max(1, math.ceil(0.5 * n_ideal))


def capture_probability(
    final_state: StateVector,
    tau_f: float,
    P2: float,
    rule: int | Callable[[float, float], int] | None = None,
) -> float:
    """Total population at or above the capture cutoff level.

    `rule` may be an explicit cutoff level, a callable (tau_f, P2) -> level,
    or None for the default half-ideal-level rule.
    """
    if tau_f <= 0:
        raise ValueError(f"tau_f must be positive, got {tau_f}")
    if rule is None:
        n_cut = default_capture_cutoff(tau_f, P2)
    elif callable(rule):
        n_cut = int(rule(tau_f, P2))
    else:
        n_cut = int(rule)
    n_basis = final_state.n_basis
    if n_cut >= n_basis:
        raise ValueError(
            f"capture cutoff level {n_cut} >= basis size {n_basis}: "
            "basis too small for the requested tau_f"
        )
    return float(final_state.populations()[n_cut:].sum())


def _last_upward_crossing(s, taus, level, i_lo, i_hi):
    """Interpolated time of the final upward crossing of `level` in [i_lo, i_hi)."""
    seg = s[i_lo:i_hi]
    above = seg > level
    if not above[-1]:
        return None
    below = np.nonzero(~above)[0]
    if len(below) == 0:
        return None
    i = below[-1]
    if i + 1 >= len(seg):
        return None
    frac = (level - seg[i]) / (seg[i + 1] - seg[i])
    j = i_lo + i
    return float(taus[j] + frac * (taus[j + 1] - taus[j]))


def ladder_step_times(
    smoothed: TrajectorySeries,
    ladder: EnergyLadder,
    min_gap: float = 1.0,
) -> list[float]:
    """Mid-riser crossing times of the smoothed energy staircase.

    Risers are first located by upward crossings of the level midpoints
    (E_n + E_{n+1})/2; the final upward crossing is kept per midpoint so
    residual Rabi ripple cannot split a riser.  Each crossing is then
    refined against the midpoint of the plateaus the smoothed energy
    actually attains on either side: when part of the population stays
    behind, the mean energy plateaus below the bare levels and the raw
    level-midpoint crossing lands high on the riser instead of at its
    middle.  For a fully captured ladder the two midpoints coincide.

    If any two consecutive risers are closer than `min_gap` of slow time,
    or the trailing plateau is shorter than `min_gap`, the series is not a
    staircase (smooth classical growth does this) and [] is returned.
    """
    s = smoothed.energies
    taus = smoothed.taus
    lo, hi = float(s.min()), float(s.max())
    n_pts = len(s)
    coarse: list[float] = []
    for n in range(ladder.n_levels - 1):
        mid = 0.5 * float(ladder.levels[n] + ladder.levels[n + 1])
        if mid <= lo or mid > hi:
            break
        t = _last_upward_crossing(s, taus, mid, 0, n_pts)
        if t is None:
            break
        coarse.append(t)
    if not coarse:
        return []
    gaps = np.diff(coarse)
    trailing = float(taus[-1]) - coarse[-1]
    if (len(gaps) and gaps.min() < min_gap) or trailing < min_gap:
        return []

    # plateau-referenced refinement
    bounds = [float(taus[0])] + coarse + [float(taus[-1])]
    dtau = smoothed.sample_interval

    def plateau(t_a: float, t_b: float) -> float:
        qa = t_a + 0.25 * (t_b - t_a)
        qb = t_b - 0.25 * (t_b - t_a)
        mask = (taus >= qa) & (taus <= qb)
        return float(np.median(s[mask])) if mask.any() else float("nan")

    times: list[float] = []
    for i, t_coarse in enumerate(coarse):
        before = plateau(bounds[i], t_coarse)
        after = plateau(t_coarse, bounds[i + 2])
        target = 0.5 * (before + after)
        if not math.isfinite(target):
            times.append(t_coarse)
            continue
        i_lo = max(0, int((bounds[i] - taus[0]) / dtau))
        i_hi = min(n_pts, int((bounds[i + 2] - taus[0]) / dtau) + 1)
        t_ref = _last_upward_crossing(s, taus, target, i_lo, i_hi)
        times.append(t_ref if t_ref is not None else t_coarse)
    return times


def write_summary_json(
    path,
    params: PhysicalParams,
    tau_f: float,
    capture: float,
    step_times: list[float],
) -> None:
    """Run summary: parameters, dimensionless group, capture, step times."""
    dims = dimensionless(params)
    doc = {
        "params": {
            "alpha": params.alpha,
            "beta": params.beta,
            "lambda": params.lam,
            "epsilon": params.epsilon,
            "mode": params.mode.value,
            "phase_offset": params.phase_offset,
        },
        "P1": dims.P1,
        "P2": dims.P2,
        "P1_tilde": dims.P1_tilde,
        "tau_f": tau_f,
        "capture_probability": capture,
        "step_times": step_times,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
