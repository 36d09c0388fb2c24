"""Command-line front end with deterministic file outputs.

Subcommands: simulate | wigner | threshold | isomorphism | classical.
Runs are described by an INI-style config file (sections [run],
[integrator], [wigner], [threshold], [classical]); any option can be
overridden on the command line with --override section.key=value.
Exit codes: 0 success, 2 config error, 3 numerical-guard failure.
"""
from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from dataclasses import dataclass, field, fields as dc_fields
from pathlib import Path

from .classical import (
    classical_capture,
    classical_threshold,
    write_trace_csv,
)
from .errors import BracketError, ConfigError, NumericalGuardError
from .model import PhysicalParams, ResonanceMode, dimensionless
from .observables import (
    capture_probability,
    ladder_step_times,
    series_from_trajectory,
    smooth,
    smooth_values,
    write_summary_json,
)
from .propagator import (
    IntegratorConfig,
    Picture,
    propagate,
    write_amplitudes_csv,
    write_trajectory_csv,
)
from .model import build_ladder
from .threshold import (
    isomorphism_check,
    theory_threshold,
    threshold_map,
    write_capture_curve_csv,
    write_threshold_csv,
)
from .wigner import PhaseSpaceGrid, default_grid, wigner_from_state, write_wigner_csv

__all__ = ["RunConfig", "parse_config", "serialize_config", "main"]


@dataclass
class RunConfig:
    """Everything a subcommand needs; round-trips losslessly through INI text."""

    # [run]
    mode: str = "subharmonic2"
    alpha: float = 1e-6
    beta: float = 0.016
    lam: float = 0.05
    epsilon: float = 0.18
    phase_offset: float = 0.0
    n_basis: int = 40
    tau_end: float = 25.0
    # [integrator]
    picture: str = "interaction"
    dt: float = 0.0  # 0 means automatic
    sample_interval: float = 0.01
    norm_drift_budget: float = 1e-6
    # [wigner]
    tau_snapshot: float = 25.0
    grid_half_width: float = 0.0  # 0 means automatic
    nx: int = 129
    np_: int = 129
    # [threshold]
    p2_list: tuple[float, ...] = (0.1, 0.3, 1.0, 3.0, 10.0)
    tol: float = 0.04
    threshold_lambda: float = 0.05
    # [classical]
    classical_tau_end: float = 10.0
    classical_dt: float = 0.01
    n_phases: int = 8
    classical_p2_list: tuple[float, ...] = ()

    def physical_params(self) -> PhysicalParams:
        try:
            mode = ResonanceMode(self.mode)
        except ValueError as exc:
            raise ConfigError(f"unknown resonance mode {self.mode!r}") from exc
        try:
            return PhysicalParams(
                alpha=self.alpha, beta=self.beta, lam=self.lam,
                epsilon=self.epsilon, mode=mode, phase_offset=self.phase_offset,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def integrator_config(self, snapshot_taus: tuple[float, ...] = ()) -> IntegratorConfig:
        try:
            picture = Picture(self.picture)
        except ValueError as exc:
            raise ConfigError(f"unknown picture {self.picture!r}") from exc
        return IntegratorConfig(
            tau_end=self.tau_end,
            dt=self.dt if self.dt > 0 else None,
            picture=picture,
            norm_drift_budget=self.norm_drift_budget,
            sample_interval=self.sample_interval,
            snapshot_taus=snapshot_taus,
        )


_SECTIONS = {
    "run": ("mode", "alpha", "beta", "lam", "epsilon", "phase_offset",
            "n_basis", "tau_end"),
    "integrator": ("picture", "dt", "sample_interval", "norm_drift_budget"),
    "wigner": ("tau_snapshot", "grid_half_width", "nx", "np_"),
    "threshold": ("p2_list", "tol", "threshold_lambda"),
    "classical": ("classical_tau_end", "classical_dt", "n_phases",
                  "classical_p2_list"),
}
_OPTION_NAMES = {"lam": "lambda", "np_": "np"}
_FIELD_TYPES = {f.name: f.type for f in dc_fields(RunConfig)}


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return " ".join(format(v, ".17g") for v in value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _parse_value(name: str, text: str):
    kind = _FIELD_TYPES[name]
    try:
        if kind == "float":
            return float(text)
        if kind == "int":
            return int(text)
        if kind == "tuple[float, ...]":
            return tuple(float(tok) for tok in text.replace(",", " ").split())
        return text
    except ValueError as exc:
        raise ConfigError(f"bad value {text!r} for option {name}") from exc


def serialize_config(config: RunConfig) -> str:
    lines = []
    for section, names in _SECTIONS.items():
        lines.append(f"[{section}]")
        for name in names:
            option = _OPTION_NAMES.get(name, name)
            lines.append(f"{option} = {_format_value(getattr(config, name))}")
        lines.append("")
    return "\n".join(lines)


def parse_config(text: str) -> RunConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    config = RunConfig()
    reverse = {v: k for k, v in _OPTION_NAMES.items()}
    for section in parser.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section [{section}]")
        for option, text_value in parser.items(section):
            name = reverse.get(option, option)
            if name not in _SECTIONS[section]:
                raise ConfigError(f"unknown option {option!r} in [{section}]")
            setattr(config, name, _parse_value(name, text_value))
    return config


def load_config(path: str | None, overrides: list[str]) -> RunConfig:
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        config = parse_config(text)
    else:
        config = RunConfig()
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        key, value = item.split("=", 1)
        section, option = key.split(".", 1)
        if section not in _SECTIONS:
            raise ConfigError(f"unknown config section {section!r} in override")
        reverse = {v: k for k, v in _OPTION_NAMES.items()}
        name = reverse.get(option, option)
        if name not in _SECTIONS[section]:
            raise ConfigError(f"unknown option {option!r} in [{section}]")
        setattr(config, name, _parse_value(name, value))
    return config


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_simulate(config: RunConfig, out: Path) -> None:
    params = config.physical_params()
    trajectory = propagate(params, config.n_basis, config.integrator_config())
    series = series_from_trajectory(trajectory)
    smoothed = smooth(series)
    dims = dimensionless(params)
    capture = capture_probability(trajectory.final_state, config.tau_end, dims.P2)
    ladder = build_ladder(params, config.n_basis)
    steps = ladder_step_times(smoothed, ladder)
    write_trajectory_csv(out / "trajectory.csv", trajectory, smoothed.energies)
    write_summary_json(out / "summary.json", params, config.tau_end, capture, steps)
    write_amplitudes_csv(out / "final_amplitudes.csv", trajectory.final_state)


def cmd_wigner(config: RunConfig, out: Path) -> None:
    params = config.physical_params()
    run_cfg = config.integrator_config(snapshot_taus=(config.tau_snapshot,))
    trajectory = propagate(params, config.n_basis, run_cfg)
    state = trajectory.snapshots[config.tau_snapshot]
    if config.grid_half_width > 0:
        half = config.grid_half_width
        grid = PhaseSpaceGrid(-half, half, -half, half, config.nx, config.np_)
    else:
        grid = default_grid(state, config.nx)
    fieldw = wigner_from_state(state, grid)
    write_wigner_csv(out / "wigner.csv", fieldw, out / "wigner_meta.json")


def cmd_threshold(config: RunConfig, out: Path, workers: int) -> None:
    if not config.p2_list:
        raise ConfigError("threshold needs a non-empty p2_list")
    results = threshold_map(config.p2_list, lam=config.threshold_lambda,
                            tol=config.tol, workers=workers)
    points = [r for r in results if not isinstance(r, Exception)]
    failures = {
        format(P2, ".17g"): str(r)
        for P2, r in zip(config.p2_list, results) if isinstance(r, Exception)
    }
    write_threshold_csv(out / "threshold_map.csv", points)
    for point in points:
        write_capture_curve_csv(
            out / f"capture_curve_P2_{format(point.P2, 'g')}.csv", point)
    if failures:
        with open(out / "threshold_errors.json", "w") as fh:
            json.dump(failures, fh, indent=2, sort_keys=True)
            fh.write("\n")


def cmd_isomorphism(config: RunConfig, out: Path) -> None:
    params = config.physical_params()
    if params.mode is not ResonanceMode.SUBHARMONIC2:
        raise ConfigError("isomorphism needs mode = subharmonic2")
    result = isomorphism_check(params, config.n_basis, config.tau_end,
                               config.sample_interval)
    dims = dimensionless(params)
    doc = {
        "P1_tilde": dims.P1_tilde,
        "P2": dims.P2,
        "capture_subharmonic": result.capture_subharmonic,
        "capture_effective": result.capture_effective,
        "delta": result.delta,
    }
    with open(out / "isomorphism.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_classical(config: RunConfig, out: Path) -> None:
    params = config.physical_params()
    captured, trace = classical_capture(
        params, config.classical_tau_end, dt=config.classical_dt)
    write_trace_csv(out / "classical_trace.csv", trace)
    doc = {"captured": captured, "diverged": trace.diverged}
    with open(out / "classical_summary.json", "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    if config.classical_p2_list:
        rows = []
        for P2 in config.classical_p2_list:
            cr = classical_threshold(P2, n_phases=config.n_phases,
                                     dt=config.classical_dt)
            rows.append((P2, cr))
        with open(out / "classical_thresholds.csv", "w") as fh:
            fh.write("P2,P1_tilde_cr,theory_classical\n")
            for P2, cr in rows:
                fh.write(f"{format(P2, '.17g')},{format(cr, '.17g')},"
                         f"{format(0.82 / math.sqrt(P2), '.17g')}\n")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="chirpclimb",
        description="Chirped-drive nonlinear oscillator simulator",
    )
    parser.add_argument("--config", help="path to an INI run configuration")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--override", action="append", default=[],
                        metavar="SECTION.KEY=VALUE",
                        help="override a config option (repeatable)")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads for parameter sweeps")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("simulate", "wigner", "threshold", "isomorphism", "classical"):
        sub.add_parser(name)
    args = parser.parse_args(argv)

    try:
        config = load_config(args.config, args.override)
        out = _out_dir(args)
        if args.command == "simulate":
            cmd_simulate(config, out)
        elif args.command == "wigner":
            cmd_wigner(config, out)
        elif args.command == "threshold":
            cmd_threshold(config, out, args.threads)
        elif args.command == "isomorphism":
            cmd_isomorphism(config, out)
        elif args.command == "classical":
            cmd_classical(config, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (NumericalGuardError, BracketError) as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
