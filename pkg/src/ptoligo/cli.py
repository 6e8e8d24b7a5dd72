"""Command line surface: sweep, spectrum, evolve, critical, validate.

Usage:
    ptoligo <subcommand> config.json [--out DIR] [--seed N] [--format F]

The config file carries the full run description; the flags override its
output directory, seed, and emitted formats.  All outputs are deterministic
for a fixed (config, seed) pair.  Exit codes: 0 success, 2 config error,
3 numerical or regime failure.  Any failure prints a one-line JSON error
object and removes files written by the failed run.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import tables
from .branches import (
    dimer_asymmetric,
    dimer_special_symmetric,
    dimer_symmetric,
    trimer_asymmetric,
    trimer_special_symmetric,
    trimer_symmetric,
    all_solutions,
)
from .config import CASE_ALL, COMMANDS, RunConfig, load_config
from .continuation import (
    BranchCurve,
    analytic_critical_points,
    detect_events,
    sweep_all,
    sweep_case,
)
from .dynamics import IntegrationControls, classify_outcome, integrate, perturb
from .errors import InvalidRegimeError, PtoligoError, SchemaError
from .linearize import classify_stability, spectrum_of
from .model import Params, StationarySolution
from .selfcheck import run_checks

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _sign_part(sign: str) -> str:
    return {"+": "plus", "-": "minus"}.get(sign, sign.replace("#", "root"))


def branch_filename(branch_id: str) -> str:
    topology, case, sign = branch_id.split("/")
    return f"{topology}_{case}_{_sign_part(sign)}.csv"


def _phase_columns(sol: StationarySolution) -> list[float]:
    # phases relative to site b, so the gauge choice never shows up
    phases = sol.phases
    if sol.topology == "dimer":
        return [phases[0] - phases[1]]
    return [phases[0] - phases[1], phases[2] - phases[1]]


def _sweep_header(topology: str) -> list[str]:
    n = 2 if topology == "dimer" else 3
    cols = ["gamma", "A", "B"] + (["C"] if n == 3 else [])
    cols += ["phi_a"] + (["phi_c"] if n == 3 else [])
    cols += ["E", "max_Re_lambda", "stable"]
    for k in range(2 * n):
        cols += [f"lambda{k}_re", f"lambda{k}_im"]
    return cols


def _branch_rows(curve: BranchCurve, stability_tol: float) -> list[list]:
    rows = []
    for pt in curve.points:
        sol = pt.solution
        report = classify_stability(pt.spectrum, stability_tol)
        row: list = [pt.gamma, *sol.amplitudes, *_phase_columns(sol), sol.E]
        row += [report.max_growth_rate, report.stable]
        for ev in pt.spectrum.eigenvalues:
            row += [ev.real, ev.imag]
        rows.append(row)
    return rows


def _write(out_dir: Path, name: str, text: str, written: list[Path]) -> None:
    path = out_dir / name
    path.write_text(text, encoding="utf-8", newline="")
    written.append(path)


def _run_sweep(config: RunConfig, out_dir: Path, written: list[Path]) -> None:
    params = config.params
    if config.case == CASE_ALL:
        curves = sweep_all(params, config.gamma_range, config.numerics.step)
    else:
        curves = sweep_case(
            params, config.case, config.gamma_range, config.numerics.step
        )
    tol = config.numerics.stability_tol
    if config.output.wants_csv:
        header = _sweep_header(params.topology)
        for curve in curves:
            text = tables.emit_csv(header, _branch_rows(curve, tol))
            _write(out_dir, branch_filename(curve.branch_id), text, written)
    if config.output.wants_json:
        events = detect_events(curves, tol)
        payload = {
            "gamma_range": list(config.gamma_range),
            "step": config.numerics.step,
            "branches": [c.branch_id for c in curves],
            "events": [
                {
                    "kind": e.kind,
                    "gamma_located": e.gamma_located,
                    "refinement_width": e.refinement_width,
                    "participants": list(e.participants),
                }
                for e in events
            ],
        }
        _write(out_dir, "events.json", tables.emit_json(payload), written)


_DIMER_CTORS = {
    "sym-I": dimer_symmetric,
    "asym-II": dimer_asymmetric,
    "special-III": dimer_special_symmetric,
}
_TRIMER_ENUMS = {
    "sym-I": trimer_symmetric,
    "asym-II": trimer_asymmetric,
    "special-III": trimer_special_symmetric,
}


def select_solution(params: Params, case: str, sign: str | None) -> StationarySolution:
    """One stationary state by case and root tag at the configured gamma."""
    if params.topology == "dimer":
        sol = _DIMER_CTORS[case](params, sign or "+")
        if sol is None:
            raise InvalidRegimeError(
                f"{params.topology}/{case}/{sign or '+'} does not exist "
                f"at gamma={params.gamma}"
            )
        return sol
    sols = _TRIMER_ENUMS[case](params)
    want = sign or "#0"
    for sol in sols:
        if sol.sign_choice == want:
            return sol
    raise InvalidRegimeError(
        f"no root tagged {want!r} among {len(sols)} {case} trimer states "
        f"at gamma={params.gamma}"
    )


def _solution_payload(sol: StationarySolution) -> dict:
    return {
        "topology": sol.topology,
        "case": sol.case_label,
        "sign": sol.sign_choice,
        "amplitudes": list(sol.amplitudes),
        "phases": list(sol.phases),
        "E": sol.E,
    }


def _run_spectrum(config: RunConfig, out_dir: Path, written: list[Path]) -> None:
    params = config.params
    sol = select_solution(params, config.case, config.sign)
    spectrum = spectrum_of(sol, params)
    report = classify_stability(spectrum, config.numerics.stability_tol)
    if config.output.wants_json:
        payload = {
            "solution": _solution_payload(sol),
            "eigenvalues": [[ev.real, ev.imag] for ev in spectrum.eigenvalues],
            "residuals": list(spectrum.residuals),
            "max_growth_rate": report.max_growth_rate,
            "stable": report.stable,
            "instability_type": report.instability_type,
        }
        _write(out_dir, "spectrum.json", tables.emit_json(payload), written)
    if config.output.wants_csv:
        header = ["lambda_re", "lambda_im", "residual"]
        rows = [
            [ev.real, ev.imag, res]
            for ev, res in zip(spectrum.eigenvalues, spectrum.residuals)
        ]
        _write(out_dir, "spectrum.csv", tables.emit_csv(header, rows), written)


def _run_evolve(config: RunConfig, out_dir: Path, written: list[Path]) -> None:
    params = config.params
    numerics = config.numerics
    sol = select_solution(params, config.case, config.sign)
    state = perturb(sol, numerics.perturbation, numerics.seed)
    controls = IntegrationControls(
        rel_tol=numerics.rel_tol,
        abs_tol=numerics.abs_tol,
        blow_up_threshold=numerics.blow_up_threshold,
        output_dt=numerics.output_dt,
    )
    traj = integrate(state, params, numerics.t_end, controls)
    outcome = classify_outcome(traj, all_solutions(params))
    if config.output.wants_csv:
        n = params.n_sites
        header = ["t"]
        for k in range(n):
            header += [f"site{k}_re", f"site{k}_im", f"site{k}_power"]
        rows = []
        for i, t in enumerate(traj.times):
            z = traj.states[i].sites
            row: list = [t]
            for k in range(n):
                row += [z[k].real, z[k].imag, traj.site_powers[i, k]]
            rows.append(row)
        _write(out_dir, "trajectory.csv", tables.emit_csv(header, rows), written)
    if config.output.wants_json:
        payload = {
            "initial": _solution_payload(sol),
            "perturbation": numerics.perturbation,
            "seed": numerics.seed,
            "t_end": numerics.t_end,
            "outcome": {
                "kind": outcome.kind,
                "target_id": outcome.target_id,
                "deviation_metric": outcome.deviation_metric,
            },
            "blow_up_time": traj.blow_up_time,
        }
        _write(out_dir, "outcome.json", tables.emit_json(payload), written)


def _run_critical(config: RunConfig, out_dir: Path, written: list[Path]) -> None:
    points = analytic_critical_points(config.params)
    _write(out_dir, "critical.json", tables.emit_json(points), written)


def _run_validate(config: RunConfig, out_dir: Path, written: list[Path]) -> int:
    results = run_checks()
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
    payload = {
        "checks": [
            {"name": r.name, "passed": r.passed, "detail": r.detail}
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    _write(out_dir, "validate.json", tables.emit_json(payload), written)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERICAL


def run(config: RunConfig) -> int:
    """Execute one validated configuration; returns the process exit code."""
    out_dir = Path(config.output.directory)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        if config.command == "sweep":
            _run_sweep(config, out_dir, written)
        elif config.command == "spectrum":
            _run_spectrum(config, out_dir, written)
        elif config.command == "evolve":
            _run_evolve(config, out_dir, written)
        elif config.command == "critical":
            _run_critical(config, out_dir, written)
        else:
            return _run_validate(config, out_dir, written)
    except PtoligoError as exc:
        for path in written:
            path.unlink(missing_ok=True)
        _print_error(exc)
        return EXIT_CONFIG if isinstance(exc, SchemaError) else EXIT_NUMERICAL
    return EXIT_OK


def _print_error(exc: Exception) -> None:
    print(
        json.dumps(
            {"error": {"type": type(exc).__name__, "message": str(exc)}},
            sort_keys=True,
        )
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ptoligo",
        description="stationary states, spectra, sweeps, and dynamics "
        "of gain/loss coupled oscillator chains",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} command from a config")
        p.add_argument("config", help="path to the JSON run configuration")
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument("--seed", type=int, help="RNG seed (overrides config)")
        p.add_argument(
            "--format",
            choices=("csv", "json", "both"),
            help="emitted formats (overrides config)",
        )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config, default_command=args.subcommand)
        if config.command != args.subcommand:
            raise SchemaError(
                f"config says command {config.command!r} but the CLI invoked "
                f"{args.subcommand!r}"
            )
        if args.out is not None:
            config = config.with_output(directory=args.out)
        if args.format is not None:
            formats = ("csv", "json") if args.format == "both" else (args.format,)
            config = config.with_output(formats=formats)
        if args.seed is not None:
            config = config.with_seed(args.seed)
    except PtoligoError as exc:
        _print_error(exc)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
