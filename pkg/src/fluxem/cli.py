"""Command-line entry point: ``fluxem {effective,run,compare,sweep,validate}``.

Exit codes: 0 success, 1 validation error, 2 integration divergence,
3 invariant-suite failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from itertools import product
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .analysis import (
    compare_full_vs_effective,
    coupling_margins,
    coupling_regime,
    full_observables,
    mode_observables,
    run_transfer,
    transfer_result,
)
from .checks import run_suite
from .errors import FluxEMError, IntegrationDiverged
from .model import (
    SystemParams,
    adiabaticity_report,
    build_effective_model,
    build_model,
    effective_params,
)
from .operators import basis_density
from .solver import IntegratorConfig, integrate

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_DIVERGED = 2
EXIT_INVARIANT = 3

RUN_COLUMNS_TAIL = ("trace_dev", "min_eig")
COMPARE_COLUMNS = ("t_us", "n_a_full", "n_b_full", "n_a_eff", "n_b_eff")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def csv_line(values) -> str:
    return ",".join(v if isinstance(v, str) else fmt(v) for v in values) + "\n"


@contextmanager
def _sink(path):
    if path is None:
        yield sys.stdout
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as fh:
            yield fh


def _out_path(args, scenario, key="csv"):
    return args.out if args.out is not None else scenario.outputs.get(key)


def cmd_effective(scenario: cfgmod.ScenarioConfig, out=None) -> int:
    p = scenario.params
    eff = effective_params(p)
    report = adiabaticity_report(p)
    margins = coupling_margins(p, eff.lambda_eff)
    regime = coupling_regime(margins)
    lines = [
        f"lambda      = {eff.lambda_eff:.12g} MHz",
        f"lambda1     = {eff.lambda1:.12g} MHz (electric-mode Stark shift)",
        f"lambda2     = {eff.lambda2:.12g} MHz (mechanical-mode Stark shift)",
        f"swap_time   = {eff.swap_time:.12g} us",
        "adiabaticity (threshold {:.3g}):".format(report.threshold),
        f"  g1/delta1              = {report.ratio_g1:.6g}  {_verdict(report.verdicts['ratio_g1'])}",
        f"  g2/delta2              = {report.ratio_g2:.6g}  {_verdict(report.verdicts['ratio_g2'])}",
        f"  Omega^2/(delta1 delta2) = {report.ratio_drive:.6g}  {_verdict(report.verdicts['ratio_drive'])}",
        f"  resonance residual     = {report.resonance_residual:.6g} MHz  {_verdict(report.verdicts['resonance'])}",
        "coupling margins:",
    ]
    for name, value in margins.items():
        flag = "" if value >= 2 else ("  marginal" if value >= 1 else "  weak")
        lines.append(f"  lambda/{name:<8} = {value:.12g}{flag}")
    lines.append(f"regime: {regime}")
    print("\n".join(lines))
    if out is not None:
        payload = {
            "effective": dataclasses.asdict(eff),
            "adiabaticity": dataclasses.asdict(report),
            "margins": margins,
            "regime": regime,
        }
        Path(out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def _verdict(ok: bool) -> str:
    return "pass" if ok else "FAIL"


def _observables(scenario):
    if scenario.model == "effective":
        reg = mode_observables(scenario.params)
    else:
        reg = full_observables(scenario.params)
    return {name: reg[name] for name in scenario.observables}


def _write_run_csv(fh, scenario, traj):
    names = list(scenario.observables)
    fh.write(csv_line(["t_us", *names, *RUN_COLUMNS_TAIL]))
    for i, t in enumerate(traj.times):
        row = [t, *(traj.observables[n][i] for n in names), traj.trace_dev[i], traj.min_eig[i]]
        fh.write(csv_line(row))


def cmd_run(scenario: cfgmod.ScenarioConfig, out=None) -> int:
    p = scenario.params
    if scenario.model == "effective":
        model = build_effective_model(p)
        rho0 = basis_density(model.space, scenario.initial_state[1:])
    else:
        model = build_model(p)
        rho0 = basis_density(p.space, scenario.initial_state)
    try:
        traj = integrate(model, rho0, scenario.integrator, _observables(scenario))
    except IntegrationDiverged as exc:
        with _sink(out) as fh:
            _write_run_csv(fh, scenario, exc.trajectory)
            fh.write(f"# diagnostics: integration diverged at t_us={fmt(exc.time)}: {exc}\n")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    with _sink(out) as fh:
        _write_run_csv(fh, scenario, traj)
    summary_stream = sys.stderr if out is None else sys.stdout
    if {"n_b", "P1", "P2"} <= set(traj.observables):
        print(transfer_result(traj).summary(), file=summary_stream)
    return EXIT_OK


def cmd_compare(scenario: cfgmod.ScenarioConfig, out=None, include_stark=False) -> int:
    p, icfg = scenario.params, scenario.integrator
    try:
        base = compare_full_vs_effective(p, icfg, include_stark=False)
        stark = compare_full_vs_effective(p, icfg, include_stark=True) if include_stark else None
    except IntegrationDiverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    columns = list(COMPARE_COLUMNS)
    if stark is not None:
        columns += ["n_a_eff_stark", "n_b_eff_stark"]
    with _sink(out) as fh:
        fh.write(csv_line(columns))
        for i, t in enumerate(base.times):
            row = [t, base.n_a_full[i], base.n_b_full[i], base.n_a_eff[i], base.n_b_eff[i]]
            if stark is not None:
                row += [stark.n_a_eff[i], stark.n_b_eff[i]]
            fh.write(csv_line(row))
    stream = sys.stderr if out is None else sys.stdout
    print(f"max_dev n_a={base.max_dev_na:.6g} n_b={base.max_dev_nb:.6g} (stark off)", file=stream)
    if stark is not None:
        print(f"max_dev n_a={stark.max_dev_na:.6g} n_b={stark.max_dev_nb:.6g} (stark on)", file=stream)
    return EXIT_OK


def parse_grid(text: str) -> tuple[str, list[float]]:
    """``Omega=16,32,64`` or ``Omega=16:128:8`` (start:stop:count, inclusive)."""
    if "=" not in text:
        raise cfgmod.ConfigError(f"--sweep expects name=values, got {text!r}")
    name, spec = (s.strip() for s in text.split("=", 1))
    fields = {f.name for f in dataclasses.fields(SystemParams)}
    if name not in fields:
        raise cfgmod.ConfigError(f"--sweep: unknown parameter {name!r}; known: {sorted(fields)}")
    try:
        if ":" in spec:
            start, stop, count = spec.split(":")
            values = list(np.linspace(float(start), float(stop), int(count)))
        else:
            values = [float(v) for v in spec.split(",") if v.strip()]
    except ValueError as exc:
        raise cfgmod.ConfigError(f"--sweep {name}: cannot parse grid {spec!r}") from exc
    if len(values) < 2:
        raise cfgmod.ConfigError(f"--sweep {name}: grid needs at least 2 points")
    return name, [float(v) for v in values]


def sweep_point(base: dict, names, values, full: bool, integrator: dict) -> dict:
    """One grid point; errors are reported in the row rather than raised."""
    row = dict(zip(names, values))
    try:
        p = SystemParams(**{**base, **row})
        eff = effective_params(p)
        rep = adiabaticity_report(p)
        row.update(
            lambda_eff=eff.lambda_eff,
            ratio_g1=rep.ratio_g1,
            ratio_g2=rep.ratio_g2,
            ratio_drive=rep.ratio_drive,
            resonance_residual=rep.resonance_residual,
        )
        if full:
            traj = run_transfer(p, IntegratorConfig(**integrator))
            row["peak_nb"] = transfer_result(traj).peak_nb
        row["error"] = ""
    except FluxEMError as exc:
        row["error"] = type(exc).__name__
    return row


def sweep_rows(scenario, grids, full=False, workers=1) -> list[dict]:
    names = [n for n, _ in grids]
    points = list(product(*(v for _, v in grids)))
    base = dataclasses.asdict(scenario.params)
    integ = dataclasses.asdict(scenario.integrator)
    jobs = [(base, names, pt, full, integ) for pt in points]
    if workers <= 1:
        return [sweep_point(*job) for job in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        # map returns in submission order, i.e. grid order
        return list(pool.map(sweep_point, *zip(*jobs)))


def cmd_sweep(scenario, grids, out=None, full=False, workers=1) -> int:
    if not 1 <= len(grids) <= 2:
        raise cfgmod.ConfigError("--sweep: give one or two parameters")
    rows = sweep_rows(scenario, grids, full=full, workers=workers)
    names = [n for n, _ in grids]
    columns = names + ["lambda_eff", "ratio_g1", "ratio_g2", "ratio_drive", "resonance_residual"]
    if full:
        columns.append("peak_nb")
    columns.append("error")
    with _sink(out) as fh:
        fh.write(csv_line(columns))
        for row in rows:
            fh.write(csv_line([row.get(c, "") for c in columns]))
    return EXIT_OK


def cmd_validate(scenario: cfgmod.ScenarioConfig) -> int:
    results = run_suite(scenario.params, scenario.integrator)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}  {r.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        print(f"failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON scenario file")
    common.add_argument("--preset", help=f"built-in scenario: {', '.join(cfgmod.PRESETS)}")
    common.add_argument("--set", dest="assignments", action="append", default=[],
                        metavar="FIELD=VALUE", help="override a config field, e.g. params.Omega=32")
    common.add_argument("--out", help="output path (CSV; JSON for 'effective')")

    parser = argparse.ArgumentParser(prog="fluxem", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("effective", parents=[common], help="effective coupling and adiabaticity report")
    sub.add_parser("run", parents=[common], help="integrate the full master equation")
    cmp_ = sub.add_parser("compare", parents=[common], help="full vs effective two-mode dynamics")
    cmp_.add_argument("--include-stark", action="store_true", help="also run the effective model with Stark shifts")
    sw = sub.add_parser("sweep", parents=[common], help="parameter sweep")
    sw.add_argument("--sweep", dest="grids", action="append", default=[], metavar="NAME=GRID",
                    help="parameter grid, e.g. Omega=16,32,64 or Omega=16:128:8; give once or twice")
    sw.add_argument("--full", action="store_true", help="also integrate the full model per point")
    sw.add_argument("--workers", type=int, default=1)
    sub.add_parser("validate", parents=[common], help="run the built-in invariant suite")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        scenario = cfgmod.resolve(args.config, args.preset, args.assignments)
        if args.command == "effective":
            return cmd_effective(scenario, args.out)
        if args.command == "run":
            return cmd_run(scenario, _out_path(args, scenario))
        if args.command == "compare":
            return cmd_compare(scenario, _out_path(args, scenario), args.include_stark)
        if args.command == "sweep":
            grids = [parse_grid(g) for g in args.grids]
            return cmd_sweep(scenario, grids, _out_path(args, scenario), args.full, args.workers)
        return cmd_validate(scenario)
    except FluxEMError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
