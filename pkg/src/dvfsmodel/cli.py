"""Command-line entry point.

Exit codes: 0 success, 1 input or parse error, 2 validation failure or
infeasible constraint.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import Optional, Sequence

from .comptime import (
    DEFAULT_PROBE_CPU,
    CompletionTimeModel,
    CtCalibrationInputs,
    PetrucciCtModel,
    calibrate_ct,
)
from .config import load_json, load_machine_config
from .core import InputError, ModelError, check_cpu
from .measurements import read_csv
from .planner import best_plan, check_cpu_step, default_cpu_step, plan
from .power import (
    PetrucciPowerModel,
    PowerCalibrationInputs,
    PowerModel,
    calibrate_power,
    effective_frequency,
    fit_power_least_squares,
)
from .validation import compare, evaluate


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _dump(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def _emit(doc: dict, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(_dump(doc))
    else:
        sys.stdout.write(_dump(doc))


def _info(output: Optional[str]):
    """Summary lines go to stdout when the JSON goes to a file, else to stderr."""
    return sys.stdout if output else sys.stderr


def load_model(path):
    doc = load_json(path)
    if not isinstance(doc, dict):
        raise InputError(f"{path} is not a model document")
    if "u" in doc:
        return CompletionTimeModel.from_dict(doc)
    return PowerModel.from_dict(doc)


def _load_power_model(path) -> PowerModel:
    model = load_model(path)
    if not isinstance(model, PowerModel):
        raise InputError(f"{path} holds a completion-time model, expected a power model")
    return model


def _load_ct_model(path) -> CompletionTimeModel:
    model = load_model(path)
    if not isinstance(model, CompletionTimeModel):
        raise InputError(f"{path} holds a power model, expected a completion-time model")
    return model


def cmd_calibrate_power(args) -> int:
    machine = load_machine_config(args.machine)
    grid = machine.grid()
    ms = read_csv(args.measurements, machine.system_id)
    out = _info(args.output)
    if args.least_squares:
        model, fit = fit_power_least_squares(ms, grid, machine.system_id)
        print(f"idle fit R^2 = {fit.idle_r_squared:.3f}", file=out)
        print(f"beta fit R^2 = {fit.beta_r_squared:.3f}", file=out)
    else:
        model = calibrate_power(PowerCalibrationInputs.from_measurements(ms, grid), machine.system_id)
    corners = model.corners()
    print(f"A = {model.a:.2f} W", file=out)
    print(f"B = {model.b:.2f} W", file=out)
    print(f"alpha = {model.alpha:.2f} W", file=out)
    print(f"dynamic range = {corners.dynamic_range_percent():.2f} %", file=out)
    _emit(model.to_dict(), args.output)
    return 0


def cmd_calibrate_ct(args) -> int:
    machine = load_machine_config(args.machine)
    grid = machine.grid()
    ms = read_csv(args.measurements, machine.system_id)
    inputs = CtCalibrationInputs.from_measurements(
        ms, grid, args.workload, base_cpu=args.base_cpu, probe_cpu=args.probe_cpu
    )
    model = calibrate_ct(inputs, args.workload, machine.system_id)
    out = _info(args.output)
    print(f"U = {model.u:.3f}", file=out)
    print(f"theta(f_max) = {model.theta_fmax:.3f}", file=out)
    print(f"theta(f_min) = {model.theta_fmin:.3f}", file=out)
    print(f"K = {model.k:.4f}", file=out)
    _emit(model.to_dict(), args.output)
    return 0


def _parse_per_core(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InputError(f"--per-core must be comma-separated MHz values, got {text!r}") from None


def cmd_predict_power(args) -> int:
    model = _load_power_model(args.model)
    if args.per_core is not None:
        f = effective_frequency(_parse_per_core(args.per_core), model.grid)
    else:
        f = args.freq
    print(f"{model.predict(args.cpu, f):.2f}")
    return 0


def cmd_predict_ct(args) -> int:
    model = _load_ct_model(args.model)
    value = model.predict(args.cpu, args.freq)
    print(f"{value:.2f}")
    if model.extrapolates(check_cpu(args.cpu)):
        print(f"note: cpu {args.cpu} is above the model's base cpu {model.base_cpu}; "
              "prediction is an extrapolation", file=sys.stderr)
    return 0


def _label(model) -> str:
    return f"{model.name}-{model.workload_id}" if model.workload_id else model.name


def cmd_validate(args) -> int:
    system_id = args.system_id
    if system_id is None and args.machine:
        system_id = load_machine_config(args.machine).system_id
    ms = read_csv(args.measurements, system_id or "")
    out_dir = Path(args.out_dir) if args.out_dir else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
    for path in args.model:
        model = load_model(path)
        predictors = [model]
        if args.baseline:
            baseline = (PetrucciCtModel.from_model(model) if isinstance(model, CompletionTimeModel)
                        else PetrucciPowerModel.from_model(model))
            predictors.append(baseline)
        reports = [evaluate(p, ms, args.exclude_calibration, _label(p)) for p in predictors]
        for rep in reports:
            print(f"{rep.model_name}: avg {rep.avg_percent:.2f} %  max {rep.max_percent:.2f} %  "
                  f"({len(rep.per_point)} points)")
            if out_dir:
                (out_dir / f"{rep.model_name}.json").write_text(_dump(rep.to_dict()))
                (out_dir / f"{rep.model_name}.cdf.txt").write_text(rep.cdf_text())
        if len(reports) > 1:
            table = compare(reports)
            sys.stdout.write(table.format())
            if out_dir:
                (out_dir / f"comparison-{_label(model)}.json").write_text(_dump(table.to_dict()))
    return 0


def cmd_plan(args) -> int:
    step = check_cpu_step(args.cpu_step) if args.cpu_step is not None else default_cpu_step()
    pairs = [(args.power_model, args.ct_model)] + [tuple(p) for p in (args.compare or [])]
    plans = [
        plan(_load_power_model(pm), _load_ct_model(ct), args.scenario, args.constraint, step)
        for pm, ct in pairs
    ]
    for p in plans:
        c = p.chosen
        line = (f"{p.system_id or '-'}: {c.freq_mhz} MHz at {c.cpu * 100:.0f}% cpu, "
                f"{c.power_w:.2f} W, {c.ct_s:.2f} s")
        if p.savings_percent is not None:
            kind = "power saving" if p.scenario == 1 else "speedup"
            line += f", {kind} {p.savings_percent:.2f} % vs f_max"
        print(line, file=_info(args.output))
    if len(plans) == 1:
        doc = plans[0].to_dict()
    else:
        winner = best_plan(plans)
        print(f"winner: {plans[winner].system_id or winner}", file=_info(args.output))
        doc = {"plans": [p.to_dict() for p in plans], "winner": winner,
               "winner_system_id": plans[winner].system_id}
    _emit(doc, args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dvfsmodel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("calibrate-power", help="fit a power model from corner or sweep measurements")
    p.add_argument("--measurements", required=True)
    p.add_argument("--machine", required=True, help="machine config JSON")
    p.add_argument("--least-squares", action="store_true", help="fit from a full sweep")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_calibrate_power)

    p = sub.add_parser("calibrate-ct", help="fit a completion-time model for one workload")
    p.add_argument("--measurements", required=True)
    p.add_argument("--machine", required=True)
    p.add_argument("--workload", required=True)
    p.add_argument("--base-cpu", type=float, default=1.0)
    p.add_argument("--probe-cpu", type=float, default=DEFAULT_PROBE_CPU)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_calibrate_ct)

    p = sub.add_parser("predict-power", help="predict watts at a cpu fraction and frequency")
    p.add_argument("--model", required=True)
    p.add_argument("--cpu", type=float, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--freq", type=int, help="frequency in MHz")
    g.add_argument("--per-core", help="comma-separated per-core MHz; the highest is used")
    p.set_defaults(func=cmd_predict_power)

    p = sub.add_parser("predict-ct", help="predict completion seconds at a cpu fraction and frequency")
    p.add_argument("--model", required=True)
    p.add_argument("--cpu", type=float, required=True)
    p.add_argument("--freq", type=int, required=True)
    p.set_defaults(func=cmd_predict_ct)

    p = sub.add_parser("validate", help="score models against measured sweeps")
    p.add_argument("--model", action="append", required=True)
    p.add_argument("--measurements", required=True)
    p.add_argument("--machine")
    p.add_argument("--system-id")
    p.add_argument("--baseline", action="store_true", help="also score the Petrucci baseline")
    p.add_argument("--exclude-calibration", action="store_true",
                   help="drop the calibration corner points")
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plan", help="pick an operating point for a CT threshold or power budget")
    p.add_argument("--power-model", required=True)
    p.add_argument("--ct-model", required=True)
    p.add_argument("--scenario", type=int, choices=(1, 2), required=True)
    p.add_argument("--constraint", type=float, required=True,
                   help="CT threshold in seconds (scenario 1) or power budget in watts (scenario 2)")
    p.add_argument("--cpu-step", type=float)
    p.add_argument("--compare", nargs=2, action="append", metavar=("POWER_MODEL", "CT_MODEL"),
                   help="plan another machine and report the winner")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_plan)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = args.func(args)
        for w in caught:
            print(f"warning: {w.message}", file=sys.stderr)
        return code
    except ModelError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
