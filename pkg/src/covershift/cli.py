"""Command-line front end.

Subcommands: ``coverage``, ``sweep``, ``clt``, ``abc-demo``, ``correct``.
Options may also come from a flat ``key = value`` config file (same names as
the flags); explicit flags win over the file, the file wins over defaults.
Each run writes a CSV and/or a JSON mirror of the same records into the
output directory (flag ``--out-dir``, else ``$COVERSHIFT_OUT_DIR``, else the
working directory).  File contents are a pure function of the options and
seed; floats are printed at six significant digits.  Exit codes: 0 success,
1 run failure, 2 configuration/usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from .abc import ABCConfig, abc_corrected_intervals, posterior_mean_ladder
from .errors import ConfigError, CoverShiftError
from .harness import (ExperimentConfig, clt_check, run_coverage, sweep)
from .models import PARAM_NAMES, GandKTheta, gk_ma1_simulate
from .engine import correct_margins
from .harness import make_binding
from .rng import RngStream

OUT_DIR_ENV = "COVERSHIFT_OUT_DIR"


def _float_list(text: str) -> list[float]:
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"expected a comma-separated list of numbers, got {text!r}") from exc


def _int_list(text: str) -> list[int]:
    return [int(v) for v in _float_list(text)]


@dataclass(frozen=True)
class Opt:
    convert: Callable[[str], Any]
    default: Any = None
    required: bool = False
    help: str = ""


_COMMON = {
    "config": Opt(str, help="flat key=value file supplying option defaults"),
    "out": Opt(str, "both", help="which files to write: csv, json or both"),
    "out-dir": Opt(str, help="output directory (overrides $COVERSHIFT_OUT_DIR)"),
    "seed": Opt(int, 0, help="root seed; all randomness derives from it"),
    "alpha": Opt(float, 0.05, help="one minus the nominal coverage"),
}

_SCHEMA: dict[str, dict[str, Opt]] = {
    "coverage": {
        **_COMMON,
        "model": Opt(str, required=True, help="normal-location or normal-scale"),
        "method": Opt(str, required=True,
                      help="pivot, corrected-pivot, bootstrap, corrected-bootstrap "
                           "or double-bootstrap"),
        "epsilon": Opt(float, 0.0, help="interval miscalibration size"),
        "m": Opt(int, 20, help="observations per dataset"),
        "n": Opt(int, 500, help="replicate datasets per recalibration"),
        "R": Opt(int, 1000, help="replicate analyses"),
        "theta-true": Opt(float, help="true parameter (default: model convention)"),
        "theta-tilde": Opt(float, help="fixed plug-in estimate override"),
        "B": Opt(int, help="bootstrap replicates (default 400; 99 for corrected-bootstrap)"),
        "B2": Opt(int, help="inner bootstrap replicates (default 25)"),
    },
    "sweep": {
        **_COMMON,
        "model": Opt(str, required=True),
        "axis": Opt(str, required=True, help="epsilon, theta-tilde or m"),
        "values": Opt(_float_list, required=True, help="comma-separated axis values"),
        "epsilon": Opt(float, 0.0, help="miscalibration held fixed on non-epsilon axes"),
        "m": Opt(int, 20),
        "n": Opt(int, 100, help="replicate datasets per recalibration"),
        "R": Opt(int, 100, help="replicate analyses per axis value"),
        "theta-true": Opt(float),
    },
    "clt": {
        **_COMMON,
        "epsilon": Opt(_float_list, [0.0, 1.0], help="comma-separated miscalibration sizes"),
        "m": Opt(int, 20),
        "n-values": Opt(_int_list, [2000], help="comma-separated replicate counts"),
        "reps": Opt(int, 500, help="independent shift estimations per cell"),
    },
    "correct": {
        **_COMMON,
        "model": Opt(str, required=True),
        "epsilon": Opt(float, 0.0),
        "m": Opt(int, 20),
        "n": Opt(int, 500),
        "theta-true": Opt(float),
        "theta-tilde": Opt(float),
    },
    "abc-demo": {
        **_COMMON,
        "theta-star": Opt(_float_list, [0.01, 0.02, 0.3, 0.4, 0.2],
                          help="true (a,b,g,k,ma_coef) generating the observed series"),
        "T": Opt(int, 50, help="series length"),
        "n-sims": Opt(int, 2000, help="prior-predictive simulations per posterior"),
        "accept-frac": Opt(_float_list, [0.02],
                           help="acceptance fractions; one recalibration per value"),
        "n": Opt(int, 40, help="replicate series per recalibration"),
        "stabilization-fracs": Opt(_float_list,
                                   help="emit posterior means at these fractions "
                                        "(estimator-stability diagnostic)"),
    },
}

_USAGE_HINTS = {
    "coverage": "coverage --model normal-scale --method corrected-pivot --epsilon 0.2",
    "sweep": "sweep --model normal-location --axis epsilon --values 20,13.33,6.67,0 --n 100",
    "clt": "clt --epsilon 0,1 --n-values 2000 --reps 500",
    "correct": "correct --model normal-location --epsilon 1 --n 2000",
    "abc-demo": "abc-demo --accept-frac 0.005,0.01,0.02 --n-sims 4000",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="covershift",
        description="Recalibrate interval estimates by simulation and study their coverage.")
    sub = parser.add_subparsers(dest="command")
    for command, schema in _SCHEMA.items():
        p = sub.add_parser(command, help=_USAGE_HINTS[command])
        for name, opt in schema.items():
            p.add_argument(f"--{name}", dest=name.replace("-", "_"), type=str,
                           default=None, help=opt.help)
    return parser


def _read_config_file(path: str) -> dict[str, str]:
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = stripped.partition("=")
        values[key.strip().replace("_", "-")] = value.strip()
    return values


def _merge_options(command: str, args: argparse.Namespace) -> dict[str, Any]:
    schema = _SCHEMA[command]
    raw_flags = {name: getattr(args, name.replace("-", "_")) for name in schema}
    file_values = _read_config_file(raw_flags["config"]) if raw_flags.get("config") else {}
    for key in file_values:
        if key not in schema:
            raise ConfigError(f"config file key {key!r} is not an option of {command!r}")

    merged = {}
    for name, opt in schema.items():
        if raw_flags[name] is not None:
            merged[name] = opt.convert(raw_flags[name])
        elif name in file_values:
            merged[name] = opt.convert(file_values[name])
        else:
            merged[name] = opt.default
        if opt.required and merged[name] is None:
            raise ConfigError(f"missing required option --{name} "
                              f"(e.g. covershift {_USAGE_HINTS[command]})")
    return merged


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _round6(value):
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return float(f"{value:.6g}")
    return value


def _out_dir(options: dict[str, Any]) -> Path:
    if options.get("out-dir"):
        return Path(options["out-dir"])
    return Path(os.environ.get(OUT_DIR_ENV, "."))


def _emit(options: dict[str, Any], name: str, header: Sequence[str],
          rows: Sequence[Sequence[Any]]) -> list[Path]:
    which = options.get("out", "both")
    if which not in ("csv", "json", "both"):
        raise ConfigError(f"--out must be csv, json or both, got {which!r}")
    directory = _out_dir(options)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    if which in ("csv", "both"):
        path = directory / f"{name}.csv"
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    if which in ("json", "both"):
        path = directory / f"{name}.json"
        records = [{k: _round6(v) for k, v in zip(header, row)} for row in rows]
        path.write_text(json.dumps(records, indent=2) + "\n")
        written.append(path)
    for path in written:
        print(f"wrote {path}")
    return written


def _cmd_coverage(options: dict[str, Any]) -> int:
    cfg = ExperimentConfig(
        model=options["model"], method=options["method"], alpha=options["alpha"],
        m=options["m"], n=options["n"], R=options["R"], seed=options["seed"],
        epsilon=options["epsilon"], theta_true=options["theta-true"],
        theta_tilde_override=options["theta-tilde"], B=options["B"], B2=options["B2"])
    report = run_coverage(cfg)
    header = ["model", "method", "alpha", "m", "n", "R",
              "coverage", "mc_se", "mean_width", "seed"]
    row = [cfg.model, cfg.method, cfg.alpha, cfg.m, cfg.n, report.R,
           report.coverage, report.mc_se, report.mean_width, cfg.seed]
    name = f"coverage_{cfg.model}_{cfg.method}_eps{cfg.epsilon:g}_seed{cfg.seed}"
    _emit(options, name, header, [row])
    print(f"coverage {report.coverage:.6g} (mc se {report.mc_se:.6g}, "
          f"{report.failures} failures) in {report.wall_time:.1f}s")
    return 0


def _cmd_sweep(options: dict[str, Any]) -> int:
    cfg = ExperimentConfig(
        model=options["model"], method="corrected-pivot", alpha=options["alpha"],
        m=options["m"], n=options["n"], R=options["R"], seed=options["seed"],
        epsilon=options["epsilon"], theta_true=options["theta-true"])
    rows = sweep(cfg, options["axis"], options["values"])
    header = ["model", "axis", "value", "alpha", "m", "n", "R",
              "lower_q1", "lower_median", "lower_q3",
              "upper_q1", "upper_median", "upper_q3",
              "err_q1", "err_median", "err_q3", "seed"]
    out = [[cfg.model, r.axis, r.value, cfg.alpha, cfg.m, cfg.n, cfg.R,
            r.lower_q1, r.lower_median, r.lower_q3,
            r.upper_q1, r.upper_median, r.upper_q3,
            r.err_q1, r.err_median, r.err_q3, cfg.seed] for r in rows]
    _emit(options, f"sweep_{cfg.model}_{options['axis']}_seed{cfg.seed}", header, out)
    return 0


def _cmd_clt(options: dict[str, Any]) -> int:
    rows = clt_check(m=options["m"], epsilons=options["epsilon"],
                     n_values=options["n-values"], reps=options["reps"],
                     alpha=options["alpha"], seed=options["seed"])
    header = ["epsilon", "m", "alpha", "n", "reps",
              "variance", "target", "mean_scaled", "seed"]
    out = [[r.epsilon, options["m"], options["alpha"], r.n, r.reps,
            r.variance, r.target, r.mean_scaled, options["seed"]] for r in rows]
    _emit(options, f"clt_seed{options['seed']}", header, out)
    for r in rows:
        print(f"eps={r.epsilon:g} n={r.n}: variance {r.variance:.6g} "
              f"vs target {r.target:.6g}")
    return 0


def _cmd_correct(options: dict[str, Any]) -> int:
    cfg = ExperimentConfig(
        model=options["model"], method="corrected-pivot", alpha=options["alpha"],
        m=options["m"], n=options["n"], R=50, seed=options["seed"],
        epsilon=options["epsilon"], theta_true=options["theta-true"],
        theta_tilde_override=options["theta-tilde"])
    binding = make_binding(cfg)
    root = RngStream(cfg.seed)
    x = binding.simulate(np.array([cfg.resolved_theta()]), root.child(0))
    override = (None if cfg.theta_tilde_override is None
                else np.array([cfg.theta_tilde_override]))
    results = correct_margins(binding, x, cfg.alpha, cfg.n, root.child(1),
                              theta_tilde=override)
    header = ["model", "margin", "alpha", "m", "n",
              "raw_lower", "raw_upper", "corrected_lower", "corrected_upper",
              "shift_lower", "shift_upper", "theta_tilde", "degenerate", "seed"]
    out = [[cfg.model, res.margin, cfg.alpha, cfg.m, res.n,
            res.raw.lower, res.raw.upper, res.corrected.lower, res.corrected.upper,
            res.shift_lower, res.shift_upper, float(res.theta_tilde[res.margin]),
            res.degenerate, cfg.seed] for res in results]
    _emit(options, f"correct_{cfg.model}_seed{cfg.seed}", header, out)
    return 0


def _cmd_abc_demo(options: dict[str, Any]) -> int:
    star = options["theta-star"]
    if len(star) != len(PARAM_NAMES):
        raise ConfigError(f"--theta-star needs {len(PARAM_NAMES)} values, got {len(star)}")
    theta_star = GandKTheta.from_array(star)
    root = RngStream(options["seed"])
    observed = gk_ma1_simulate(theta_star, options["T"], root.child(0))

    header = ["param", "accept_frac", "raw_lower", "raw_upper", "raw_width",
              "corrected_lower", "corrected_upper", "corrected_width",
              "shift_lower", "shift_upper", "theta_tilde", "degenerate", "seed"]
    rows = []
    for frac_index, frac in enumerate(options["accept-frac"]):
        cfg = ABCConfig(n_sims=options["n-sims"], accept_frac=frac)
        results = abc_corrected_intervals(observed, cfg, options["alpha"],
                                          options["n"], root.child(1 + frac_index))
        for name, res in zip(PARAM_NAMES, results):
            rows.append([name, frac, res.raw.lower, res.raw.upper, res.raw.width,
                         res.corrected.lower, res.corrected.upper, res.corrected.width,
                         res.shift_lower, res.shift_upper,
                         float(res.theta_tilde[res.margin]), res.degenerate,
                         options["seed"]])
    _emit(options, f"abc_demo_seed{options['seed']}", header, rows)

    if options["stabilization-fracs"]:
        cfg = ABCConfig(n_sims=options["n-sims"],
                        accept_frac=max(options["stabilization-fracs"]))
        ladder = posterior_mean_ladder(observed, cfg, options["stabilization-fracs"],
                                       root.child(10_000))
        lheader = ["accept_frac", *PARAM_NAMES]
        lrows = [[frac, *(float(v) for v in mean)] for frac, mean in ladder]
        _emit(options, f"abc_stabilization_seed{options['seed']}", lheader, lrows)
        print("posterior means by acceptance fraction "
              "(stable values indicate a usable plug-in estimate):")
        for frac, mean in ladder:
            print(f"  accept_frac={frac:g}: " +
                  " ".join(f"{n}={v:.4g}" for n, v in zip(PARAM_NAMES, mean)))
    return 0


_DISPATCH = {
    "coverage": _cmd_coverage,
    "sweep": _cmd_sweep,
    "clt": _cmd_clt,
    "correct": _cmd_correct,
    "abc-demo": _cmd_abc_demo,
}


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:  # argparse handles -h and usage errors itself
        return int(exc.code or 0)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    try:
        options = _merge_options(args.command, args)
        return _DISPATCH[args.command](options)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except CoverShiftError as exc:
        print(f"run error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
