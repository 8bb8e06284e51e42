"""Command-line entry point: ``tailmargin {fit,risk,bootstrap,quad-bench,diag,report}``.

Exit codes: 0 success, 2 input error, 3 domain/math error, 4 non-convergence.
Options may also come from a flat ``key = value`` file given with
``--config``; keys are option names with dashes or underscores. Command-line
flags override the file, which overrides built-in defaults.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import warnings
from pathlib import Path

from tailmargin.errors import InputError, TailMarginError

log = logging.getLogger("tailmargin")


def read_config(path) -> dict[str, str]:
    path = Path(path)
    if not path.is_file():
        raise InputError(f"config file not found: {path}")
    out = {}
    for k, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InputError(f"{path}: line {k} is not key = value")
        key, value = (t.strip() for t in line.split("=", 1))
        out[key.replace("-", "_").lower()] = value
    return out


def _fit_source(p, default_fixture=None):
    g = p.add_mutually_exclusive_group(required=default_fixture is None)
    g.add_argument("--fit", dest="fit_path", help="GPD fit JSON written by `fit`")
    g.add_argument("--fixture", default=default_fixture,
                   help='built-in fit, e.g. "S&P500:long", "hang seng:short" or "benchmark"')


def _measure_args(p):
    p.add_argument("--measure", required=True, choices=["var", "es", "srm"], type=str.lower)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", type=float, help="confidence level (VaR, ES)")
    g.add_argument("--R", dest="R", type=float, help="coefficient of absolute risk aversion (SRM)")
    p.add_argument("--engine", default="trapezoid",
                   choices=["trapezoid", "simpson", "pseudo_mc", "weyl", "niederreiter"])
    p.add_argument("--slices", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)


def _series_args(p):
    p.add_argument("--input", required=True, help="CSV with date,price or date,return columns")
    p.add_argument("--column", default=None, help="price column name or index")
    p.add_argument("--position", choices=["long", "short"], default="long")
    p.add_argument("--ffill", action="store_true", help="forward-fill missing weekday prices")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(prog="tailmargin", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="flat key = value option file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    cmds = {}
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=argparse.SUPPRESS)
    common.add_argument("-v", "--verbose", action="store_true", help=argparse.SUPPRESS)

    p = cmds["fit"] = sub.add_parser("fit", parents=[common], help="fit a GPD to loss exceedances")
    _series_args(p)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--min-exceedances", type=int, default=30)
    p.add_argument("--label", default=None)
    p.add_argument("--out", default=".")
    p.add_argument("--name", default="fit", help="output file stem")

    p = cmds["risk"] = sub.add_parser("risk", parents=[common], help="VaR, ES or spectral risk of a fit")
    _fit_source(p)
    _measure_args(p)
    p.add_argument("--out", default=".")
    p.add_argument("--name", default="risk")

    p = cmds["bootstrap"] = sub.add_parser("bootstrap", parents=[common], help="bootstrap SE and interval of a measure")
    _fit_source(p)
    _measure_args(p)
    p.add_argument("--resamples", type=int, default=5000)
    p.add_argument("--ci", type=float, default=0.90)
    p.add_argument("--srm-estimator", choices=["sampled", "cell"], default="sampled")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=".")
    p.add_argument("--name", default="bootstrap")

    p = cmds["quad-bench"] = sub.add_parser("quad-bench", parents=[common], help="quadrature error table")
    _fit_source(p, default_fixture="benchmark")
    p.add_argument("--R", dest="R", type=float, default=100.0)
    p.add_argument("--engines", default="trapezoid,simpson,niederreiter,weyl")
    p.add_argument("--slices", default="1000,10000,100000,1000000,10000000")
    p.add_argument("--baseline-slices", type=int, default=20_000_000)
    p.add_argument("--pseudo-samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=".")

    p = cmds["diag"] = sub.add_parser("diag", parents=[common], help="threshold diagnostics as CSV")
    _series_args(p)
    p.add_argument("--kind", choices=["qq", "mean-excess", "shape", "all"], default="all")
    p.add_argument("--thresholds", default="0.5:4.0:0.1", help='"start:stop:step" or "a,b,c"')
    p.add_argument("--min-exceedances", type=int, default=5)
    p.add_argument("--out", default=".")

    p = cmds["report"] = sub.add_parser("report", parents=[common], help="regenerate all tables and figures")
    p.add_argument("--out", default="report")
    p.add_argument("--resamples", type=int, default=5000, help="0 skips the bootstrap tables")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--srm-estimator", choices=["sampled", "cell"], default="sampled")
    p.add_argument("--slices", type=int, default=1_000_000)
    p.add_argument("--baseline-slices", type=int, default=20_000_000)
    p.add_argument("--bench-slices", default="1000,10000,100000,1000000,10000000")
    p.add_argument("--sweep-step", type=int, default=100, help="0 skips the convergence sweep")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    return parser, cmds


def _apply_config(cmd_parser: argparse.ArgumentParser, config: dict[str, str]):
    known = {a.dest: a for a in cmd_parser._actions}
    defaults = {}
    for key, raw in config.items():
        action = known.get(key)
        if action is None:
            continue
        if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
            defaults[key] = raw.lower() in ("1", "true", "yes", "on")
        else:
            try:
                value = action.type(raw) if action.type else raw
            except ValueError:
                raise InputError(f"config: bad value {raw!r} for {key}") from None
            if action.choices and value not in action.choices:
                raise InputError(f"config: {key} must be one of {list(action.choices)}")
            defaults[key] = value
        # a config value satisfies a required option
        action.required = False
    for group in cmd_parser._mutually_exclusive_groups:
        if any(a.dest in defaults for a in group._group_actions):
            group.required = False
    cmd_parser.set_defaults(**defaults)


def _load_fit(args):
    from tailmargin.fixtures import get_fixture
    from tailmargin.gpd import GpdFit

    if getattr(args, "fit_path", None):
        return GpdFit.load(args.fit_path)
    if getattr(args, "fixture", None):
        return get_fixture(args.fixture)
    raise InputError("give --fit or --fixture")


def _spec(args):
    from tailmargin.risk_measures import RiskMeasureSpec

    return RiskMeasureSpec(args.measure, alpha=args.alpha, R=args.R)


def _outdir(path) -> Path:
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output directory {out}: {exc}") from None
    return out


def _int_list(text) -> list[int]:
    try:
        return [int(float(t)) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise InputError(f"bad integer list {text!r}") from None


def cmd_fit(args) -> int:
    from tailmargin.gpd import fit_losses
    from tailmargin.market_data import load_returns, to_losses

    returns = load_returns(args.input, column=args.column, ffill=args.ffill)
    losses = to_losses(returns, args.position)
    label = args.label or f"{Path(args.input).stem}:{args.position}"
    fit = fit_losses(losses, args.threshold, min_exceedances=args.min_exceedances, label=label)
    path = fit.save(_outdir(args.out) / f"{args.name}.json")
    print("position  u      prob    N_u   xi             beta")
    print(f"{args.position:<9} {fit.u:<6.2f} {fit.prob:<7.4f} {fit.n_u:<5d} "
          f"{fit.xi:.4f} ({fit.se_xi:.4f})  {fit.beta:.4f} ({fit.se_beta:.4f})")
    log.info("wrote %s", path)
    return 0


def cmd_risk(args) -> int:
    from tailmargin.quadrature import QuadratureConfig
    from tailmargin.risk_measures import evaluate

    fit = _load_fit(args)
    spec = _spec(args)
    quad = QuadratureConfig(args.engine, args.slices, args.seed) if spec.kind == "SRM" else None
    est = evaluate(fit, spec, quad)
    path = _outdir(args.out) / f"{args.name}.json"
    path.write_text(json.dumps(est.to_dict(), indent=2) + "\n")
    print(f"{spec}: {est.value:.4f} (daily %)")
    return 0


def cmd_bootstrap(args) -> int:
    from tailmargin.bootstrap import BootstrapConfig, boot_risk, summary_record
    from tailmargin.quadrature import QuadratureConfig

    fit = _load_fit(args)
    spec = _spec(args)
    config = BootstrapConfig(args.resamples, args.seed, args.ci, args.srm_estimator, args.workers)
    quad = QuadratureConfig(args.engine, args.slices, args.seed) if spec.kind == "SRM" else None
    summary = boot_risk(fit, spec, config, quad)
    contract, _, position = (fit.label or "").rpartition(":")
    rec = summary_record(contract or fit.label, position or None, spec, summary)
    rec.update(resamples=config.resamples, seed=config.seed, ci_level=config.ci_level)
    path = _outdir(args.out) / f"{args.name}.json"
    path.write_text(json.dumps(rec, indent=2) + "\n")
    print(f"{spec}: point {summary.point:.4f}  se {summary.se:.4f}  "
          f"{config.ci_level:.0%} CI [{summary.ci_lo:.4f}, {summary.ci_hi:.4f}]  "
          f"standardized [{summary.std_ci_lo:.4f} {summary.std_ci_hi:.4f}]")
    return 0


def cmd_quad_bench(args) -> int:
    from tailmargin.quadrature import bench_errors

    fit = _load_fit(args)
    engines = [e.strip() for e in args.engines.split(",") if e.strip()]
    table = bench_errors(fit, args.R, engines, _int_list(args.slices), args.baseline_slices,
                         args.pseudo_samples, args.seed, args.workers)
    path = _outdir(args.out) / "tables5.csv"
    table.to_csv(path)
    print(f"baseline (trapezoid, N={args.baseline_slices}): {table.baseline:.6f}")
    print("engine        " + "".join(f"{n:>11d}" for n in table.slices))
    for engine, errs in table.rows():
        print(f"{engine:<14}" + "".join(f"{e:>11.2f}" for e in errs))
    return 0


def cmd_diag(args) -> int:
    from tailmargin import diagnostics as dg
    from tailmargin.market_data import load_returns, to_losses

    losses = to_losses(load_returns(args.input, column=args.column, ffill=args.ffill), args.position)
    out = _outdir(args.out)
    grid = dg.parse_grid(args.thresholds)
    kinds = ["qq", "mean-excess", "shape"] if args.kind == "all" else [args.kind]
    for kind in kinds:
        if kind == "qq":
            curve = dg.qq_normal(losses)
        elif kind == "mean-excess":
            curve = dg.mean_excess(losses, grid, args.min_exceedances)
        else:
            curve = dg.shape_stability(losses, grid, args.min_exceedances)
        path = curve.to_csv(out / f"diag_{curve.kind}_{args.position}.csv")
        print(f"{curve.kind}: {len(curve)} points -> {path}")
    return 0


def cmd_report(args) -> int:
    from tailmargin.report import ReportConfig, run_report

    cfg = ReportConfig(
        out=Path(args.out), resamples=args.resamples, seed=args.seed,
        srm_estimator=args.srm_estimator, slices=args.slices,
        baseline_slices=args.baseline_slices, bench_slices=tuple(_int_list(args.bench_slices)),
        figures=not args.no_figures, sweep_step=args.sweep_step, workers=args.workers,
    )
    for path in run_report(cfg):
        print(path)
    return 0


COMMANDS = {
    "fit": cmd_fit,
    "risk": cmd_risk,
    "bootstrap": cmd_bootstrap,
    "quad-bench": cmd_quad_bench,
    "diag": cmd_diag,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser, cmds = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre_parser = argparse.ArgumentParser(add_help=False)
    pre_parser.add_argument("--config")
    pre_parser.add_argument("-v", "--verbose", action="store_true")
    pre, rest = pre_parser.parse_known_args(argv)
    command = next((t for t in rest if t in cmds), None)
    logging.basicConfig(level=logging.INFO if pre.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if pre.config and command:
            _apply_config(cmds[command], read_config(pre.config))
        try:
            args = parser.parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](args)
    except TailMarginError as err:
        print(f"tailmargin: error: {err}", file=sys.stderr)
        return err.exit_code


if __name__ == "__main__":
    sys.exit(main())
