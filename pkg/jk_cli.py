#!/usr/bin/env python
"""
Jacobi kernels command line interface - experiment runner for the perturbed
Jacobi ensemble.

Usage: python jk_cli.py <command> [options...]

Examples:
    python jk_cli.py density --alpha 1 --beta 0.5 --t 1.5 --n 120 --assert 0.05
    python jk_cli.py edge --alpha 1 --beta 0.5 --s 2 --n 100 --t-mode fixed-t
    python jk_cli.py transition --alpha 1 --beta 0.5 --n 120 --s 0.1,1,3,10,30
    python jk_cli.py painleve-residuals --theta -1 --gamma -0.25 --s0 1 --s1 10 --b0 0.3 --y0 1.2

Every command writes <stem>.csv, <stem>.json and <stem>.config.toml to the
output directory and exits 0 on success, 2 on parameter errors (usage
errors and unwritable output paths included), 3 on numerical breakdown, 4
when an --assert gate fails and 1 on anything unexpected. Every failure
ends with one JSON line on stderr.
"""
from __future__ import annotations
import sys
import json
import logging
import argparse
import typing as _t
from pathlib import Path

import numpy as np

# Set up proper import paths
current_dir = Path(__file__).parent
if str(current_dir) not in sys.path:
    sys.path.insert(0, str(current_dir))

try:
    from .scripts import errors, kernel_utils, result_store, limits, painleve, sampler
    from .scripts.errors import KernelError, ParameterError, ToleranceError
    from .scripts.weight import WeightSpec, H_FUNCTIONS, t_from_s, edge_maps
    from .scripts.orthopoly import KernelEvaluator, build_recurrence, orthonormality_residual, trace_identity
    from .scripts.specfun import SpecFunConfig, specfun_check
    from .scripts.worker_pool import map_ordered
except ImportError:
    from scripts import errors, kernel_utils, result_store, limits, painleve, sampler
    from scripts.errors import KernelError, ParameterError, ToleranceError
    from scripts.weight import WeightSpec, H_FUNCTIONS, t_from_s, edge_maps
    from scripts.orthopoly import KernelEvaluator, build_recurrence, orthonormality_residual, trace_identity
    from scripts.specfun import SpecFunConfig, specfun_check
    from scripts.worker_pool import map_ordered

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'


class CommandOutput(_t.NamedTuple):
    rows: _t.List[dict]
    summary: dict
    gate_error: _t.Optional[float] = None
    columns: _t.Optional[_t.List[str]] = None


# ───────────────────────────────────────── Helpers ────
def _float_list(text: str) -> _t.List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _weight(args, t: _t.Optional[float] = None) -> WeightSpec:
    h_name = args.h
    return WeightSpec(args.alpha, args.beta, args.t if t is None else t, H_FUNCTIONS[h_name], h_name)


def _evaluator(spec: WeightSpec, n: int, cfg: dict) -> KernelEvaluator:
    section = cfg["orthopoly"]
    return KernelEvaluator.from_spec(
        spec, n, n_quad=int(section["quad_factor"]) * n + 40,
        reorthogonalize=bool(section["reorthogonalize"]),
        graded_threshold=float(section["graded_threshold"]),
    )


def _painleve_params(args) -> painleve.PainleveParams:
    if args.theta is not None or args.gamma is not None:
        if args.theta is None or args.gamma is None:
            raise ParameterError("give both --theta and --gamma, or --alpha and --beta")
        return painleve.PainleveParams(args.theta, args.gamma)
    return painleve.PainleveParams.from_weight(args.alpha, args.beta)


def _trajectory(args, cfg: dict) -> painleve.PainleveTrajectory:
    section = cfg["painleve"]
    return painleve.integrate_schlesinger(
        _painleve_params(args), args.s0, args.s1, args.b0, args.y0,
        tol=args.tol if args.tol is not None else float(section["rtol"]),
        atol=float(section["atol"]), blowup=float(section["blowup"]),
        truncate=args.truncate,
    )


# ───────────────────────────────────────── Commands ────
def cmd_recurrence(args, cfg: dict) -> CommandOutput:
    spec = _weight(args)
    table = build_recurrence(spec, args.n, int(cfg["orthopoly"]["quad_factor"]) * args.n + 40,
                             bool(cfg["orthopoly"]["reorthogonalize"]),
                             float(cfg["orthopoly"]["graded_threshold"]))
    residual = orthonormality_residual(table, spec, float(cfg["orthopoly"]["graded_threshold"]))
    ev = KernelEvaluator(spec, table, args.n)
    summary = {"weight": spec.to_dict(), **table.to_dict(), "orthonormality_residual": residual,
               "trace": trace_identity(ev)}
    return CommandOutput(table.rows(), summary, residual)


def cmd_density(args, cfg: dict) -> CommandOutput:
    ev = _evaluator(_weight(args), args.n, cfg)
    grid = np.linspace(args.x_min, args.x_max, args.points)
    result = limits.bulk_density_experiment(ev, args.n, grid)
    return CommandOutput(result.rows(), result.summary(), result.gate_error)


def cmd_sine(args, cfg: dict) -> CommandOutput:
    ev = _evaluator(_weight(args), args.n, cfg)
    grid = limits.uv_square(-args.extent, args.extent, args.step)
    result = limits.bulk_sine_experiment(ev, args.n, args.x0, grid)
    return CommandOutput(result.rows(), result.summary(), result.gate_error)


def cmd_edge(args, cfg: dict) -> CommandOutput:
    if args.s is not None:
        t = t_from_s(args.s, args.n)
    elif args.t is not None:
        t = args.t
    elif args.t_mode == "t-equals-1":
        t = 1.0
    else:
        raise ParameterError("fixed-t mode needs --t or --s")
    ev = _evaluator(_weight(args, t), args.n, cfg)
    grid = limits.uv_square(args.u_min, args.u_max, args.step)
    result = limits.edge_bessel_experiment(ev, args.n, args.t_mode, grid)
    summary = result.summary()
    if t > 1:
        section = cfg["weight"]
        maps = edge_maps(ev.spec, args.n, float(section["disk_radius"]))
        summary["edge_maps"] = maps.to_dict()
        try:
            summary["outer_check"] = limits.outer_poly_check(ev, args.n, t + 1, int(section["szego_nodes"]))
        except errors.AccuracyError as e:
            logging.warning(f"Outer asymptotics check skipped: {e}")
            summary["outer_check"] = None
    return CommandOutput(result.rows(), summary, result.gate_error)


def cmd_double_scaling(args, cfg: dict) -> CommandOutput:
    spec = _weight(args, t_from_s(args.s, args.n))
    grid = limits.uv_square(args.u_min, args.u_max, args.step)
    result = limits.double_scaling_experiment(spec, args.s, args.n, grid, n_ref=args.n_ref)
    return CommandOutput(result.rows(), result.summary(), result.gate_error)


def cmd_transition(args, cfg: dict) -> CommandOutput:
    s_list = sorted(args.s)
    spec = _weight(args, t_from_s(s_list[0], args.n))
    grid = limits.uv_square(args.u_min, args.u_max, args.step)
    results = map_ordered(lambda s: limits.transition_scan(spec, [s], args.n, grid)[0],
                          s_list, args.workers)
    rows = [{"s": r.meta["s"], "t": r.meta["t"], "err_beta": r.max_abs_err,
             "err_alpha_beta": r.alt_max_abs_err} for r in results]
    summary = {"weight": {"alpha": spec.alpha, "beta": spec.beta, "h": spec.h_name}, "n": args.n,
               "scan": [r.summary() for r in results], "crossovers": limits.crossover_count(results)}
    return CommandOutput(rows, summary)


def cmd_painleve_integrate(args, cfg: dict) -> CommandOutput:
    traj = _trajectory(args, cfg)
    summary = {"params": traj.params.to_dict(), "s_range": list(traj.s_range), "steps": len(traj.s_grid),
               "stopped_at": traj.stopped_at, "constraint_drift": traj.constraint_drift}
    return CommandOutput(painleve.trajectory_rows(traj), summary, traj.constraint_drift)


def cmd_painleve_residuals(args, cfg: dict) -> CommandOutput:
    traj = _trajectory(args, cfg)
    section = cfg["painleve"]
    sweep = painleve.trajectory_residuals(traj, args.points or int(section["residual_points"]),
                                          float(section["pole_margin"]))
    names = list(sweep["residuals"])
    rows = [{"s": float(s), **{name: float(sweep["residuals"][name][i]) for name in names}}
            for i, s in enumerate(sweep["s"])]
    summary = {"params": traj.params.to_dict(), "max": sweep["max"], "masked": sweep["masked"],
               "constraint_drift": sweep["constraint_drift"], "stopped_at": traj.stopped_at}
    equations = ("first_order", "second_order", "gpv", "p3", "u_ode")
    gate = max((v for k, v in sweep["max"].items() if k in equations and np.isfinite(v)), default=float("nan"))
    if not np.isfinite(gate):
        logging.warning("Every residual point was masked near a singular manifold; no gate error available")
    return CommandOutput(rows, summary, gate, ["s"] + names)


def cmd_backlund(args, cfg: dict) -> CommandOutput:
    traj = _trajectory(args, cfg)
    mapped = painleve.backlund_trajectory(traj, args.sign, args.points,
                                          float(cfg["painleve"]["pole_margin"]))
    rows = [{"s": float(s), "b": float(mapped["b"][i]), "y": float(mapped["y"][i]),
             "kappa": float(mapped["kappa"][i]), "residual": float(mapped["residual_second_order"][i])}
            for i, s in enumerate(mapped["s"])]
    roundtrip = painleve.backlund_roundtrip(traj.params, float(traj.s_grid[0]), float(traj.b[0]),
                                            float(traj.y[0]), args.sign)
    summary = {"params": traj.params.to_dict(), "params_tilde": mapped["params"].to_dict(),
               "sign": args.sign, "max_residual": mapped["max_residual"], "masked": mapped["masked"],
               "roundtrip": roundtrip}
    return CommandOutput(rows, summary, mapped["max_residual"])


def cmd_monodromy(args, cfg: dict) -> CommandOutput:
    params = _painleve_params(args)
    md = painleve.monodromy_constants(params, args.branch)
    residual = painleve.verify_cyclic(md, params)
    rows = []
    for name in ("E12", "E0"):
        matrix = getattr(md, name)
        for i in range(2):
            for j in range(2):
                rows.append({"matrix": name, "row": i, "col": j,
                             "re": matrix[i, j].real, "im": matrix[i, j].imag})
    summary = {"params": params.to_dict(), **md.to_dict(), "cyclic_residual": residual}
    return CommandOutput(rows, summary, residual)


def cmd_specfun_check(args, cfg: dict) -> CommandOutput:
    rows = specfun_check(SpecFunConfig.from_dict(cfg["specfun"]))
    worst = max(rows, key=lambda r: r["abs_err"])
    for row in rows:
        print(f"{row['kind']:<14} {row['params']:<28} abs_err={row['abs_err']:.3e}")
    summary = {"comparisons": len(rows), "max_abs_err": worst["abs_err"], "worst": worst["kind"] + " " + worst["params"]}
    return CommandOutput(rows, summary, worst["abs_err"])


def cmd_sample(args, cfg: dict) -> CommandOutput:
    ev = _evaluator(_weight(args), args.n, cfg)
    config = sampler.SamplerConfig.from_dict(cfg["sampler"])
    run = sampler.sample_dpp(ev, args.seed, args.reps, args.workers, config)
    ks = sampler.ks_arcsine(run)
    chi2 = sampler.chi_square_density_test(run, ev, args.bins)
    summary = {**run.summary(), "weight": ev.spec.to_dict(), "ks": ks,
               "chi_square": {"statistic": chi2["statistic"], "p_value": chi2["p_value"], "bins": chi2["bins"]}}
    return CommandOutput(run.rows(), summary, ks["statistic"])


COMMANDS = {
    "recurrence": (cmd_recurrence, "Recurrence coefficients and orthonormality check."),
    "density": (cmd_density, "Bulk density (1/n) K_n(x, x) against the arcsine law."),
    "sine": (cmd_sine, "Bulk scaling against the sine kernel."),
    "edge": (cmd_edge, "Hard-edge scaling against the Bessel kernel."),
    "double-scaling": (cmd_double_scaling, "Cauchy convergence of the double-scaling proxy."),
    "transition": (cmd_transition, "Proxy against both Bessel limits over a range of s."),
    "painleve-integrate": (cmd_painleve_integrate, "Integrate the Schlesinger system."),
    "painleve-residuals": (cmd_painleve_residuals, "Residuals of every scalar reduction along a trajectory."),
    "backlund": (cmd_backlund, "Backlund-transformed trajectory and its residual."),
    "monodromy": (cmd_monodromy, "Monodromy constants and the cyclic condition."),
    "specfun-check": (cmd_specfun_check, "Reference special-function evaluators against the primary ones."),
    "sample": (cmd_sample, "Exact samples of the determinantal process."),
}


# ───────────────────────────────────────── Argument Parser ────
class JsonErrorParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors also reach stderr as one JSON line."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        err = ParameterError(f"{self.prog}: {message}")
        print(json.dumps(err.to_dict(), sort_keys=True), file=sys.stderr)
        self.exit(errors.EXIT_PARAMETER)


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="Output directory (default: $JK_OUTPUT_DIR, then [output].dir).")
    common.add_argument("--config", help="Path to kernels.toml (default: repository root).")
    common.add_argument("--workers", type=int, default=None, help="Worker threads (0 = physical cores).")
    common.add_argument("--seed", type=int, default=0, help="Seed for the sampler substreams.")
    common.add_argument("--assert", dest="assert_tol", type=float, default=None,
                        help="Fail with exit code 4 when the command's error exceeds this tolerance.")
    common.add_argument("--json", action="store_true", help="Print the JSON summary to stdout.")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--quiet", action="store_true", help="Only log warnings and errors.")
    verbosity.add_argument("--verbose", action="store_true", help="Log debug messages.")
    return common


def _weight_parser(with_t: bool = True) -> argparse.ArgumentParser:
    weight = argparse.ArgumentParser(add_help=False)
    weight.add_argument("--alpha", type=float, default=0.0, help="Exponent of (t^2 - x^2).")
    weight.add_argument("--beta", type=float, default=0.0, help="Exponent of (1 - x^2).")
    weight.add_argument("--h", choices=sorted(H_FUNCTIONS), default="unit", help="Smooth perturbation h.")
    if with_t:
        weight.add_argument("--t", type=float, required=True, help="Location of the outer singularity.")
    return weight


def _painleve_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--theta", type=float, default=None, help="Theta (default: -alpha).")
    p.add_argument("--gamma", type=float, default=None, help="gamma (default: beta - 1/2).")
    p.add_argument("--alpha", type=float, default=0.0, help="Weight exponent alpha.")
    p.add_argument("--beta", type=float, default=0.5, help="Weight exponent beta.")
    return p


def _trajectory_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--s0", type=float, required=True, help="Initial s.")
    p.add_argument("--s1", type=float, required=True, help="Final s.")
    p.add_argument("--b0", type=float, required=True, help="b(s0).")
    p.add_argument("--y0", type=float, required=True, help="y(s0).")
    p.add_argument("--tol", type=float, default=None, help="Relative tolerance (default: [painleve].rtol).")
    p.add_argument("--truncate", action="store_true", help="Keep the trajectory up to a blow-up.")
    return p


def _uv_args(p: argparse.ArgumentParser, low: float, high: float, step: float):
    p.add_argument("--u-min", type=float, default=low, help="Smallest u and v.")
    p.add_argument("--u-max", type=float, default=high, help="Largest u and v.")
    p.add_argument("--step", type=float, default=step, help="Lattice step in u and v.")


def build_parser() -> argparse.ArgumentParser:
    parser = JsonErrorParser(prog="jacobi-kernels",
                             description="Experiments for the perturbed Jacobi unitary ensemble.")
    subparsers = parser.add_subparsers(dest="command", title="Commands", required=True)
    common = _common_parser()

    def add(name: str, *parents: argparse.ArgumentParser) -> argparse.ArgumentParser:
        func, help_text = COMMANDS[name]
        p = subparsers.add_parser(name, help=help_text, parents=[common, *parents])
        p.set_defaults(func=func)
        return p

    p = add("recurrence", _weight_parser())
    p.add_argument("--n", type=int, required=True, help="Highest degree n_max.")

    p = add("density", _weight_parser())
    p.add_argument("--n", type=int, required=True, help="Kernel size.")
    p.add_argument("--x-min", type=float, default=-0.8, help="Left end of the x grid.")
    p.add_argument("--x-max", type=float, default=0.8, help="Right end of the x grid.")
    p.add_argument("--points", type=int, default=161, help="Number of grid points.")

    p = add("sine", _weight_parser())
    p.add_argument("--n", type=int, required=True, help="Kernel size.")
    p.add_argument("--x0", type=float, default=0.0, help="Interior base point.")
    p.add_argument("--extent", type=float, default=2.0, help="Grid covers |u|, |v| <= extent.")
    p.add_argument("--step", type=float, default=0.25, help="Lattice step in u and v.")

    p = add("edge", _weight_parser(with_t=False))
    p.add_argument("--n", type=int, required=True, help="Kernel size.")
    location = p.add_mutually_exclusive_group()
    location.add_argument("--t", type=float, default=None, help="Location of the outer singularity.")
    location.add_argument("--s", type=float, default=None, help="Double-scaling parameter; t = cosh(s/4n).")
    p.add_argument("--t-mode", choices=limits.T_MODES, default="fixed-t", help="Which Bessel limit to compare with.")
    _uv_args(p, 0.5, 8.0, 0.5)

    p = add("double-scaling", _weight_parser(with_t=False))
    p.add_argument("--s", type=float, required=True, help="Double-scaling parameter.")
    p.add_argument("--n", type=int, default=60, help="Kernel size.")
    p.add_argument("--n-ref", type=int, default=None, help="Reference size (default: 2n).")
    _uv_args(p, 0.5, 4.0, 0.5)

    p = add("transition", _weight_parser(with_t=False))
    p.add_argument("--s", type=_float_list, required=True, help="Comma-separated s values.")
    p.add_argument("--n", type=int, default=120, help="Kernel size.")
    _uv_args(p, 0.5, 4.0, 0.5)

    p = add("painleve-integrate", _painleve_parser(), _trajectory_parser())

    p = add("painleve-residuals", _painleve_parser(), _trajectory_parser())
    p.add_argument("--points", type=int, default=None, help="Grid size (default: [painleve].residual_points).")

    p = add("backlund", _painleve_parser(), _trajectory_parser())
    p.add_argument("--sign", choices=painleve.SIGNS, default="+", help="Sign of the transformation.")
    p.add_argument("--points", type=int, default=200, help="Grid size.")

    p = add("monodromy", _painleve_parser())
    p.add_argument("--branch", choices=("generic", "half-integer"), default=None,
                   help="Force a branch (default: chosen from gamma).")

    add("specfun-check")

    p = add("sample", _weight_parser())
    p.add_argument("--n", type=int, required=True, help="Points per configuration.")
    p.add_argument("--reps", type=int, default=200, help="Number of configurations.")
    p.add_argument("--bins", type=int, default=20, help="Bins of the chi-square test.")

    return parser


# ───────────────────────────────────────── Execution ────
def _configure_logging(args):
    level = logging.WARNING if args.quiet else logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT)
    logging.getLogger().setLevel(level)


def _write_outputs(stem: str, args, cfg: dict, output: CommandOutput, out_dir: Path) -> dict:
    float_format = cfg["output"]["float_format"]
    csv_path = result_store.write_csv(out_dir / f"{stem}.csv", output.rows, output.columns, float_format)
    summary = dict(output.summary, command=stem, gate_error=output.gate_error, assert_tol=args.assert_tol)
    if args.assert_tol is not None and output.gate_error is not None:
        summary["passed"] = bool(output.gate_error <= args.assert_tol)
    result_store.write_json(out_dir / f"{stem}.json", summary)
    flags = {k: v for k, v in vars(args).items() if k != "func"}
    result_store.write_text(out_dir / f"{stem}.config.toml", kernel_utils.dump_cfg_snapshot(cfg, flags))
    logging.debug(f"Outputs for {stem} written to {out_dir}")
    summary["csv"] = str(csv_path)
    return summary


def run(args) -> int:
    cfg = kernel_utils.load_cfg(args.config)
    out_dir = kernel_utils.get_output_dir(cfg, args.out)
    if args.workers is None:
        args.workers = int(cfg["workers"]["default"])
    stem = args.command
    output = args.func(args, cfg)
    summary = _write_outputs(stem, args, cfg, output, out_dir)
    if args.json:
        print(result_store.render_json(summary), end="")
    else:
        print(f"✓ {stem}: {len(output.rows)} rows -> {summary['csv']}")
    if args.assert_tol is not None:
        if output.gate_error is None:
            logging.warning(f"'{stem}' has no scalar error to gate; --assert ignored")
        elif not output.gate_error <= args.assert_tol:
            raise ToleranceError(f"{stem}: error {output.gate_error:.3e} exceeds tolerance {args.assert_tol:g}",
                                 error=output.gate_error, tolerance=args.assert_tol)
    return errors.EXIT_OK


def _report(err: KernelError) -> int:
    print(json.dumps(err.to_dict(), sort_keys=True), file=sys.stderr)
    return err.exit_code


def main(argv: _t.Optional[_t.Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    _configure_logging(args)
    try:
        return run(args)
    except KernelError as e:
        logging.error(f"{type(e).__name__}: {e}")
        return _report(e)
    except Exception as e:
        logging.exception(f"Unexpected failure in '{args.command}'")
        return _report(errors.InternalError(str(e), cause=type(e).__name__))


# ───────────────────────────────────────── Main Execution ────
if __name__ == "__main__":
    sys.exit(main())
