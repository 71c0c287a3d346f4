"""Command-line interface.

Subcommands: ``match`` (fixed-size matching), ``curve`` (optimal-cost curve),
``select`` (matching-size selection, known or unknown noise), ``synth``
(write a generated instance), ``bench precision`` / ``bench selection``
(Monte-Carlo sweeps to CSV plus optional SVG figures) and ``rate`` (print the
separation threshold).

Exit codes: 0 on success, 1 on usage errors, 2 on data errors.  When --seed
is not given, the LSSMATCH_SEED environment variable (a 64-bit integer) is
used, falling back to a fixed built-in default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import LssMatchError
from .io import (
    load_feature_csv,
    matching_payload,
    save_curve_csv,
    save_feature_csv,
    save_histogram_csv,
    save_matching_json,
)
from .matching import lss_curve, lss_match
from .selection import select_k_known_noise, select_k_unknown_noise, separation_rate
from .synth import SynthConfig, generate_instance, kappa_bar_all, run_precision_sweep, run_selection_sweep

DEFAULT_SEED = 20_177
SEED_ENV_VAR = "LSSMATCH_SEED"


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; this CLI uses 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


class _UsageError(Exception):
    """A bad flag combination detected after parsing (still exit code 1)."""


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    return int(os.environ.get(SEED_ENV_VAR, DEFAULT_SEED))


def _parse_taus(text: str) -> list[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise LssMatchError(f"bad tau grid {text!r}; expected comma-separated reals")
    if not values:
        raise LssMatchError("tau grid is empty")
    return values


def _emit_json(payload: dict, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as handle:
            json.dump(payload, handle)
            handle.write("\n")
    else:
        print(json.dumps(payload))


def cmd_rate(args) -> int:
    print(f"{separation_rate(args.n, args.m, args.d, args.alpha):.6f}")
    return 0


def cmd_match(args) -> int:
    x = load_feature_csv(args.x)
    y = load_feature_csv(args.y)
    result = lss_match(x, y, args.k, scale=args.scale)
    _emit_json(matching_payload(result), args.out)
    return 0


def cmd_curve(args) -> int:
    x = load_feature_csv(args.x)
    y = load_feature_csv(args.y)
    k_max = args.k_max if args.k_max is not None else min(len(x), len(y))
    curve = lss_curve(x, y, k_max, scale=args.scale)
    if args.out:
        save_curve_csv(curve, args.out)
    else:
        print("k,phi")
        for k, phi in enumerate(curve.phi, start=1):
            print(f"{k},{phi!r}")
    return 0


def cmd_select(args) -> int:
    x = load_feature_csv(args.x)
    y = load_feature_csv(args.y)
    have_pair = args.sigma is not None or args.sigma_sharp is not None
    if args.sigma0_sq is not None and have_pair:
        raise _UsageError("--sigma0-sq and --sigma/--sigma-sharp are mutually exclusive")
    if have_pair and (args.sigma is None or args.sigma_sharp is None):
        raise _UsageError("--sigma and --sigma-sharp must be given together")
    if args.sigma0_sq is not None or have_pair:
        curve = lss_curve(x, y, min(len(x), len(y)), scale=args.scale)
        outcome = select_k_known_noise(
            curve, args.sigma0_sq, len(x), x.dim, args.alpha,
            sigma=args.sigma, sigma_sharp=args.sigma_sharp,
        )
    else:
        outcome = select_k_unknown_noise(
            x, y, args.alpha, k_min=args.kmin, step=args.step, scale=args.scale
        )
    _emit_json(matching_payload(outcome), args.out)
    return 0


def cmd_synth(args) -> int:
    cfg = SynthConfig(
        n=args.n, m=args.m, d=args.d, k_star=args.k_star, tau=args.tau,
        sigma=args.sigma, sigma_sharp=args.sigma_sharp, seed=_seed(args),
    )
    x, y, truth = generate_instance(cfg)
    prefix = args.out_prefix
    paths = {
        "x": f"{prefix}_x.csv",
        "y": f"{prefix}_y.csv",
        "theta": f"{prefix}_theta.csv",
        "theta_sharp": f"{prefix}_theta_sharp.csv",
    }
    save_feature_csv(x, paths["x"])
    save_feature_csv(y, paths["y"])
    save_feature_csv(truth.theta, paths["theta"])
    save_feature_csv(truth.theta_sharp, paths["theta_sharp"])
    summary = {
        "n": cfg.n, "m": cfg.m, "d": cfg.d, "k_star": cfg.k_star,
        "tau": cfg.tau, "sigma": cfg.sigma, "sigma_sharp": cfg.sigma_sharp,
        "seed": cfg.seed,
        "kappa_bar_all": kappa_bar_all(truth) if truth.noise_variance_sum > 0 else None,
        "pairs": [[i, j] for i, j in truth.pi_star.sorted_pairs()],
        "files": paths,
    }
    with open(f"{prefix}_gt.json", "w", encoding="utf-8") as handle:
        json.dump(summary, handle)
        handle.write("\n")
    print(f"wrote {prefix}_x.csv, {prefix}_y.csv, {prefix}_theta*.csv, {prefix}_gt.json")
    return 0


def _bench_config(args) -> SynthConfig:
    return SynthConfig(
        n=args.n, m=args.m, d=args.d, k_star=args.k_star, tau=1.0,
        sigma=args.sigma, sigma_sharp=args.sigma_sharp, seed=_seed(args),
    )


def cmd_bench_precision(args) -> int:
    table = run_precision_sweep(_bench_config(args), _parse_taus(args.taus), args.trials, args.k)
    table.to_csv(args.out)
    print(f"wrote {args.out}")
    if args.plot:
        from .plots import emit_plot_svg

        emit_plot_svg(table, args.plot_metric, args.plot)
        print(f"wrote {args.plot}")
    return 0


def cmd_bench_selection(args) -> int:
    if args.manifest is None:
        missing = [name for name, value in
                   (("--n", args.n), ("--m", args.m), ("--d", args.d),
                    ("--k-star", args.k_star), ("--taus", args.taus))
                   if value is None]
        if missing:
            raise _UsageError(f"sweep mode requires {', '.join(missing)} (or use --manifest)")
    if args.manifest:
        k_hats = []
        base = Path(args.manifest).parent
        with open(args.manifest, "r", encoding="utf-8") as handle:
            for raw in handle:
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                x_name, _, y_name = line.partition(",")
                if not y_name:
                    raise LssMatchError(f"manifest line needs 'x.csv,y.csv', got {line!r}")
                x = load_feature_csv(base / x_name.strip())
                y = load_feature_csv(base / y_name.strip())
                outcome = select_k_unknown_noise(x, y, args.alpha, k_min=args.kmin, step=args.step)
                k_hats.append(outcome.k_hat)
        if not k_hats:
            raise LssMatchError(f"manifest {args.manifest} lists no pairs")
        counts = save_histogram_csv(k_hats, args.out)
        print(f"wrote {args.out}")
        if args.plot:
            from .plots import emit_histogram_svg

            emit_histogram_svg(counts, args.plot)
            print(f"wrote {args.plot}")
        return 0
    table = run_selection_sweep(
        _bench_config(args), _parse_taus(args.taus), args.trials, args.mode,
        alpha=args.alpha, k_min=args.kmin, step=args.step,
    )
    table.to_csv(args.out)
    print(f"wrote {args.out}")
    if args.plot:
        from .plots import emit_plot_svg

        emit_plot_svg(table, args.plot_metric, args.plot)
        print(f"wrote {args.plot}")
    return 0


def _add_instance_flags(parser, *, required=True):
    parser.add_argument("--n", type=int, required=required, help="left set size")
    parser.add_argument("--m", type=int, required=required, help="right set size")
    parser.add_argument("--d", type=int, required=required, help="vector dimension")
    parser.add_argument("--k-star", type=int, required=required, help="planted matching size")
    parser.add_argument("--sigma", type=float, default=1.0, help="left noise level")
    parser.add_argument("--sigma-sharp", type=float, default=1.0, help="right noise level")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed (default: ${SEED_ENV_VAR} or {DEFAULT_SEED})")


def build_parser() -> _Parser:
    parser = _Parser(prog="lssmatch", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", parser_class=_Parser, required=True)

    rate = commands.add_parser("rate", help="print the separation threshold")
    rate.add_argument("--n", type=int, required=True)
    rate.add_argument("--m", type=int, required=True)
    rate.add_argument("--d", type=int, required=True)
    rate.add_argument("--alpha", type=float, default=0.01)
    rate.set_defaults(func=cmd_rate)

    match = commands.add_parser("match", help="fixed-size matching of two CSVs")
    match.add_argument("--x", required=True, help="left feature CSV")
    match.add_argument("--y", required=True, help="right feature CSV")
    match.add_argument("--k", type=int, required=True, help="matching size")
    match.add_argument("--scale", type=float, default=None, help="cost quantization scale")
    match.add_argument("--out", default=None, help="matching JSON path (default: stdout)")
    match.set_defaults(func=cmd_match)

    curve = commands.add_parser("curve", help="dump the optimal-cost curve as CSV")
    curve.add_argument("--x", required=True)
    curve.add_argument("--y", required=True)
    curve.add_argument("--k-max", type=int, default=None, help="default min(n, m)")
    curve.add_argument("--scale", type=float, default=None)
    curve.add_argument("--out", default=None, help="curve CSV path (default: stdout)")
    curve.set_defaults(func=cmd_curve)

    select = commands.add_parser("select", help="select the matching size")
    select.add_argument("--x", required=True)
    select.add_argument("--y", required=True)
    select.add_argument("--alpha", type=float, default=0.01)
    select.add_argument("--sigma0-sq", type=float, default=None,
                        help="total noise variance (known-noise rule)")
    select.add_argument("--sigma", type=float, default=None,
                        help="left noise level (known-noise rule, with --sigma-sharp)")
    select.add_argument("--sigma-sharp", type=float, default=None)
    select.add_argument("--kmin", type=int, default=1, help="first size to examine")
    select.add_argument("--step", type=int, default=1, help="coarse scan stride")
    select.add_argument("--scale", type=float, default=None)
    select.add_argument("--out", default=None, help="outcome JSON path (default: stdout)")
    select.set_defaults(func=cmd_select)

    synth = commands.add_parser("synth", help="write a generated instance to files")
    _add_instance_flags(synth)
    synth.add_argument("--tau", type=float, required=True, help="mean spread parameter")
    synth.add_argument("--out-prefix", required=True)
    synth.set_defaults(func=cmd_synth)

    bench = commands.add_parser("bench", help="Monte-Carlo sweeps")
    experiments = bench.add_subparsers(dest="experiment", parser_class=_Parser, required=True)

    precision = experiments.add_parser("precision", help="fixed-size matching quality sweep")
    _add_instance_flags(precision)
    precision.add_argument("--k", type=int, required=True, help="matching size to solve at")
    precision.add_argument("--taus", required=True, help="comma-separated tau grid")
    precision.add_argument("--trials", type=int, default=50)
    precision.add_argument("--out", required=True, help="table CSV path")
    precision.add_argument("--plot", default=None, help="optional SVG path")
    precision.add_argument("--plot-metric", default="precision",
                           choices=["precision", "subset_recovery"])
    precision.set_defaults(func=cmd_bench_precision)

    selection = experiments.add_parser("selection", help="size-selection sweep or manifest run")
    _add_instance_flags(selection, required=False)
    selection.add_argument("--taus", default=None, help="comma-separated tau grid")
    selection.add_argument("--trials", type=int, default=50)
    selection.add_argument("--mode", choices=["known-noise", "unknown-noise"],
                           default="unknown-noise")
    selection.add_argument("--alpha", type=float, default=0.01)
    selection.add_argument("--kmin", type=int, default=1)
    selection.add_argument("--step", type=int, default=1)
    selection.add_argument("--manifest", default=None,
                           help="file of 'x.csv,y.csv' lines; emits a k_hat histogram instead")
    selection.add_argument("--out", required=True, help="table CSV path")
    selection.add_argument("--plot", default=None, help="optional SVG path")
    selection.add_argument("--plot-metric", default="k_hat",
                           choices=["k_hat", "exact_recovery", "sigma_bar_sq"])
    selection.set_defaults(func=cmd_bench_selection)

    return parser


def cli_dispatch(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 0
    try:
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except LssMatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_dispatch(sys.argv[1:]))
