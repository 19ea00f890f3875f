"""Command line entry points.

Only stdlib is imported at module level: --threads must pin the BLAS pools
through environment variables before numpy is first loaded.
"""
from __future__ import annotations

import argparse
import os
import sys

_THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS",
                "NUMEXPR_NUM_THREADS", "VECLIB_MAXIMUM_THREADS")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="trsw",
        description="Thermal shallow water DG solver: batch runs and experiments.")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap BLAS/OpenMP threads (also fixes reduction "
                             "partitioning for reproducibility)")
    parser.add_argument("--seed", type=int, default=None,
                        help="seed for randomized test fixtures (exported as "
                             "TRSW_SEED; simulations are deterministic)")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="integrate a configured case")
    run_p.add_argument("config", help="path to a YAML run configuration")
    run_p.add_argument("--out", default=None,
                       help="output directory (overrides config/output.directory)")

    exp_p = sub.add_parser("experiment", help="run a named experiment suite")
    exp_p.add_argument("name",
                       choices=("spatial_w2", "temporal_conservation", "variants"))
    exp_p.add_argument("--out", default=None, help="output directory")
    return parser


def _apply_threads(threads) -> None:
    if threads is None:
        return
    if threads < 1:
        raise SystemExit("--threads must be >= 1")
    for var in _THREAD_VARS:
        os.environ[var] = str(threads)


def _run_command(args) -> int:
    from .config import load_config
    from .errors import BlowUpError, ConfigError, InvalidStateError
    from .runner import resolve_output_dir, run_simulation

    try:
        cfg = load_config(args.config)
    except (ConfigError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = args.out if args.out is not None else resolve_output_dir(cfg)
    try:
        result = run_simulation(cfg, out_dir=out)
    except (BlowUpError, InvalidStateError) as exc:
        print(f"run aborted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    d = result.drifts
    print(f"completed {result.steps} steps to t={result.t_seconds:.1f} s "
          f"in {result.wall_seconds:.1f} s wall")
    print(f"final drifts: relM={d['relM']:.3e} relS={d['relS']:.3e} "
          f"relE={d['relE']:.3e} relZ={d['relZ']:.3e} relW={d['relW']:.3e}")
    print(f"diagnostics: {result.diagnostics_file}")
    if result.snapshot_files:
        print(f"snapshots: {len(result.snapshot_files)} files in {out}")
    return EXIT_OK


def _experiment_command(args) -> int:
    from .errors import BlowUpError, ConfigError, InvalidStateError
    from .runner import EXPERIMENTS, OUTPUT_DIR_ENV

    out = args.out
    if out is None:
        base = os.environ.get(OUTPUT_DIR_ENV, "trsw_out")
        out = os.path.join(base, args.name)
    try:
        EXPERIMENTS[args.name](out, echo=print)
    except (BlowUpError, ConfigError, InvalidStateError) as exc:
        print(f"experiment aborted: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"experiment artifacts in {out}")
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    _apply_threads(args.threads)
    if args.seed is not None:
        os.environ["TRSW_SEED"] = str(args.seed)
    if args.command == "run":
        return _run_command(args)
    return _experiment_command(args)


if __name__ == "__main__":
    sys.exit(main())
