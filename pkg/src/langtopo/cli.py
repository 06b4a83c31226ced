"""Command line entry point: ``langtopo <stage> --config run.yaml [flags]``."""
from __future__ import annotations

import argparse
import logging
import sys

from .pipeline import STAGES, Outputs, PipelineConfig, StageError, run_pipeline, run_stage, write_manifest


def _parser():
    p = argparse.ArgumentParser(prog="langtopo", description="Run the langtopo pipeline, whole or one stage at a time.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in (*STAGES, "run"):
        sp = sub.add_parser(name, help="full pipeline" if name == "run" else f"{name} stage")
        sp.add_argument("--config", help="YAML configuration file")
        sp.add_argument("--input", help="value table CSV")
        sp.add_argument("--format", choices=["long", "wide"], help="long: Language_ID,Parameter_ID,Value rows; wide: one row per language")
        sp.add_argument("--dims", type=int, help="MCA dimensions kept per sub-cloud")
        sp.add_argument("--metric", choices=["wasserstein", "bottleneck"], help="diagram distance")
        sp.add_argument("--q", type=float, help="Wasserstein order")
        sp.add_argument("--ground", choices=["Lq", "Linf"], help="ground metric between diagram points")
        sp.add_argument("--exact", action="store_true", default=None, help="enumerate every split instead of sampling")
        sp.add_argument("--permutations", type=int, help="number of random relabelings")
        sp.add_argument("--seed", type=int, help="random seed")
        sp.add_argument("--grouping", help="CSV with Language_ID,Group")
        sp.add_argument("--workers", type=int, help="worker processes, 0 for one per CPU")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("-v", "--verbose", action="store_true", help="log progress")
    return p


def main(argv=None):
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    overrides = {
        k: getattr(args, k)
        for k in ("input", "format", "dims", "metric", "q", "ground", "exact", "permutations", "seed", "grouping", "workers", "out")
    }
    try:
        cfg = PipelineConfig.load(args.config, **overrides)
    except (OSError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.command == "run":
            run_pipeline(cfg)
        else:
            out = Outputs(cfg.out)
            run_stage(args.command, cfg, out)
            write_manifest(out.root)
    except StageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
