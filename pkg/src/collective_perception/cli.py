"""Command-line entry point: ``cpsim run | sweep | summarize``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

from .harness.config import ConfigError, load_config
from .harness.output import emit, read_episodes
from .harness.runner import BatchError, run_batch
from .harness.stats import summarize

OUT_ENV = "CPSIM_OUT"


def _default_out() -> str:
    return os.environ.get(OUT_ENV, "results")


def parse_range(text: str) -> tuple[float, ...]:
    """``start:stop:step`` with an inclusive stop, or a comma list."""
    if ":" not in text:
        return tuple(float(v) for v in text.split(","))
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}")
    start, stop, step = (float(p) for p in parts)
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    count = int(round((stop - start) / step)) + 1
    return tuple(round(start + i * step, 10) for i in range(count))


def _execute(config, args) -> int:
    if args.seed is not None:
        config = replace(config, root_seed=args.seed)
    if getattr(args, "repetitions", None):
        config = replace(config, repetitions=args.repetitions)
    rows = list(run_batch(config, workers=args.workers, trace=args.trace))
    paths = emit(rows, None, args.out)
    print(f"{config.name}: {len(rows)} episodes -> {Path(args.out).resolve()} "
          f"({len(paths)} files)")
    return 0


def cmd_run(args) -> int:
    return _execute(load_config(args.config), args)


def cmd_sweep(args) -> int:
    config = load_config(args.config)
    fractions = args.malicious
    n = config.template.n_agents
    for frac in fractions:
        if not 0.0 <= frac < 1.0 or int(frac * n + 0.5) >= n:
            raise ConfigError("--malicious", None, f"{frac} is not a usable malicious fraction")
    return _execute(replace(config, malicious_fractions=fractions), args)


def cmd_summarize(args) -> int:
    records = read_episodes(args.input)
    out = args.out or args.input
    emit(records, summarize(records) if records else [], out)
    for group in (summarize(records) if records else []):
        label = ", ".join(f"{v}" for v in group.key)
        print(f"{label}: n={group.n} accuracy={group.means['pm3_1']:.4f} "
              f"time={group.means['pm3_2']:.3f} min")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpsim", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True,
                       help="config file, or a shipped preset name such as 'formative'")
        p.add_argument("--seed", type=int, help="override the root seed")
        p.add_argument("--out", default=_default_out(),
                       help=f"output directory (default ${OUT_ENV} or ./results)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--trace", action="store_true", help="write per-step agent traces")
        p.add_argument("--repetitions", type=int, help="override repetitions per scenario")

    run = sub.add_parser("run", help="run a batch")
    common(run)
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run a batch over malicious fractions")
    sweep.add_argument("--malicious", type=parse_range, required=True,
                       help="start:stop:step (inclusive), e.g. 0:0.9:0.1")
    common(sweep)
    sweep.set_defaults(func=cmd_sweep)

    summ = sub.add_parser("summarize", help="rebuild summaries from episodes.csv")
    summ.add_argument("--in", dest="input", required=True, help="directory with episodes.csv")
    summ.add_argument("--out", help="output directory (default: same as --in)")
    summ.set_defaults(func=cmd_summarize)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, BatchError, FileNotFoundError, ValueError) as exc:
        print(f"cpsim: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
