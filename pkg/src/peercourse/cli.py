"""Command line front end: `sim run` for experiments, `sim stats` for tests.

`sim run` executes a seeded multi-round cohort under one condition and writes
a long-format CSV of round metrics. `sim stats` compares two samples (one
number per line) with a pooled two-sample t-test.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import simulation, stats
from .errors import ConfigInvalid, PeerCourseError
from .model import Condition


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sim",
        description="Seeded peer review experiments and sample statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate a cohort and export round metrics")
    run.add_argument("--cohort", type=int, help="number of agents (>= 2)")
    run.add_argument("--rounds", type=int, default=1, help="rounds to play (default 1)")
    run.add_argument(
        "--condition",
        required=True,
        choices=[c.value for c in Condition],
        help="review condition",
    )
    run.add_argument("--seed", type=int, default=0, help="master RNG seed (default 0)")
    run.add_argument("--k", type=int, default=3, help="reviews given/received per agent")
    run.add_argument("--agents", metavar="FILE", help="JSON list of agent profiles")
    run.add_argument("--out", metavar="DIR", default=".", help="output directory")

    st = sub.add_parser("stats", help="pooled two-sample t-test between two files")
    st.add_argument("--a", required=True, metavar="FILE", help="sample A, one value per line")
    st.add_argument("--b", required=True, metavar="FILE", help="sample B, one value per line")
    return parser


def _read_sample(path: str) -> list[float]:
    values = []
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigInvalid(f"cannot read {path}: {exc}") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            values.append(float(stripped))
        except ValueError as exc:
            raise ConfigInvalid(f"{path}:{lineno}: not a number: {stripped!r}") from exc
    return values


def _cmd_run(args: argparse.Namespace) -> int:
    agents = simulation.load_agents(args.agents) if args.agents else None
    cohort = args.cohort if args.cohort is not None else (len(agents) if agents else None)
    if cohort is None:
        raise ConfigInvalid("--cohort is required when no --agents file is given")
    config = simulation.SimulationConfig(
        cohort=cohort,
        rounds=args.rounds,
        condition=Condition(args.condition),
        seed=args.seed,
        k=args.k,
        agents=agents,
    )
    metrics = simulation.run_simulation(config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / f"sim_{config.condition.value}_seed{config.seed}.csv"
    simulation.export_csv(metrics, out_path)
    for m in metrics:
        mean = "n/a" if m.mean_usefulness is None else f"{m.mean_usefulness:.3f}"
        print(
            f"{m.round_id}: n={m.cohort} reviews={m.n_reviews} "
            f"mean_usefulness={mean} assortativity={m.assortativity:.3f} "
            f"messages={m.message_count}"
        )
    print(f"wrote {out_path}")
    return 0


def _cmd_stats(args: argparse.Namespace) -> int:
    a = _read_sample(args.a)
    b = _read_sample(args.b)
    for label, sample in (("a", a), ("b", b)):
        m = stats.mean(sample)
        s = stats.std(sample) if len(sample) >= 2 else float("nan")
        print(f"{label}: n={len(sample)} mean={m:.9g} std={s:.9g}")
    result = stats.pooled_t_test(a, b)
    print(f"t={result.t:.9g} df={result.df} p={result.p:.9g}")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        return _cmd_stats(args)
    except PeerCourseError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
