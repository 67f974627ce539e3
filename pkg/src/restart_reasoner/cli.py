"""Command-line entry point.

Exit codes: 0 for success or a positive verdict, 1 for a negative verdict,
2 for usage and data errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import kernels
from .config import ConfigError, GlobalConfig, load_config
from .corpus import STYLES, CorpusParams, generate_corpus
from .geometry import contact_graph
from .harness import (
    PREDICTORS, evaluate, fmt, read_rows_csv, report_csv, report_markdown, rows_to_markdown,
    scores_csv, trials_jsonl,
)
from .heuristics import solvable_one_shot
from .level import Level, LevelFormatError, LevelState, LevelValidationError, load_level, serialize_level, validate
from .oracle import AgentPolicy
from .propagation import propagation_matrix
from .trajectory import reachable_for, target_point

POLICY_ALIASES = {"naive": "naive", "naive-random-pig": "naive",
                  "greedy": "greedy", "greedy-max-damage": "greedy"}


class UsageError(Exception):
    pass


def _config(args) -> GlobalConfig:
    try:
        config = load_config(getattr(args, "config", None))
    except (OSError, ConfigError) as exc:
        raise UsageError(f"config: {exc}") from None
    for problem in config.dominance_problems():
        print(f"warning: {problem}", file=sys.stderr)
    return config


def _load(path: str, config: GlobalConfig | None = None) -> Level:
    k = config.propagation.k if config else 0.05
    try:
        return load_level(path, k=k)
    except OSError as exc:
        raise UsageError(f"{path}: {exc.strerror or exc}") from None
    except LevelValidationError as exc:
        raise UsageError(f"{path}: invalid level: " + "; ".join(exc.violations)) from None
    except LevelFormatError as exc:
        raise UsageError(f"{path}: {exc}") from None


def cmd_validate(args) -> int:
    try:
        level = load_level(args.level, check=False)
    except OSError as exc:
        raise UsageError(f"{args.level}: {exc.strerror or exc}") from None
    except LevelFormatError as exc:
        raise UsageError(f"{args.level}: {exc}") from None
    violations = validate(level)
    for v in violations:
        print(v)
    return 1 if violations else 0


def cmd_solvable(args) -> int:
    config = _config(args)
    level = _load(args.level, config)
    verdict = solvable_one_shot(LevelState.initial(level), config.propagation, config.trajectory)
    if verdict.solvable:
        shot, fmap = verdict.witness
        px, py = target_point(level.block(shot.target_block), shot.target_point)
        print("solvable")
        print(f"witness: block {shot.target_block} {shot.target_point} ({fmt(px)}, {fmt(py)}) "
              f"{shot.arc} angle {shot.angle:.6f} rad ({math.degrees(shot.angle):.3f} deg)")
        return 0
    print("unsolvable")
    print("pigs_unkillable: " + " ".join(str(i) for i in sorted(verdict.pigs_unkillable)))
    return 1


def cmd_analyze(args) -> int:
    config = _config(args)
    level = _load(args.level, config)
    graph = contact_graph(level, config.propagation.k)
    print(f"blocks: {len(level.blocks)}  pigs: {len(level.pigs)}  contacts: {graph.edge_count()}")
    reach = reachable_for(level, config.trajectory)
    print("reachable:")
    for bid, shots in sorted(reach.items()):
        if shots:
            desc = ", ".join(f"{s.target_point}/{s.arc} {math.degrees(s.angle):.2f}deg" for s in shots)
            print(f"  {bid}: {desc}")
    if args.matrix:
        ids, m = propagation_matrix(level, config.propagation)
        print("propagation (row = impact block):")
        print("      " + " ".join(f"{i:>6}" for i in ids))
        for i, row in zip(ids, m):
            print(f"{i:>6}" + " ".join(f"{v:6.3f}" for v in row))
    return 0


def _corpus(source: str, config: GlobalConfig) -> list[tuple[str, Level]]:
    if source.startswith("gen:"):
        try:
            seed_text, count_text = source[4:].split(",")
            seed, count = int(seed_text), int(count_text)
        except ValueError:
            raise UsageError("--corpus gen:SEED,COUNT expects two integers") from None
        if count < 1:
            return []
        levels = generate_corpus(CorpusParams(count=count), seed,
                                 oracle=config.oracle, trajectory=config.trajectory)
        return [(f"gen{seed}-{i:03d}", lv) for i, lv in enumerate(levels)]
    root = Path(source)
    if not root.is_dir():
        raise UsageError(f"{source}: not a directory")
    return [(p.stem, _load(str(p), config)) for p in sorted(root.glob("*.json"))]


def cmd_evaluate(args) -> int:
    config = _config(args)
    levels = _corpus(args.corpus, config)
    if not levels:
        raise UsageError("empty corpus")
    trials = args.trials if args.trials is not None else config.harness.trials
    if trials < 1 or args.jobs < 1:
        raise UsageError("--trials and --jobs must be at least 1")
    policy = AgentPolicy(POLICY_ALIASES[args.policy], args.seed)
    report = evaluate(levels, policy, config, trials=trials, predictor=args.predictor, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    title = f"Policy {policy.kind}, predictor {args.predictor}, {trials} trials per level"
    (out / "report.csv").write_text(report_csv(report), encoding="utf-8")
    (out / "report.md").write_text(report_markdown(report, title), encoding="utf-8")
    (out / "scores.csv").write_text(scores_csv(report), encoding="utf-8")
    if not args.no_audit:
        (out / "trials.jsonl").write_text(trials_jsonl(report), encoding="utf-8")
    print(report_markdown(report, title), end="")
    return 0


def cmd_generate(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be at least 1")
    config = _config(args)
    styles = tuple(args.styles.split(",")) if args.styles else STYLES
    try:
        params = CorpusParams(count=args.count, styles=styles)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for i, level in enumerate(generate_corpus(params, args.seed, oracle=config.oracle,
                                              trajectory=config.trajectory)):
        (out / f"level-{i:03d}.json").write_text(serialize_level(level), encoding="utf-8")
    print(f"wrote {args.count} levels to {out}")
    return 0


def cmd_report(args) -> int:
    try:
        text = Path(args.csv).read_text(encoding="utf-8")
        rows, average = read_rows_csv(text)
    except OSError as exc:
        raise UsageError(f"{args.csv}: {exc.strerror or exc}") from None
    except (ValueError, KeyError) as exc:
        raise UsageError(f"{args.csv}: {exc}") from None
    md = rows_to_markdown(rows, average, args.title or "")
    if args.out:
        Path(args.out).write_text(md, encoding="utf-8")
    else:
        print(md, end="")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="restart-reasoner",
                                     description="One-shot solvability and restart heuristics for a bird-flinging puzzle.")
    parser.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 (kernels: {kernels.BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(p):
        p.add_argument("--config", help="JSON config file (default: $RESTART_REASONER_CONFIG)")
        return p

    p = sub.add_parser("validate", help="check a level file")
    p.add_argument("level")
    p.set_defaults(func=cmd_validate)

    for name in ("solvable", "predict"):
        p = with_config(sub.add_parser(name, help="one-shot solvability verdict"))
        p.add_argument("level")
        p.set_defaults(func=cmd_solvable)

    p = with_config(sub.add_parser("analyze", help="contacts, reachable blocks and force spread"))
    p.add_argument("level")
    p.add_argument("--matrix", action="store_true", help="print the unit-impact propagation matrix")
    p.set_defaults(func=cmd_analyze)

    p = with_config(sub.add_parser("evaluate", help="paired restart trials over a corpus"))
    p.add_argument("--corpus", required=True, help="directory of level files, or gen:SEED,COUNT")
    p.add_argument("--policy", choices=sorted(POLICY_ALIASES), default="naive")
    p.add_argument("--trials", type=int, help="trials per level (default from config, 100)")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--predictor", choices=PREDICTORS, default="heuristic")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--seed", type=int, default=0, help="policy seed")
    p.add_argument("--no-audit", action="store_true", help="skip trials.jsonl")
    p.set_defaults(func=cmd_evaluate)

    p = with_config(sub.add_parser("generate", help="write a procedural corpus"))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--styles", help=f"comma-separated subset of {','.join(STYLES)}")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("report", help="render a report CSV as a Markdown table")
    p.add_argument("csv")
    p.add_argument("--out")
    p.add_argument("--title")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
