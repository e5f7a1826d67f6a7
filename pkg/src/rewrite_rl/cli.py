"""Command-line entry point: ``rewrite-rl <subcommand> ...``.

Exit codes: 0 success, 1 domain or file error (message on stderr), 2 usage
error. ``REWRITE_RL_LOG`` (off | info | debug) controls diagnostics on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .abstraction import FEATURE_NAMES, FeatureVector, extract
from .classify import (
    Platform,
    accuracy,
    class_names,
    fit,
    load_corpus,
    load_tree,
    predict,
    save_tree,
)
from .codemodel import parse, print_unit
from .errors import RewriteRLError
from .rlengine import (
    BEST_REWARD,
    LearnConfig,
    QTable,
    TrainingGraph,
    graph_from_sequence,
    train,
    transform_greedy,
)
from .rules import apply_rule, default_registry, find_sites, format_site

log = logging.getLogger("rewrite_rl")


def _configure_logging():
    level = os.environ.get("REWRITE_RL_LOG", "off").strip().lower()
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    log.handlers[:] = [handler]
    log.setLevel({"debug": logging.DEBUG, "info": logging.INFO}.get(level, logging.CRITICAL + 1))


def _read(path: str) -> str:
    return Path(path).read_text()


def _emit(text: str, out: Optional[str]):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def cmd_extract(args) -> int:
    fv = extract(parse(_read(args.file)))
    if args.json:
        sys.stdout.write(json.dumps(list(fv)) + "\n")
    else:
        width = max(map(len, FEATURE_NAMES))
        for i, (name, v) in enumerate(zip(FEATURE_NAMES, fv)):
            sys.stdout.write(f"{i:2d}  {name:<{width}}  {v}\n")
    return 0


def cmd_apply(args) -> int:
    unit = parse(_read(args.file))
    sites = find_sites(unit, args.rule)
    if not sites:
        raise RewriteRLError(f"rule {args.rule} does not match anywhere in {args.file}")
    if not 0 <= args.site < len(sites):
        raise RewriteRLError(f"site index {args.site} out of range (rule {args.rule} has {len(sites)} site(s))")
    result = apply_rule(unit, args.rule, sites[args.site])
    log.info("applied rule %d at %s", args.rule, format_site(result.site))
    _emit(print_unit(result.unit), args.output)
    return 0


def cmd_classify_fit(args) -> int:
    samples = load_corpus(args.corpus)
    tree = fit(samples, min_samples=args.min_samples, max_depth=args.max_depth)
    save_tree(tree, args.output)
    acc = accuracy(tree, samples)
    if args.json:
        sys.stdout.write(json.dumps({"samples": len(samples), "training_accuracy": acc}) + "\n")
    else:
        sys.stdout.write(f"fitted on {len(samples)} samples, training accuracy {acc:.3f}\n")
    return 0


def _parse_features(text: str) -> FeatureVector:
    try:
        return FeatureVector.from_list(text.replace(" ", "").split(","))
    except ValueError as exc:
        raise RewriteRLError(f"bad --features: {exc}") from None


def cmd_classify_predict(args) -> int:
    tree = load_tree(args.tree)
    if args.source:
        x = extract(parse(_read(args.source)))
    elif args.features:
        x = _parse_features(args.features)
    else:
        raise RewriteRLError("give --features or --source")
    cls = class_names(predict(tree, x))
    if args.json:
        sys.stdout.write(json.dumps({"features": list(x), "classes": cls}) + "\n")
    else:
        sys.stdout.write(" ".join(cls) + "\n")
    return 0


def cmd_train(args) -> int:
    graph = TrainingGraph.load(args.graph)
    cfg = LearnConfig(
        alpha=args.alpha,
        gamma=args.gamma,
        q_init=args.q_init,
        episodes=args.episodes,
        max_steps=args.max_steps,
        seed=args.seed,
        epsilon=args.epsilon,
    )
    q = train(graph, cfg)
    _emit(q.dumps(), args.output)
    return 0


def cmd_make_graph(args) -> int:
    graph = TrainingGraph.load(args.graph) if args.graph else None
    try:
        seq = [int(x) for x in args.sequence.split(",") if x.strip()]
    except ValueError:
        raise RewriteRLError(f"bad --sequence {args.sequence!r}") from None
    graph = graph_from_sequence(parse(_read(args.file)), seq, args.reward, graph)
    _emit(_dump(graph.validate().to_dict()), args.output)
    return 0


def cmd_run(args) -> int:
    from .report import run_report, write_run_artifacts

    unit = parse(_read(args.file))
    q = QTable.load(args.qtable)
    tree = load_tree(args.tree)
    target = Platform.parse(args.target)
    rules = default_registry()
    result = transform_greedy(unit, q, rules, tree, target, args.max_steps, random.Random(args.seed))
    if args.output:
        Path(args.output).write_text(print_unit(result.unit))
    if args.figures_dir:
        for path in write_run_artifacts(result, q, args.figures_dir, target):
            log.info("wrote %s", path)
    report = run_report(result, target, args.file, rules, timing=args.timing)
    if args.json:
        sys.stdout.write(_dump(report))
    else:
        for n, st in enumerate(report["steps"], start=1):
            sys.stdout.write(f"step {n}: R{st['rule']} ({st['rule_name']}) at {st['site']}\n")
        sys.stdout.write(f"terminal: {result.terminal} after {len(result.steps)} step(s), target {target.value}\n")
        if args.timing:
            sys.stdout.write(f"elapsed: {result.elapsed:.4f} s\n")
    return 0


def cmd_qtable_show(args) -> int:
    from .report import plot_qtable, qtable_csv

    q = QTable.load(args.qtable)
    if args.plot:
        plot_qtable(q, args.plot)
    if args.json:
        sys.stdout.write(q.dumps())
    elif args.csv:
        sys.stdout.write(qtable_csv(q))
    else:
        width = max([len(s) for s in q.known_states] + [5])
        header = f"{'state':<{width}}  " + "  ".join(f"{'R' + str(a):>12}" for a in q.known_actions) + "  best"
        sys.stdout.write(header + "\n")
        for s in q.known_states:
            row = q.row(s)
            cells = "  ".join(f"{v:12.8g}" for v in row.values())
            best = "-" if s in q.final_states or not row else f"R{max(row, key=lambda a: (row[a], -a))}"
            sys.stdout.write(f"{s:<{width}}  {cells}  {best}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rewrite-rl", description="Learned rule selection for C source rewriting.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("extract", help="print the 15-feature abstraction of a source file")
    s.add_argument("file")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_extract)

    s = sub.add_parser("apply", help="apply one rewrite rule")
    s.add_argument("file")
    s.add_argument("--rule", type=int, required=True)
    s.add_argument("--site", type=int, default=0, help="index into the rule's sites (default 0)")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_apply)

    s = sub.add_parser("classify", help="fit or query the readiness classifier")
    csub = s.add_subparsers(dest="classify_command", required=True)
    c = csub.add_parser("fit")
    c.add_argument("--corpus", required=True)
    c.add_argument("-o", "--output", required=True)
    c.add_argument("--min-samples", type=int, default=1)
    c.add_argument("--max-depth", type=int)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_classify_fit)
    c = csub.add_parser("predict")
    c.add_argument("--tree", required=True)
    c.add_argument("--features", help="15 comma-separated integers")
    c.add_argument("--source", help="extract features from this source file instead")
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_classify_predict)

    s = sub.add_parser("train", help="learn a Q-table from a training graph")
    s.add_argument("--graph", required=True)
    s.add_argument("--alpha", type=float, default=0.5)
    s.add_argument("--gamma", type=float, default=0.6)
    s.add_argument("--q-init", type=float, default=1.0)
    s.add_argument("--episodes", type=int, default=500)
    s.add_argument("--max-steps", type=int, default=50)
    s.add_argument("--epsilon", type=float, default=0.0)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output")
    s.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("make-graph", help="record a rule sequence on a source file as a training graph")
    s.add_argument("file")
    s.add_argument("--sequence", required=True, help="comma-separated rule ids, e.g. 0,0,0,1")
    s.add_argument("--reward", type=float, default=BEST_REWARD)
    s.add_argument("--graph", help="extend this existing graph")
    s.add_argument("-o", "--output")
    s.set_defaults(func=cmd_make_graph)

    s = sub.add_parser("run", help="transform a source file greedily until it is ready for a platform")
    s.add_argument("file")
    s.add_argument("--qtable", required=True)
    s.add_argument("--tree", required=True)
    s.add_argument("--target", required=True, help="fpga | gpu | sm-cpu | dm-cpu")
    s.add_argument("--max-steps", type=int, default=50)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("-o", "--output", help="write the transformed source here")
    s.add_argument("--figures-dir", help="write trajectory.csv and PNG figures here")
    s.add_argument("--timing", action="store_true", help="include wall time in the report")
    s.add_argument("--json", action="store_true")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("qtable-show", help="display a Q-table")
    s.add_argument("qtable")
    s.add_argument("--json", action="store_true")
    s.add_argument("--csv", action="store_true")
    s.add_argument("--plot", help="write a heatmap PNG here")
    s.set_defaults(func=cmd_qtable_show)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except RewriteRLError as exc:
        print(f"rewrite-rl: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        name = exc.filename or ""
        print(f"rewrite-rl: error: {exc.strerror or exc}: {name}", file=sys.stderr)
        return 1
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        print(f"rewrite-rl: error: cannot read input: {exc}", file=sys.stderr)
        return 1


run_cli = main

if __name__ == "__main__":
    sys.exit(main())
