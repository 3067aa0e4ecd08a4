"""Command-line entry point: ``swb-assort <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 ingestion error,
4 computation error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from swb_assort.assortativity import DEFAULT_EPSILONS, threshold_sweep
from swb_assort.errors import ConfigError, IngestionError, SwbAssortError
from swb_assort.graph import (
    ActivityMap,
    build_directed_graph,
    compute_jaccard_weights,
    extract_reciprocal,
    filter_active_users,
    graph_stats,
    largest_connected_component,
)
from swb_assort.graphio import read_edge_list, read_graph, write_graph, write_stats
from swb_assort.pipeline import PipelineConfig, run_pipeline
from swb_assort.sentiment import (
    iter_tweets,
    load_lexicon,
    read_scores,
    score_users,
    swb_distribution,
    tweet_counts,
    write_histogram,
    write_scores,
)
from swb_assort.synth import FixtureSpec, generate_fixture

logger = logging.getLogger("swb_assort")


def parse_epsilons(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None


def _diameter(text: str) -> str:
    mode = text.replace("-", "_")
    if mode not in ("exact", "double_sweep", "auto"):
        raise argparse.ArgumentTypeError("expected exact, double-sweep or auto")
    return mode


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, required=True, metavar="DIR", help="output directory")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1, metavar="N")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swb-assort", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build-graph", help="follower edges -> weighted friend graph (largest component)")
    p.add_argument("--edges", type=Path, required=True)
    p.add_argument("--tweets", type=Path, help="apply the activity filter using these tweets")
    p.add_argument("--min-tweets", type=int, default=180)
    p.add_argument("--jaccard-convention", choices=("inclusive", "exclusive"), default="inclusive")
    p.add_argument("--keep-all-components", action="store_true")
    _add_common(p)

    p = sub.add_parser("score", help="tweets + lexicon -> per-user SWB scores")
    p.add_argument("--tweets", type=Path, required=True)
    p.add_argument("--lexicon", type=Path, required=True)
    p.add_argument("--count-mode", choices=("tweet", "occurrence"), default="tweet")
    p.add_argument("--min-tweets", type=int, default=0, help="skip users with fewer tweets")
    p.add_argument("--bin-width", type=float, default=0.05)
    _add_common(p)

    p = sub.add_parser("stats", help="structural statistics of a serialized friend graph")
    p.add_argument("--graph", type=Path, required=True)
    p.add_argument("--diameter", type=_diameter, default="auto")
    _add_common(p)

    for name, helptext in (
        ("assort", "pairwise and neighbourhood assortativity at one threshold"),
        ("sweep", "assortativity across edge-weight thresholds"),
    ):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--graph", type=Path, required=True)
        p.add_argument("--scores", type=Path, required=True)
        if name == "assort":
            p.add_argument("--epsilon", type=float, default=0.0)
        else:
            p.add_argument("--epsilons", type=parse_epsilons, default=DEFAULT_EPSILONS)
        p.add_argument("--min-p", type=float, default=0.001)
        p.add_argument("--orientation", choices=("both", "single"), default="both")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        _add_common(p)

    p = sub.add_parser("synth", help="write a synthetic fixture (edges, tweets, lexicon, planted graph)")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--h", type=float, default=20.0, help="homophily strength")
    p.add_argument("--mean-degree", type=float, default=10.0)
    p.add_argument("--seed", type=int, default=42)
    _add_common(p)

    p = sub.add_parser("run", help="full pipeline")
    p.add_argument("--edges", type=Path, required=True)
    p.add_argument("--tweets", type=Path, required=True)
    p.add_argument("--lexicon", type=Path, required=True)
    p.add_argument("--min-tweets", type=int, default=180)
    p.add_argument("--jaccard-convention", choices=("inclusive", "exclusive"), default="inclusive")
    p.add_argument("--count-mode", choices=("tweet", "occurrence"), default="tweet")
    p.add_argument("--epsilons", type=parse_epsilons, default=DEFAULT_EPSILONS)
    p.add_argument("--min-p", type=float, default=0.001)
    p.add_argument("--orientation", choices=("both", "single"), default="both")
    p.add_argument("--diameter", type=_diameter, default="auto")
    p.add_argument("--bin-width", type=float, default=0.05)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--seed", type=int, default=0)
    _add_common(p)
    return parser


def _check_workers(args) -> None:
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")


def cmd_build_graph(args) -> int:
    records = read_edge_list(args.edges)
    if not records:
        raise IngestionError("edge list contains no records", path=args.edges)
    g = extract_reciprocal(build_directed_graph(records))
    if args.tweets is not None:
        g = filter_active_users(g, ActivityMap(tweet_counts(iter_tweets(args.tweets))), args.min_tweets)
    g = compute_jaccard_weights(g, args.jaccard_convention, args.workers)
    if not args.keep_all_components:
        g = largest_connected_component(g)
    args.out.mkdir(parents=True, exist_ok=True)
    write_graph(g, args.out / "graph.txt")
    print(f"nodes {g.number_of_nodes()} edges {g.number_of_edges()}")
    return 0


def cmd_score(args) -> int:
    lex = load_lexicon(args.lexicon)
    users = None
    if args.min_tweets > 0:
        counts = tweet_counts(iter_tweets(args.tweets))
        users = [u for u, c in counts.items() if c >= args.min_tweets]
    scores = score_users(iter_tweets(args.tweets), lex, args.count_mode, users=users)
    if not len(scores):
        raise IngestionError("no users to score", path=args.tweets)
    args.out.mkdir(parents=True, exist_ok=True)
    write_scores(scores, args.out / "scores.csv")
    write_histogram(swb_distribution(scores, args.bin_width), args.out / "histogram.csv")
    print(f"scored {len(scores)} users")
    return 0


def cmd_stats(args) -> int:
    stats = graph_stats(read_graph(args.graph), args.diameter, workers=args.workers)
    args.out.mkdir(parents=True, exist_ok=True)
    write_stats(stats, args.out / "stats.json")
    print(json.dumps(stats.to_dict(), sort_keys=True))
    return 0


def _write_report(report, args, stem: str) -> None:
    args.out.mkdir(parents=True, exist_ok=True)
    body = report.to_csv() if args.format == "csv" else report.to_json()
    (args.out / f"{stem}.{args.format}").write_text(body, encoding="utf-8", newline="\n")
    sys.stdout.write(body)


def cmd_sweep(args) -> int:
    g, scores = read_graph(args.graph), read_scores(args.scores)
    epsilons = (args.epsilon,) if args.command == "assort" else args.epsilons
    report = threshold_sweep(g, scores, epsilons, args.min_p, args.orientation, args.workers)
    _write_report(report, args, "assortativity")
    return 0


def cmd_synth(args) -> int:
    fx = generate_fixture(FixtureSpec(n=args.n, h=args.h, mean_degree=args.mean_degree, seed=args.seed))
    paths = fx.write(args.out)
    for key, path in paths.items():
        print(f"{key}\t{path}")
    return 0


def cmd_run(args) -> int:
    config = PipelineConfig(
        edges=args.edges,
        tweets=args.tweets,
        lexicon=args.lexicon,
        out=args.out,
        min_tweets=args.min_tweets,
        jaccard_convention=args.jaccard_convention,
        count_mode=args.count_mode,
        epsilons=args.epsilons,
        min_p=args.min_p,
        orientation=args.orientation,
        diameter=args.diameter,
        bin_width=args.bin_width,
        format=args.format,
        workers=args.workers,
        seed=args.seed,
    )
    result = run_pipeline(config)
    for key, path in result.files.items():
        print(f"{key}\t{path}")
    return 0


COMMANDS = {
    "build-graph": cmd_build_graph,
    "score": cmd_score,
    "stats": cmd_stats,
    "assort": cmd_sweep,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
    "run": cmd_run,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        _check_workers(args)
        return COMMANDS[args.command](args)
    except SwbAssortError as exc:
        print(f"swb-assort {args.command}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except ValueError as exc:
        # invariant violations surfacing from graph construction on bad input
        print(f"swb-assort {args.command}: error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
