"""End-to-end run: follower edges + tweets + lexicon -> report bundle."""

from __future__ import annotations

import contextlib
import hashlib
import logging
import os
import platform
import shutil
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

from swb_assort import __version__
from swb_assort.assortativity import DEFAULT_EPSILONS, ORIENTATIONS, _check_epsilons, threshold_sweep
from swb_assort.errors import ComputationError, ConfigError, IngestionError, SwbAssortError
from swb_assort.graph import (
    DEFAULT_DIAMETER_NODE_BUDGET,
    DIAMETER_MODES,
    JACCARD_CONVENTIONS,
    ActivityMap,
    build_directed_graph,
    compute_jaccard_weights,
    extract_reciprocal,
    filter_active_users,
    graph_stats,
    largest_connected_component,
)
from swb_assort.graphio import read_edge_list, write_graph, write_json, write_stats
from swb_assort.sentiment import (
    COUNT_MODES,
    iter_tweets,
    load_lexicon,
    score_users,
    swb_distribution,
    tweet_counts,
    write_histogram,
    write_scores,
)

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"


@dataclass
class PipelineConfig:
    edges: Path
    tweets: Path
    lexicon: Path
    out: Path
    min_tweets: int = 180
    window_days: int = 180
    jaccard_convention: str = "inclusive"
    count_mode: str = "tweet"
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS
    min_p: float = 0.001
    orientation: str = "both"
    diameter: str = "auto"
    diameter_node_budget: int = DEFAULT_DIAMETER_NODE_BUDGET
    bin_width: float = 0.05
    format: str = "csv"
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    seed: int = 0

    def validate(self) -> None:
        for name in ("edges", "tweets", "lexicon"):
            path = Path(getattr(self, name))
            if not path.is_file():
                raise ConfigError(f"--{name}: no such file {path}")
        if self.min_tweets < 0:
            raise ConfigError("--min-tweets must be >= 0")
        if self.window_days <= 0:
            raise ConfigError("window must be positive")
        if self.jaccard_convention not in JACCARD_CONVENTIONS:
            raise ConfigError(f"unknown Jaccard convention {self.jaccard_convention!r}")
        if self.count_mode not in COUNT_MODES:
            raise ConfigError(f"unknown count mode {self.count_mode!r}")
        if self.diameter not in DIAMETER_MODES:
            raise ConfigError(f"unknown diameter mode {self.diameter!r}")
        if self.orientation not in ORIENTATIONS:
            raise ConfigError(f"unknown orientation {self.orientation!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.workers < 1:
            raise ConfigError("--workers must be >= 1")
        if not self.bin_width > 0:
            raise ConfigError("bin width must be positive")
        self.epsilons = tuple(_check_epsilons(self.epsilons))

    def as_dict(self) -> dict:
        return {
            "edges": str(self.edges),
            "tweets": str(self.tweets),
            "lexicon": str(self.lexicon),
            "out": str(self.out),
            "min_tweets": self.min_tweets,
            "window_days": self.window_days,
            "jaccard_convention": self.jaccard_convention,
            "count_mode": self.count_mode,
            "epsilons": list(self.epsilons),
            "min_p": self.min_p,
            "orientation": self.orientation,
            "diameter": self.diameter,
            "diameter_node_budget": self.diameter_node_budget,
            "bin_width": self.bin_width,
            "format": self.format,
            "workers": self.workers,
            "seed": self.seed,
        }


class StageError(SwbAssortError):
    """Wraps a failure with the name of the pipeline stage that raised it."""

    def __init__(self, stage: str, cause: SwbAssortError):
        self.stage = stage
        self.cause = cause
        self.exit_code = cause.exit_code
        super().__init__(f"[{stage}] {cause}")


@contextlib.contextmanager
def stage(name: str):
    logger.info("stage %s", name)
    try:
        yield
    except StageError:
        raise
    except SwbAssortError as exc:
        raise StageError(name, exc) from exc
    except (ValueError, ArithmeticError) as exc:
        raise StageError(name, ComputationError(str(exc))) from exc


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class RunResult:
    out: Path
    files: dict[str, Path]
    stats: object
    report: object
    manifest: dict


def run_pipeline(config: PipelineConfig) -> RunResult:
    """Run every stage and publish the bundle into ``config.out``.

    Outputs are staged in a scratch directory next to ``config.out`` and moved
    in only after the last stage succeeds, so a failed run leaves nothing.
    """
    with stage("config"):
        config.validate()
    out = Path(config.out)
    counts: dict[str, int] = {}

    with stage("ingest-edges"):
        records = read_edge_list(config.edges)
        if not records:
            raise IngestionError("edge list contains no records", path=config.edges)
        directed = build_directed_graph(records)
        counts.update(
            follower_nodes=directed.number_of_nodes(),
            follower_arcs=directed.number_of_edges(),
            self_loops_dropped=directed.self_loops_dropped,
            duplicate_arcs_dropped=directed.duplicates_dropped,
        )
    with stage("ingest-tweets"):
        activity = ActivityMap(tweet_counts(iter_tweets(config.tweets)), config.window_days)
        counts["tweeting_users"] = len(activity.counts)
    with stage("ingest-lexicon"):
        lexicon = load_lexicon(config.lexicon)
        counts["lexicon_positive"] = len(lexicon.positive)
        counts["lexicon_negative"] = len(lexicon.negative)

    with stage("reciprocal"):
        friends = extract_reciprocal(directed)
        counts["friend_edges"] = friends.number_of_edges()
    with stage("activity-filter"):
        active = filter_active_users(friends, activity, config.min_tweets)
        counts["active_nodes"] = active.number_of_nodes()
        counts["active_edges"] = active.number_of_edges()
    with stage("jaccard"):
        weighted = compute_jaccard_weights(active, config.jaccard_convention, config.workers)
    with stage("largest-component"):
        cc = largest_connected_component(weighted)
        if cc.number_of_edges() == 0:
            raise ComputationError("largest connected component has no edges")
        counts["lcc_nodes"] = cc.number_of_nodes()
        counts["lcc_edges"] = cc.number_of_edges()
    with stage("stats"):
        stats = graph_stats(
            cc, config.diameter, node_budget=config.diameter_node_budget, workers=config.workers
        )
    with stage("score"):
        scores = score_users(iter_tweets(config.tweets), lexicon, config.count_mode, users=cc.nodes)
        counts["scored_users"] = len(scores)
        counts["no_emotional_content"] = sum(1 for e in scores.values() if e.no_emotional_content)
    with stage("distribution"):
        hist = swb_distribution(scores, config.bin_width)
        hist_nonzero = swb_distribution(scores, config.bin_width, exclude_zero=True)
        emo = swb_distribution({u: e.counts.emotionality for u, e in scores.items()}, config.bin_width)
    with stage("sweep"):
        report = threshold_sweep(
            cc, scores, config.epsilons, config.min_p, config.orientation, config.workers
        )

    with stage("write"):
        out.parent.mkdir(parents=True, exist_ok=True)
        scratch = Path(tempfile.mkdtemp(prefix=".swb-run-", dir=out.parent))
        try:
            names = {
                "graph": "graph.txt",
                "stats": "stats.json",
                "scores": "scores.csv",
                "histogram": "histogram.csv",
                "histogram_nonzero": "histogram_nonzero.csv",
                "emotionality_histogram": "emotionality_histogram.csv",
                "assortativity": f"assortativity.{config.format}",
            }
            write_graph(cc, scratch / names["graph"])
            write_stats(stats, scratch / names["stats"])
            write_scores(scores, scratch / names["scores"])
            write_histogram(hist, scratch / names["histogram"])
            write_histogram(hist_nonzero, scratch / names["histogram_nonzero"])
            write_histogram(emo, scratch / names["emotionality_histogram"])
            body = report.to_csv() if config.format == "csv" else report.to_json()
            (scratch / names["assortativity"]).write_text(body, encoding="utf-8", newline="\n")

            manifest = {
                "created_at": datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
                "config": config.as_dict(),
                "inputs": {
                    name: {"path": str(getattr(config, name)), "sha256": sha256_file(getattr(config, name))}
                    for name in ("edges", "tweets", "lexicon")
                },
                "outputs": {key: {"file": fn, "sha256": sha256_file(scratch / fn)} for key, fn in names.items()},
                "counts": counts,
                "versions": {
                    "swb_assort": __version__,
                    "python": platform.python_version(),
                    "numpy": np.__version__,
                    "scipy": scipy.__version__,
                },
                "notes": {
                    "emotionality_histogram": "share of a user's tweets with any lexicon hit; convenience metric, not SWB",
                },
            }
            write_json(manifest, scratch / MANIFEST)

            out.mkdir(parents=True, exist_ok=True)
            for fn in [*names.values(), MANIFEST]:
                os.replace(scratch / fn, out / fn)
        finally:
            shutil.rmtree(scratch, ignore_errors=True)

    files = {key: out / fn for key, fn in names.items()}
    files["manifest"] = out / MANIFEST
    return RunResult(out, files, stats, report, manifest)
