"""Pairwise and neighbourhood SWB assortativity, and the edge-threshold sweep."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from collections.abc import Mapping
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from swb_assort.correlation import CorrelationResult, pearson
from swb_assort.errors import ComputationError, ConfigError, DegenerateInputError
from swb_assort.graph import WeightedFriendGraph, threshold_subgraph
from swb_assort.sentiment import SwbScores

logger = logging.getLogger(__name__)

ORIENTATIONS = ("both", "single")
NOT_SIGNIFICANT = "not_significant"
DEFAULT_EPSILONS = tuple(round(0.1 * i, 1) for i in range(10))
REPORT_HEADER = [
    "epsilon",
    "pairwise_r",
    "pairwise_p",
    "n_edges",
    "neighborhood_r",
    "neighborhood_p",
    "n_nodes",
    "flags",
]


def _values(scores) -> Mapping[str, float]:
    if isinstance(scores, SwbScores):
        return scores.swb()
    return scores


def restrict_to_scored(g: WeightedFriendGraph, scores) -> tuple[WeightedFriendGraph, int]:
    """Induced subgraph on scored nodes, plus the number of edges lost."""
    values = _values(scores)
    if all(u in values for u in g.nodes):
        return g, 0
    sub = g.subgraph(u for u in g.nodes if u in values)
    lost = g.number_of_edges() - sub.number_of_edges()
    logger.info("dropped %d edges touching %d unscored users", lost, g.number_of_nodes() - sub.number_of_nodes())
    return sub, lost


def edge_vectors(g: WeightedFriendGraph, values: Mapping[str, float], orientation: str = "both"):
    """Source and target score vectors, ordered by node id then neighbour id."""
    if orientation not in ORIENTATIONS:
        raise ConfigError(f"unknown orientation {orientation!r}")
    src, dst = [], []
    for u in g.nodes:
        su = values[u]
        for v in g.neighbors(u):
            if orientation == "both" or u < v:
                src.append(su)
                dst.append(values[v])
    return src, dst


def neighborhood_vectors(g: WeightedFriendGraph, values: Mapping[str, float]):
    """Node scores and mean neighbour scores over nodes with at least one neighbour."""
    own, mean_nb = [], []
    for u in g.nodes:
        nbrs = g.neighbors(u)
        if not nbrs:
            continue
        own.append(values[u])
        mean_nb.append(math.fsum(values[v] for v in nbrs) / len(nbrs))
    return own, mean_nb


def pairwise_assortativity(
    g: WeightedFriendGraph, scores, orientation: str = "both"
) -> CorrelationResult:
    """Pearson correlation of scores across the two ends of every edge.

    In ``both`` mode each edge contributes (u, v) and (v, u), and ``n`` counts
    those orientations; ``single`` uses each edge once with u < v.
    """
    sub, lost = restrict_to_scored(g, scores)
    if sub.number_of_edges() < 2:
        raise DegenerateInputError(f"need at least 2 edges, got {sub.number_of_edges()}")
    x, y = edge_vectors(sub, _values(scores), orientation)
    res = pearson(x, y)
    return CorrelationResult(res.r, res.p_value, res.n, res.t, excluded=lost)


def neighborhood_assortativity(g: WeightedFriendGraph, scores) -> CorrelationResult:
    """Pearson correlation between each node's score and its neighbours' mean score.

    Nodes without neighbours are left out; ``excluded`` counts them together
    with any unscored nodes.
    """
    values = _values(scores)
    sub, _ = restrict_to_scored(g, scores)
    x, y = neighborhood_vectors(sub, values)
    if not x:
        raise DegenerateInputError("every node is isolated")
    res = pearson(x, y)
    return CorrelationResult(res.r, res.p_value, res.n, res.t, excluded=g.number_of_nodes() - len(x))


def bootstrap_null_band(
    g: WeightedFriendGraph,
    scores,
    n_boot: int = 1000,
    level: float = 0.99,
    seed: int = 0,
    orientation: str = "both",
) -> tuple[float, float]:
    """Central ``level`` interval of pairwise r when node scores carry no structure.

    Each replicate redraws every node's score with replacement from the
    observed scores, keeping the graph fixed.
    """
    sub, _ = restrict_to_scored(g, scores)
    values = _values(scores)
    pos = {u: i for i, u in enumerate(sub.nodes)}
    vals = np.array([values[u] for u in sub.nodes], dtype=np.float64)
    src, dst = [], []
    for u, v, _ in sub.edges():
        src.append(pos[u])
        dst.append(pos[v])
        if orientation == "both":
            src.append(pos[v])
            dst.append(pos[u])
    src_i, dst_i = np.array(src), np.array(dst)
    rng = np.random.Generator(np.random.PCG64(seed))
    rs = np.empty(n_boot)
    for b in range(n_boot):
        draw = vals[rng.integers(0, len(vals), len(vals))]
        a, c = draw[src_i], draw[dst_i]
        a = a - a.mean()
        c = c - c.mean()
        denom = math.sqrt(float(a @ a) * float(c @ c))
        rs[b] = float(a @ c) / denom if denom > 0 else 0.0
    tail = (1.0 - level) / 2.0
    lo, hi = np.quantile(rs, [tail, 1.0 - tail])
    return float(lo), float(hi)


@dataclass(frozen=True)
class SweepRow:
    epsilon: float
    pairwise: CorrelationResult | None
    neighborhood: CorrelationResult | None
    n_edges: int
    n_nodes: int
    flags: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        def r(res):
            return None if res is None else res.r

        def p(res):
            return None if res is None else res.p_value

        return {
            "epsilon": self.epsilon,
            "pairwise_r": r(self.pairwise),
            "pairwise_p": p(self.pairwise),
            "n_edges": self.n_edges,
            "neighborhood_r": r(self.neighborhood),
            "neighborhood_p": p(self.neighborhood),
            "n_nodes": self.n_nodes,
            "flags": list(self.flags),
        }


@dataclass(frozen=True)
class AssortativityReport:
    rows: tuple[SweepRow, ...]
    min_p: float = 0.001
    orientation: str = "both"
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_HEADER)
        for row in self.rows:
            d = row.as_dict()
            w.writerow(
                [
                    _fmt(d["epsilon"]),
                    _fmt(d["pairwise_r"]),
                    _fmt(d["pairwise_p"]),
                    d["n_edges"],
                    _fmt(d["neighborhood_r"]),
                    _fmt(d["neighborhood_p"]),
                    d["n_nodes"],
                    ";".join(d["flags"]),
                ]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "min_p": self.min_p,
            "orientation": self.orientation,
            "rows": [row.as_dict() for row in self.rows],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _fmt(x) -> str:
    return "" if x is None else repr(float(x))


def _check_epsilons(epsilons: Sequence[float]) -> list[float]:
    eps = [float(e) for e in epsilons]
    if not eps:
        raise ConfigError("epsilon list is empty")
    for e in eps:
        if not 0.0 <= e <= 1.0:
            raise ConfigError(f"epsilon {e} outside [0, 1]")
    if any(b <= a for a, b in zip(eps, eps[1:])):
        raise ConfigError("epsilons must be strictly increasing")
    return eps


def sweep_row(g: WeightedFriendGraph, scores, epsilon: float, min_p: float = 0.001, orientation: str = "both") -> SweepRow:
    sub, _ = restrict_to_scored(threshold_subgraph(g, epsilon), scores)
    flags = []
    try:
        pw = pairwise_assortativity(sub, scores, orientation)
    except ComputationError as exc:
        logger.info("epsilon=%g pairwise undefined: %s", epsilon, exc)
        pw = None
        flags.append("pairwise_undefined")
    try:
        nb = neighborhood_assortativity(sub, scores)
    except ComputationError as exc:
        logger.info("epsilon=%g neighbourhood undefined: %s", epsilon, exc)
        nb = None
        flags.append("neighborhood_undefined")
    if pw is None or nb is None or not (pw.significant(min_p) and nb.significant(min_p)):
        flags.insert(0, NOT_SIGNIFICANT)
    n_nodes = nb.n if nb is not None else sum(1 for u in sub.nodes if sub.degree(u) > 0)
    return SweepRow(epsilon, pw, nb, sub.number_of_edges(), n_nodes, tuple(flags))


def threshold_sweep(
    g: WeightedFriendGraph,
    scores,
    epsilons: Sequence[float] = DEFAULT_EPSILONS,
    min_p: float = 0.001,
    orientation: str = "both",
    workers: int = 1,
) -> AssortativityReport:
    """Both assortativity measures on the subgraph of edges with weight >= epsilon.

    A row whose correlations are undefined or have p >= ``min_p`` is kept and
    marked ``not_significant``; the sweep itself never aborts on a bad row.
    """
    eps = _check_epsilons(epsilons)
    if not 0.0 < min_p <= 1.0:
        raise ConfigError("min_p must be in (0, 1]")
    if orientation not in ORIENTATIONS:
        raise ConfigError(f"unknown orientation {orientation!r}")
    if workers > 1 and len(eps) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda e: sweep_row(g, scores, e, min_p, orientation), eps))
    else:
        rows = [sweep_row(g, scores, e, min_p, orientation) for e in eps]
    return AssortativityReport(tuple(rows), min_p, orientation)
