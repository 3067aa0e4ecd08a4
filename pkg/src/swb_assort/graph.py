"""Follower graph, reciprocal friend graph and structural statistics.

Node identifiers are strings.  Every iteration order exposed by this module is
the lexicographic order of those identifiers, which is what makes downstream
floating-point reductions reproducible.
"""

from __future__ import annotations

import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from swb_assort.errors import ComputationError, ConfigError, IngestionError

logger = logging.getLogger(__name__)

JACCARD_CONVENTIONS = ("inclusive", "exclusive")
DIAMETER_MODES = ("exact", "double_sweep", "auto")
DEFAULT_DIAMETER_NODE_BUDGET = 200_000

# edges per work unit in the common-neighbour kernel
_EDGE_CHUNK = 1 << 15
# BFS sources per block in the exact diameter computation
_SOURCE_BLOCK = 256


class DirectedGraph:
    """Follower relations: an arc (u, v) means u follows v."""

    def __init__(self, nodes: Iterable[str], arcs: Iterable[tuple[str, str]]):
        self._out: dict[str, set[str]] = {n: set() for n in nodes}
        self._in: dict[str, set[str]] = {n: set() for n in self._out}
        n_arcs = 0
        for u, v in arcs:
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            if u not in self._out or v not in self._out:
                raise ValueError(f"arc ({u!r}, {v!r}) has an endpoint outside the node set")
            if v in self._out[u]:
                raise ValueError(f"duplicate arc ({u!r}, {v!r})")
            self._out[u].add(v)
            self._in[v].add(u)
            n_arcs += 1
        self._n_arcs = n_arcs
        self.self_loops_dropped = 0
        self.duplicates_dropped = 0

    @property
    def nodes(self) -> list[str]:
        return sorted(self._out)

    def number_of_nodes(self) -> int:
        return len(self._out)

    def number_of_edges(self) -> int:
        return self._n_arcs

    def successors(self, u: str) -> frozenset[str]:
        return frozenset(self._out[u])

    def predecessors(self, u: str) -> frozenset[str]:
        return frozenset(self._in[u])

    def has_edge(self, u: str, v: str) -> bool:
        return u in self._out and v in self._out[u]

    def edges(self) -> Iterator[tuple[str, str]]:
        for u in sorted(self._out):
            for v in sorted(self._out[u]):
                yield u, v

    def __contains__(self, u) -> bool:
        return u in self._out

    def __repr__(self) -> str:
        return f"DirectedGraph(nodes={self.number_of_nodes()}, arcs={self._n_arcs})"


class WeightedFriendGraph:
    """Undirected simple graph with a weight in [0, 1] on every edge.

    ``weighted`` is False while the weights are still the 1.0 placeholder
    assigned by :func:`extract_reciprocal`.
    """

    def __init__(
        self,
        nodes: Iterable[str] = (),
        edges: Iterable[tuple[str, str, float]] = (),
        *,
        weighted: bool = False,
    ):
        adj: dict[str, dict[str, float]] = {n: {} for n in nodes}
        for u, v, w in edges:
            if u == v:
                raise ValueError(f"self-loop on {u!r}")
            w = float(w)
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"weight {w} on ({u!r}, {v!r}) outside [0, 1]")
            adj.setdefault(u, {})
            adj.setdefault(v, {})
            if v in adj[u]:
                raise ValueError(f"parallel edge ({u!r}, {v!r})")
            adj[u][v] = w
            adj[v][u] = w
        self._nodes = tuple(sorted(adj))
        self._adj = {n: dict(sorted(adj[n].items())) for n in self._nodes}
        self._n_edges = sum(len(nb) for nb in self._adj.values()) // 2
        self.weighted = weighted
        self._index_cache = None

    @property
    def nodes(self) -> tuple[str, ...]:
        return self._nodes

    def number_of_nodes(self) -> int:
        return len(self._nodes)

    def number_of_edges(self) -> int:
        return self._n_edges

    def neighbors(self, u: str) -> tuple[str, ...]:
        return tuple(self._adj[u])

    def neighbor_weights(self, u: str) -> Mapping[str, float]:
        return self._adj[u]

    def degree(self, u: str) -> int:
        return len(self._adj[u])

    def has_edge(self, u: str, v: str) -> bool:
        return u in self._adj and v in self._adj[u]

    def weight(self, u: str, v: str) -> float:
        return self._adj[u][v]

    def edges(self) -> Iterator[tuple[str, str, float]]:
        """Each undirected edge once as (u, v, w) with u < v, in sorted order."""
        for u in self._nodes:
            for v, w in self._adj[u].items():
                if u < v:
                    yield u, v, w

    def subgraph(self, nodes: Iterable[str]) -> "WeightedFriendGraph":
        keep = set(nodes) & set(self._adj)
        edges = ((u, v, w) for u, v, w in self.edges() if u in keep and v in keep)
        return WeightedFriendGraph(keep, edges, weighted=self.weighted)

    def __contains__(self, u) -> bool:
        return u in self._adj

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, WeightedFriendGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._adj == other._adj

    def __repr__(self) -> str:
        state = "weighted" if self.weighted else "unweighted"
        return f"WeightedFriendGraph(nodes={len(self._nodes)}, edges={self._n_edges}, {state})"

    def _index(self):
        """(position of each node, symmetric CSR adjacency) in sorted-node order."""
        if self._index_cache is None:
            pos = {n: i for i, n in enumerate(self._nodes)}
            n = len(self._nodes)
            rows, cols = [], []
            for u in self._nodes:
                iu = pos[u]
                for v in self._adj[u]:
                    rows.append(iu)
                    cols.append(pos[v])
            data = np.ones(len(rows), dtype=np.int32)
            a = sparse.csr_matrix(
                (data, (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
                shape=(n, n),
            )
            a.sort_indices()
            self._index_cache = (pos, a)
        return self._index_cache


@dataclass(frozen=True)
class ActivityMap:
    """Tweets posted per user over an observation window of ``window_days``."""

    counts: Mapping[str, int]
    window_days: int = 180

    def __post_init__(self):
        if self.window_days <= 0:
            raise ValueError("window_days must be positive")
        for user, c in self.counts.items():
            if c < 0:
                raise ValueError(f"negative tweet count for {user!r}")

    def min_total(self, per_day: float = 1.0) -> int:
        return math.ceil(self.window_days * per_day)


@dataclass(frozen=True)
class GraphStats:
    node_count: int
    edge_count: int
    density: float
    diameter: int
    average_degree: float
    average_clustering: float
    diameter_mode: str = "exact"
    diameter_is_lower_bound: bool = False
    connected: bool = True

    def to_dict(self) -> dict:
        return {
            "node_count": self.node_count,
            "edge_count": self.edge_count,
            "density": self.density,
            "diameter": self.diameter,
            "average_degree": self.average_degree,
            "average_clustering": self.average_clustering,
            "diameter_mode": self.diameter_mode,
            "diameter_is_lower_bound": self.diameter_is_lower_bound,
            "connected": self.connected,
        }


def build_directed_graph(edge_records: Iterable[Sequence[str]]) -> DirectedGraph:
    """Build the follower graph from (source, target) records.

    Exact duplicate arcs and self-loops are dropped; their counts are kept on
    the returned graph as ``duplicates_dropped`` and ``self_loops_dropped``.
    Records are numbered from 1 in error messages.
    """
    nodes: set[str] = set()
    arcs: dict[tuple[str, str], None] = {}
    loops = dups = 0
    for lineno, rec in enumerate(edge_records, start=1):
        try:
            u, v = rec
        except (TypeError, ValueError):
            raise IngestionError(f"expected a (source, target) pair, got {rec!r}", line=lineno) from None
        if not isinstance(u, str) or not isinstance(v, str) or not u or not v:
            raise IngestionError(f"node identifiers must be non-empty strings, got {rec!r}", line=lineno)
        nodes.add(u)
        nodes.add(v)
        if u == v:
            loops += 1
            continue
        if (u, v) in arcs:
            dups += 1
            continue
        arcs[(u, v)] = None
    g = DirectedGraph(nodes, arcs)
    g.self_loops_dropped = loops
    g.duplicates_dropped = dups
    if loops or dups:
        logger.info("dropped %d self-loops and %d duplicate arcs", loops, dups)
    return g


def extract_reciprocal(g: DirectedGraph) -> WeightedFriendGraph:
    """Keep {u, v} only when u follows v and v follows u.  Isolated nodes stay."""
    edges = []
    for u, v in g.edges():
        if u < v and g.has_edge(v, u):
            edges.append((u, v, 1.0))
    return WeightedFriendGraph(g.nodes, edges, weighted=False)


def filter_active_users(
    g: WeightedFriendGraph, activity: ActivityMap, min_total: int = 180
) -> WeightedFriendGraph:
    """Induced subgraph on users with at least ``min_total`` tweets.

    Users missing from ``activity`` are dropped regardless of the threshold.
    """
    if min_total < 0:
        raise ConfigError("min_total must be >= 0")
    counts = activity.counts
    keep = [u for u in g.nodes if u in counts and counts[u] >= min_total]
    return g.subgraph(keep)


def _common_neighbor_counts(g: WeightedFriendGraph, workers: int = 1):
    """Per-edge common-neighbour counts.

    Returns (rows, cols, counts, degrees) where rows[k] < cols[k] index the
    k-th canonical edge in sorted-node order.  Counts are integers, so the
    result does not depend on how the edges are partitioned across workers.
    """
    _, a = g._index()
    upper = sparse.triu(a, k=1).tocoo()
    order = np.lexsort((upper.col, upper.row))
    rows = upper.row[order].astype(np.int64)
    cols = upper.col[order].astype(np.int64)
    degrees = np.diff(a.indptr).astype(np.int64)
    m = len(rows)
    counts = np.zeros(m, dtype=np.int64)

    def work(lo: int, hi: int) -> None:
        ru = a[rows[lo:hi]]
        rv = a[cols[lo:hi]]
        counts[lo:hi] = np.asarray(ru.multiply(rv).sum(axis=1)).ravel()

    bounds = [(lo, min(lo + _EDGE_CHUNK, m)) for lo in range(0, m, _EDGE_CHUNK)]
    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda b: work(*b), bounds))
    else:
        for lo, hi in bounds:
            work(lo, hi)
    return rows, cols, counts, degrees


def compute_jaccard_weights(
    g: WeightedFriendGraph, convention: str = "inclusive", workers: int = 1
) -> WeightedFriendGraph:
    """Weight each edge by the Jaccard similarity of its endpoints' friend sets.

    With ``convention="inclusive"`` a node's friend set contains the node
    itself, so an isolated dyad gets weight 1.  With ``"exclusive"`` it holds
    only the neighbours, and an edge whose endpoints share no friend gets 0.
    """
    if convention not in JACCARD_CONVENTIONS:
        raise ConfigError(f"unknown Jaccard convention {convention!r}")
    rows, cols, cn, deg = _common_neighbor_counts(g, workers)
    du, dv = deg[rows], deg[cols]
    if convention == "inclusive":
        # C_u = N(u) + {u}; both endpoints lie in both sets
        inter = cn + 2
        union = du + dv - cn
    else:
        inter = cn
        union = du + dv - cn
    nodes = g.nodes
    edges = [
        (nodes[i], nodes[j], int(x) / int(y))
        for i, j, x, y in zip(rows.tolist(), cols.tolist(), inter.tolist(), union.tolist())
    ]
    return WeightedFriendGraph(nodes, edges, weighted=True)


def connected_components(g: WeightedFriendGraph) -> list[list[str]]:
    """Components in order of their smallest node id; members sorted."""
    seen: set[str] = set()
    comps = []
    for s in g.nodes:
        if s in seen:
            continue
        seen.add(s)
        comp = [s]
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    comp.append(v)
                    queue.append(v)
        comps.append(sorted(comp))
    return comps


def largest_connected_component(g: WeightedFriendGraph) -> WeightedFriendGraph:
    """Largest component by node count; ties go to the smallest minimum id."""
    if g.number_of_nodes() == 0:
        return WeightedFriendGraph(weighted=g.weighted)
    best: list[str] = []
    for comp in connected_components(g):
        # components arrive ordered by minimum id, so strict > keeps the tie-break
        if len(comp) > len(best):
            best = comp
    return g.subgraph(best)


def threshold_subgraph(g: WeightedFriendGraph, epsilon: float) -> WeightedFriendGraph:
    """Edges with weight >= epsilon; nodes left without edges are dropped."""
    if not 0.0 <= epsilon <= 1.0:
        raise ConfigError(f"epsilon {epsilon} outside [0, 1]")
    edges = [(u, v, w) for u, v, w in g.edges() if w >= epsilon]
    attached = {u for u, v, _ in edges} | {v for _, v, _ in edges}
    return WeightedFriendGraph(attached, edges, weighted=g.weighted)


def average_degree(node_count: int, edge_count: int) -> float:
    return 2.0 * edge_count / node_count if node_count else 0.0


def density(node_count: int, edge_count: int) -> float:
    if node_count < 2:
        return 0.0
    return 2.0 * edge_count / (node_count * (node_count - 1))


def local_clustering(g: WeightedFriendGraph, workers: int = 1) -> dict[str, float]:
    """Watts-Strogatz local clustering; nodes of degree < 2 get 0."""
    n = g.number_of_nodes()
    tri = np.zeros(n, dtype=np.int64)
    if g.number_of_edges():
        rows, cols, cn, deg = _common_neighbor_counts(g, workers)
        # every triangle at u is seen once through each of its two edges at u
        np.add.at(tri, rows, cn)
        np.add.at(tri, cols, cn)
    else:
        deg = np.zeros(n, dtype=np.int64)
    out = {}
    for i, u in enumerate(g.nodes):
        k = int(deg[i])
        out[u] = 0.0 if k < 2 else int(tri[i]) / (k * (k - 1))
    return out


def _bfs_distances(g: WeightedFriendGraph, source: str) -> dict[str, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in g.neighbors(u):
            if v not in dist:
                dist[v] = du
                queue.append(v)
    return dist


def double_sweep_diameter(g: WeightedFriendGraph) -> int:
    """Lower bound on the diameter of a connected graph from two BFS passes."""
    if g.number_of_nodes() == 0:
        raise ComputationError("empty graph")
    start = min(g.nodes, key=lambda u: (-g.degree(u), u))
    dist = _bfs_distances(g, start)
    far = min(dist, key=lambda u: (-dist[u], u))
    return max(_bfs_distances(g, far).values())


def exact_diameter(g: WeightedFriendGraph, workers: int = 1) -> int:
    """Largest finite shortest-path length, from BFS out of every node."""
    if g.number_of_nodes() == 0:
        raise ComputationError("empty graph")
    _, a = g._index()
    n = a.shape[0]

    def block_ecc(lo: int) -> int:
        d = csgraph.shortest_path(
            a, method="D", directed=False, unweighted=True, indices=np.arange(lo, min(lo + _SOURCE_BLOCK, n))
        )
        d[np.isinf(d)] = 0
        return int(d.max())

    starts = range(0, n, _SOURCE_BLOCK)
    if workers > 1 and n > _SOURCE_BLOCK:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return max(pool.map(block_ecc, starts))
    return max(block_ecc(lo) for lo in starts)


def graph_stats(
    g: WeightedFriendGraph,
    diameter_mode: str = "exact",
    *,
    node_budget: int = DEFAULT_DIAMETER_NODE_BUDGET,
    workers: int = 1,
) -> GraphStats:
    """Table-style structural statistics.

    For a disconnected graph the diameter is that of the largest component and
    ``connected`` is False.  ``diameter_mode="auto"`` runs the exact all-pairs
    BFS up to ``node_budget`` nodes and the double-sweep lower bound above it.
    """
    if diameter_mode not in DIAMETER_MODES:
        raise ConfigError(f"unknown diameter mode {diameter_mode!r}")
    n, m = g.number_of_nodes(), g.number_of_edges()
    if n == 0:
        raise ComputationError("empty graph")
    clustering = local_clustering(g, workers)
    avg_clustering = math.fsum(clustering[u] for u in g.nodes) / n

    cc = largest_connected_component(g)
    connected = cc.number_of_nodes() == n
    if diameter_mode == "auto":
        diameter_mode = "exact" if cc.number_of_nodes() <= node_budget else "double_sweep"
    if diameter_mode == "exact":
        diameter = exact_diameter(cc, workers)
    else:
        diameter = double_sweep_diameter(cc)

    return GraphStats(
        node_count=n,
        edge_count=m,
        density=density(n, m),
        diameter=diameter,
        average_degree=average_degree(n, m),
        average_clustering=avg_clustering,
        diameter_mode=diameter_mode,
        diameter_is_lower_bound=diameter_mode == "double_sweep",
        connected=connected,
    )
