"""Brute-force oracles and random graph builders shared by the test modules.

The oracles deliberately avoid the package's own kernels: neighbour sets are
rebuilt from the raw edge list, distances come from a plain queue BFS, and
correlations from the textbook mean-centred formula.
"""

import math
import random
from collections import deque

import pytest

from swb_assort.graph import WeightedFriendGraph


def random_edge_list(rng: random.Random, n: int, p: float, prefix="n"):
    width = len(str(n))
    nodes = [f"{prefix}{i:0{width}d}" for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                edges.append((nodes[i], nodes[j]))
    return nodes, edges


def random_graph(seed: int, max_nodes: int = 200, weighted=False) -> WeightedFriendGraph:
    rng = random.Random(seed)
    n = rng.randint(2, max_nodes)
    p = rng.choice([0.01, 0.03, 0.08, 0.2, 0.5]) if n < 60 else rng.uniform(1.0, 8.0) / n
    nodes, edges = random_edge_list(rng, n, p)
    w = (lambda: round(rng.random(), 3)) if weighted else (lambda: 1.0)
    return WeightedFriendGraph(nodes, [(u, v, w()) for u, v in edges], weighted=weighted)


def random_connected_graph(seed: int, max_nodes: int = 1000) -> WeightedFriendGraph:
    """Random spanning tree plus a sprinkling of extra edges."""
    rng = random.Random(seed)
    n = rng.randint(2, max_nodes)
    nodes = [f"v{i:04d}" for i in range(n)]
    order = nodes[:]
    rng.shuffle(order)
    edges = set()
    for i in range(1, n):
        parent = order[rng.randrange(max(0, i - rng.choice([1, 3, i])), i)]
        edges.add(tuple(sorted((order[i], parent))))
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(nodes, 2) if n > 1 else (nodes[0], nodes[0])
        if a != b:
            edges.add(tuple(sorted((a, b))))
    return WeightedFriendGraph(nodes, [(a, b, 1.0) for a, b in sorted(edges)])


def oracle_neighbor_sets(edges):
    nb = {}
    for u, v in edges:
        nb.setdefault(u, set()).add(v)
        nb.setdefault(v, set()).add(u)
    return nb


def oracle_jaccard(nodes, edges, convention):
    """Jaccard weight per edge by explicit set intersection and union."""
    nb = oracle_neighbor_sets(edges)
    out = {}
    for u, v in edges:
        cu = set(nb.get(u, ()))
        cv = set(nb.get(v, ()))
        if convention == "inclusive":
            cu.add(u)
            cv.add(v)
        union = cu | cv
        out[tuple(sorted((u, v)))] = len(cu & cv) / len(union)
    return out


def oracle_bfs_distances(adj, source):
    dist = {source: 0}
    q = deque([source])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def oracle_diameter(nodes, edges):
    adj = {u: [] for u in nodes}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return max(max(oracle_bfs_distances(adj, s).values()) for s in nodes)


def oracle_pearson_r(x, y):
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) * (a - mx) for a in x)
    syy = math.fsum((b - my) * (b - my) for b in y)
    return sxy / math.sqrt(sxx * syy)


@pytest.fixture
def triangle():
    return WeightedFriendGraph("abc", [("a", "b", 1.0), ("b", "c", 1.0), ("a", "c", 1.0)])


@pytest.fixture
def path5():
    nodes = ["p1", "p2", "p3", "p4", "p5"]
    return WeightedFriendGraph(nodes, [(nodes[i], nodes[i + 1], 1.0) for i in range(4)])
