"""Text formats for follower edge lists and weighted friend graphs.

Edge list: one ``source<TAB>target`` pair per line; ``#`` lines and blank
lines are skipped.

Friend graph::

    nodes <N> edges <E>
    u<TAB>v<TAB>weight        (E lines, u < v, weight with 6 decimals)
    u                         (one line per isolated node, if any)

Isolated-node lines are an extension so that N round-trips; graphs produced by
the pipeline (largest components) never contain them.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterator

from swb_assort.errors import IngestionError
from swb_assort.graph import GraphStats, WeightedFriendGraph


def iter_edge_records(path) -> Iterator[tuple[str, str]]:
    """Yield (source, target) pairs from a tab-separated edge list."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = [p.strip() for p in line.split("\t")]
            if len(parts) != 2 or not parts[0] or not parts[1]:
                raise IngestionError(f"expected 'source<TAB>target', got {line!r}", line=lineno, path=path)
            yield parts[0], parts[1]


def read_edge_list(path) -> list[tuple[str, str]]:
    try:
        return list(iter_edge_records(path))
    except UnicodeDecodeError as exc:
        raise IngestionError(f"not valid UTF-8 ({exc.reason})", path=path) from None
    except OSError as exc:
        raise IngestionError(str(exc), path=path) from None


def write_edge_list(arcs, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for u, v in arcs:
            fh.write(f"{u}\t{v}\n")


def format_graph(g: WeightedFriendGraph) -> str:
    lines = [f"nodes {g.number_of_nodes()} edges {g.number_of_edges()}"]
    attached = set()
    for u, v, w in g.edges():
        lines.append(f"{u}\t{v}\t{w:.6f}")
        attached.add(u)
        attached.add(v)
    lines.extend(u for u in g.nodes if u not in attached)
    return "\n".join(lines) + "\n"


def write_graph(g: WeightedFriendGraph, path) -> None:
    Path(path).write_text(format_graph(g), encoding="utf-8", newline="\n")


def read_graph(path) -> WeightedFriendGraph:
    """Parse the friend-graph format; the result is marked as weighted."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise IngestionError(str(exc), path=path) from None
    if not lines:
        raise IngestionError("empty graph file", path=path)
    head = lines[0].split()
    if len(head) != 4 or head[0] != "nodes" or head[2] != "edges":
        raise IngestionError(f"bad header {lines[0]!r}", line=1, path=path)
    try:
        n_nodes, n_edges = int(head[1]), int(head[3])
    except ValueError:
        raise IngestionError(f"bad header {lines[0]!r}", line=1, path=path) from None
    nodes, edges = [], []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) == 1:
            nodes.append(parts[0].strip())
            continue
        if len(parts) != 3:
            raise IngestionError(f"expected 'u<TAB>v<TAB>weight', got {line!r}", line=lineno, path=path)
        try:
            w = float(parts[2])
        except ValueError:
            raise IngestionError(f"bad weight {parts[2]!r}", line=lineno, path=path) from None
        edges.append((parts[0], parts[1], w))
    try:
        g = WeightedFriendGraph(nodes, edges, weighted=True)
    except ValueError as exc:
        raise IngestionError(str(exc), path=path) from None
    if g.number_of_nodes() != n_nodes or g.number_of_edges() != n_edges:
        raise IngestionError(
            f"header says {n_nodes} nodes / {n_edges} edges, body has "
            f"{g.number_of_nodes()} / {g.number_of_edges()}",
            path=path,
        )
    return g


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_stats(stats: GraphStats, path) -> None:
    write_json(stats.to_dict(), path)


def ensure_parent(path) -> None:
    parent = os.path.dirname(os.fspath(path))
    if parent:
        os.makedirs(parent, exist_ok=True)
