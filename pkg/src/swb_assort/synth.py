"""Synthetic SWB populations and homophilous friend graphs with known ground truth.

All randomness comes from numpy's PCG64 bit generator seeded explicitly.  Only
uniform doubles are drawn from it (normals go through Box-Muller here), which
keeps outputs stable across numpy releases.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from swb_assort.errors import ComputationError, ConfigError
from swb_assort.graph import WeightedFriendGraph, compute_jaccard_weights
from swb_assort.graphio import write_edge_list, write_graph, write_json
from swb_assort.sentiment import Lexicon, SwbScores, TweetRecord, write_lexicon, write_scores, write_tweets

RNG_NAME = "numpy.PCG64"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _normals(rng: np.random.Generator, size: int) -> np.ndarray:
    u1 = 1.0 - rng.random(size)  # (0, 1]
    u2 = rng.random(size)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)


def node_ids(n: int, prefix: str = "u") -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"{prefix}{i:0{width}d}" for i in range(n)]


@dataclass(frozen=True)
class Mode:
    mean: float
    sd: float
    weight: float


@dataclass(frozen=True)
class BimodalSpec:
    n: int = 1000
    mode1: Mode = Mode(0.0, 0.05, 0.5)
    mode2: Mode = Mode(0.3, 0.08, 0.5)
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("population size must be positive")
        if not math.isclose(self.mode1.weight + self.mode2.weight, 1.0, abs_tol=1e-9):
            raise ConfigError("mixture weights must sum to 1")
        for m in (self.mode1, self.mode2):
            if m.weight < 0:
                raise ConfigError("mixture weights must be non-negative")
            if not m.sd > 0:
                raise ConfigError("mode standard deviations must be positive")
            if not -1.0 <= m.mean <= 1.0:
                raise ConfigError("mode means must lie in [-1, 1]")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class HomophilySpec:
    h: float = 0.0
    mean_degree: float = 10.0
    seed: int = 0
    # attempted pairs allowed per target edge before giving up
    max_attempts_per_edge: int = 5000

    def __post_init__(self):
        if self.h < 0:
            raise ConfigError("homophily strength h must be >= 0")
        if not self.mean_degree > 0:
            raise ConfigError("target mean degree must be positive")


def mixture_cdf(x: float, spec: BimodalSpec) -> float:
    """CDF of the clipped two-component mixture at x."""
    if x < -1.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    total = 0.0
    for m in (spec.mode1, spec.mode2):
        total += m.weight * 0.5 * (1.0 + math.erf((x - m.mean) / (m.sd * math.sqrt(2.0))))
    return total


def mixture_quantile(q: float, spec: BimodalSpec) -> float:
    lo, hi = -1.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mixture_cdf(mid, spec) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def bimodal_sample(spec: BimodalSpec) -> np.ndarray:
    rng = make_rng(spec.seed)
    pick = rng.random(spec.n)
    z = _normals(rng, spec.n)
    first = pick < spec.mode1.weight
    mean = np.where(first, spec.mode1.mean, spec.mode2.mean)
    sd = np.where(first, spec.mode1.sd, spec.mode2.sd)
    return np.clip(mean + sd * z, -1.0, 1.0)


def generate_bimodal_swb(spec: BimodalSpec) -> SwbScores:
    values = bimodal_sample(spec)
    return SwbScores.from_values(dict(zip(node_ids(spec.n), values.tolist())))


def generate_homophilous_graph(
    scores, spec: HomophilySpec, convention: str = "inclusive"
) -> WeightedFriendGraph:
    """Simple undirected graph where a uniformly drawn pair (u, v) is kept
    with probability exp(-h * |S(u) - S(v)|) until the target mean degree is
    reached.  h = 0 is plain uniform attachment.  Edge weights are Jaccard
    weights of the finished graph.
    """
    values = scores.swb() if isinstance(scores, SwbScores) else dict(scores)
    users = sorted(values)
    n = len(users)
    if n < 3:
        raise ConfigError("need at least 3 scored users")
    if spec.mean_degree >= n - 1:
        raise ConfigError(f"mean degree {spec.mean_degree} not below n - 1 = {n - 1}")
    s = np.array([values[u] for u in users], dtype=np.float64)
    target = int(round(n * spec.mean_degree / 2.0))
    rng = make_rng(spec.seed)

    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    budget = spec.max_attempts_per_edge * max(target, 1)
    attempts = 0
    while len(edges) < target:
        if attempts >= budget:
            raise ComputationError(
                f"reached {len(edges)} of {target} edges after {attempts} attempts; "
                "target degree unreachable at this homophily strength"
            )
        batch = max(1024, 4 * (target - len(edges)))
        u = np.minimum((rng.random(batch) * n).astype(np.int64), n - 1)
        v = np.minimum((rng.random(batch) * n).astype(np.int64), n - 1)
        keep = rng.random(batch) < np.exp(-spec.h * np.abs(s[u] - s[v]))
        for k in range(batch):
            attempts += 1
            if not keep[k]:
                continue
            a, b = int(u[k]), int(v[k])
            if a == b:
                continue
            key = (a, b) if a < b else (b, a)
            if key in seen:
                continue
            seen.add(key)
            edges.append(key)
            if len(edges) == target:
                break
    g = WeightedFriendGraph(users, ((users[a], users[b], 1.0) for a, b in edges))
    return compute_jaccard_weights(g, convention)


POSITIVE_WORDS = ("happy", "love", "great", "amazing", "sweet", "smile", "wonderful", "good")
NEGATIVE_WORDS = ("sad", "sick", "cry", "tears", "hate", "awful", "bad", "angry")
NEUTRAL_WORDS = ("going", "today", "work", "coffee", "bus", "just", "ready", "friday", "checking", "home")
WINDOW_START = datetime(2008, 11, 28, tzinfo=timezone.utc)


def fixture_lexicon() -> Lexicon:
    entries = {}
    for i, w in enumerate(POSITIVE_WORDS):
        entries[w] = ("positive", "strong" if i % 2 == 0 else "weak")
    for i, w in enumerate(NEGATIVE_WORDS):
        entries[w] = ("negative", "strong" if i % 2 == 0 else "weak")
    return Lexicon(entries)


@dataclass(frozen=True)
class FixtureSpec:
    n: int = 1000
    h: float = 20.0
    mean_degree: float = 10.0
    seed: int = 42
    window_days: int = 180
    # share of users posting fewer tweets than the activity threshold
    inactive_fraction: float = 0.05
    # share of users whose tweets carry no lexicon term
    silent_fraction: float = 0.03
    # one-way follower arcs added per reciprocal pair
    one_way_ratio: float = 0.2
    bimodal: BimodalSpec | None = None

    def bimodal_spec(self) -> BimodalSpec:
        if self.bimodal is not None:
            return self.bimodal
        return BimodalSpec(n=self.n, seed=self.seed)


@dataclass
class Fixture:
    spec: FixtureSpec
    scores: SwbScores
    graph: WeightedFriendGraph
    arcs: list[tuple[str, str]]
    tweets: list[TweetRecord]
    lexicon: Lexicon

    def metadata(self) -> dict:
        spec = asdict(self.spec)
        spec["bimodal"] = asdict(self.spec.bimodal_spec())
        return {
            "rng": RNG_NAME,
            "spec": spec,
            "users": self.graph.number_of_nodes(),
            "friend_edges": self.graph.number_of_edges(),
            "arcs": len(self.arcs),
            "tweets": len(self.tweets),
        }

    def write(self, out_dir) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {
            "edges": out / "edges.tsv",
            "tweets": out / "tweets.jsonl",
            "lexicon": out / "lexicon.tsv",
            "graph": out / "graph.txt",
            "scores": out / "planted_scores.csv",
            "meta": out / "synth_meta.json",
        }
        write_edge_list(self.arcs, paths["edges"])
        write_tweets(self.tweets, paths["tweets"])
        write_lexicon(self.lexicon, paths["lexicon"])
        write_graph(self.graph, paths["graph"])
        write_scores(self.scores, paths["scores"])
        write_json(self.metadata(), paths["meta"])
        return paths


def _timeline(rng, user: str, s: float, n_total: int, n_emotional: int, window_days: int) -> list[TweetRecord]:
    n_pos = int(round(n_emotional * (1.0 + s) / 2.0))
    n_neg = n_emotional - n_pos
    kinds = ["p"] * n_pos + ["n"] * n_neg + ["0"] * (n_total - n_emotional)
    order = np.argsort(rng.random(len(kinds)), kind="stable")
    offsets = np.sort(rng.random(n_total)) * window_days * 86400.0
    picks = rng.random((n_total, 3))
    tweets = []
    for i, k in enumerate(order.tolist()):
        kind = kinds[k]
        w1 = NEUTRAL_WORDS[int(picks[i, 0] * len(NEUTRAL_WORDS))]
        w2 = NEUTRAL_WORDS[int(picks[i, 1] * len(NEUTRAL_WORDS))]
        if kind == "p":
            text = f"{w1} {POSITIVE_WORDS[int(picks[i, 2] * len(POSITIVE_WORDS))]} {w2}"
        elif kind == "n":
            text = f"{w1} {NEGATIVE_WORDS[int(picks[i, 2] * len(NEGATIVE_WORDS))]} {w2}"
        else:
            text = f"{w1} {w2}"
        ts = WINDOW_START + timedelta(seconds=int(offsets[i]))
        tweets.append(TweetRecord(user, ts, "web", text))
    return tweets


def generate_fixture(spec: FixtureSpec) -> Fixture:
    """Scores, planted friend graph, follower arcs, tweets and lexicon for one run.

    Tweets are written so that, in ``tweet`` counting mode, each active user's
    measured SWB is the planted score rounded to the nearest achievable ratio.
    """
    scores = generate_bimodal_swb(spec.bimodal_spec())
    graph = generate_homophilous_graph(scores, HomophilySpec(spec.h, spec.mean_degree, spec.seed + 1))
    rng = make_rng(spec.seed + 2)
    users = list(graph.nodes)
    n = len(users)

    arcs = []
    friend = set()
    for u, v, _ in graph.edges():
        arcs.append((u, v))
        arcs.append((v, u))
        friend.add((u, v))
    n_one_way = int(round(spec.one_way_ratio * graph.number_of_edges()))
    pairs = (rng.random((n_one_way * 2 + 16, 2)) * n).astype(np.int64)
    added = 0
    have = set(arcs)
    for a, b in pairs.tolist():
        if added == n_one_way:
            break
        u, v = users[a], users[b]
        if u == v or (u, v) in have or (v, u) in have:
            continue
        arcs.append((u, v))
        have.add((u, v))
        added += 1
    arcs.sort()

    tweets: list[TweetRecord] = []
    planted = scores.swb()
    draws = rng.random((n, 4))
    for i, u in enumerate(users):
        inactive = draws[i, 0] < spec.inactive_fraction
        silent = draws[i, 1] < spec.silent_fraction
        if inactive:
            n_total = int(spec.window_days * 0.5 + draws[i, 2] * spec.window_days * 0.4)
        else:
            n_total = spec.window_days + int(draws[i, 2] * 60)
        n_emotional = 0 if silent else min(n_total, 40 + int(draws[i, 3] * 40))
        tweets.extend(_timeline(rng, u, planted[u], n_total, n_emotional, spec.window_days))
    return Fixture(spec, scores, graph, arcs, tweets, fixture_lexicon())
