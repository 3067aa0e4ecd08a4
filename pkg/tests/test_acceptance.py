"""Acceptance gate.

Nine criteria, one test each.  Every test prints a single PASS or FAIL line
(visible with ``pytest -s``) along with its wall time against the budget.

    pytest tests/test_acceptance.py -s
"""

import contextlib
import itertools
import json
import math
import random
import time
from datetime import datetime, timezone

import mpmath
import pytest
from scipy.stats import spearmanr

from conftest import oracle_diameter, oracle_jaccard, oracle_neighbor_sets, random_connected_graph, random_graph
from swb_assort.assortativity import (
    bootstrap_null_band,
    neighborhood_assortativity,
    pairwise_assortativity,
    threshold_sweep,
)
from swb_assort.correlation import pearson
from swb_assort.graph import (
    WeightedFriendGraph,
    average_degree,
    compute_jaccard_weights,
    density,
    graph_stats,
)
from swb_assort.pipeline import PipelineConfig, run_pipeline
from swb_assort.sentiment import Lexicon, TweetRecord, score_user
from swb_assort.synth import (
    BimodalSpec,
    FixtureSpec,
    HomophilySpec,
    generate_bimodal_swb,
    generate_fixture,
    generate_homophilous_graph,
)

pytestmark = pytest.mark.acceptance


@contextlib.contextmanager
def criterion(number, title, budget_s):
    start = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < budget_s, f"took {elapsed:.2f}s, budget {budget_s}s"
    except BaseException as exc:
        elapsed = time.perf_counter() - start
        print(f"\n[criterion {number}] FAIL  {title} ({elapsed:.2f}s): {exc}")
        raise
    print(f"\n[criterion {number}] PASS  {title} ({elapsed:.2f}s / {budget_s}s)")


def nonempty_graphs(count, max_nodes):
    """``count`` seeded random graphs with at least one edge."""
    out, seed = [], 0
    while len(out) < count:
        g = random_graph(seed, max_nodes=max_nodes)
        seed += 1
        if g.number_of_edges():
            out.append(g)
    return out


def test_1_reported_degree_and_density():
    with criterion(1, "average degree and density from published counts", 1.0):
        n, m = 102_009, 2_361_547
        assert abs(average_degree(n, m) - 46.30) <= 0.005
        assert abs(density(n, m) - 0.000454) <= 0.000001


def test_2_jaccard_matches_set_arithmetic():
    with criterion(2, "Jaccard weights equal brute-force set arithmetic", 10.0):
        graphs = nonempty_graphs(100, 200)
        for g, convention in itertools.product(graphs, ("inclusive", "exclusive")):
            edges = [(u, v) for u, v, _ in g.edges()]
            expected = oracle_jaccard(g.nodes, edges, convention)
            got = compute_jaccard_weights(g, convention)
            assert got.nodes == g.nodes
            assert {(u, v): w for u, v, w in got.edges()} == expected


def textbook_r(x, y):
    n = len(x)
    x = [mpmath.mpf(v) for v in x]
    y = [mpmath.mpf(v) for v in y]
    mx, my = sum(x) / n, sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    return sxy / mpmath.sqrt(sxx * syy)


def t_tail(r, n):
    """Two-tailed Student-t probability by numerical integration of the density."""
    nu = n - 2
    t = abs(r) * mpmath.sqrt(nu / (1 - r * r))
    c = mpmath.gamma((nu + 1) / mpmath.mpf(2)) / (mpmath.sqrt(nu * mpmath.pi) * mpmath.gamma(nu / mpmath.mpf(2)))
    return 2 * mpmath.quad(lambda s: c * (1 + s * s / nu) ** (-(nu + 1) / mpmath.mpf(2)), [t, t + 1, mpmath.inf])


def test_3_pearson_r_and_p():
    rng = random.Random(2024)
    pairs = []
    for _ in range(50):
        n = rng.randint(5, 200)
        x = [rng.gauss(0, 1) for _ in range(n)]
        slope = rng.uniform(-0.6, 0.6)
        pairs.append((x, [slope * a + rng.gauss(0, 1) for a in x]))
    # 20 digits is ample for a 1e-10 comparison and keeps the quadrature fast
    with mpmath.workdps(20), criterion(3, "Pearson r and p against textbook evaluation", 1.0):
        for x, y in pairs:
            res = pearson(x, y)
            r_ref = textbook_r(x, y)
            assert res.r == pytest.approx(float(r_ref), rel=1e-10, abs=0)
            assert res.p_value == pytest.approx(float(t_tail(r_ref, len(x))), rel=1e-10, abs=0)
        for x, _ in pairs[:20]:
            a, b = rng.uniform(0.1, 5), rng.uniform(-3, 3)
            assert abs(pearson(x, [a * v + b for v in x]).r - 1.0) <= 1e-12
            assert abs(pearson(x, [-a * v + b for v in x]).r + 1.0) <= 1e-12


def brute_pearson(x, y):
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) * (a - mx) for a in x)
    syy = math.fsum((b - my) * (b - my) for b in y)
    return sxy / math.sqrt(sxx * syy)


def test_4_assortativity_matches_enumeration():
    with criterion(4, "pairwise and neighbourhood r equal explicit enumeration", 30.0):
        checked = 0
        for g in nonempty_graphs(100, 200):
            rng = random.Random(g.number_of_nodes() * 1009 + g.number_of_edges())
            scores = {u: rng.uniform(-1, 1) for u in g.nodes}
            edges = sorted((u, v) for u, v, _ in g.edges())
            pairs = sorted([(u, v) for u, v in edges] + [(v, u) for u, v in edges])
            if len(pairs) < 3:
                continue
            res = pairwise_assortativity(g, scores)
            assert res.n == len(pairs)
            assert res.r == brute_pearson([scores[u] for u, _ in pairs], [scores[v] for _, v in pairs])

            single = pairwise_assortativity(g, scores, orientation="single")
            assert single.r == brute_pearson([scores[u] for u, _ in edges], [scores[v] for _, v in edges])

            nb = oracle_neighbor_sets(edges)
            xs = [scores[u] for u in sorted(nb)]
            ys = [math.fsum(scores[v] for v in sorted(nb[u])) / len(nb[u]) for u in sorted(nb)]
            res = neighborhood_assortativity(g, scores)
            assert res.n == len(xs)
            assert res.r == brute_pearson(xs, ys)
            checked += 1
        assert checked >= 90


def test_5_planted_homophily_recovered():
    hs = (0, 1, 5, 20, 50)
    with criterion(5, "planted homophily recovered on n=2000 synth graphs", 120.0):
        for seed in range(1, 6):
            scores = generate_bimodal_swb(BimodalSpec(n=2000, seed=seed))
            pw, nb = [], []
            for h in hs:
                g = generate_homophilous_graph(scores, HomophilySpec(h=h, mean_degree=20, seed=seed))
                pw.append(pairwise_assortativity(g, scores).r)
                nb.append(neighborhood_assortativity(g, scores).r)
                if h == 0:
                    lo, hi = bootstrap_null_band(g, scores, n_boot=1000, level=0.99, seed=seed)
                    assert lo <= pw[-1] <= hi, f"seed {seed}: h=0 r={pw[-1]:.4f} outside [{lo:.4f}, {hi:.4f}]"
            assert pw[-1] > 0.5, f"seed {seed}: h=50 r={pw[-1]:.4f}"
            assert spearmanr(hs, pw)[0] > 0, f"seed {seed}: pairwise {pw}"
            assert spearmanr(hs, nb)[0] > 0, f"seed {seed}: neighbourhood {nb}"


def test_6_sweep_structure():
    with criterion(6, "sweep sample sizes shrink and weak rows are marked", 30.0):
        marked = 0
        for seed, h in ((3, 0.0), (4, 5.0), (5, 20.0)):
            scores = generate_bimodal_swb(BimodalSpec(n=1000, seed=seed))
            g = generate_homophilous_graph(scores, HomophilySpec(h=h, mean_degree=10, seed=seed))
            report = threshold_sweep(g, scores)
            rows = report.rows
            for a, b in zip(rows, rows[1:]):
                assert b.n_edges <= a.n_edges and b.n_nodes <= a.n_nodes
            for row in rows:
                p_ok = all(
                    res is not None and res.p_value is not None and res.p_value < 0.001
                    for res in (row.pairwise, row.neighborhood)
                )
                assert ("not_significant" in row.flags) == (not p_ok), row
                marked += not p_ok
        assert marked > 0


def test_7_diameter_exact():
    with criterion(7, "exact diameter equals all-pairs BFS; double sweep never exceeds it", 60.0):
        for seed in range(50):
            g = random_connected_graph(seed, max_nodes=1000)
            edges = [(u, v) for u, v, _ in g.edges()]
            truth = oracle_diameter(g.nodes, edges) if edges else 0
            exact = graph_stats(g, "exact").diameter
            assert exact == truth, f"seed {seed}"
            assert graph_stats(g, "double_sweep").diameter <= exact


def test_8_run_is_worker_independent(tmp_path):
    fx_dir = tmp_path / "fixture"
    generate_fixture(FixtureSpec(n=1000, h=20, seed=42)).write(fx_dir)
    with criterion(8, "full run byte-identical at 1, 4 and 16 workers", 60.0):
        bundles = {}
        for workers in (1, 4, 16):
            out = tmp_path / f"w{workers}"
            run_pipeline(
                PipelineConfig(
                    edges=fx_dir / "edges.tsv",
                    tweets=fx_dir / "tweets.jsonl",
                    lexicon=fx_dir / "lexicon.tsv",
                    out=out,
                    workers=workers,
                )
            )
            files = {}
            for f in sorted(out.iterdir()):
                if f.name == "manifest.json":
                    m = json.loads(f.read_text())
                    # the only fields that legitimately differ between runs
                    del m["created_at"], m["config"]["workers"], m["config"]["out"]
                    files[f.name] = json.dumps(m, sort_keys=True).encode()
                else:
                    files[f.name] = f.read_bytes()
            bundles[workers] = files
        assert bundles[1] == bundles[4] == bundles[16]
        assert len(bundles[1]) == 8


def test_9_swb_properties():
    pos, neg = ["good", "happy", "love"], ["bad", "sad", "hate"]
    lex = Lexicon({**{w: ("positive", "strong") for w in pos}, **{w: ("negative", "weak") for w in neg}})
    neutral = ["the", "weather", "is", "a", "train", "today"]
    ts = datetime(2024, 1, 1, tzinfo=timezone.utc)

    def tweet(words):
        return TweetRecord("u", ts, "tweet", " ".join(words))

    with criterion(9, "SWB bounds, balance, 3:1 value, permutation and neutral invariance", 5.0):
        rng = random.Random(99)
        assert score_user([tweet(["good"])] * 3 + [tweet(["bad"])], lex).swb == 0.5
        for _ in range(1000):
            timeline = []
            for _ in range(rng.randint(1, 40)):
                kind = rng.random()
                if kind < 0.35:
                    words = [rng.choice(pos)]
                elif kind < 0.7:
                    words = [rng.choice(neg)]
                else:
                    words = [rng.choice(neutral) for _ in range(3)]
                timeline.append(tweet(words))
            entry = score_user(timeline, lex)
            c = entry.counts
            assert -1.0 <= entry.swb <= 1.0
            if c.n_pos + c.n_neg:
                assert entry.swb == (c.n_pos - c.n_neg) / (c.n_pos + c.n_neg)
            else:
                assert entry.swb == 0.0 and entry.no_emotional_content
            if c.n_pos == c.n_neg:
                assert entry.swb == 0.0

            shuffled = timeline[:]
            rng.shuffle(shuffled)
            assert score_user(shuffled, lex).swb == entry.swb

            padded = timeline + [tweet([rng.choice(neutral)]) for _ in range(rng.randint(1, 20))]
            rng.shuffle(padded)
            assert score_user(padded, lex).swb == entry.swb

            k = rng.randint(1, 10)
            balanced = [tweet([rng.choice(pos)]) for _ in range(k)] + [tweet([rng.choice(neg)]) for _ in range(k)]
            assert score_user(balanced, lex).swb == 0.0
