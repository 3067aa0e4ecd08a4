import numpy as np
import pytest
from scipy.signal import find_peaks
from scipy.stats import spearmanr

from swb_assort.assortativity import bootstrap_null_band, neighborhood_assortativity, pairwise_assortativity
from swb_assort.errors import ComputationError, ConfigError
from swb_assort.graph import WeightedFriendGraph, compute_jaccard_weights
from swb_assort.graphio import format_graph, read_graph
from swb_assort.sentiment import iter_tweets, load_lexicon, read_scores, score_users
from swb_assort.synth import (
    BimodalSpec,
    FixtureSpec,
    HomophilySpec,
    Mode,
    bimodal_sample,
    generate_bimodal_swb,
    generate_fixture,
    generate_homophilous_graph,
    mixture_cdf,
)


class TestBimodal:
    def test_collapsed_mixture(self):
        spec = BimodalSpec(n=500, mode1=Mode(0.25, 1e-9, 1.0), mode2=Mode(-0.5, 0.1, 0.0), seed=1)
        values = list(generate_bimodal_swb(spec).swb().values())
        assert np.allclose(values, 0.25, atol=1e-7)

    def test_two_local_maxima(self):
        sample = bimodal_sample(BimodalSpec(n=5000, seed=2))
        counts, edges = np.histogram(sample, bins=np.arange(-0.3, 0.7001, 0.05))
        # zero-padded so a peak in the first or last bin is still found
        peaks, _ = find_peaks(np.r_[0, counts, 0], prominence=0.02 * len(sample))
        peaks = peaks - 1
        centers = [(edges[i] + edges[i + 1]) / 2 for i in peaks]
        assert len(peaks) == 2
        assert abs(centers[0] - 0.0) <= 0.05 and abs(centers[1] - 0.3) <= 0.05

    def test_same_seed_same_scores(self):
        a = generate_bimodal_swb(BimodalSpec(n=300, seed=9)).swb()
        b = generate_bimodal_swb(BimodalSpec(n=300, seed=9)).swb()
        c = generate_bimodal_swb(BimodalSpec(n=300, seed=10)).swb()
        assert a == b and a != c

    def test_clipped(self):
        spec = BimodalSpec(n=2000, mode1=Mode(-0.9, 0.5, 0.5), mode2=Mode(0.9, 0.5, 0.5), seed=0)
        s = bimodal_sample(spec)
        assert s.min() >= -1.0 and s.max() <= 1.0

    def test_sample_follows_mixture_cdf(self):
        spec = BimodalSpec(n=20_000, seed=4)
        s = np.sort(bimodal_sample(spec))
        for x in (-0.1, 0.0, 0.1, 0.2, 0.3, 0.45):
            assert np.searchsorted(s, x) / len(s) == pytest.approx(mixture_cdf(x, spec), abs=0.015)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"n": 0},
            {"mode1": Mode(0.0, 0.1, 0.6)},
            {"mode1": Mode(0.0, 0.0, 0.5)},
            {"mode2": Mode(1.5, 0.1, 0.5)},
            {"seed": -1},
        ],
    )
    def test_invalid_spec(self, kwargs):
        with pytest.raises(ConfigError):
            BimodalSpec(**kwargs)


class TestHomophilousGraph:
    def test_realized_mean_degree(self):
        s = generate_bimodal_swb(BimodalSpec(n=1000, seed=1))
        g = generate_homophilous_graph(s, HomophilySpec(h=5, mean_degree=4, seed=1))
        mean_degree = 2 * g.number_of_edges() / g.number_of_nodes()
        assert abs(mean_degree - 4) <= 0.05 * 4

    def test_graph_invariants_and_weights(self):
        s = generate_bimodal_swb(BimodalSpec(n=300, seed=2))
        g = generate_homophilous_graph(s, HomophilySpec(h=10, mean_degree=6, seed=2))
        assert g.weighted
        for u, v, w in g.edges():
            assert u != v and 0.0 <= w <= 1.0
            assert g.has_edge(v, u)
        unweighted = WeightedFriendGraph(g.nodes, ((u, v, 1.0) for u, v, _ in g.edges()))
        assert format_graph(compute_jaccard_weights(unweighted)) == format_graph(g)

    def test_deterministic(self):
        s = generate_bimodal_swb(BimodalSpec(n=300, seed=3))
        spec = HomophilySpec(h=5, mean_degree=6, seed=3)
        assert format_graph(generate_homophilous_graph(s, spec)) == format_graph(generate_homophilous_graph(s, spec))

    def test_null_at_h_zero(self):
        s = generate_bimodal_swb(BimodalSpec(n=600, seed=4))
        g = generate_homophilous_graph(s, HomophilySpec(h=0, mean_degree=10, seed=4))
        lo, hi = bootstrap_null_band(g, s, n_boot=1000, seed=4)
        assert lo <= pairwise_assortativity(g, s).r <= hi

    def test_strong_homophily(self):
        s = generate_bimodal_swb(BimodalSpec(n=600, seed=5))
        g = generate_homophilous_graph(s, HomophilySpec(h=50, mean_degree=10, seed=5))
        assert pairwise_assortativity(g, s).r > 0.5

    def test_trend_in_h(self):
        s = generate_bimodal_swb(BimodalSpec(n=500, seed=6))
        hs = [0, 1, 5, 20, 50]
        pw, nb = [], []
        for h in hs:
            g = generate_homophilous_graph(s, HomophilySpec(h=h, mean_degree=10, seed=6))
            pw.append(pairwise_assortativity(g, s).r)
            nb.append(neighborhood_assortativity(g, s).r)
        assert spearmanr(hs, pw)[0] > 0
        assert spearmanr(hs, nb)[0] > 0

    def test_unreachable_target(self):
        s = {"a": -1.0, "b": -0.5, "c": 0.0, "d": 0.5, "e": 1.0}
        with pytest.raises(ComputationError, match="unreachable"):
            generate_homophilous_graph(s, HomophilySpec(h=5000, mean_degree=2, seed=0, max_attempts_per_edge=50))

    @pytest.mark.parametrize("kwargs", [{"h": -1}, {"mean_degree": 0}])
    def test_invalid_spec(self, kwargs):
        with pytest.raises(ConfigError):
            HomophilySpec(**kwargs)

    def test_degree_too_high(self):
        s = {"a": 0.0, "b": 0.1, "c": 0.2}
        with pytest.raises(ConfigError):
            generate_homophilous_graph(s, HomophilySpec(mean_degree=2))


@pytest.fixture(scope="module")
def written(tmp_path_factory):
    fx = generate_fixture(FixtureSpec(n=200, h=20, mean_degree=6, seed=11))
    return fx, fx.write(tmp_path_factory.mktemp("fx"))


class TestFixture:
    def test_files_load(self, written):
        fx, paths = written
        assert read_graph(paths["graph"]) == read_graph(paths["graph"])
        assert format_graph(read_graph(paths["graph"])) == format_graph(fx.graph)
        assert read_scores(paths["scores"]).swb() == pytest.approx(fx.scores.swb(), abs=0)

    def test_tweets_realize_planted_scores(self, written):
        fx, paths = written
        lex = load_lexicon(paths["lexicon"])
        measured = score_users(iter_tweets(paths["tweets"]), lex)
        planted = fx.scores.swb()
        for u, e in measured.items():
            if e.no_emotional_content:
                continue
            n_emotional = e.counts.n_pos + e.counts.n_neg
            # rounding N_p to an integer moves S by at most 1 / n_emotional
            assert abs(e.swb - planted[u]) <= 1.0 / n_emotional + 1e-12

    def test_reproducible(self, written, tmp_path):
        fx, paths = written
        again = generate_fixture(fx.spec).write(tmp_path)
        for key in paths:
            assert paths[key].read_bytes() == again[key].read_bytes()

    def test_metadata_records_generator(self, written):
        fx, _ = written
        meta = fx.metadata()
        assert meta["rng"] == "numpy.PCG64"
        assert meta["spec"]["seed"] == 11
