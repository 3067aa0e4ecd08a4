"""Friend-graph construction, lexicon SWB scoring and assortativity measurement."""

from swb_assort.errors import (
    ComputationError,
    ConfigError,
    DegenerateInputError,
    IngestionError,
    LexiconError,
    SwbAssortError,
)
from swb_assort.graph import (
    DirectedGraph,
    GraphStats,
    WeightedFriendGraph,
    build_directed_graph,
    compute_jaccard_weights,
    extract_reciprocal,
    filter_active_users,
    graph_stats,
    largest_connected_component,
    threshold_subgraph,
)
from swb_assort.sentiment import (
    Lexicon,
    SwbScores,
    classify_tweet,
    load_lexicon,
    score_user,
    score_users,
    swb_distribution,
    tokenize,
)
from swb_assort.correlation import CorrelationResult, pearson
from swb_assort.assortativity import (
    AssortativityReport,
    neighborhood_assortativity,
    pairwise_assortativity,
    threshold_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "AssortativityReport",
    "ComputationError",
    "ConfigError",
    "CorrelationResult",
    "DegenerateInputError",
    "DirectedGraph",
    "GraphStats",
    "IngestionError",
    "Lexicon",
    "LexiconError",
    "SwbAssortError",
    "SwbScores",
    "WeightedFriendGraph",
    "build_directed_graph",
    "classify_tweet",
    "compute_jaccard_weights",
    "extract_reciprocal",
    "filter_active_users",
    "graph_stats",
    "largest_connected_component",
    "load_lexicon",
    "neighborhood_assortativity",
    "pairwise_assortativity",
    "pearson",
    "score_user",
    "score_users",
    "swb_distribution",
    "threshold_subgraph",
    "threshold_sweep",
    "tokenize",
]
