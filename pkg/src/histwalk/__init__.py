"""History-aware random walks for sampling graphs behind a neighbor-query interface."""
from .access import AccessSession, BudgetExhausted, NotQueried, UnknownNode, unique_query_count
from .estimation import (
    EstimateReport,
    Measure,
    asymptotic_variance,
    attribute_measure,
    degree_measure,
    empirical_distribution,
    indicator_measure,
    stationary_mean,
    uniform_mean,
)
from .graph import (
    EdgePolicy,
    Graph,
    GraphError,
    ParseError,
    barbell_bridge,
    gen_barbell,
    gen_clustered,
    gen_complete,
    gen_path,
    gen_star,
    largest_connected_component,
    load_attributes,
    load_edge_list,
    true_stationary,
)
from .harness import AlgorithmSpec, ConfigError, ExperimentConfig, ResultRow, run_experiment, run_stationarity_check
from .metrics import DivergenceUndefined, kl_symmetric, l2_distance, relative_error, total_variation
from .pathblocks import PathBlock, block_counts, decompose, escape_probability
from .walkers import (
    ByAttribute,
    ByDegreeQuantile,
    ByHash,
    Trace,
    WalkerKind,
    WalkerState,
    make_groups,
    step_cnrw,
    step_gnrw,
    step_mhrw,
    step_nbcnrw,
    step_nbsrw,
    step_srw,
    walk,
)

__version__ = "0.1.0"
