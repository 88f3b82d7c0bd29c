"""Limiting schema frequencies for rollout populations mixed by crossover over set covers."""

from .cover import (
    Copy,
    Partition,
    Pseudometric,
    SetCover,
    base_of,
    build_partition,
    cover_from_pseudometric,
    expansion,
    is_compatible_triple,
    partition_as_cover,
    similarity_sets_of,
    validate_cover,
)
from .mixsim import (
    ChainState,
    FrequencyEstimate,
    MixDistribution,
    enumerate_class,
    exact_transition_matrix,
    first_position_fraction,
    project_equiv,
    run_chain,
    step,
    uniform_average_fraction,
)
from .population import (
    Population,
    Problem,
    Rollout,
    inflate,
    is_homologous,
    make_population,
    make_problem,
    total_states,
    validate_population,
)
from .predictor import (
    ClassChain,
    build_class_chain,
    estimate_payoff_mc,
    expected_payoff_exact,
    limiting_frequency,
    sample_class_rollout,
)
from .problem_io import load_fixture, load_problem, load_schemata
from .recombination import (
    CrossoverOp,
    apply_one_point,
    apply_op,
    apply_sequence,
    apply_single_swap,
    enumerate_generators,
)
from .schema import UNIVERSAL, OrderTable, Schema, build_order_table, coarsen, fits, schema_geq

__version__ = "0.1.0"
