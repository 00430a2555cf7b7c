"""Simulation and verification lab for Voronoi percolation in rectangles.

Build a Voronoi tessellation from a random point configuration in a
rectangular window, color cells by fair coins, and study crossing events:
quenched probabilities (exact or Monte Carlo), influences, an exploration
algorithm with low revealment, one-arm and circuit events in annuli,
binomial-vs-Poisson comparison bounds, and batch concentration experiments.
"""

from .arms import (
    AnnulusQuery,
    ArmQuery,
    blue_circuit_indicator,
    blue_circuit_quenched_mc,
    build_annulus_graph,
    build_arm_graph,
    one_arm_indicator,
    one_arm_quenched_exact,
    one_arm_quenched_mc,
)
from .compare import (
    ComparisonReport,
    EventSpec,
    PiBoundsReport,
    PiRatioTable,
    check_pi_bounds,
    check_pi_bounds_single,
    default_event_spec,
    empirical_comparison,
    pi_ratio,
    pi_table,
)
from .crossing import (
    BLUE,
    ENUMERATION_LIMIT,
    HORIZONTAL,
    RED,
    VERTICAL,
    Coloring,
    CrossingQuery,
    EnumerationLimitError,
    QueryGraph,
    QuenchedEstimate,
    build_query_graph,
    check_duality,
    crossing_truth_table,
    detect_crossing,
    draw_coloring,
    quenched_probability_exact,
    quenched_probability_mc,
)
from .experiments import (
    KINDS,
    BoxRow,
    DeviationRow,
    EfronSteinRow,
    ExperimentConfig,
    ExpIneqRow,
    exp_box_crossing,
    exp_concentration,
    exp_efron_stein,
    exp_exp_inequality,
    rows_to_csv,
    run_experiment,
    summary_json,
    write_outputs,
)
from .explore import (
    BoundCheck,
    QueryTrace,
    RevealmentReport,
    check_influence_revealment_bound,
    quarter_inner,
    revealment_exact,
    revealment_mc,
    run_exploration,
)
from .geometry import (
    Configuration,
    DegenerateConfigurationError,
    Rect,
    Tessellation,
    build_tessellation,
    cell_radius_stats,
    halfplane_window,
    sample_binomial,
    sample_poisson,
)
from .influence import InfluenceVector, influence_l2, influences_exact, influences_mc
from .io import read_points, write_points

__version__ = "0.1.0"

__all__ = [
    "AnnulusQuery",
    "ArmQuery",
    "BLUE",
    "BoundCheck",
    "BoxRow",
    "Coloring",
    "ComparisonReport",
    "Configuration",
    "CrossingQuery",
    "DegenerateConfigurationError",
    "DeviationRow",
    "EfronSteinRow",
    "ENUMERATION_LIMIT",
    "EnumerationLimitError",
    "EventSpec",
    "ExperimentConfig",
    "ExpIneqRow",
    "HORIZONTAL",
    "InfluenceVector",
    "KINDS",
    "PiBoundsReport",
    "PiRatioTable",
    "QueryGraph",
    "QueryTrace",
    "QuenchedEstimate",
    "RED",
    "Rect",
    "RevealmentReport",
    "Tessellation",
    "VERTICAL",
    "blue_circuit_indicator",
    "blue_circuit_quenched_mc",
    "build_annulus_graph",
    "build_arm_graph",
    "build_query_graph",
    "build_tessellation",
    "cell_radius_stats",
    "check_duality",
    "check_influence_revealment_bound",
    "check_pi_bounds",
    "check_pi_bounds_single",
    "crossing_truth_table",
    "default_event_spec",
    "detect_crossing",
    "draw_coloring",
    "empirical_comparison",
    "exp_box_crossing",
    "exp_concentration",
    "exp_efron_stein",
    "exp_exp_inequality",
    "halfplane_window",
    "influence_l2",
    "influences_exact",
    "influences_mc",
    "one_arm_indicator",
    "one_arm_quenched_exact",
    "one_arm_quenched_mc",
    "pi_ratio",
    "pi_table",
    "quarter_inner",
    "quenched_probability_exact",
    "quenched_probability_mc",
    "read_points",
    "revealment_exact",
    "revealment_mc",
    "rows_to_csv",
    "run_experiment",
    "run_exploration",
    "sample_binomial",
    "sample_poisson",
    "summary_json",
    "write_points",
]
