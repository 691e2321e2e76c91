"""degreefit: heavy-tailed degree-distribution fitting, closed-form tail
prediction, synthetic graph generation and the three model-impact
experiments (robustness, influence, link privacy)."""

__version__ = "0.1.0"

from .distributions import (
    ModelKind,
    ModelSpec,
    PlnAuxiliaries,
    ccdf,
    ccdf_points,
    cdf,
    log_pdf,
    pdf,
    quantile,
    sample,
    support,
)
from .fitting import (
    FitReport,
    GridConfig,
    aic,
    fit_elementary,
    fit_grid,
    fit_model,
    fit_models,
    pln_reverse_log_likelihood,
    qq_points,
    reverse_log_likelihood,
    rss,
)
from .graphs import (
    Graph,
    configuration_model,
    degrees,
    graph_from_edges,
    largest_component_fraction,
    load_edge_list,
    pure_sample_degrees,
    remove_top_fraction,
    save_edge_list,
    two_phase_generate,
    validate_graph,
)
from .samples import DegreeSample
from .special import erfc_asymptotic, std_normal_ccdf, std_normal_cdf
from .tails import (
    TailReport,
    count_high_degree_pln,
    count_high_degree_powerlaw,
    ratio_theorem1,
    tail_report,
    xi_pln,
    xi_powerlaw,
)
from .experiments import (
    AttackConfig,
    CascadeConfig,
    CascadeModel,
    ExperimentResult,
    compare_models,
    influence_curve,
    privacy_attack,
    robustness_curve,
)

__all__ = [name for name in dir() if not name.startswith("_")]
