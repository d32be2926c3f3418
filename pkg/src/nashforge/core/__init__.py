"""Core functionality for NashForge."""

from .models import (
    Player,
    QpNepGame,
    Perturbation,
    PerturbationDirection,
    KktPoint,
    IndexSets,
    CheckResult
)
from .game import (
    Violation,
    apply_tilt,
    player_gradient,
    player_objective,
    symmetrize,
    symmetrized_game,
    validate_direction,
    validate_game
)
from .kkt import (
    check_local_nash,
    classify_index_sets,
    enumerate_kkt,
    kkt_residual,
    sort_points
)
from .cq import (
    CqReport,
    check_convexity,
    check_licq,
    check_scsc,
    check_smfcq,
    check_ssosc,
    cq_report
)
from .regularity import (
    AlphaParams,
    GameJacobian,
    Partition,
    build_game_jacobian,
    check_c1_localization,
    check_c1_localization_sufficient,
    check_critical_face,
    check_strong_regularity_monotone,
    check_strong_regularity_sufficient,
    cone_of,
    enumerate_partitions
)
from .calmness import (
    check_i_property,
    check_isolated_calmness_exact,
    check_p_property
)
from .analysis import (
    AnalysisOptions,
    StabilityReport,
    analyze
)
from .perturb import (
    BranchSummary,
    CalmnessEstimate,
    SweepResult,
    default_window,
    detect_branches,
    estimate_calmness_constant,
    parse_t_grid,
    sweep
)

__all__ = [
    # Models
    'Player',
    'QpNepGame',
    'Perturbation',
    'PerturbationDirection',
    'KktPoint',
    'IndexSets',
    'CheckResult',
    # Game
    'Violation',
    'apply_tilt',
    'player_gradient',
    'player_objective',
    'symmetrize',
    'symmetrized_game',
    'validate_direction',
    'validate_game',
    # KKT
    'check_local_nash',
    'classify_index_sets',
    'enumerate_kkt',
    'kkt_residual',
    'sort_points',
    # Constraint qualifications
    'CqReport',
    'check_convexity',
    'check_licq',
    'check_scsc',
    'check_smfcq',
    'check_ssosc',
    'cq_report',
    # Strong regularity
    'AlphaParams',
    'GameJacobian',
    'Partition',
    'build_game_jacobian',
    'check_c1_localization',
    'check_c1_localization_sufficient',
    'check_critical_face',
    'check_strong_regularity_monotone',
    'check_strong_regularity_sufficient',
    'cone_of',
    'enumerate_partitions',
    # Isolated calmness
    'check_i_property',
    'check_isolated_calmness_exact',
    'check_p_property',
    # Analysis
    'AnalysisOptions',
    'StabilityReport',
    'analyze',
    # Perturbation harness
    'BranchSummary',
    'CalmnessEstimate',
    'SweepResult',
    'default_window',
    'detect_branches',
    'estimate_calmness_constant',
    'parse_t_grid',
    'sweep'
]
