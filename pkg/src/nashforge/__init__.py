"""
NashForge - Stability certification for quadratic Nash equilibrium problems.
"""

from .core import (
    # Models
    Player,
    QpNepGame,
    Perturbation,
    PerturbationDirection,
    KktPoint,
    IndexSets,
    CheckResult,
    # KKT
    enumerate_kkt,
    classify_index_sets,
    kkt_residual,
    check_local_nash,
    # Constraint qualifications
    cq_report,
    # Stability
    check_critical_face,
    check_strong_regularity_sufficient,
    check_c1_localization,
    check_isolated_calmness_exact,
    check_i_property,
    check_p_property,
    AnalysisOptions,
    StabilityReport,
    analyze,
    # Perturbation harness
    sweep,
    estimate_calmness_constant,
    detect_branches
)

from .data import (
    load_game,
    load_direction,
    load_fixture,
    load_fixture_direction,
    report_to_dict,
    report_from_dict,
    sweep_to_dict,
    sweep_from_dict
)

from .exceptions import (
    NashForgeError,
    GameFormatError,
    DimensionError,
    ConfigError,
    GuardError,
    NumericalError,
    NotKktPointError
)

from .numerics import ConePositivityResult, Verdict, quad_family_positive_on_cone

from .utils import (
    setup_logging,
    get_logger,
    log_error
)

__version__ = '0.1.0'

__all__ = [
    # Package info
    '__version__',
    # Core - Models
    'Player',
    'QpNepGame',
    'Perturbation',
    'PerturbationDirection',
    'KktPoint',
    'IndexSets',
    'CheckResult',
    # Core - KKT
    'enumerate_kkt',
    'classify_index_sets',
    'kkt_residual',
    'check_local_nash',
    # Core - Constraint qualifications
    'cq_report',
    # Core - Stability
    'check_critical_face',
    'check_strong_regularity_sufficient',
    'check_c1_localization',
    'check_isolated_calmness_exact',
    'check_i_property',
    'check_p_property',
    'AnalysisOptions',
    'StabilityReport',
    'analyze',
    # Core - Perturbation harness
    'sweep',
    'estimate_calmness_constant',
    'detect_branches',
    # Data
    'load_game',
    'load_direction',
    'load_fixture',
    'load_fixture_direction',
    'report_to_dict',
    'report_from_dict',
    'sweep_to_dict',
    'sweep_from_dict',
    # Exceptions
    'NashForgeError',
    'GameFormatError',
    'DimensionError',
    'ConfigError',
    'GuardError',
    'NumericalError',
    'NotKktPointError',
    # Numerics
    'ConePositivityResult',
    'Verdict',
    'quad_family_positive_on_cone',
    # Utils - Logging
    'setup_logging',
    'get_logger',
    'log_error'
]
