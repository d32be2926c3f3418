"""Dense numerical kernels: linear algebra, LP, polyhedral cones and cone positivity."""

from .cones import ConeSpec, cone_nonzero_ray, lp_feasible_strict
from .linalg import NullBasis, min_eigpair, null_basis, rank, sym_eig_min
from .positivity import (
    Mode,
    exact_tier,
    grid_tier,
    quad_family_positive_on_cone,
    reduce_family,
    search_tier,
)
from .results import ConePositivityResult, Verdict
from .simplex import DenseSimplex, LpResult, LpStatus, solve_lp

__all__ = [
    'ConeSpec',
    'cone_nonzero_ray',
    'lp_feasible_strict',
    'NullBasis',
    'min_eigpair',
    'null_basis',
    'rank',
    'sym_eig_min',
    'Mode',
    'exact_tier',
    'grid_tier',
    'quad_family_positive_on_cone',
    'reduce_family',
    'search_tier',
    'ConePositivityResult',
    'Verdict',
    'DenseSimplex',
    'LpResult',
    'LpStatus',
    'solve_lp',
]
