"""Run every stability check at a KKT point and assemble the report."""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import pandas as pd

from ..exceptions import NotKktPointError
from ..numerics.results import Verdict
from ..utils.config import DEFAULTS
from ..utils.formatting import format_margin, format_verdict
from ..utils.logging import get_logger
from .calmness import check_i_property, check_isolated_calmness_exact, check_p_property
from .cq import CqReport, cq_report
from .kkt import check_local_nash, classify_index_sets, kkt_residual
from .models import CheckResult, IndexSets, KktPoint, Perturbation, QpNepGame
from .regularity import (
    AlphaParams,
    check_c1_localization,
    check_c1_localization_sufficient,
    check_critical_face,
    check_strong_regularity_monotone,
    check_strong_regularity_sufficient,
)

logger = get_logger(__name__)

REPORT_NOTES = (
    "Every verdict applies equally to the full KKT mapping and to the tilt-only mapping.",
    "For QP data the linearized KKT system coincides with the KKT system.",
    "The solution set of the homogeneous isolated-calmness system is a cone, "
    "so isolation is decided exactly by LP.",
    "I-property FAILS alone does not imply that isolated calmness fails.",
)

CHECK_ORDER = (
    "strong_regularity",
    "strong_regularity_sufficient",
    "strong_regularity_monotone",
    "c1_localization",
    "c1_localization_sufficient",
    "isolated_calmness_exact",
    "i_property",
    "p_property",
    "isolated_calmness_sufficient",
    "robust_isolated_calmness",
    "local_nash",
)


@dataclass(frozen=True)
class AnalysisOptions:
    tol_kkt: float = DEFAULTS.tol_kkt
    tol_active: float = DEFAULTS.tol_active
    grid_res: float = DEFAULTS.grid_res
    starts: int = DEFAULTS.starts
    seed: int = DEFAULTS.seed
    alpha: Union[str, AlphaParams] = "uniform"
    max_weak: int = DEFAULTS.max_weak


@dataclass
class StabilityReport:
    """Verdicts of all checks at one KKT point."""

    point: KktPoint
    index_sets: IndexSets
    cq: CqReport
    checks: Dict[str, CheckResult]
    notes: Tuple[str, ...] = REPORT_NOTES
    kappa_hat: Optional[float] = None

    def __getitem__(self, name: str) -> CheckResult:
        return self.checks[name]

    def verdicts(self) -> Dict[str, Verdict]:
        return {name: c.verdict for name, c in self.checks.items()}

    def to_frame(self) -> pd.DataFrame:
        """One row per check: verdict, margin, method and failing clause."""
        rows = [{
            'check': name,
            'verdict': format_verdict(c.verdict, c.clause),
            'margin': format_margin(c.margin),
            'method': c.method,
        } for name, c in self.checks.items()]
        return pd.DataFrame(rows).set_index('check')


def composite(name: str, clauses: Sequence[Tuple[str, Union[bool, CheckResult]]]) -> CheckResult:
    """
    Conjunction of clauses: HOLDS when all hold, FAILS naming the first failing
    clause, UNDECIDED otherwise.
    """
    verdicts = []
    for label, clause in clauses:
        if isinstance(clause, CheckResult):
            verdicts.append((label, clause.verdict))
        else:
            verdicts.append((label, Verdict.HOLDS if clause else Verdict.FAILS))
    details = {label: v.value for label, v in verdicts}
    for label, v in verdicts:
        if v is Verdict.FAILS:
            return CheckResult(name, Verdict.FAILS, method="composite", clause=label, details=details)
    if all(v is Verdict.HOLDS for _, v in verdicts):
        return CheckResult(name, Verdict.HOLDS, method="composite", details=details)
    return CheckResult(name, Verdict.UNDECIDED, method="composite", details=details)


def analyze(game: QpNepGame, p: Perturbation, point: KktPoint,
            options: Optional[AnalysisOptions] = None) -> StabilityReport:
    """
    Analyze the stability of a KKT point.

    Args:
        game: The game.
        p: Perturbation at which the point solves the KKT system.
        point: The KKT point.
        options: Tolerances, search and grid parameters.

    Returns:
        StabilityReport with every check and the composite verdicts.

    Raises:
        NotKktPointError: If the point's residual exceeds ``options.tol_kkt``.
        GuardError: If |I2| exceeds ``options.max_weak``.
    """
    options = options or AnalysisOptions()
    residual = kkt_residual(game, p, point)
    if residual > options.tol_kkt:
        raise NotKktPointError(f"residual {residual:.3g} exceeds tol_kkt {options.tol_kkt:.3g}")

    try:
        sets = classify_index_sets(game, p, point, options.tol_active)
        cq = cq_report(game, sets)
        search = dict(grid_res=options.grid_res, starts=options.starts, seed=options.seed)
        alpha = None if options.alpha == "uniform" else options.alpha

        checks: Dict[str, CheckResult] = {}
        checks["strong_regularity"] = check_critical_face(game, sets, options.max_weak)
        checks["strong_regularity_sufficient"] = check_strong_regularity_sufficient(game, sets, alpha)
        checks["strong_regularity_monotone"] = check_strong_regularity_monotone(game, sets)
        checks["c1_localization"] = check_c1_localization(game, sets)
        checks["c1_localization_sufficient"] = check_c1_localization_sufficient(game, sets, alpha)
        checks["isolated_calmness_exact"] = check_isolated_calmness_exact(game, sets, options.max_weak)
        checks["i_property"] = check_i_property(game, sets, **search)
        checks["p_property"] = check_p_property(game, sets, **search)
        checks["isolated_calmness_sufficient"] = composite(
            "isolated_calmness_sufficient",
            [("SMFCQ", cq.all_smfcq), ("I-property", checks["i_property"])],
        )
        checks["robust_isolated_calmness"] = composite(
            "robust_isolated_calmness",
            [("convexity", cq.all_convex), ("SMFCQ", cq.all_smfcq),
             ("P-property", checks["p_property"])],
        )
        checks["local_nash"] = check_local_nash(game, p, point, options.tol_active, **search)
    except Exception as e:
        logger.error(f"Error analyzing KKT point: {e}")
        raise

    summary = ", ".join(f"{name}={checks[name].verdict.value}" for name in
                        ("strong_regularity", "isolated_calmness_exact", "robust_isolated_calmness"))
    logger.info(f"Analysis complete: {summary}")
    return StabilityReport(point, sets, cq, {name: checks[name] for name in CHECK_ORDER})


def consistency_violations(report: StabilityReport) -> List[str]:
    """Implications between verdicts that a correct report never breaks."""
    c = report.checks
    out = []
    if c["c1_localization"].holds and c["strong_regularity"].fails:
        out.append("C1 localization holds but strong regularity fails")
    if c["strong_regularity"].holds and c["isolated_calmness_exact"].fails:
        out.append("strong regularity holds but isolated calmness fails")
    if c["strong_regularity_sufficient"].holds and c["strong_regularity"].fails:
        out.append("sufficient strong-regularity condition holds but the exact test fails")
    return out
