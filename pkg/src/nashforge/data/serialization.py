"""Machine-readable documents for stability reports and perturbation sweeps."""

import json
import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.analysis import StabilityReport
from ..core.cq import Convexity, CqReport, SmfcqResult
from ..core.models import CheckResult, IndexSets, KktPoint, PerturbationDirection
from ..core.perturb import Branch, BranchSummary, CalmnessEstimate, SweepResult
from ..numerics.results import ConePositivityResult, Verdict
from .config import JSON_INDENT


def to_jsonable(value: Any) -> Any:
    """Recursively convert numpy scalars/arrays, enums and tuples to JSON types."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _finite_or_tag(float(value))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


def dumps(document: Dict[str, Any]) -> str:
    """Deterministic JSON text: sorted keys, fixed indent, shortest float repr."""
    return json.dumps(to_jsonable(document), sort_keys=True, indent=JSON_INDENT, allow_nan=False)


def _finite_or_tag(value: float) -> Any:
    """Infinities become "inf" / "-inf" and NaN becomes null."""
    if math.isnan(value):
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _real(value: Any) -> Optional[float]:
    """Inverse of the float encoding of :func:`to_jsonable`."""
    return None if value is None else float(value)


def _optional_array(values: Optional[List[float]]) -> Optional[np.ndarray]:
    return None if values is None else np.asarray(values, dtype=float)


# Points and index sets

def point_to_dict(point: KktPoint) -> Dict[str, Any]:
    return {
        'x': point.x.tolist(),
        'lam': point.lam.tolist(),
        'active_set': list(point.active_set),
        'residual': float(point.residual),
        'non_isolated': bool(point.non_isolated),
    }


def point_from_dict(doc: Dict[str, Any]) -> KktPoint:
    return KktPoint(
        np.asarray(doc['x'], dtype=float), np.asarray(doc['lam'], dtype=float),
        tuple(doc.get('active_set', ())), float(doc.get('residual', 0.0)),
        bool(doc.get('non_isolated', False)),
    )


def index_sets_to_dict(sets: IndexSets) -> Dict[str, Any]:
    return {
        'I1': [list(s) for s in sets.I1],
        'I2': [list(s) for s in sets.I2],
        'I3': [list(s) for s in sets.I3],
        'tol_active': sets.tol_active,
    }


def index_sets_from_dict(doc: Dict[str, Any]) -> IndexSets:
    return IndexSets(
        tuple(tuple(s) for s in doc['I1']),
        tuple(tuple(s) for s in doc['I2']),
        tuple(tuple(s) for s in doc['I3']),
        float(doc['tol_active']),
    )


# Checks

def positivity_to_dict(result: ConePositivityResult) -> Dict[str, Any]:
    return {
        'verdict': result.verdict.value,
        'witness': None if result.witness is None else np.asarray(result.witness).tolist(),
        'margin': result.margin,
        'method': result.method,
        'best_value': result.best_value,
        'note': result.note,
    }


def positivity_from_dict(doc: Dict[str, Any]) -> ConePositivityResult:
    return ConePositivityResult(
        Verdict(doc['verdict']), witness=_optional_array(doc.get('witness')),
        margin=_real(doc.get('margin')), method=doc.get('method', 'none'),
        best_value=_real(doc.get('best_value')), note=doc.get('note', ''),
    )


def check_to_dict(check: CheckResult) -> Dict[str, Any]:
    return {
        'check_name': check.name,
        'verdict': check.verdict.value,
        'witness': check.witness,
        'margin': check.margin,
        'certificate_method': check.method,
        'clause': check.clause,
        'details': check.details,
    }


def check_from_dict(doc: Dict[str, Any]) -> CheckResult:
    return CheckResult(
        doc['check_name'], Verdict(doc['verdict']), witness=doc.get('witness'),
        margin=_real(doc.get('margin')), method=doc.get('certificate_method', 'none'),
        clause=doc.get('clause'), details=dict(doc.get('details') or {}),
    )


def cq_to_dict(cq: CqReport) -> Dict[str, Any]:
    return {
        'licq': list(cq.licq),
        'smfcq': [{'holds': s.holds,
                   'direction': None if s.direction is None else s.direction.tolist()}
                  for s in cq.smfcq],
        'scsc': list(cq.scsc),
        'convexity': [{'convex': c.convex, 'min_eig': c.min_eig} for c in cq.convexity],
        'ssosc': [positivity_to_dict(s) for s in cq.ssosc],
    }


def cq_from_dict(doc: Dict[str, Any]) -> CqReport:
    return CqReport(
        licq=[bool(v) for v in doc['licq']],
        smfcq=[SmfcqResult(bool(s['holds']), _optional_array(s.get('direction')))
               for s in doc['smfcq']],
        scsc=[bool(v) for v in doc['scsc']],
        convexity=[Convexity(bool(c['convex']), _real(c['min_eig'])) for c in doc['convexity']],
        ssosc=[positivity_from_dict(s) for s in doc['ssosc']],
    )


def report_to_dict(report: StabilityReport) -> Dict[str, Any]:
    """
    Stability report document.

    ``checks`` is a list in report order; each entry carries check_name,
    verdict, witness, margin, certificate_method, clause and details.
    """
    return to_jsonable({
        'point': point_to_dict(report.point),
        'index_sets': index_sets_to_dict(report.index_sets),
        'cq': cq_to_dict(report.cq),
        'checks': [check_to_dict(c) for c in report.checks.values()],
        'notes': list(report.notes),
        'kappa_hat': report.kappa_hat,
    })


def report_from_dict(doc: Dict[str, Any]) -> StabilityReport:
    checks = [check_from_dict(c) for c in doc['checks']]
    return StabilityReport(
        point=point_from_dict(doc['point']),
        index_sets=index_sets_from_dict(doc['index_sets']),
        cq=cq_from_dict(doc['cq']),
        checks={c.name: c for c in checks},
        notes=tuple(doc.get('notes', ())),
        kappa_hat=_real(doc.get('kappa_hat')),
    )


# Sweeps

def estimate_to_dict(estimate: CalmnessEstimate) -> Dict[str, Any]:
    return {
        'kappa_hat': estimate.kappa_hat,
        'kappa_hat_z': estimate.kappa_hat_z,
        'existence_profile': list(estimate.existence_profile),
        'ratios': list(estimate.ratios),
    }


def estimate_from_dict(doc: Dict[str, Any]) -> CalmnessEstimate:
    return CalmnessEstimate(
        _real(doc.get('kappa_hat')), _real(doc.get('kappa_hat_z')),
        [bool(v) for v in doc['existence_profile']], [_real(r) for r in doc['ratios']],
    )


def branches_to_dict(summary: BranchSummary) -> Dict[str, Any]:
    return {
        'count_positive': summary.count_positive,
        'count_negative': summary.count_negative,
        'kink': summary.kink,
        'kink_gap': summary.kink_gap,
        'branches': [{
            'label': b.label,
            'side': b.side,
            't': list(b.t),
            'z': [np.asarray(z).tolist() for z in b.z],
            'ambiguous': b.ambiguous,
        } for b in summary.branches],
    }


def branches_from_dict(doc: Dict[str, Any]) -> BranchSummary:
    branches = [Branch(b['label'], int(b['side']), [float(t) for t in b['t']],
                       [np.asarray(z, dtype=float) for z in b['z']], bool(b['ambiguous']))
                for b in doc['branches']]
    return BranchSummary(branches, int(doc['count_positive']), int(doc['count_negative']),
                         doc.get('kink'), _real(doc.get('kink_gap')))


def sweep_to_dict(result: SweepResult, estimate: Optional[CalmnessEstimate] = None,
                  summary: Optional[BranchSummary] = None) -> Dict[str, Any]:
    """Sweep document, optionally with the calmness estimate and branch summary."""
    doc: Dict[str, Any] = {
        'reference': point_to_dict(result.reference),
        'direction': {'du': result.direction.du.tolist(), 'dv': result.direction.dv.tolist()},
        't_grid': np.asarray(result.t_grid, dtype=float).tolist(),
        'window': result.window,
        'points': [[point_to_dict(q) for q in pts] for pts in result.points],
        'nash': [[v.value for v in row] for row in result.nash],
        'labels': [list(row) for row in result.labels],
        'ambiguous': [[t, label] for t, label in result.ambiguous],
        'nearest_outside': list(result.nearest_outside),
        'excluded': [[t, d] for t, d in result.excluded],
        'existence_profile': result.existence_profile,
        'robustness_violated': result.robustness_violated,
    }
    if estimate is not None:
        doc['calmness'] = estimate_to_dict(estimate)
    if summary is not None:
        doc['branches'] = branches_to_dict(summary)
    return to_jsonable(doc)


def sweep_from_dict(doc: Dict[str, Any]) -> Tuple[SweepResult, Optional[CalmnessEstimate],
                                                   Optional[BranchSummary]]:
    result = SweepResult(
        reference=point_from_dict(doc['reference']),
        direction=PerturbationDirection(np.asarray(doc['direction']['du'], dtype=float),
                                        np.asarray(doc['direction']['dv'], dtype=float)),
        t_grid=np.asarray(doc['t_grid'], dtype=float),
        points=[[point_from_dict(q) for q in pts] for pts in doc['points']],
        nash=[[Verdict(v) for v in row] for row in doc['nash']],
        window=float(doc['window']),
        labels=[list(row) for row in doc.get('labels', [])],
        ambiguous=[(float(t), str(label)) for t, label in doc.get('ambiguous', [])],
        nearest_outside=[_real(d) for d in doc.get('nearest_outside', [])],
    )
    estimate = estimate_from_dict(doc['calmness']) if 'calmness' in doc else None
    summary = branches_from_dict(doc['branches']) if 'branches' in doc else None
    return result, estimate, summary
