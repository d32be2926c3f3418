"""
Perturbation harness: sweep tilt paths, track solution branches and estimate
calmness constants around a reference KKT point.
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..exceptions import ConfigError, NotKktPointError
from ..numerics.results import Verdict
from ..utils.config import DEFAULTS
from ..utils.logging import get_logger
from .game import apply_tilt
from .kkt import DEDUP_RADIUS, check_local_nash, enumerate_kkt, kkt_residual
from .models import KktPoint, Perturbation, PerturbationDirection, QpNepGame

logger = get_logger(__name__)

DEFAULT_WINDOW = 0.5
KINK_TOL = 1e-6
TIE_TOL = 1e-12


def parse_t_grid(spec: str) -> np.ndarray:
    """
    Parse "START:STOP:COUNT" into an evenly spaced grid.

    Raises:
        ConfigError: On malformed input, COUNT < 2 or START == STOP.
    """
    parts = spec.split(":")
    if len(parts) != 3:
        raise ConfigError(f"t grid must look like START:STOP:COUNT, got {spec!r}")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as e:
        raise ConfigError(f"t grid {spec!r} is not numeric") from e
    if count < 2:
        raise ConfigError(f"t grid needs at least 2 points, got {count}")
    if start == stop:
        raise ConfigError("t grid START and STOP must differ")
    grid = np.linspace(start, stop, count)
    # rounding residue of a grid through the origin
    grid[np.abs(grid) <= 1e-12 * max(abs(start), abs(stop))] = 0.0
    return grid


def default_window(game: QpNepGame, reference: KktPoint,
                   points: Optional[Sequence[KktPoint]] = None,
                   max_ineq: int = DEFAULTS.max_ineq) -> float:
    """Half the max-norm distance from the reference to the nearest other KKT point at t = 0."""
    if points is None:
        points = enumerate_kkt(game, Perturbation.zero(game), max_ineq=max_ineq)
    others = [reference.distance(q) for q in points if reference.distance(q) > DEDUP_RADIUS]
    return 0.5 * min(others) if others else DEFAULT_WINDOW


@dataclass
class SweepResult:
    """KKT points found inside the window around the reference, per t."""

    reference: KktPoint
    direction: PerturbationDirection
    t_grid: np.ndarray
    points: List[List[KktPoint]]
    nash: List[List[Verdict]]
    window: float
    labels: List[List[str]] = field(default_factory=list)
    ambiguous: List[Tuple[float, str]] = field(default_factory=list)
    nearest_outside: List[Optional[float]] = field(default_factory=list)

    @property
    def existence_profile(self) -> List[bool]:
        return [len(pts) > 0 for pts in self.points]

    @property
    def robustness_violated(self) -> bool:
        """Some t != 0 has no KKT point in the window."""
        return any(t != 0 and not pts for t, pts in zip(self.t_grid, self.points))

    @property
    def excluded(self) -> List[Tuple[float, float]]:
        """(t, distance) for t with KKT points, all of them outside the window."""
        return [(float(t), d) for t, pts, d in zip(self.t_grid, self.points, self.nearest_outside)
                if not pts and d is not None]

    def to_frame(self) -> pd.DataFrame:
        """Tidy table: one row per found point."""
        rows = []
        for j, t in enumerate(self.t_grid):
            for q, label, nash in zip(self.points[j], self.labels[j], self.nash[j]):
                row = {'t': float(t), 'branch': label}
                row.update({f'x{i}': v for i, v in enumerate(q.x)})
                row.update({f'lam{i}': v for i, v in enumerate(q.lam)})
                row.update({'residual': q.residual, 'nash': nash.value})
                rows.append(row)
        return pd.DataFrame(rows)


@dataclass(frozen=True)
class CalmnessEstimate:
    """
    Empirical calmness constant along a sweep.

    ``kappa_hat`` measures primal displacement ||x(t) - x_ref||; ``kappa_hat_z``
    uses the full (x, lambda) vector.
    """

    kappa_hat: Optional[float]
    kappa_hat_z: Optional[float]
    existence_profile: List[bool]
    ratios: List[Optional[float]]


@dataclass
class Branch:
    label: str
    side: int
    t: List[float] = field(default_factory=list)
    z: List[np.ndarray] = field(default_factory=list)
    ambiguous: bool = False

    def predict(self, t: float, origin: np.ndarray) -> np.ndarray:
        """Secant predictor; a one-point branch extrapolates from the reference."""
        if len(self.t) >= 2:
            t0, t1 = self.t[-2], self.t[-1]
            z0, z1 = self.z[-2], self.z[-1]
        else:
            t0, t1, z0, z1 = 0.0, self.t[-1], origin, self.z[-1]
        if t1 == t0:
            return z1
        return z1 + (z1 - z0) * (t - t1) / (t1 - t0)

    def fit(self) -> Tuple[Optional[np.ndarray], Optional[np.ndarray], Optional[float]]:
        """Least-squares line z(t) = a + b t; (slope, intercept, max residual)."""
        if len(self.t) < 2:
            return None, None, None
        X = np.column_stack([np.ones(len(self.t)), self.t])
        Z = np.array(self.z)
        coef, *_ = np.linalg.lstsq(X, Z, rcond=None)
        resid = float(np.max(np.abs(X @ coef - Z))) if Z.size else 0.0
        return coef[1], coef[0], resid


@dataclass
class BranchSummary:
    branches: List[Branch]
    count_positive: int
    count_negative: int
    kink: Optional[bool]
    kink_gap: Optional[float]

    def slopes(self) -> Dict[str, Optional[np.ndarray]]:
        return {b.label: b.fit()[0] for b in self.branches}

    def to_frame(self) -> pd.DataFrame:
        rows = []
        for b in self.branches:
            slope, intercept, resid = b.fit()
            rows.append({
                'branch': b.label,
                'side': '+' if b.side > 0 else '-',
                'points': len(b.t),
                'slope': None if slope is None else np.round(slope, 10).tolist(),
                'residual': resid,
                'ambiguous': b.ambiguous,
            })
        return pd.DataFrame(rows)


def _track_side(ts: List[float], zs: List[List[np.ndarray]], origin: np.ndarray,
                side: int, threshold: float) -> Tuple[List[Branch], Dict[Tuple[float, int], str]]:
    """Greedy nearest-neighbour continuation along increasing |t| on one side."""
    prefix = '+' if side > 0 else '-'
    branches: List[Branch] = []
    assigned: Dict[Tuple[float, int], str] = {}
    for t, pts in sorted(zip(ts, zs), key=lambda item: abs(item[0])):
        open_branches = [b for b in branches if b.t and b.t[-1] != t]
        pairs = []
        for bi, b in enumerate(open_branches):
            pred = b.predict(t, origin)
            dists = sorted((float(np.max(np.abs(pred - z))) if z.size else 0.0, pi)
                           for pi, z in enumerate(pts))
            if len(dists) >= 2 and dists[0][0] <= threshold and \
                    abs(dists[1][0] - dists[0][0]) <= TIE_TOL * max(1.0, dists[0][0]):
                b.ambiguous = True
            pairs.extend((d, bi, pi) for d, pi in dists)
        used_b, used_p = set(), set()
        for d, bi, pi in sorted(pairs):
            if d > threshold or bi in used_b or pi in used_p:
                continue
            used_b.add(bi)
            used_p.add(pi)
            b = open_branches[bi]
            b.t.append(t)
            b.z.append(pts[pi])
            assigned[(t, pi)] = b.label
        for pi, z in enumerate(pts):
            if pi not in used_p:
                b = Branch(f"{prefix}{len(branches)}", side, [t], [z])
                branches.append(b)
                assigned[(t, pi)] = b.label
    return branches, assigned


def _assign_branches(result: SweepResult) -> List[Branch]:
    origin = result.reference.z
    threshold = result.window / 4.0
    labels: List[List[str]] = [["0"] * len(pts) for pts in result.points]
    all_branches = []
    for side in (1, -1):
        idx = [j for j, t in enumerate(result.t_grid) if np.sign(t) == side]
        ts = [float(result.t_grid[j]) for j in idx]
        zs = [[q.z for q in result.points[j]] for j in idx]
        branches, assigned = _track_side(ts, zs, origin, side, threshold)
        for j, t in zip(idx, ts):
            labels[j] = [assigned[(t, pi)] for pi in range(len(result.points[j]))]
        all_branches.extend(branches)
    result.labels = labels
    result.ambiguous = [(float(b.t[0]), b.label) for b in all_branches if b.ambiguous]
    return all_branches


def sweep(
    game: QpNepGame,
    direction: PerturbationDirection,
    reference: KktPoint,
    t_grid: Sequence[float],
    window: Optional[float] = None,
    tol_kkt: float = DEFAULTS.tol_kkt,
    max_ineq: int = DEFAULTS.max_ineq,
    check_nash: bool = True,
) -> SweepResult:
    """
    Solve the KKT system along the tilt path and keep points near the reference.

    Args:
        game: The game.
        direction: Tilt direction (du, dv).
        reference: KKT point at t = 0.
        t_grid: Path parameters.
        window: Max-norm radius around the reference; default from :func:`default_window`.
        tol_kkt: Residual tolerance.
        max_ineq: Enumeration guard.
        check_nash: Whether to classify each point with :func:`check_local_nash`.

    Returns:
        SweepResult with branch labels assigned.

    Raises:
        NotKktPointError: If the reference is not a KKT point at t = 0.
        ConfigError: If the window is not positive.
    """
    zero = Perturbation.zero(game)
    if kkt_residual(game, zero, reference) > tol_kkt:
        raise NotKktPointError("reference point is not a KKT point at t = 0")
    if window is None:
        window = default_window(game, reference, max_ineq=max_ineq)
    if window <= 0:
        raise ConfigError(f"window must be positive, got {window}")

    grid = np.asarray(t_grid, dtype=float)
    found, nash, nearest = [], [], []
    for t in grid:
        p = apply_tilt(game, direction, float(t))
        candidates = enumerate_kkt(game, p, max_ineq=max_ineq, tol_kkt=tol_kkt)
        pts = [q for q in candidates if q.distance(reference) <= window]
        outside = [q.distance(reference) for q in candidates if q.distance(reference) > window]
        found.append(pts)
        nearest.append(min(outside) if outside else None)
        if check_nash:
            nash.append([check_local_nash(game, p, q).verdict for q in pts])
        else:
            nash.append([Verdict.UNDECIDED] * len(pts))
        logger.debug(f"t={t:+.6g}: {len(pts)} point(s) in window")

    result = SweepResult(reference, direction, grid, found, nash, float(window),
                         nearest_outside=nearest)
    for t, d in result.excluded:
        logger.info(f"t={t:+.6g}: nearest KKT point at distance {d:.4g}, outside the window")
    _assign_branches(result)
    logger.info(f"Sweep complete: {len(grid)} values of t, window {window:.4g}, "
                f"{sum(result.existence_profile)} nonempty")
    return result


def estimate_calmness_constant(result: SweepResult,
                               direction: Optional[PerturbationDirection] = None,
                               reference: Optional[KktPoint] = None) -> CalmnessEstimate:
    """
    Largest displacement-to-perturbation ratio over the sweep (t = 0 skipped).

    ||Delta p|| is |t| times the max-norm of (du, dv).
    """
    direction = direction or result.direction
    reference = reference or result.reference
    kappa = kappa_z = None
    ratios: List[Optional[float]] = []
    for t, pts in zip(result.t_grid, result.points):
        dp = abs(float(t)) * direction.size
        if t == 0 or dp == 0 or not pts:
            ratios.append(None)
            continue
        rx = max(float(np.max(np.abs(q.x - reference.x))) for q in pts) / dp
        rz = max(q.distance(reference) for q in pts) / dp
        ratios.append(rx)
        kappa = rx if kappa is None else max(kappa, rx)
        kappa_z = rz if kappa_z is None else max(kappa_z, rz)
    return CalmnessEstimate(kappa, kappa_z, result.existence_profile, ratios)


def detect_branches(result: SweepResult) -> BranchSummary:
    """
    Count branches per side of t = 0 and compare the one-sided slopes of the
    branches closest to the reference.
    """
    branches = _assign_branches(result)
    origin = result.reference.z

    def reference_branch(side: int) -> Optional[Branch]:
        cands = [b for b in branches if b.side == side and len(b.t) >= 2]
        if not cands:
            return None
        return min(cands, key=lambda b: (float(np.max(np.abs(b.z[0] - origin), initial=0.0)), b.label))

    kink = gap = None
    pos, neg = reference_branch(1), reference_branch(-1)
    if pos is not None and neg is not None:
        s_pos, s_neg = pos.fit()[0], neg.fit()[0]
        scale = max(1.0, float(np.max(np.abs(s_pos), initial=0.0)), float(np.max(np.abs(s_neg), initial=0.0)))
        gap = float(np.max(np.abs(s_pos - s_neg), initial=0.0)) / scale
        kink = gap > KINK_TOL
    return BranchSummary(
        branches,
        count_positive=sum(1 for b in branches if b.side > 0),
        count_negative=sum(1 for b in branches if b.side < 0),
        kink=kink,
        kink_gap=gap,
    )
