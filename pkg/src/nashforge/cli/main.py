import argparse
import re
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Sequence

import pandas as pd

from ..core.analysis import AnalysisOptions, StabilityReport, analyze
from ..core.kkt import classify_index_sets, enumerate_kkt, sort_points
from ..core.models import KktPoint, Perturbation, PerturbationDirection, QpNepGame
from ..core.perturb import (
    BranchSummary,
    CalmnessEstimate,
    SweepResult,
    detect_branches,
    estimate_calmness_constant,
    parse_t_grid,
    sweep,
)
from ..data.loader import is_fixture, load_direction, load_fixture_direction, load_game_source
from ..data.serialization import (
    dumps,
    index_sets_to_dict,
    point_to_dict,
    report_to_dict,
    sweep_to_dict,
)
from ..exceptions import (
    ConfigError,
    DimensionError,
    GameFormatError,
    GuardError,
    NotKktPointError,
    NumericalError,
)
from ..utils.config import DEFAULTS
from ..utils.formatting import format_number, format_vector
from ..utils.logging import get_logger, log_error, setup_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NUMERIC = 2

COMMANDS = ("solve", "analyze", "perturb")

# A grid such as "-0.1:0.1:41" starts with a dash; argparse would take it for an option.
_NEGATIVE_GRID = re.compile(r"^-[\d.]")


def _attach_option_values(argv: Sequence[str], options: Sequence[str] = ("--t",)) -> List[str]:
    """Rewrite `--t -0.1:0.1:41` as `--t=-0.1:0.1:41`."""
    out: List[str] = []
    it = iter(argv)
    for token in it:
        if token in options:
            value = next(it, None)
            if value is not None and _NEGATIVE_GRID.match(value):
                out.append(f"{token}={value}")
                continue
            out.append(token)
            if value is not None:
                out.append(value)
            continue
        out.append(token)
    return out


class _Parser(argparse.ArgumentParser):
    """Argument errors are configuration errors (exit code 1)."""

    def error(self, message: str):
        raise ConfigError(message)


@dataclass(frozen=True)
class RunConfig:
    """Validated settings for one command."""

    command: str
    game: str
    output: Optional[str] = None
    output_format: str = "text"
    log_level: str = DEFAULTS.log_level
    tol_kkt: float = DEFAULTS.tol_kkt
    tol_active: float = DEFAULTS.tol_active
    point_index: int = 0
    grid_res: float = DEFAULTS.grid_res
    starts: int = DEFAULTS.starts
    seed: int = DEFAULTS.seed
    alpha: str = "uniform"
    direction: Optional[str] = None
    t_grid: Optional[str] = None
    window: Optional[float] = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        for name in ("tol_kkt", "tol_active", "grid_res"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive, got {getattr(self, name)}")
        if self.starts < 1:
            raise ConfigError(f"starts must be at least 1, got {self.starts}")
        if self.point_index < 0:
            raise ConfigError(f"point index must be non-negative, got {self.point_index}")
        if self.window is not None and not self.window > 0:
            raise ConfigError(f"window must be positive, got {self.window}")
        if self.output_format not in ("text", "json"):
            raise ConfigError(f"unknown format {self.output_format!r}")
        if self.command == "perturb":
            if self.t_grid is None:
                raise ConfigError("perturb needs --t START:STOP:COUNT")
            parse_t_grid(self.t_grid)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'RunConfig':
        return cls(
            command=args.command,
            game=args.game,
            output=args.output,
            output_format=args.format,
            log_level=args.log_level or DEFAULTS.log_level,
            tol_kkt=args.tol_kkt,
            tol_active=args.tol_active,
            point_index=getattr(args, "point_index", 0),
            grid_res=getattr(args, "grid_res", DEFAULTS.grid_res),
            starts=getattr(args, "starts", DEFAULTS.starts),
            seed=getattr(args, "seed", DEFAULTS.seed),
            alpha=getattr(args, "alpha", "uniform"),
            direction=getattr(args, "direction", None),
            t_grid=getattr(args, "t", None),
            window=getattr(args, "window", None),
        )

    def analysis_options(self) -> AnalysisOptions:
        return AnalysisOptions(
            tol_kkt=self.tol_kkt, tol_active=self.tol_active, grid_res=self.grid_res,
            starts=self.starts, seed=self.seed, alpha=self.alpha,
        )


def build_parser() -> argparse.ArgumentParser:
    """Command-line parser with the solve, analyze and perturb commands."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help="Set the logging level (default NASHFORGE_LOG_LEVEL or INFO)"
    )
    common.add_argument("--output", type=str, default=None,
                        help="Write the document to this file instead of stdout")
    common.add_argument("--format", choices=["text", "json"], default="text",
                        help="Output format")
    common.add_argument("--tol-kkt", type=float, default=DEFAULTS.tol_kkt,
                        help="KKT residual tolerance")
    common.add_argument("--tol-active", type=float, default=DEFAULTS.tol_active,
                        help="Activity and multiplier tolerance")

    parser = _Parser(description="Stability certification for quadratic Nash equilibrium problems")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    solve_p = sub.add_parser("solve", parents=[common], help="Enumerate the KKT points of a game")
    solve_p.add_argument("game", type=str, help="Game file or fixture name (EX31, EX32, EX61, EX62)")

    analyze_p = sub.add_parser("analyze", parents=[common], help="Run every stability check at a KKT point")
    analyze_p.add_argument("game", type=str, help="Game file or fixture name")
    analyze_p.add_argument("--point-index", type=int, default=0,
                           help="Index into the KKT points sorted lexicographically by x")
    analyze_p.add_argument("--grid-res", type=float, default=DEFAULTS.grid_res,
                           help="Grid resolution of the certification tier")
    analyze_p.add_argument("--starts", type=int, default=DEFAULTS.starts,
                           help="Number of search starts")
    analyze_p.add_argument("--seed", type=int, default=DEFAULTS.seed, help="Search seed")
    analyze_p.add_argument("--alpha", choices=["uniform", "search"], default="uniform",
                           help="Weights of the sufficient strong-regularity condition")

    perturb_p = sub.add_parser("perturb", parents=[common], help="Sweep a tilt perturbation path")
    perturb_p.add_argument("game", type=str, help="Game file or fixture name")
    perturb_p.add_argument("--direction", type=str, default=None,
                           help="Direction file (defaults to the fixture's bundled direction)")
    perturb_p.add_argument("--t", type=str, required=True, help="Grid START:STOP:COUNT")
    perturb_p.add_argument("--window", type=float, default=None,
                           help="Max-norm radius around the reference point")
    perturb_p.add_argument("--point-index", type=int, default=0,
                           help="Index of the reference KKT point at t = 0")
    return parser


def _reference_points(game: QpNepGame, config: RunConfig) -> List[KktPoint]:
    points = enumerate_kkt(game, Perturbation.zero(game), max_ineq=DEFAULTS.max_ineq,
                           tol_kkt=config.tol_kkt)
    logger.info(f"Found {len(points)} KKT point(s) at the unperturbed game")
    return sort_points(points)


def _select_point(points: Sequence[KktPoint], index: int) -> KktPoint:
    if not points:
        raise ConfigError("the game has no KKT point to analyze")
    if index >= len(points):
        raise ConfigError(f"point index {index} out of range: {len(points)} KKT point(s)")
    return points[index]


def _direction(game: QpNepGame, config: RunConfig) -> PerturbationDirection:
    if config.direction is not None:
        return load_direction(config.direction, game)
    if is_fixture(config.game) and not Path(config.game).exists():
        logger.info(f"Using the bundled direction of {config.game.upper()}")
        return load_fixture_direction(config.game)
    raise ConfigError("perturb needs --direction for a game file")


# Text renderers

def _points_frame(game: QpNepGame, points: Sequence[KktPoint], tol_active: float) -> pd.DataFrame:
    rows = []
    for idx, q in enumerate(points):
        sets = classify_index_sets(game, Perturbation.zero(game), q, tol_active)
        rows.append({
            'index': idx,
            'x': format_vector(q.x),
            'lambda': format_vector(q.lam),
            'residual': format_number(q.residual, 3),
            'flag': 'NON_ISOLATED' if q.non_isolated else '',
            'I1': [list(s) for s in sets.I1],
            'I2': [list(s) for s in sets.I2],
            'I3': [list(s) for s in sets.I3],
        })
    return pd.DataFrame(rows).set_index('index') if rows else pd.DataFrame()


def render_report(report: StabilityReport) -> str:
    """Plain-text rendering of a stability report."""
    lines = [
        f"KKT point x = {format_vector(report.point.x)}",
        f"          lambda = {format_vector(report.point.lam)}",
        f"Index sets: I1 = {list(map(list, report.index_sets.I1))}, "
        f"I2 = {list(map(list, report.index_sets.I2))}, I3 = {list(map(list, report.index_sets.I3))}",
        "",
        "Constraint qualifications:",
        report.cq.to_frame().to_string(),
        "",
        "Verdicts:",
        report.to_frame().to_string(),
    ]
    witnesses = [(name, c.witness) for name, c in report.checks.items() if c.witness]
    if witnesses:
        lines += ["", "Witnesses:"]
        for name, w in witnesses:
            parts = ", ".join(f"{k}={v}" for k, v in sorted(w.items()))
            lines.append(f"  {name}: {parts}")
    lines += ["", "Notes:"] + [f"  - {note}" for note in report.notes]
    return "\n".join(lines)


def render_sweep(result: SweepResult, estimate: CalmnessEstimate, summary: BranchSummary) -> str:
    """Plain-text rendering of a sweep with its calmness estimate and branches."""
    frame = result.to_frame()
    lines = [
        f"Reference x = {format_vector(result.reference.x)}",
        f"Window radius {format_number(result.window)} around the reference",
        "",
        frame.to_string(index=False) if not frame.empty else "No KKT point inside the window.",
        "",
        f"Existence profile: {''.join('1' if e else '0' for e in result.existence_profile)}",
        f"kappa_hat = {'-' if estimate.kappa_hat is None else format_number(estimate.kappa_hat)}"
        f" (x), {'-' if estimate.kappa_hat_z is None else format_number(estimate.kappa_hat_z)} (x, lambda)",
        f"Branches: {summary.count_positive} for t > 0, {summary.count_negative} for t < 0",
    ]
    if summary.branches:
        lines += [summary.to_frame().to_string(index=False)]
    if summary.kink is not None:
        lines.append(f"Kink at t = 0: {'yes' if summary.kink else 'no'} "
                     f"(slope gap {format_number(summary.kink_gap)})")
    for t, label in result.ambiguous:
        lines.append(f"Ambiguous continuation of branch {label} at t = {format_number(t)}")
    for t, d in result.excluded:
        lines.append(f"t = {format_number(t)}: nearest KKT point at distance {format_number(d)}, "
                     f"outside the window")
    if result.robustness_violated:
        lines.append("robustness violated: some t != 0 has no KKT point in the window")
    return "\n".join(lines)


# Commands

def run_solve(config: RunConfig) -> str:
    """Enumerate the KKT points of the unperturbed game."""
    game = load_game_source(config.game)
    points = _reference_points(game, config)
    if config.output_format == "json":
        zero = Perturbation.zero(game)
        return dumps({'points': [
            dict(point_to_dict(q), index_sets=index_sets_to_dict(
                classify_index_sets(game, zero, q, config.tol_active)))
            for q in points
        ]})
    if not points:
        return "No KKT points."
    return _points_frame(game, points, config.tol_active).to_string()


def run_analyze(config: RunConfig) -> str:
    """Analyze one KKT point and render the report."""
    game = load_game_source(config.game)
    point = _select_point(_reference_points(game, config), config.point_index)
    report = analyze(game, Perturbation.zero(game), point, config.analysis_options())
    if config.output_format == "json":
        return dumps(report_to_dict(report))
    return render_report(report)


def run_perturb(config: RunConfig) -> str:
    """Sweep the tilt path and render branches and the calmness estimate."""
    game = load_game_source(config.game)
    direction = _direction(game, config)
    reference = _select_point(_reference_points(game, config), config.point_index)
    grid = parse_t_grid(config.t_grid or "")
    result = sweep(game, direction, reference, grid, window=config.window, tol_kkt=config.tol_kkt)
    estimate = estimate_calmness_constant(result)
    summary = detect_branches(result)
    if result.robustness_violated:
        logger.warning("Robustness violated: empty window at some t != 0")
    if config.output_format == "json":
        return dumps(sweep_to_dict(result, estimate, summary))
    return render_sweep(result, estimate, summary)


RUNNERS = {"solve": run_solve, "analyze": run_analyze, "perturb": run_perturb}


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        with open(output, 'w', encoding='utf-8') as f:
            f.write(text + "\n")
        logger.info(f"Wrote {output}")
    else:
        sys.stdout.write(text + "\n")


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point; returns the process exit code."""
    try:
        args = build_parser().parse_args(
            _attach_option_values(sys.argv[1:] if argv is None else list(argv)))
        config = RunConfig.from_args(args)
    except ConfigError as e:
        setup_logging("INFO")
        log_error(logger, e, "Invalid arguments")
        return EXIT_INPUT

    setup_logging(config.log_level)
    try:
        _emit(RUNNERS[config.command](config), config.output)
    except (GameFormatError, DimensionError, ConfigError, NotKktPointError,
            FileNotFoundError) as e:
        log_error(logger, e, f"{config.command}: invalid input")
        return EXIT_INPUT
    except (GuardError, NumericalError) as e:
        log_error(logger, e, f"{config.command}: numerical failure")
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
