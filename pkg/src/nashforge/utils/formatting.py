"""Formatting utilities for NashForge reports."""

import math
from typing import Iterable, Optional, Union


def format_number(value: Union[int, float], precision: int = 6) -> str:
    """
    Format a number compactly.

    Args:
        value: Number to format.
        precision: Significant digits for floats.

    Returns:
        Formatted number string.
    """
    if isinstance(value, int):
        return str(value)
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    if value == 0:
        return "0"
    return f"{value:.{precision}g}"


def format_vector(values: Optional[Iterable[float]], precision: int = 6) -> str:
    """
    Format a vector as a parenthesized tuple.

    Args:
        values: Vector entries, or None.
        precision: Significant digits per entry.

    Returns:
        Formatted vector, "-" when absent.
    """
    if values is None:
        return "-"
    return "(" + ", ".join(format_number(float(v), precision) for v in values) + ")"


def format_margin(margin: Optional[float], precision: int = 6) -> str:
    """Format an optional certified margin."""
    if margin is None:
        return "-"
    return format_number(float(margin), precision)


def format_verdict(verdict: str, clause: Optional[str] = None) -> str:
    """
    Format a verdict with its failing clause.

    Args:
        verdict: HOLDS, FAILS or UNDECIDED.
        clause: Optional clause that decided the verdict.

    Returns:
        Display string such as "FAILS [SCSC]".
    """
    label = str(verdict)
    if clause:
        return f"{label} [{clause}]"
    return label
