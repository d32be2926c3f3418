"""Verdict types shared by the numerical kernels and the analysis modules."""

from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np


class Verdict(str, Enum):
    """Tri-state outcome of a certification check."""

    HOLDS = "HOLDS"
    FAILS = "FAILS"
    UNDECIDED = "UNDECIDED"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ConePositivityResult:
    """Outcome of a quadratic-family positivity test on a polyhedral cone."""

    verdict: Verdict
    witness: Optional[np.ndarray] = None  # present iff FAILS
    margin: Optional[float] = None  # certified lower bound iff HOLDS
    method: str = "none"
    best_value: Optional[float] = None
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.HOLDS

    @property
    def fails(self) -> bool:
        return self.verdict is Verdict.FAILS
