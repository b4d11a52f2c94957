"""Cross-forecaster combination of quantile forecasts.

The platform publishes two combined forecasts per cell: the level-wise
mean and the level-wise median of all members' quantiles. Because mean
and median act coordinate-wise on vectors that are each ordered across
levels, the combined quantiles are ordered as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .core import QuantileForecast


class EnsembleMethod(str, Enum):
    MEAN = "mean"
    MEDIAN = "median"


class EnsembleInputError(ValueError):
    """Members are inconsistent or too few for the requested combination."""


@dataclass(frozen=True)
class EnsembleSpec:
    method: EnsembleMethod
    member_aliases: tuple[str, ...] = ()
    min_members: int = 1

    def __post_init__(self):
        if self.min_members < 1:
            raise ValueError("min_members must be at least 1")

    @property
    def alias(self) -> str:
        """Reserved alias under which the combination is published."""
        return f"ensemble_{self.method.value}"


def combine(members: Sequence[QuantileForecast], spec: EnsembleSpec) -> QuantileForecast:
    """Level-wise mean or median of the members' quantiles.

    All members must forecast the same (target, horizon, round) cell. The
    median of an even member count is the midpoint of the two central
    order statistics.
    """
    if len(members) < spec.min_members:
        raise EnsembleInputError(
            f"need at least {spec.min_members} members, got {len(members)}"
        )
    head = members[0]
    for m in members[1:]:
        if (m.target.kind, m.horizon, m.round_date) != (
            head.target.kind,
            head.horizon,
            head.round_date,
        ):
            raise EnsembleInputError("members must share target, horizon and round")
    matrix = np.array([m.quantiles for m in members], dtype=float)
    # canonical row order makes the floating-point reduction, and therefore
    # the combination, exactly invariant under member permutations
    matrix = matrix[np.lexsort(matrix.T[::-1])]
    if np.all(matrix == matrix[0]):
        combined = matrix[0]  # exact idempotence on identical members
    elif spec.method is EnsembleMethod.MEAN:
        combined = matrix.mean(axis=0)
    else:
        combined = np.median(matrix, axis=0)
    return QuantileForecast(
        head.target, head.horizon, head.round_date, tuple(float(q) for q in combined)
    )
