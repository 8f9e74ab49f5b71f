"""Weighted observation samples shared by the readers and the estimators."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Sample:
    """Observations with positive weights (unit weights when omitted).

    Weights carry transaction quantities through the estimators so that a
    row covering ten units counts ten times a single-unit row. A sample may
    be empty (for instance when every group was skipped upstream); the fit
    operations reject empty samples themselves.
    """

    values: np.ndarray
    weights: np.ndarray | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1:
            raise ValueError("values must be a 1-D array")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        if self.weights is None:
            weights = np.ones_like(values)
        else:
            weights = np.asarray(self.weights, dtype=float)
            if weights.shape != values.shape:
                raise ValueError("weights must match values in shape")
            if not np.all(np.isfinite(weights)) or np.any(weights <= 0.0):
                raise ValueError("weights must be finite and positive")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    @property
    def size(self) -> int:
        return int(self.values.size)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def sorted(self) -> "Sample":
        """Copy ordered by value, weights carried along."""
        order = np.argsort(self.values, kind="stable")
        return Sample(values=self.values[order], weights=self.weights[order])
