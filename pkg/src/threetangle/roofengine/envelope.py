"""Lower convex envelope of a sampled curve on [0, 1]."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import BadGridError
from ..kernels import lower_hull_indices


@dataclass(frozen=True, eq=False)
class Envelope:
    """Piecewise-linear convex function through the hull vertices ``(xs, ys)``."""

    xs: np.ndarray
    ys: np.ndarray

    def __call__(self, x):
        return np.interp(x, self.xs, self.ys)

    @property
    def contact_points(self) -> np.ndarray:
        return self.xs

    def segment(self, x: float):
        """Indices of the hull vertices bracketing ``x``."""
        j = int(np.clip(np.searchsorted(self.xs, x, side="right"), 1, self.xs.size - 1))
        return j - 1, j


def convexify(xs, ys) -> Envelope:
    """Lower convex envelope of ``ys`` over the strictly increasing grid ``xs`` spanning [0, 1]."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
        raise BadGridError("xs and ys must be 1-d arrays of equal length >= 2")
    if np.any(np.diff(xs) <= 0.0):
        raise BadGridError("xs must be strictly increasing")
    if xs[0] != 0.0 or xs[-1] != 1.0:
        raise BadGridError("xs must start at 0 and end at 1")
    idx = lower_hull_indices(xs, ys)
    return Envelope(xs[idx], ys[idx])
