"""Tensor-product sampling grids and deterministic chunked sweeps."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import product

import numpy as np

__all__ = ["Grid", "default_workers", "map_chunks", "CHUNK"]

THREADS_ENV = "PRESCURV_THREADS"
# Fixed chunk size: results never depend on how chunks are spread over threads.
CHUNK = 128


@dataclass(frozen=True)
class Grid:
    """Cube ``center +- half_width`` sampled with ``points_per_axis`` nodes.

    ``axes`` (1-based) restricts sampling to a subset of coordinates; the
    remaining ones stay at the centre.  Points are enumerated in row-major
    order with the first sampled axis varying slowest.
    """

    center: tuple[float, ...]
    half_width: float = 2.0
    points_per_axis: int = 9
    axes: tuple[int, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.half_width > 0:
            raise ValueError("half_width must be positive")
        if self.points_per_axis < 3 or self.points_per_axis % 2 == 0:
            raise ValueError("points_per_axis must be an odd integer >= 3")
        if self.axes is not None:
            axes = tuple(sorted(set(int(a) for a in self.axes)))
            if not axes or not all(1 <= a <= self.n for a in axes):
                raise ValueError(f"axes must be a non-empty subset of 1..{self.n}")
            object.__setattr__(self, "axes", axes)

    @classmethod
    def cube(cls, n: int, half_width: float = 2.0, points_per_axis: int = 9, axes=None,
             center=None) -> "Grid":
        center = (0.0,) * n if center is None else tuple(center)
        return cls(center, half_width, points_per_axis, None if axes is None else tuple(axes))

    @property
    def n(self) -> int:
        return len(self.center)

    @property
    def sampled_axes(self) -> tuple[int, ...]:
        return self.axes if self.axes is not None else tuple(range(1, self.n + 1))

    @property
    def size(self) -> int:
        return self.points_per_axis ** len(self.sampled_axes)

    def nodes(self, axis: int) -> np.ndarray:
        """1-D node coordinates along a 1-based axis."""
        c = self.center[axis - 1]
        return np.linspace(c - self.half_width, c + self.half_width, self.points_per_axis)

    def points(self) -> np.ndarray:
        axes = self.sampled_axes
        P = np.tile(np.asarray(self.center), (self.size, 1))
        coords = np.array(list(product(*(self.nodes(a) for a in axes))))
        for col, a in enumerate(axes):
            P[:, a - 1] = coords[:, col]
        return P

    def contains(self, P, slack: float = 1e-12) -> np.ndarray:
        P = np.atleast_2d(P)
        lo = np.asarray(self.center) - self.half_width - slack
        hi = np.asarray(self.center) + self.half_width + slack
        return np.all((P >= lo) & (P <= hi), axis=1)

    def with_points(self, points_per_axis: int) -> "Grid":
        return Grid(self.center, self.half_width, points_per_axis, self.axes)

    def as_dict(self) -> dict:
        return {
            "center": list(self.center),
            "half_width": self.half_width,
            "points_per_axis": self.points_per_axis,
            "axes": None if self.axes is None else list(self.axes),
        }


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


def map_chunks(fn, P: np.ndarray, workers: int | None = None, chunk: int = CHUNK):
    """Apply ``fn`` to fixed-size row chunks of ``P`` and concatenate in order.

    ``fn`` returns an array or a tuple of arrays with a leading point axis.
    """
    P = np.asarray(P)
    workers = default_workers() if workers is None else max(1, int(workers))
    pieces = [P[i:i + chunk] for i in range(0, len(P), chunk)] or [P]
    if workers == 1 or len(pieces) == 1:
        results = [fn(p) for p in pieces]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, pieces))
    if isinstance(results[0], tuple):
        return tuple(np.concatenate(parts) for parts in zip(*results))
    return np.concatenate(results)
