"""Initial index assignment for polygon formations."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from cyclic_formation.exceptions import ParameterError

logger = logging.getLogger(__name__)

ANGLE_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class IndexAssignment:
    """
    Attributes:
        order: order[i] is the original robot that becomes robot i
        tie_broken: True if two projections shared an angle or coincided
            with the centroid and the original index decided
    """

    order: NDArray[np.int64]
    tie_broken: bool = False

    def apply(self, positions: ArrayLike) -> NDArray[np.float64]:
        """Reorder an (n, 3) array of positions."""
        return np.asarray(positions, dtype=float)[self.order]


def assign_indices(
    positions: ArrayLike, plane_rotation: ArrayLike | None = None
) -> IndexAssignment:
    """
    Order robots clockwise about the plane normal.

    Positions are projected onto the target plane and sorted by decreasing
    angle about the projected centroid, which yields a non-self-intersecting
    polygon. The cycle is rotated to start at the lowest original index.

    Raises:
        ParameterError: If fewer than three robots are given
    """
    p = np.asarray(positions, dtype=float).reshape(-1, 3)
    n = len(p)
    if n < 3:
        raise ParameterError(f"index assignment needs at least 3 robots, got {n}")
    r_eta = np.eye(3) if plane_rotation is None else np.asarray(plane_rotation, float)
    local = (p @ r_eta.T)[:, :2]
    rel = local - local.mean(axis=0)
    theta = np.arctan2(rel[:, 1], rel[:, 0])

    order = np.lexsort((np.arange(n), -theta))
    start = int(np.argmin(order))
    order = np.roll(order, -start)

    radius = np.linalg.norm(rel, axis=1)
    scale = max(float(radius.max()), 1.0)
    sorted_theta = np.sort(theta)
    tie = bool(
        np.any(np.diff(sorted_theta) <= ANGLE_TIE_TOL)
        or np.any(radius <= ANGLE_TIE_TOL * scale)
    )
    if tie:
        logger.warning("index assignment broke an angle tie by original index")
    return IndexAssignment(order=order.astype(np.int64), tie_broken=tie)


def is_simple_polygon(points: ArrayLike) -> bool:
    """True if the closed 2D polyline has no crossing non-adjacent edges."""
    p = np.asarray(points, dtype=float)[:, :2]
    n = len(p)

    def cross(o: NDArray, a: NDArray, b: NDArray) -> float:
        return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))

    for i in range(n):
        a, b = p[i], p[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            c, d = p[j], p[(j + 1) % n]
            d1, d2 = cross(a, b, c), cross(a, b, d)
            d3, d4 = cross(c, d, a), cross(c, d, b)
            if d1 * d2 < 0.0 and d3 * d4 < 0.0:
                return False
    return True
