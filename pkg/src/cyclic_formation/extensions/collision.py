"""
Repulsive-potential collision avoidance.

Each robot carries a bounding sphere of radius r1 and a detection sphere of
radius r2. Inside the detection zone a pairwise potential that blows up at r1
produces an escape velocity added to the formation controller.

Three variants are available:

- ``hard``: -sum_j f_c(d_ij) (x_j - x_i) over all pairs with d_ij <= r2
- ``los``: the same, gated on closing line-of-sight speed v_s < 0
- ``tanh``: -sum_j k_coll tanh(rho - d_ij) (x_j - x_i) for d_ij <= r2

A pair at d_ij <= r1 is a collision and raises CollisionError.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.distance import cdist

from cyclic_formation.exceptions import CollisionError, DomainError, ParameterError


class CollisionVariant(str, Enum):
    HARD = "hard"
    LOS = "los"
    TANH = "tanh"


@dataclass(frozen=True)
class CollisionParams:
    """
    Attributes:
        r1: Bounding radius in meters
        r2: Detection radius in meters, > r1
        variant: hard, los or tanh
        k_coll: Gain of the tanh variant
        rho: Target spacing used by the tanh variant
    """

    r1: float
    r2: float
    variant: CollisionVariant = CollisionVariant.HARD
    k_coll: float = 1.0
    rho: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "variant", CollisionVariant(self.variant))
        if not 0.0 < self.r1 < self.r2:
            raise ParameterError(f"need 0 < r1 < r2, got r1={self.r1}, r2={self.r2}")
        if self.k_coll < 0.0:
            raise ParameterError("k_coll must be non-negative")
        if self.variant is CollisionVariant.TANH and self.rho is None:
            raise ParameterError("the tanh variant needs the target spacing rho")


# =========================================================================
# Potential
# =========================================================================


def _antiderivative(s: NDArray[np.float64], cp: CollisionParams) -> NDArray[np.float64]:
    # d/ds of this is f_c(s) = (s - r2)^2 / (s (s - r1)^2)
    r1, r2 = cp.r1, cp.r2
    a = r2**2 / r1**2
    b = 1.0 - a
    c = (r1 - r2) ** 2 / r1
    return a * np.log(s) + b * np.log(s - r1) - c / (s - r1)


def rpf_force(d: ArrayLike, cp: CollisionParams) -> NDArray[np.float64] | float:
    """
    Repulsive magnitude f_c(d) = (d - r2)^2 / (d (d - r1)^2) on (r1, r2], 0 beyond.

    Raises:
        DomainError: If any d <= r1
    """
    arr = np.asarray(d, dtype=float)
    if np.any(arr <= cp.r1):
        raise DomainError(f"repulsive force undefined for d <= r1 = {cp.r1}")
    inside = arr <= cp.r2
    safe = np.where(inside, arr, cp.r2)
    out = np.where(inside, (safe - cp.r2) ** 2 / (safe * (safe - cp.r1) ** 2), 0.0)
    return float(out) if out.ndim == 0 else out


def rpf_value(d: ArrayLike, cp: CollisionParams) -> NDArray[np.float64] | float:
    """
    Pairwise potential V(d), zero for d >= r2, with dV/dd = -f_c(d).

    Raises:
        DomainError: If any d <= r1
    """
    arr = np.asarray(d, dtype=float)
    if np.any(arr <= cp.r1):
        raise DomainError(f"repulsive potential undefined for d <= r1 = {cp.r1}")
    inside = arr < cp.r2
    safe = np.where(inside, arr, cp.r2)
    value = _antiderivative(np.array(cp.r2), cp) - _antiderivative(safe, cp)
    out = np.where(inside, value, 0.0)
    return float(out) if out.ndim == 0 else out


# =========================================================================
# Control
# =========================================================================


def pairwise_distances(x: ArrayLike) -> NDArray[np.float64]:
    pos = np.asarray(x, dtype=float).reshape(-1, 3)
    return cdist(pos, pos)


def min_pairwise_distance(x: ArrayLike) -> float:
    dist = pairwise_distances(x)
    if dist.shape[0] < 2:
        return float("inf")
    return float(dist[np.triu_indices_from(dist, k=1)].min())


def check_collisions(x: ArrayLike, r1: float) -> None:
    """
    Raises:
        CollisionError: Listing every pair with d_ij <= r1
    """
    dist = pairwise_distances(x)
    i, j = np.triu_indices_from(dist, k=1)
    hit = dist[i, j] <= r1
    if np.any(hit):
        pairs = [(int(a), int(b)) for a, b in zip(i[hit], j[hit], strict=True)]
        raise CollisionError(pairs, float(dist[i, j].min()))


def line_of_sight_speed(x: ArrayLike, v: ArrayLike) -> NDArray[np.float64]:
    """Matrix of v_s_ij = (v_j - v_i) . (x_j - x_i) / d_ij (zero on the diagonal)."""
    pos = np.asarray(x, dtype=float).reshape(-1, 3)
    vel = np.asarray(v, dtype=float).reshape(-1, 3)
    rel_x = pos[None, :, :] - pos[:, None, :]
    rel_v = vel[None, :, :] - vel[:, None, :]
    dist = pairwise_distances(pos)
    np.fill_diagonal(dist, 1.0)
    return np.einsum("ijk,ijk->ij", rel_v, rel_x) / dist


def collision_control(
    x: ArrayLike,
    cp: CollisionParams,
    velocities: ArrayLike | None = None,
) -> NDArray[np.float64]:
    """
    Evaluate the collision-avoidance velocity for every robot.

    Args:
        x: Stacked positions
        cp: Radii, variant and gain
        velocities: Stacked velocities, required by the ``los`` variant

    Returns:
        Stacked control vector

    Raises:
        CollisionError: If any pair is within r1
        ParameterError: If the ``los`` variant gets no velocities
    """
    pos = np.asarray(x, dtype=float).reshape(-1, 3)
    check_collisions(pos, cp.r1)
    dist = pairwise_distances(pos)
    zone = dist <= cp.r2
    np.fill_diagonal(zone, False)
    if not zone.any():
        return np.zeros(pos.size)

    if cp.variant is CollisionVariant.TANH:
        weight = np.where(zone, cp.k_coll * np.tanh(cp.rho - dist), 0.0)
    else:
        safe = np.where(zone, dist, cp.r2)
        weight = np.where(zone, rpf_force(safe, cp), 0.0)
        if cp.variant is CollisionVariant.LOS:
            if velocities is None:
                raise ParameterError("the los variant needs robot velocities")
            weight = np.where(line_of_sight_speed(pos, velocities) < 0.0, weight, 0.0)

    rel = pos[None, :, :] - pos[:, None, :]
    return -np.einsum("ij,ijk->ik", weight, rel).reshape(-1)
