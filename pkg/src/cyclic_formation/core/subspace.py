"""
Polygon formation subspace.

A state x stacks n robot positions (x_1, ..., x_n) into a 3n vector. The
polygon constraint matrix V = W_n P_n R_eta has null space equal to the set of
regular n-gons lying in the plane with normal R_eta^T e_z, with robots ordered
clockwise about that normal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from cyclic_formation.core.linalg import (
    E_Z,
    build_shift_circulant,
    is_rotation,
    kron,
    rotation_about_z,
)
from cyclic_formation.exceptions import ParameterError, StructuralError

RANK_RTOL = 1e-10


# =========================================================================
# Domain types
# =========================================================================


@dataclass(frozen=True, eq=False)
class PolygonSpec:
    """
    Target polygon: robot count and plane orientation.

    Attributes:
        n: Number of robots (>= 3)
        plane_rotation: R_eta, with R_eta^T e_z the polygon normal
    """

    n: int
    plane_rotation: NDArray[np.float64]

    def __init__(self, n: int, plane_rotation: ArrayLike | None = None) -> None:
        if n < 3:
            raise ParameterError(f"a polygon needs at least 3 robots, got {n}")
        r = np.eye(3) if plane_rotation is None else np.asarray(plane_rotation, float)
        if not is_rotation(r):
            raise ParameterError("plane_rotation must be a proper rotation matrix")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "plane_rotation", r)

    @property
    def normal(self) -> NDArray[np.float64]:
        return np.asarray(self.plane_rotation.T @ E_Z)


@dataclass(frozen=True, eq=False)
class ConstraintMatrix:
    """
    Constraint matrix V with its orthonormal factorization.

    Attributes:
        V: Constraint rows, full row rank
        Vbar: Orthonormal rows spanning the row space of V
        Ubar: Orthonormal rows spanning null(V)
        rank: Row rank of V
        rotational_rows: Number of leading rows that are rotational constraints
    """

    V: NDArray[np.float64]
    Vbar: NDArray[np.float64]
    Ubar: NDArray[np.float64]
    rank: int
    rotational_rows: int = 0

    @property
    def n(self) -> int:
        return self.V.shape[1] // 3

    @property
    def nullity(self) -> int:
        return self.V.shape[1] - self.rank

    def projector(self) -> NDArray[np.float64]:
        """Orthogonal projector V̄ᵀV̄ onto the complement of the formation set."""
        return self.Vbar.T @ self.Vbar

    def residual(self, x: ArrayLike) -> NDArray[np.float64]:
        """Return Vx."""
        return self.V @ _as_state(x, self.V.shape[1])


# =========================================================================
# Construction
# =========================================================================


def selection_matrices(n: int) -> NDArray[np.float64]:
    """
    Return the selection block W_n = [W_r (x) I_3 ; W_p (x) e_z^T].

    W_r = [I_{n-2}, 0] keeps the n-2 rotational constraints, W_p picks the
    z-row of constraint n-1 (the in-plane constraint).
    """
    w_r = np.hstack([np.eye(n - 2), np.zeros((n - 2, 2))])
    w_p = np.zeros((1, n))
    w_p[0, n - 2] = 1.0
    return np.vstack([kron(w_r, np.eye(3)), kron(w_p, E_Z[None, :])])


def polygon_operator(n: int) -> NDArray[np.float64]:
    """Return P_n = L_1 (x) I_3 + (L_1 - L_2) (x) R_{2 pi / n}."""
    l1 = build_shift_circulant(n, 1)
    l2 = build_shift_circulant(n, 2)
    return kron(l1, np.eye(3)) + kron(l1 - l2, rotation_about_z(2.0 * np.pi / n))


def build_polygon_V(spec: PolygonSpec) -> ConstraintMatrix:
    """
    Build the polygon constraint matrix V = W_n P_n (I_n (x) R_eta).

    Rows: 3(n-2) rotational constraints followed by one in-plane constraint.

    Args:
        spec: Polygon size and orientation

    Returns:
        ConstraintMatrix with rank 3n - 5

    Example:
        cm = build_polygon_V(PolygonSpec(6))
        cm.rank   # 13
    """
    n = spec.n
    big_r = kron(np.eye(n), spec.plane_rotation)
    v = selection_matrices(n) @ polygon_operator(n) @ big_r
    return constraint_matrix(v, rotational_rows=3 * (n - 2))


def constraint_matrix(v: ArrayLike, rotational_rows: int = 0) -> ConstraintMatrix:
    """Wrap a full-row-rank V together with its orthonormal factors."""
    v = np.asarray(v, dtype=float)
    vbar, ubar = orthonormalize(v)
    return ConstraintMatrix(
        V=v, Vbar=vbar, Ubar=ubar, rank=vbar.shape[0], rotational_rows=rotational_rows
    )


def numeric_rank(a: ArrayLike) -> int:
    """Rank with tolerance 1e-10 times the largest singular value."""
    s = scipy.linalg.svdvals(np.atleast_2d(np.asarray(a, dtype=float)))
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_RTOL * s[0]))


def orthonormalize(v: ArrayLike) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Return (V̄, Ū) for a full-row-rank V.

    Uses a column-pivoted QR factorization of Vᵀ. V̄ has orthonormal rows
    spanning the row space of V; Ū has orthonormal rows spanning null(V).

    Raises:
        StructuralError: If V is rank deficient
    """
    v = np.asarray(v, dtype=float)
    rows = v.shape[0]
    rank = numeric_rank(v)
    if rank < rows:
        raise StructuralError(
            f"constraint matrix is rank deficient: rank {rank} < {rows} rows"
        )
    q, _, _ = scipy.linalg.qr(v.T, pivoting=True)
    return q[:, :rank].T.copy(), q[:, rank:].T.copy()


# =========================================================================
# Metrics
# =========================================================================


def _as_state(x: ArrayLike, dim: int) -> NDArray[np.float64]:
    arr = np.asarray(x, dtype=float).reshape(-1)
    if arr.size != dim:
        raise ParameterError(f"state has dimension {arr.size}, expected {dim}")
    return arr


def formation_error(cm: ConstraintMatrix, x: ArrayLike) -> float:
    """Return ||V̄x||, zero exactly on the formation subspace."""
    return float(np.linalg.norm(cm.Vbar @ _as_state(x, cm.Vbar.shape[1])))


def is_on_subspace(cm: ConstraintMatrix, x: ArrayLike, tol: float = 1e-9) -> bool:
    return formation_error(cm, x) <= tol


# =========================================================================
# Reference configurations
# =========================================================================


def regular_polygon(
    n: int,
    side: float = 1.0,
    center: ArrayLike = (0.0, 0.0, 0.0),
    plane_rotation: ArrayLike | None = None,
    phase: float = 0.0,
) -> NDArray[np.float64]:
    """
    Return a regular n-gon as a stacked 3n state.

    Robots are placed clockwise about the plane normal R_eta^T e_z, the order
    for which Vx = 0. A negative ``side`` gives the point-reflected polygon.
    """
    r_eta = np.eye(3) if plane_rotation is None else np.asarray(plane_rotation, float)
    radius = side / (2.0 * np.sin(np.pi / n))
    theta = phase - 2.0 * np.pi * np.arange(n) / n
    local = radius * np.column_stack([np.cos(theta), np.sin(theta), np.zeros(n)])
    points = local @ r_eta + np.asarray(center, dtype=float)
    return points.reshape(-1)


def spiral(
    n: int,
    side: float = 1.0,
    rise: float = 0.1,
    plane_rotation: ArrayLike | None = None,
) -> NDArray[np.float64]:
    """
    Return a helical configuration that satisfies only the rotational rows.

    Consecutive robots climb by ``rise`` along the plane normal.
    """
    r_eta = np.eye(3) if plane_rotation is None else np.asarray(plane_rotation, float)
    flat = regular_polygon(n, side).reshape(n, 3)
    flat[:, 2] = rise * np.arange(n)
    return (flat @ r_eta).reshape(-1)
