"""
Circulant and block-circulant building blocks.

Everything in this module is a pure function of its inputs. Circulant matrices
follow the row convention circ[c_1 ... c_n]: each row is the previous row
shifted right by one, so entry (i, j) equals c[(j - i) mod n].
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.transform import Rotation

from cyclic_formation.exceptions import ParameterError

E_Z = np.array([0.0, 0.0, 1.0])


# =========================================================================
# Domain types
# =========================================================================


@dataclass(frozen=True)
class CirculantSpec:
    """
    First row of an n x n circulant matrix.

    Example:
        spec = CirculantSpec([1.0, -1.0, 0.0, 0.0])
        spec.matrix()        # L_1 for n = 4
        spec.eigenvalues()   # [0, 1-1j, 2, 1+1j]
    """

    first_row: tuple[complex, ...]

    def __init__(self, first_row: ArrayLike) -> None:
        row = np.atleast_1d(np.asarray(first_row))
        if row.ndim != 1 or row.size == 0:
            raise ParameterError("first_row must be a non-empty vector")
        object.__setattr__(self, "first_row", tuple(row.tolist()))

    @property
    def n(self) -> int:
        return len(self.first_row)

    def matrix(self) -> NDArray:
        return circulant(self.first_row)

    def eigenvalues(self) -> NDArray[np.complex128]:
        return circulant_eigenvalues(self)


@dataclass(frozen=True)
class ShiftCirculant:
    """The shift circulant L_m = circ[1, 0, ..., -1 (position m+1), ..., 0]."""

    n: int
    m: int

    def __post_init__(self) -> None:
        _check_shift(self.n, self.m)

    def spec(self) -> CirculantSpec:
        row = np.zeros(self.n)
        row[0] += 1.0
        row[self.m] -= 1.0
        return CirculantSpec(row)

    def matrix(self) -> NDArray[np.float64]:
        return build_shift_circulant(self.n, self.m)


@dataclass(frozen=True)
class Rotation3:
    """
    A proper rotation given by a unit axis and an angle in radians.

    The axis is normalised on construction.
    """

    axis: tuple[float, float, float]
    angle: float

    def __init__(self, axis: ArrayLike, angle: float) -> None:
        a = np.asarray(axis, dtype=float).reshape(3)
        norm = np.linalg.norm(a)
        if norm == 0.0:
            raise ParameterError("rotation axis must be non-zero")
        object.__setattr__(self, "axis", tuple((a / norm).tolist()))
        object.__setattr__(self, "angle", float(angle))

    def matrix(self) -> NDArray[np.float64]:
        return rotation_about_axis(self.axis, self.angle)


@dataclass(frozen=True)
class BlockCirculant:
    """
    A member of the class L (x) R_beta: a circulant factor and a rotation about e_z.

    Its eigenvalues are all products of a circulant eigenvalue with one of the
    rotation eigenvalues {e^{-j beta}, 1, e^{j beta}}.
    """

    circulant_part: CirculantSpec
    block_part: Rotation3 = field(default_factory=lambda: Rotation3(E_Z, 0.0))

    def __post_init__(self) -> None:
        if not np.allclose(self.block_part.axis, E_Z):
            raise ParameterError(
                "block part of a block circulant must rotate about e_z"
            )

    def matrix(self) -> NDArray:
        return kron(self.circulant_part.matrix(), self.block_part.matrix())

    def eigenvalues(self) -> NDArray[np.complex128]:
        return block_circulant_eigenvalues(self.circulant_part, self.block_part.angle)


# =========================================================================
# Circulant matrices
# =========================================================================


def _check_shift(n: int, m: int) -> None:
    if n < 3:
        raise ParameterError(f"shift circulant needs n >= 3, got n={n}")
    if not 0 <= m < n:
        raise ParameterError(f"shift m must satisfy 0 <= m < n, got m={m}, n={n}")


def circulant(first_row: ArrayLike) -> NDArray:
    """Return circ[first_row] (rows shift right)."""
    # scipy builds from the first column; the row convention is its transpose
    return scipy.linalg.circulant(np.asarray(first_row)).T


def build_shift_circulant(n: int, m: int) -> NDArray[np.float64]:
    """
    Return L_m for n robots.

    Row i has +1 at column i and -1 at column (i + m) mod n, so
    (L_m x)_i = x_i - x_{i+m}. For m = 0 the result is the zero matrix.

    Raises:
        ParameterError: If n < 3 or m is outside [0, n)
    """
    _check_shift(n, m)
    return np.eye(n) - np.roll(np.eye(n), m, axis=1)


def circulant_eigenvalues(spec: CirculantSpec | ArrayLike) -> NDArray[np.complex128]:
    """
    Closed-form eigenvalues of a circulant, in DFT index order.

    lambda_k = sum_p c_p exp(2 pi j k p / n) for k = 0..n-1. The order is not
    sorted; the k-th entry pairs with the k-th column of
    ``circulant_eigenpairs``.
    """
    row = np.asarray(spec.first_row if isinstance(spec, CirculantSpec) else spec)
    n = row.size
    return np.asarray(np.fft.ifft(row) * n, dtype=np.complex128)


def circulant_eigenpairs(
    spec: CirculantSpec | ArrayLike,
) -> tuple[NDArray[np.complex128], NDArray[np.complex128]]:
    """
    Return eigenvalues and unit eigenvectors of a circulant.

    The k-th eigenvector is (1/sqrt(n)) * exp(2 pi j k i / n), i = 0..n-1, so
    C @ vectors[:, k] == values[k] * vectors[:, k].
    """
    values = circulant_eigenvalues(spec)
    n = values.size
    idx = np.arange(n)
    vectors = np.exp(2j * np.pi * np.outer(idx, idx) / n) / np.sqrt(n)
    return values, vectors


def block_circulant_eigenvalues(
    spec: CirculantSpec | ArrayLike, angle: float
) -> NDArray[np.complex128]:
    """Eigenvalues of circ(spec) (x) R_z(angle), shape (n, 3) for k = -1, 0, 1."""
    lam = circulant_eigenvalues(spec)
    rot = np.exp(1j * angle * np.array([-1.0, 0.0, 1.0]))
    return np.outer(lam, rot)


# =========================================================================
# Kronecker products and rotations
# =========================================================================


def kron(a: ArrayLike, b: ArrayLike) -> NDArray:
    """Kronecker product [a_ij B]."""
    return np.kron(np.asarray(a), np.asarray(b))


def rotation_about_z(angle: float) -> NDArray[np.float64]:
    """Counterclockwise rotation by ``angle`` radians about e_z."""
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotation_about_axis(axis: ArrayLike, angle: float) -> NDArray[np.float64]:
    """Right-handed rotation by ``angle`` radians about ``axis``."""
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    return np.asarray(Rotation.from_rotvec(a * angle).as_matrix())


def similarity_rotate(r_eta: ArrayLike, r: ArrayLike) -> NDArray[np.float64]:
    """
    Return R_eta^T R R_eta.

    The result rotates by the same angle as R about the axis R_eta^T (axis of R).
    """
    r_eta = np.asarray(r_eta, dtype=float)
    return r_eta.T @ np.asarray(r, dtype=float) @ r_eta


def rotation_axis(r: ArrayLike) -> NDArray[np.float64]:
    """
    Return the unit axis of a rotation matrix (eigenvector for eigenvalue 1).

    For the identity, e_z is returned.
    """
    rotvec = Rotation.from_matrix(np.asarray(r, dtype=float)).as_rotvec()
    norm = np.linalg.norm(rotvec)
    if norm < 1e-12:
        return E_Z.copy()
    return np.asarray(rotvec / norm)


def plane_rotation(normal: ArrayLike) -> NDArray[np.float64]:
    """
    Return the rotation R_eta with R_eta^T e_z equal to ``normal``.

    R_eta is the minimal rotation taking ``normal`` onto e_z; for
    normal = -e_z it is a half-turn about e_x.

    Raises:
        ParameterError: If ``normal`` is the zero vector
    """
    n = np.asarray(normal, dtype=float).reshape(3)
    norm = np.linalg.norm(n)
    if norm == 0.0:
        raise ParameterError("plane normal must be non-zero")
    n = n / norm
    axis = np.cross(n, E_Z)
    sin_angle = np.linalg.norm(axis)
    cos_angle = float(np.dot(n, E_Z))
    if sin_angle < 1e-12:
        if cos_angle > 0:
            return np.eye(3)
        return rotation_about_axis([1.0, 0.0, 0.0], np.pi)
    return rotation_about_axis(axis, np.arctan2(sin_angle, cos_angle))


def is_rotation(r: ArrayLike, tol: float = 1e-9) -> bool:
    """Return True if ``r`` is orthogonal with determinant +1."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3, 3):
        return False
    return bool(
        np.allclose(r.T @ r, np.eye(3), atol=tol) and abs(np.linalg.det(r) - 1.0) < tol
    )
