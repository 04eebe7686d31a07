"""
Symmetric cyclic control for a single polygon.

Robot i steers toward rotated relative positions of its neighbours i +/- m
(m = 1..N, indices mod n):

    u_i = sum_m k_m [R_ms (x_{i+m} - x_i) + R_ms^T (x_{i-m} - x_i)]

with R_ms = R_eta^T R_z(alpha_m) R_eta. In matrix form u = -L x.
"""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from cyclic_formation.core.linalg import (
    build_shift_circulant,
    is_rotation,
    kron,
    rotation_about_z,
    similarity_rotate,
)
from cyclic_formation.core.report import CertificationEntry
from cyclic_formation.core.subspace import (
    RANK_RTOL,
    ConstraintMatrix,
    polygon_operator,
)
from cyclic_formation.exceptions import ConsistencyError, ParameterError

logger = logging.getLogger(__name__)

CERTIFY_TOL = 1e-10
CROSS_CHECK_RTOL = 1e-6


# =========================================================================
# Domain types
# =========================================================================


@dataclass(frozen=True, eq=False)
class CyclicParams:
    """
    Gains and rotation angles of a symmetric cyclic controller.

    Attributes:
        n: Robot count
        N: Look-ahead horizon, 0 < N < n - 1
        gains: k_1..k_N, strictly positive unless ``allow_zero`` is set
        angles: alpha_1..alpha_N in radians, default m pi / n
        plane_rotation: R_eta
        allow_zero: Accept zero gains, for negative-control runs

    Example:
        params = CyclicParams(n=6, N=2, gains=(2.0, 2.0))
        params.angles   # (pi/6, pi/3)
    """

    n: int
    N: int
    gains: tuple[float, ...]
    angles: tuple[float, ...]
    plane_rotation: NDArray[np.float64]
    allow_zero: bool

    def __init__(
        self,
        n: int,
        N: int,
        gains: Sequence[float],
        angles: Sequence[float] | None = None,
        plane_rotation: ArrayLike | None = None,
        *,
        allow_zero: bool = False,
    ) -> None:
        if n < 3:
            raise ParameterError(f"cyclic control needs n >= 3, got {n}")
        if N < 1 or N >= n - 1:
            raise ParameterError(
                f"horizon must satisfy 0 < N < n - 1, got N={N}, n={n}"
            )
        gains = tuple(float(k) for k in gains)
        if len(gains) != N:
            raise ParameterError(f"expected {N} gains, got {len(gains)}")
        if any(k < 0.0 for k in gains):
            raise ParameterError("cyclic gains must be non-negative")
        if not allow_zero and any(k == 0.0 for k in gains):
            raise ParameterError("cyclic gains must be strictly positive")
        if angles is None:
            angles = tuple(m * np.pi / n for m in range(1, N + 1))
        angles = tuple(float(a) for a in angles)
        if len(angles) != N:
            raise ParameterError(f"expected {N} angles, got {len(angles)}")
        r = np.eye(3) if plane_rotation is None else np.asarray(plane_rotation, float)
        if not is_rotation(r):
            raise ParameterError("plane_rotation must be a proper rotation matrix")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "N", int(N))
        object.__setattr__(self, "gains", gains)
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "plane_rotation", r)
        object.__setattr__(self, "allow_zero", bool(allow_zero))

    @property
    def nominal_angles(self) -> tuple[float, ...]:
        """The fixed-size angles m pi / n."""
        return tuple(m * np.pi / self.n for m in range(1, self.N + 1))

    def with_gains(self, gains: Sequence[float]) -> CyclicParams:
        return CyclicParams(
            self.n,
            self.N,
            gains,
            self.angles,
            self.plane_rotation,
            allow_zero=self.allow_zero,
        )

    def with_angles(self, angles: Sequence[float]) -> CyclicParams:
        return CyclicParams(
            self.n,
            self.N,
            self.gains,
            angles,
            self.plane_rotation,
            allow_zero=self.allow_zero,
        )


@dataclass(frozen=True)
class InternalDynamics:
    """
    Internal robot dynamics x_dot = g(x) + u.

    Attributes:
        g: State to state-derivative map, None for g = 0
        jacobian_sup: Known bound on lambda_max(P dg/dx P^T)
    """

    g: Callable[[NDArray[np.float64]], NDArray[np.float64]] | None = None
    jacobian_sup: float = 0.0


# =========================================================================
# Control law
# =========================================================================


def _rotation_stack(angles: NDArray[np.float64], r_eta: NDArray) -> NDArray:
    """Per-robot R_eta^T R_z(angle) R_eta, shape (len(angles), 3, 3)."""
    c, s = np.cos(angles), np.sin(angles)
    rz = np.zeros((angles.size, 3, 3))
    rz[:, 0, 0], rz[:, 0, 1] = c, -s
    rz[:, 1, 0], rz[:, 1, 1] = s, c
    rz[:, 2, 2] = 1.0
    return np.einsum("ji,njk,kl->nil", r_eta, rz, r_eta)


def cyclic_control(
    x: ArrayLike,
    p: CyclicParams,
    angle_shift: float = 0.0,
    angle_offsets: ArrayLike | None = None,
) -> NDArray[np.float64]:
    """
    Evaluate the symmetric cyclic control law.

    Args:
        x: Stacked state of length 3n
        p: Controller parameters
        angle_shift: Common offset added to every alpha_m (size control)
        angle_offsets: Optional per-robot offsets, length n (angle disturbance)

    Returns:
        Stacked control vector of length 3n, equal to -L x

    Raises:
        ParameterError: On dimension mismatch
    """
    n = p.n
    state = np.asarray(x, dtype=float).reshape(-1)
    if state.size != 3 * n:
        raise ParameterError(f"state has dimension {state.size}, expected {3 * n}")
    pos = state.reshape(n, 3)
    offsets = None if angle_offsets is None else np.asarray(angle_offsets, float)
    if offsets is not None and offsets.shape != (n,):
        raise ParameterError(f"angle_offsets must have length {n}")

    u = np.zeros((n, 3))
    for m, (k, alpha) in enumerate(zip(p.gains, p.angles, strict=True), start=1):
        if k == 0.0:
            continue
        forward = np.roll(pos, -m, axis=0) - pos
        backward = np.roll(pos, m, axis=0) - pos
        if offsets is None:
            rz = rotation_about_z(alpha + angle_shift)
            r = similarity_rotate(p.plane_rotation, rz)
            u += k * (forward @ r.T + backward @ r)
        else:
            rs = _rotation_stack(alpha + angle_shift + offsets, p.plane_rotation)
            u += k * (
                np.einsum("nij,nj->ni", rs, forward)
                + np.einsum("nji,nj->ni", rs, backward)
            )
    return u.reshape(-1)


def assemble_L(p: CyclicParams, angle_shift: float = 0.0) -> NDArray[np.float64]:
    """
    Return the closed-loop matrix L with u = -L x.

    L = sum_m k_m (L_m (x) R_ms + L_m^T (x) R_ms^T), which is symmetric.
    """
    n = p.n
    total = np.zeros((3 * n, 3 * n))
    for m, (k, alpha) in enumerate(zip(p.gains, p.angles, strict=True), start=1):
        lm = build_shift_circulant(n, m)
        r = similarity_rotate(p.plane_rotation, rotation_about_z(alpha + angle_shift))
        total += k * (kron(lm, r) + kron(lm.T, r.T))
    return total


# =========================================================================
# Spectra and certification
# =========================================================================


def closed_form_eigenvalues(n: int, m: int, alpha: float) -> NDArray[np.float64]:
    """
    Eigenvalues of P_n L_m P_n^T in closed form, shape (n, 3).

    Row i-1, column k+1 holds

        2 [cos(k a) - cos(k a + 2 pi m (i-1) / n)]
          * |(e^{j 2 pi (i-1+k)/n} - 1)(e^{j 2 pi (i-1)/n} - 1)|^2

    for i = 1..n and k in (-1, 0, 1).

    Raises:
        ConsistencyError: If the evaluated expression is not real
    """
    i = np.arange(n)[:, None]
    k = np.array([-1.0, 0.0, 1.0])[None, :]
    rot_part = 2.0 * (np.cos(k * alpha) - np.cos(k * alpha + 2.0 * np.pi * m * i / n))
    f1 = np.exp(2j * np.pi * (i + k) / n) - 1.0
    f2 = np.exp(2j * np.pi * i / n) - 1.0
    value = rot_part * (f1 * f2) * np.conj(f1 * f2)
    if np.max(np.abs(value.imag), initial=0.0) > 1e-9 * max(1.0, np.abs(value).max()):
        raise ConsistencyError("closed-form eigenvalue has a non-real part")
    return np.asarray(value.real)


def null_modes(n: int) -> NDArray[np.bool_]:
    """
    Mask of (i, k) pairs where the eigenvalue of P_n vanishes, shape (n, 3).

    These five directions (three translations, scaling, in-plane rotation)
    are the formation degrees of freedom and carry no convergence information.
    """
    mask = np.zeros((n, 3), dtype=bool)
    mask[0, :] = True
    mask[1, 0] = True
    mask[n - 1, 2] = True
    return mask


def closed_form_margin(p: CyclicParams, angle_shift: float = 0.0) -> float:
    """Min over non-null (i, k) of sum_m k_m lambda^(m)_ik."""
    table = np.zeros((p.n, 3))
    for m, (k, alpha) in enumerate(zip(p.gains, p.angles, strict=True), start=1):
        table += k * closed_form_eigenvalues(p.n, m, alpha + angle_shift)
    return float(table[~null_modes(p.n)].min())


def numeric_margin(p: CyclicParams, angle_shift: float = 0.0) -> float:
    """
    Smallest eigenvalue of sym(P_n L P_n^T) restricted to range(P_n).
    """
    unrotated = CyclicParams(p.n, p.N, p.gains, p.angles, allow_zero=p.allow_zero)
    pn = polygon_operator(p.n)
    m = pn @ assemble_L(unrotated, angle_shift) @ pn.T
    u, s, _ = scipy.linalg.svd(pn)
    basis = u[:, : int(np.sum(s > RANK_RTOL * s[0]))]
    restricted = basis.T @ (0.5 * (m + m.T)) @ basis
    return float(scipy.linalg.eigvalsh(restricted).min())


def theorem4_margin(
    p: CyclicParams,
    dyn: InternalDynamics | None = None,
    angle_shift: float = 0.0,
) -> CertificationEntry:
    """
    Certify global convergence of the polygon controller.

    The margin is min_{i,k} sum_m k_m lambda^(m)_ik - jacobian_sup, taken over
    modes where P_n is non-singular. A dense eigendecomposition provides a
    cross-check; if the two disagree by more than 1e-6 relative, the numeric
    value is used and a warning is attached.

    Args:
        p: Controller parameters
        dyn: Internal dynamics bound, default g = 0
        angle_shift: Common offset added to every alpha_m

    Returns:
        CertificationEntry named "polygon_convergence"

    Raises:
        ParameterError: If a shifted angle is outside (0, pi)
    """
    dyn = dyn or InternalDynamics()
    shifted = np.asarray(p.angles) + angle_shift
    if np.any(shifted <= 0.0) or np.any(shifted >= np.pi):
        raise ParameterError("rotation angles must lie in (0, pi)")

    closed = closed_form_margin(p, angle_shift)
    numeric = numeric_margin(p, angle_shift)
    warnings: list[str] = []
    value = closed
    if abs(closed - numeric) > CROSS_CHECK_RTOL * max(abs(closed), abs(numeric)):
        msg = (
            f"closed-form margin {closed:.6g} disagrees with numeric {numeric:.6g}; "
            "using numeric value"
        )
        logger.warning(msg)
        warnings.append(msg)
        value = numeric
    margin = value - dyn.jacobian_sup
    return CertificationEntry(
        name="polygon_convergence",
        certified=margin > CERTIFY_TOL,
        margin=margin,
        numeric_margin=numeric - dyn.jacobian_sup,
        warnings=warnings,
        details={"jacobian_sup": dyn.jacobian_sup, "angle_shift": angle_shift},
    )


def contraction_rate(cm: ConstraintMatrix, laplacian: ArrayLike) -> float:
    """
    Return lambda_min of the symmetric part of V̄ L V̄ᵀ.

    The formation error decays at least as exp(-rate * t) under u = -L x.
    """
    lap = np.asarray(laplacian, dtype=float)
    j = cm.Vbar @ lap @ cm.Vbar.T
    return float(scipy.linalg.eigvalsh(0.5 * (j + j.T)).min())
