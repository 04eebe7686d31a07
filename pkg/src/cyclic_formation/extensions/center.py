"""Geometric-center control: a uniform translation toward x_c."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from cyclic_formation.core.report import CertificationEntry
from cyclic_formation.exceptions import ParameterError


@dataclass(frozen=True)
class CenterParams:
    """
    Attributes:
        x_c: Desired formation center
        k_c: Gain, > 0
        tau: Lag window length in seconds
    """

    x_c: tuple[float, float, float]
    k_c: float
    tau: float = 0.1

    def __post_init__(self) -> None:
        center = tuple(float(v) for v in np.asarray(self.x_c, dtype=float).reshape(3))
        object.__setattr__(self, "x_c", center)
        if self.k_c <= 0.0:
            raise ParameterError(f"k_c must be positive, got {self.k_c}")
        if self.tau <= 0.0:
            raise ParameterError(f"tau must be positive, got {self.tau}")


def geometric_center(x: ArrayLike) -> NDArray[np.float64]:
    """Mean robot position x_0."""
    return np.asarray(x, dtype=float).reshape(-1, 3).mean(axis=0)


def center_error(x: ArrayLike, c: CenterParams) -> float:
    return float(np.linalg.norm(np.asarray(c.x_c) - geometric_center(x)))


def center_control(
    x: ArrayLike, c: CenterParams, x0_delayed: ArrayLike
) -> NDArray[np.float64]:
    """
    Return k_c (x_c - x_0_delayed) for every robot.

    The term is identical across robots, so it is a pure translation and
    leaves the formation subspace invariant.
    """
    n = np.asarray(x).size // 3
    step = c.k_c * (np.asarray(c.x_c) - np.asarray(x0_delayed, dtype=float).reshape(3))
    return np.tile(step, n)


def center_certify(c: CenterParams) -> CertificationEntry:
    """
    Certify the lagged center loop.

    Cyclic and collision terms sum to zero over the robots, so the center
    error obeys e_{k+1} = e_k - k_c tau e_{k-1} across windows. Both roots of
    z^2 - z + k_c tau lie inside the unit circle iff k_c tau < 1.
    """
    product = c.k_c * c.tau
    return CertificationEntry(
        name="center_convergence",
        certified=product < 1.0,
        margin=1.0 - product,
        details={"k_c": c.k_c, "tau": c.tau},
    )
