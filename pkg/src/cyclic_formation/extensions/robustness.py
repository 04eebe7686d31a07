"""
Robustness of the cyclic controller to bounded additive disturbances.

With contraction rate |Lambda| and disturbance norm bounded by d̄ (both in the
projected coordinates z = V̄x), the distance between the disturbed and the
nominal trajectory obeys

    R(t) <= (d̄ / |Lambda|) (1 - exp(-|Lambda| t))

and settles at most at d̄ / |Lambda|.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator
from numpy.typing import ArrayLike, NDArray

from cyclic_formation.core.subspace import ConstraintMatrix
from cyclic_formation.exceptions import ParameterError

DisturbanceFn = Callable[[NDArray[np.float64], float], NDArray[np.float64]]


@dataclass(frozen=True)
class RobustnessModel:
    """
    Attributes:
        Lambda: Contraction rate; the sign is ignored (stored negative for a
            contracting system by convention)
        d_bar: Bound on the disturbance norm
        disturbance: Optional map (z, t) -> perturbation in z coordinates
    """

    Lambda: float
    d_bar: float
    disturbance: DisturbanceFn | None = None

    def __post_init__(self) -> None:
        if self.Lambda == 0.0:
            raise ParameterError("contraction rate Lambda must be non-zero")
        if self.d_bar < 0.0:
            raise ParameterError("d_bar must be non-negative")

    @property
    def rate(self) -> float:
        return abs(self.Lambda)


def steady_state_bound(rm: RobustnessModel) -> float:
    """R̄_ss = d̄ / |Lambda|."""
    return rm.d_bar / rm.rate


def robustness_bound(rm: RobustnessModel, t: ArrayLike) -> NDArray[np.float64] | float:
    """Closed-form bound (d̄/|Lambda|)(1 - exp(-|Lambda| t))."""
    arr = np.asarray(t, dtype=float)
    out = steady_state_bound(rm) * -np.expm1(-rm.rate * arr)
    return float(out) if out.ndim == 0 else out


def robustness_ode_bound(
    rm: RobustnessModel, t: ArrayLike, d_norms: ArrayLike
) -> NDArray[np.float64]:
    """
    Integrate R' = -|Lambda| R + |d(t)| from R(0) = 0 on the sample grid.

    Each interval holds |d| at the larger of its end samples and is solved
    exactly, so a constant |d| = d̄ reproduces the closed-form bound and the
    result never exceeds it when d̄ >= max |d|.
    """
    times = np.asarray(t, dtype=float)
    d = np.asarray(d_norms, dtype=float)
    if times.shape != d.shape:
        raise ParameterError("time grid and disturbance norms must have equal length")
    out = np.zeros_like(times)
    a = rm.rate
    for k in range(times.size - 1):
        h = times[k + 1] - times[k]
        decay = np.exp(-a * h)
        out[k + 1] = out[k] * decay + max(d[k], d[k + 1]) * (1.0 - decay) / a
    return out


@dataclass(frozen=True)
class AngleDisturbance:
    """
    Per-robot rotation-angle error drawn uniformly from [low, high] (radians).

    Example:
        dist = AngleDisturbance.from_degrees(-1.0, 1.0)
        offsets = dist.sample(np.random.default_rng(7), 6)
    """

    low: float
    high: float
    d_bar: float | None = None

    def __post_init__(self) -> None:
        if self.low > self.high:
            raise ParameterError("disturbance interval must satisfy low <= high")
        if max(abs(self.low), abs(self.high)) >= np.pi / 2:
            raise ParameterError("angle disturbance must stay below 90 degrees")

    @classmethod
    def from_degrees(
        cls, low: float, high: float, d_bar: float | None = None
    ) -> AngleDisturbance:
        return cls(float(np.deg2rad(low)), float(np.deg2rad(high)), d_bar)

    def sample(self, rng: Generator, n: int) -> NDArray[np.float64]:
        return rng.uniform(self.low, self.high, size=n)


def disturbance_norm(
    cm: ConstraintMatrix, u_nominal: ArrayLike, u_perturbed: ArrayLike
) -> float:
    """|V̄ (u_perturbed - u_nominal)|, the disturbance seen by the formation error."""
    diff = np.asarray(u_perturbed, dtype=float) - np.asarray(u_nominal, dtype=float)
    return float(np.linalg.norm(cm.Vbar @ diff))
