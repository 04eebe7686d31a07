"""
Fixed-step explicit integrators.

Each stepper advances y' = f(t, y) by one step of size h. Inputs that are
held over a step (lagged size angle, thrust commands) are closed over by f.
"""

from __future__ import annotations

from collections.abc import Callable
from enum import Enum

import numpy as np
from numpy.typing import NDArray

from cyclic_formation.exceptions import ParameterError

Derivative = Callable[[float, NDArray[np.float64]], NDArray[np.float64]]
Stepper = Callable[[Derivative, float, NDArray[np.float64], float], NDArray[np.float64]]


class Integrator(str, Enum):
    RK4 = "rk4"
    EULER = "euler"


def euler_step(f: Derivative, t: float, y: NDArray[np.float64], h: float) -> NDArray:
    """Forward Euler, order 1."""
    return y + h * f(t, y)


def rk4_step(f: Derivative, t: float, y: NDArray[np.float64], h: float) -> NDArray:
    """
    Classical four-stage Runge-Kutta, order 4.

        k1 = f(t, y)
        k2 = f(t + h/2, y + h/2 k1)
        k3 = f(t + h/2, y + h/2 k2)
        k4 = f(t + h, y + h k3)
        y+ = y + h/6 (k1 + 2 k2 + 2 k3 + k4)
    """
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = f(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


STEPPERS: dict[Integrator, Stepper] = {
    Integrator.RK4: rk4_step,
    Integrator.EULER: euler_step,
}


def get_stepper(name: str | Integrator) -> Stepper:
    try:
        return STEPPERS[Integrator(name)]
    except ValueError:
        raise ParameterError(f"unknown integrator {name!r}") from None


def integrate(
    f: Derivative,
    y0: NDArray[np.float64],
    t_end: float,
    h: float,
    method: str | Integrator = Integrator.RK4,
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Integrate from t = 0 to ``t_end`` with a fixed step; returns (t, y) arrays.

    ``t_end`` must be a whole number of steps (relative tolerance 1e-9).
    """
    if h <= 0.0:
        raise ParameterError("step size must be positive")
    steps = int(round(t_end / h))
    if abs(steps * h - t_end) > 1e-9 * max(1.0, t_end):
        raise ParameterError(f"t_end={t_end} is not a multiple of h={h}")
    step = get_stepper(method)
    times = np.arange(steps + 1) * h
    out = np.empty((steps + 1, np.asarray(y0).size))
    out[0] = np.asarray(y0, dtype=float).reshape(-1)
    for k in range(steps):
        out[k + 1] = step(f, times[k], out[k], h)
    return times, out
