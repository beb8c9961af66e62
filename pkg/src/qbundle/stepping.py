"""Fixed- and adaptive-step RK4 integration for complex-valued ODEs.

The propagator and state ODEs in this package are all of the form
dy/dt = f(t, y) with y a complex vector or matrix.  A classical Runge-Kutta
scheme of order 4 with a fixed step (default dt = 1e-3) is the reference
integrator; an adaptive variant using step doubling is available for stiff
stretches.  Integration is deterministic: the same inputs always produce the
same sequence of steps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import StepperDiverged

RK4_FIXED = "rk4-fixed"
RK4_ADAPTIVE = "rk4-adaptive"


@dataclass(frozen=True)
class StepperConfig:
    """Integrator selection and step control.

    method : "rk4-fixed" or "rk4-adaptive"
    dt : step size (fixed mode) or initial step (adaptive mode)
    target_local_error : per-step error target for the adaptive mode
    """

    method: str = RK4_FIXED
    dt: float = 1e-3
    target_local_error: float = 1e-10

    def __post_init__(self):
        if self.method not in (RK4_FIXED, RK4_ADAPTIVE):
            raise ValueError(f"unknown stepper method {self.method!r}")
        if not (self.dt > 0.0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not (self.target_local_error > 0.0):
            raise ValueError("target_local_error must be positive")


def rk4_step(rhs: Callable, t: float, y: np.ndarray, h: float) -> np.ndarray:
    """One classical RK4 step from t to t+h."""
    k1 = rhs(t, y)
    k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
    k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
    k4 = rhs(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _check_finite(y: np.ndarray, t: float):
    if not (np.all(np.isfinite(y.real)) and np.all(np.isfinite(y.imag))):
        raise StepperDiverged(f"non-finite state at t = {t}")


def integrate(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t0: float,
    t1: float,
    config: StepperConfig = StepperConfig(),
) -> tuple[np.ndarray, np.ndarray]:
    """Integrate dy/dt = rhs(t, y) from t0 to t1.

    Returns (times, states): times is a 1-d array starting at t0 and ending
    exactly at t1, states stacks y at each recorded time along axis 0.
    Integrating backwards (t1 < t0) is supported.
    """
    y = np.asarray(y0, dtype=complex)
    if t1 == t0:
        return np.array([t0]), y[np.newaxis].copy()
    if config.method == RK4_FIXED:
        return _integrate_fixed(rhs, y, t0, t1, config.dt)
    return _integrate_adaptive(rhs, y, t0, t1, config.dt, config.target_local_error)


def _integrate_fixed(rhs, y, t0, t1, dt):
    span = t1 - t0
    n = max(1, int(round(abs(span) / dt)))
    h = span / n
    times = np.empty(n + 1)
    states = np.empty((n + 1,) + y.shape, dtype=complex)
    times[0] = t0
    states[0] = y
    for k in range(n):
        t = t0 + k * h
        y = rk4_step(rhs, t, y, h)
        _check_finite(y, t + h)
        times[k + 1] = t0 + (k + 1) * h
        states[k + 1] = y
    times[n] = t1
    return times, states


def _integrate_adaptive(rhs, y, t0, t1, dt0, tol):
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    h = direction * min(abs(dt0), span)
    h_min = 1e-13 * max(span, 1.0)
    t = t0
    times = [t0]
    states = [y.copy()]
    scale = max(1.0, float(np.max(np.abs(y))))
    max_steps = 5_000_000
    attempts = 0
    while (t1 - t) * direction > 1e-15 * max(span, 1.0):
        attempts += 1
        if attempts > max_steps:
            raise StepperDiverged("adaptive stepper exceeded the step budget")
        if abs(h) > abs(t1 - t):
            h = t1 - t
        y_full = rk4_step(rhs, t, y, h)
        y_half = rk4_step(rhs, t, y, 0.5 * h)
        y_two = rk4_step(rhs, t + 0.5 * h, y_half, 0.5 * h)
        _check_finite(y_two, t + h)
        # RK4 is order 4, so the doubling estimate carries a 1/(2^4 - 1) factor
        err = float(np.max(np.abs(y_two - y_full))) / 15.0
        if err <= tol * scale or abs(h) <= h_min:
            t = t + h
            # local extrapolation: keep the more accurate two-half-step value
            y = y_two + (y_two - y_full) / 15.0
            times.append(t)
            states.append(y.copy())
            scale = max(1.0, float(np.max(np.abs(y))))
        if err > 0.0:
            factor = 0.9 * (tol * scale / err) ** 0.2
            h = h * min(4.0, max(0.1, factor))
        else:
            h = h * 4.0
        if abs(h) < h_min:
            h = direction * h_min
    times[-1] = t1
    return np.asarray(times), np.asarray(states)
