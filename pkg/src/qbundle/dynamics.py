"""Time evolution with a time-dependent metric, and its Hermitian picture.

Along a curve R(t) the full generator of the covariant Schroedinger equation
splits as  H(t) = H_A(t) + H_E(t)  with the geometric part

    H_A(t) = sum_a Rdot^a(t) A_a(R(t))
           = H_A0(t) + H_omega(t),          H_A0 = -(i/2) eta^{-1} etadot,

H_A0 pseudo-anti-Hermitian and H_omega, H_E pseudo-Hermitian.  Evolution by H
preserves the time-dependent eta inner product even though H itself is not
pseudo-Hermitian; its pseudo-Hermiticity defect is pinned to the metric's
motion,  H^dag - eta H eta^{-1} = i etadot eta^{-1}.

The unitarily equivalent *Hermitian representation* acts on Phi = rho Psi with
the Hermitian generator

    h = rho H rho^{-1} + i rhodot rho^{-1}
      = rho H_ph rho^{-1} + (i/2) [rhodot, rho^{-1}],     H_ph = H - H_A0,

both forms being implemented and cross-checked.  rhodot is obtained either
from the metric's coordinate partials by solving the Sylvester equation
rho X + X rho = etadot, or by a central time difference as a fallback.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from . import linalg
from .connection import ConnectionForm, CurvePath
from .errors import InvalidState, OutOfPatch
from .metric import MetricField, MetricOperator, eta_inner, split_pseudo
from .stepping import StepperConfig, integrate

#: default step for time-differencing rho(t) when analytic partials are absent
RHO_DOT_TIME_STEP = 1e-6


@dataclass
class HamiltonianDecomposition:
    """The parts of the full generator at one instant.

    total = h_a0 + h_omega + h_energy; h_geometric = h_a0 + h_omega;
    h_physical = h_omega + h_energy (the pseudo-Hermitian part of total).
    """

    h_a0: np.ndarray
    h_omega: np.ndarray
    h_energy: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.h_a0 + self.h_omega + self.h_energy

    @property
    def h_geometric(self) -> np.ndarray:
        return self.h_a0 + self.h_omega

    @property
    def h_physical(self) -> np.ndarray:
        return self.h_omega + self.h_energy


@dataclass
class EvolutionResult:
    """Sampled trajectory of a state evolution.

    times : (n,) sample times
    states : (n, N) state vectors
    eta_norm : (n,) metric norms, when a metric was supplied
    energy_expect : (n,) real energy expectations, when an energy part was
        supplied
    patch_trace : chart label per sample, when known
    """

    times: np.ndarray
    states: np.ndarray
    eta_norm: np.ndarray | None = None
    energy_expect: np.ndarray | None = None
    patch_trace: list[str] | None = None

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])


class CurveMetric:
    """A metric field restricted to a curve: everything as a function of t."""

    def __init__(self, metric: MetricField, path: CurvePath):
        self.metric = metric
        self.path = path

    def point(self, t: float) -> np.ndarray:
        return np.asarray(self.path.position(t), dtype=float)

    def operator(self, t: float) -> MetricOperator:
        return self.metric.operator(self.point(t))

    def eta(self, t: float) -> np.ndarray:
        return self.metric.eta(self.point(t))

    def eta_dot(self, t: float) -> np.ndarray:
        return self.metric.eta_dot(self.point(t), self.path.velocity(t))

    def rho(self, t: float) -> np.ndarray:
        return self.operator(t).rho

    def rho_dot(self, t: float, time_step: float = RHO_DOT_TIME_STEP,
                method: str = "auto") -> np.ndarray:
        """d(rho)/dt along the curve.

        method "sylvester" differentiates the defining relation rho rho = eta:
        rhodot solves  rho X + X rho = etadot  (unique for positive rho).
        method "fd" uses a central difference of rho(t).  "auto" prefers the
        Sylvester route.
        """
        if method not in ("auto", "sylvester", "fd"):
            raise ValueError(f"unknown rho_dot method {method!r}")
        if method in ("auto", "sylvester"):
            rho = self.rho(t)
            return scipy.linalg.solve_sylvester(rho, rho, self.eta_dot(t))
        rp = self.metric.operator(self.point(t + time_step)).rho
        rm = self.metric.operator(self.point(t - time_step)).rho
        return (rp - rm) / (2.0 * time_step)


# ---------------------------------------------------------------- generators


def geometric_hamiltonian(a_form: ConnectionForm, path: CurvePath, t: float) -> np.ndarray:
    """H_A(t) = sum_a Rdot^a(t) A_a(R(t)) on the chart of the connection."""
    pid = path.patch_at(t)
    if pid is not None and a_form.patch_id is not None and pid != a_form.patch_id:
        raise OutOfPatch(
            f"path is on chart '{pid}' at t={t} but connection is on '{a_form.patch_id}'"
        )
    return a_form.contracted(path.position(t), path.velocity(t))


def split_geometric(h_a: np.ndarray, curve_metric: CurveMetric, t: float
                    ) -> tuple[np.ndarray, np.ndarray]:
    """Split H_A into (H_A0, H_omega).

    H_A0 = -(i/2) eta^{-1} etadot is fixed by the metric's motion along the
    curve; the remainder H_omega = H_A - H_A0 is pseudo-Hermitian exactly
    when the connection is metric-compatible.
    """
    op = curve_metric.operator(t)
    h_a0 = -0.5j * op.eta_inv @ curve_metric.eta_dot(t)
    return h_a0, np.asarray(h_a, dtype=complex) - h_a0


# ---------------------------------------------------------------- evolution


def evolve(
    hamiltonian: Callable[[float], np.ndarray],
    psi0,
    t0: float,
    t1: float,
    stepper: StepperConfig = StepperConfig(),
    curve_metric: CurveMetric | None = None,
    energy: Callable[[float], np.ndarray] | None = None,
    patch_id: str | None = None,
) -> EvolutionResult:
    """Integrate  i dpsi/dt = H(t) psi  and record trajectory diagnostics.

    ``hamiltonian(t)`` returns the full generator.  When ``curve_metric`` is
    given, the metric norm of the state is recorded at each sample; when
    ``energy(t)`` is also given, so is the normalized real energy expectation
    <psi, H_E psi>_eta / <psi, psi>_eta.
    """
    psi0 = linalg.as_vector(psi0, name="psi0")
    if float(np.max(np.abs(psi0))) == 0.0:
        raise InvalidState("initial state is the zero vector")

    def rhs(t: float, psi: np.ndarray) -> np.ndarray:
        return -1j * (hamiltonian(t) @ psi)

    times, states = integrate(rhs, psi0, t0, t1, stepper)

    eta_norm = None
    energy_expect = None
    if curve_metric is not None:
        eta_norm = np.empty(times.shape[0])
        for k, t in enumerate(times):
            eta_norm[k] = curve_metric.operator(float(t)).norm(states[k])
        if energy is not None:
            energy_expect = np.empty(times.shape[0])
            for k, t in enumerate(times):
                eta = curve_metric.eta(float(t))
                num = eta_inner(eta, states[k], energy(float(t)) @ states[k]).real
                den = eta_inner(eta, states[k], states[k]).real
                energy_expect[k] = num / den
    trace = [patch_id] * times.shape[0] if patch_id is not None else None
    return EvolutionResult(times, states, eta_norm, energy_expect, trace)


# ------------------------------------------------- Hermitian representation


def hermitian_representation(
    h_full: np.ndarray,
    curve_metric: CurveMetric,
    t: float,
    rho_dot_method: str = "auto",
) -> np.ndarray:
    """Hermitian generator  h = rho H rho^{-1} + i rhodot rho^{-1}."""
    op = curve_metric.operator(t)
    rho_dot = curve_metric.rho_dot(t, method=rho_dot_method)
    return op.rho @ np.asarray(h_full, dtype=complex) @ op.rho_inv + 1j * rho_dot @ op.rho_inv


def hermitian_representation_via_physical(
    h_full: np.ndarray,
    curve_metric: CurveMetric,
    t: float,
    rho_dot_method: str = "auto",
) -> np.ndarray:
    """Equivalent form  h = rho H_ph rho^{-1} + (i/2) [rhodot, rho^{-1}]
    with H_ph = H - H_A0 the pseudo-Hermitian part of the generator."""
    op = curve_metric.operator(t)
    h_a0 = -0.5j * op.eta_inv @ curve_metric.eta_dot(t)
    h_ph = np.asarray(h_full, dtype=complex) - h_a0
    rho_dot = curve_metric.rho_dot(t, method=rho_dot_method)
    return (op.rho @ h_ph @ op.rho_inv
            + 0.5j * (rho_dot @ op.rho_inv - op.rho_inv @ rho_dot))


def map_state(curve_metric: CurveMetric, t: float, psi) -> np.ndarray:
    """Intertwine into the Hermitian representation: Phi = rho(t) psi."""
    return curve_metric.rho(t) @ linalg.as_vector(psi, name="psi")


def decompose_generator(
    a_form: ConnectionForm,
    path: CurvePath,
    curve_metric: CurveMetric,
    t: float,
    energy: Callable[[float], np.ndarray] | None = None,
) -> HamiltonianDecomposition:
    """Assemble and split the full generator at time t."""
    h_a = geometric_hamiltonian(a_form, path, t)
    h_a0, h_omega = split_geometric(h_a, curve_metric, t)
    n = h_a.shape[0]
    h_e = energy(t) if energy is not None else np.zeros((n, n), dtype=complex)
    return HamiltonianDecomposition(h_a0, h_omega, np.asarray(h_e, dtype=complex))


__all__ = [
    "HamiltonianDecomposition",
    "EvolutionResult",
    "CurveMetric",
    "geometric_hamiltonian",
    "split_geometric",
    "evolve",
    "hermitian_representation",
    "hermitian_representation_via_physical",
    "map_state",
    "decompose_generator",
    "split_pseudo",
]
