"""Gluing charts: transition functions, intertwiners, observable sections.

On overlapping charts the bundle data are related by a transition function
g(R):

    eta~ = g^dag eta g,     psi~ = g^{-1} psi,     A~_a = g^{-1} A_a g - i g^{-1} d_a g,

and the generator picks up a derivative term along a curve,
H~ = g^{-1} H g - i g^{-1} gdot.  The combination

    G = rho g rho~^{-1}

is *unitary* and glues the Hermitian representations of the two charts;
observables in Hermitian form transform as  o~ = G^{-1} o G.

:func:`evolve_across_patches` runs a two-chart evolution: integrate on the
first chart up to a switch time tau inside the overlap dwell, convert the
state, integrate on the second chart.  Physical endpoints do not depend on
tau.  In the Hermitian representation the conversion uses G, and the state
Phi jumps at tau (G is not the identity) while all eta-norms stay continuous.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .connection import ConnectionForm, CurvePath
from .dynamics import CurveMetric, EvolutionResult, evolve, hermitian_representation
from .errors import (
    DimensionMismatch,
    NotUnitary,
    OutOfOverlap,
    TauNotInOverlap,
)
from .metric import MetricField, MetricOperator
from .stepping import StepperConfig

#: default tolerance for unitarity checks on intertwiners
UNITARITY_TOL = 1e-8

#: default finite-difference step for transition-function partials
G_FD_STEP = 1e-6


def unitarity_defect(m) -> float:
    """max-entry norm of  m^dag m - identity."""
    m = linalg.as_square(m)
    return linalg.max_abs(m.conj().T @ m - np.eye(m.shape[0]))


class TransitionFunctionField:
    """Invertible matrix field g(R) relating two charts on their overlap."""

    def __init__(
        self,
        from_patch: str,
        to_patch: str,
        g_fn: Callable[[np.ndarray], np.ndarray],
        partials_fn: Callable[[np.ndarray], Sequence[np.ndarray]] | None = None,
        overlap: Callable[[np.ndarray], bool] | None = None,
        dim: int = 2,
        fd_step: float = G_FD_STEP,
    ):
        self.from_patch = from_patch
        self.to_patch = to_patch
        self._g_fn = g_fn
        self._partials_fn = partials_fn
        self._overlap = overlap
        self.dim = dim
        self.fd_step = fd_step

    def in_overlap(self, point) -> bool:
        r = np.asarray(point, dtype=float)
        return self._overlap is None or bool(self._overlap(r))

    def _coords(self, point) -> np.ndarray:
        r = np.asarray(point, dtype=float)
        if r.shape != (self.dim,):
            raise DimensionMismatch(
                f"expected a {self.dim}-vector of coordinates, got shape {r.shape}"
            )
        if not self.in_overlap(r):
            raise OutOfOverlap(
                f"point {r} is outside the overlap of charts "
                f"'{self.from_patch}' and '{self.to_patch}'"
            )
        return r

    def g(self, point) -> np.ndarray:
        return linalg.as_square(self._g_fn(self._coords(point)), "g")

    def g_inv(self, point) -> np.ndarray:
        return np.linalg.inv(self.g(point))

    def partial_g(self, point) -> list[np.ndarray]:
        r = self._coords(point)
        if self._partials_fn is not None:
            return [linalg.as_square(p, "partial of g") for p in self._partials_fn(r)]
        out = []
        for a in range(self.dim):
            rp, rm = r.copy(), r.copy()
            rp[a] += self.fd_step
            rm[a] -= self.fd_step
            out.append((self._g_fn(rp) - self._g_fn(rm)) / (2.0 * self.fd_step))
        return out

    def g_dot(self, point, velocity) -> np.ndarray:
        """Time derivative of g along a curve through ``point``."""
        v = np.asarray(velocity, dtype=float)
        parts = self.partial_g(point)
        out = np.zeros_like(parts[0])
        for a in range(self.dim):
            out = out + v[a] * parts[a]
        return out

    def inverse(self) -> "TransitionFunctionField":
        """The reversed transition, g -> g^{-1} with patches swapped."""

        def g_fn(r):
            return np.linalg.inv(self._g_fn(r))

        def partials_fn(r):
            gi = np.linalg.inv(self._g_fn(r))
            if self._partials_fn is not None:
                parts = self._partials_fn(r)
            else:
                parts = []
                for a in range(self.dim):
                    rp, rm = r.copy(), r.copy()
                    rp[a] += self.fd_step
                    rm[a] -= self.fd_step
                    parts.append((self._g_fn(rp) - self._g_fn(rm)) / (2.0 * self.fd_step))
            return [-gi @ p @ gi for p in parts]

        return TransitionFunctionField(
            self.to_patch,
            self.from_patch,
            g_fn,
            partials_fn=partials_fn,
            overlap=self._overlap,
            dim=self.dim,
            fd_step=self.fd_step,
        )


# ---------------------------------------------------------------- transforms


def tilde_eta(transition: TransitionFunctionField, eta_field: MetricField, point) -> np.ndarray:
    """Metric induced on the target chart:  eta~ = g^dag eta g."""
    g = transition.g(point)
    return g.conj().T @ eta_field.eta(point) @ g


def big_g(
    eta_field: MetricField,
    eta_tilde_field: MetricField,
    transition: TransitionFunctionField,
    point,
    check_tol: float | None = UNITARITY_TOL,
) -> np.ndarray:
    """The unitary intertwiner  G = rho g rho~^{-1}  at a point.

    Raises :class:`NotUnitary` when the assembled matrix fails the unitarity
    check, which happens exactly when the two metric fields are inconsistent
    with the transition function there.
    """
    rho = eta_field.operator(point).rho
    rho_tilde_inv = eta_tilde_field.operator(point).rho_inv
    gg = rho @ transition.g(point) @ rho_tilde_inv
    if check_tol is not None:
        defect = unitarity_defect(gg)
        if defect > check_tol:
            raise NotUnitary(
                f"intertwiner fails unitarity at {np.asarray(point)}: "
                f"defect {defect:.3e} > tol {check_tol:.3e}"
            )
    return gg


def transform_state(transition: TransitionFunctionField, point, psi) -> np.ndarray:
    """State components on the target chart:  psi~ = g^{-1} psi."""
    return transition.g_inv(point) @ linalg.as_vector(psi, name="psi")


def transform_hamiltonian(
    h_fn: Callable[[float], np.ndarray],
    g_of_t: Callable[[float], np.ndarray],
    t: float,
    g_dot_of_t: Callable[[float], np.ndarray] | None = None,
    fd_step: float = G_FD_STEP,
) -> np.ndarray:
    """Generator seen from the target chart along a curve:

        H~(t) = g^{-1} H g - i g^{-1} gdot.

    ``gdot`` uses the supplied derivative or a central difference in t.
    """
    g = linalg.as_square(g_of_t(t), "g")
    g_inv = np.linalg.inv(g)
    if g_dot_of_t is not None:
        gd = g_dot_of_t(t)
    else:
        gd = (g_of_t(t + fd_step) - g_of_t(t - fd_step)) / (2.0 * fd_step)
    return g_inv @ h_fn(t) @ g - 1j * g_inv @ gd


def transform_observable(observable, intertwiner, tol: float = UNITARITY_TOL) -> np.ndarray:
    """Observable in the target chart's Hermitian form:  o~ = G^{-1} o G."""
    gg = linalg.as_square(intertwiner, "intertwiner")
    defect = unitarity_defect(gg)
    if defect > tol:
        raise NotUnitary(f"intertwiner defect {defect:.3e} > tol {tol:.3e}")
    return gg.conj().T @ linalg.as_square(observable, "observable") @ gg


# ---------------------------------------------------------------- sections


class ObservableSection:
    """A physical observable given per chart in Hermitian form.

    ``fields`` maps patch_id -> callable R -> Hermitian matrix.  The
    authoring patch marks which chart's field is considered primary; a
    missing chart's values can be generated on the overlap by conjugating
    with the intertwiner (:meth:`with_pushforward`).
    """

    def __init__(self, fields: dict[str, Callable[[np.ndarray], np.ndarray]],
                 authoring_patch: str):
        if authoring_patch not in fields:
            raise DimensionMismatch(
                f"authoring patch '{authoring_patch}' has no field"
            )
        self.fields = dict(fields)
        self.authoring_patch = authoring_patch

    def patches(self) -> list[str]:
        return sorted(self.fields)

    def matrix(self, patch_id: str, point) -> np.ndarray:
        try:
            fn = self.fields[patch_id]
        except KeyError:
            raise OutOfOverlap(f"section has no field on patch '{patch_id}'") from None
        return linalg.as_square(fn(np.asarray(point, dtype=float)), "observable")

    def with_pushforward(
        self,
        target_patch: str,
        eta_field: MetricField,
        eta_tilde_field: MetricField,
        transition: TransitionFunctionField,
    ) -> "ObservableSection":
        """Extend the section to ``target_patch`` on the overlap via
        o~ = G^{-1} o G (raises OutOfOverlap when evaluated outside)."""
        src = self.fields[self.authoring_patch]

        def fn(r: np.ndarray) -> np.ndarray:
            gg = big_g(eta_field, eta_tilde_field, transition, r, check_tol=None)
            return gg.conj().T @ src(r) @ gg

        fields = dict(self.fields)
        fields[target_patch] = fn
        return ObservableSection(fields, self.authoring_patch)


def check_section_compatibility(
    section: ObservableSection,
    patch_a: str,
    patch_b: str,
    eta_field: MetricField,
    eta_tilde_field: MetricField,
    transition: TransitionFunctionField,
    samples: Sequence,
) -> float:
    """Max residual of  o_b - G^{-1} o_a G  over overlap sample points."""
    worst = 0.0
    for r in samples:
        gg = big_g(eta_field, eta_tilde_field, transition, r, check_tol=None)
        o_a = section.matrix(patch_a, r)
        o_b = section.matrix(patch_b, r)
        worst = max(worst, linalg.max_abs(o_b - gg.conj().T @ o_a @ gg))
    return worst


# ---------------------------------------------------------------- systems


@dataclass
class PatchData:
    """One chart's bundle data: a metric field and a compatible connection."""

    metric: MetricField
    connection: ConnectionForm


@dataclass
class SystemSpec:
    """A complete two-chart (or single-chart) system ready to evolve.

    patches : chart label -> PatchData
    transition : transition function between the two charts (None for a
        single-chart system)
    curve : the parametrized curve, with its patch_schedule naming which
        chart is used on which parameter interval
    energy : optional observable section holding the physical Hamiltonian in
        Hermitian form per chart
    overlap_window : parameter interval during which the curve lies in the
        chart overlap (used to default and validate the switch time)
    """

    patches: dict[str, PatchData]
    curve: CurvePath
    transition: TransitionFunctionField | None = None
    energy: ObservableSection | None = None
    overlap_window: tuple[float, float] | None = None
    metadata: dict = field(default_factory=dict)

    def patch(self, patch_id: str) -> PatchData:
        return self.patches[patch_id]

    def curve_metric(self, patch_id: str) -> CurveMetric:
        return CurveMetric(self.patch(patch_id).metric, self.curve)

    def metric_operator(self, patch_id: str, point) -> MetricOperator:
        return self.patch(patch_id).metric.operator(point)

    def transition_into(self, target_patch: str) -> TransitionFunctionField:
        """The transition oriented so that psi_target = g^{-1} psi_source."""
        if self.transition is None:
            raise OutOfOverlap("system has a single chart; no transition defined")
        if self.transition.to_patch == target_patch:
            return self.transition
        if self.transition.from_patch == target_patch:
            return self.transition.inverse()
        raise OutOfOverlap(f"no transition involving patch '{target_patch}'")

    # -- generators along the curve ------------------------------------

    def energy_generator(self, patch_id: str) -> Callable[[float], np.ndarray] | None:
        """H_E(t) = rho^{-1} e(R(t)) rho on the chart, from the Hermitian-form
        section; None when the system carries no energy observable."""
        if self.energy is None or patch_id not in self.energy.fields:
            return None
        pd = self.patch(patch_id)

        def h_e(t: float) -> np.ndarray:
            r = np.asarray(self.curve.position(t), dtype=float)
            op = pd.metric.operator(r)
            return op.rho_inv @ self.energy.matrix(patch_id, r) @ op.rho

        return h_e

    def generator(self, patch_id: str) -> Callable[[float], np.ndarray]:
        """Full H(t) = H_A(t) + H_E(t) on one chart."""
        pd = self.patch(patch_id)
        h_e = self.energy_generator(patch_id)

        def h(t: float) -> np.ndarray:
            out = pd.connection.contracted(self.curve.position(t), self.curve.velocity(t))
            if h_e is not None:
                out = out + h_e(t)
            return out

        return h

    def hermitian_generator(self, patch_id: str) -> Callable[[float], np.ndarray]:
        """h(t) = rho H rho^{-1} + i rhodot rho^{-1} on one chart."""
        h = self.generator(patch_id)
        cm = self.curve_metric(patch_id)

        def h_herm(t: float) -> np.ndarray:
            return hermitian_representation(h(t), cm, t)

        return h_herm

    def default_tau(self) -> float:
        if self.overlap_window is None:
            raise TauNotInOverlap("system has no overlap window")
        return 0.5 * (self.overlap_window[0] + self.overlap_window[1])


# ----------------------------------------------------- two-chart evolution


def _concat_results(first: EvolutionResult, second: EvolutionResult) -> EvolutionResult:
    def cat(x, y):
        if x is None or y is None:
            return None
        return np.concatenate([x, y])

    trace = None
    if first.patch_trace is not None and second.patch_trace is not None:
        trace = first.patch_trace + second.patch_trace
    return EvolutionResult(
        np.concatenate([first.times, second.times]),
        np.concatenate([first.states, second.states]),
        cat(first.eta_norm, second.eta_norm),
        cat(first.energy_expect, second.energy_expect),
        trace,
    )


def evolve_across_patches(
    system: SystemSpec,
    psi0,
    tau: float | None = None,
    stepper: StepperConfig = StepperConfig(),
    representation: str = "eta",
) -> EvolutionResult:
    """Evolve through a chart switch at parameter time tau.

    The curve's patch_schedule must name two consecutive charts.  In the
    default ("eta") representation the state converts at tau by
    psi~ = g^{-1} psi; in the "hermitian" representation the input/output
    states are Phi = rho psi and the conversion is Phi~ = G^{-1} Phi.  The
    returned trajectory contains two samples at t = tau, one per chart, so
    the frame switch is visible in the record.

    Raises :class:`TauNotInOverlap` when the curve point at tau is outside
    the chart overlap.
    """
    if representation not in ("eta", "hermitian"):
        raise ValueError(f"unknown representation {representation!r}")
    sched = system.curve.patch_schedule
    if len(sched) == 1:
        (interval, pid) = sched[0]
        gen = (system.generator(pid) if representation == "eta"
               else system.hermitian_generator(pid))
        result = evolve(
            gen, psi0, system.curve.t_start, system.curve.t_end, stepper,
            curve_metric=system.curve_metric(pid) if representation == "eta" else None,
            energy=system.energy_generator(pid) if representation == "eta" else None,
            patch_id=pid,
        )
        if representation == "hermitian":
            result.eta_norm = np.linalg.norm(result.states, axis=1)
        return result
    if len(sched) != 2:
        raise TauNotInOverlap(
            f"expected a one- or two-chart schedule, got {len(sched)} entries"
        )
    (_, pid_a), (_, pid_b) = sched
    if tau is None:
        tau = system.default_tau()
    if system.overlap_window is not None:
        lo, hi = system.overlap_window
        if not (lo <= tau <= hi):
            raise TauNotInOverlap(
                f"tau = {tau} outside the overlap dwell [{lo}, {hi}]"
            )
    r_tau = np.asarray(system.curve.position(tau), dtype=float)
    transition = system.transition_into(pid_b)
    if not transition.in_overlap(r_tau):
        raise TauNotInOverlap(f"curve point {r_tau} at tau = {tau} is not in the overlap")

    t0, t1 = system.curve.t_start, system.curve.t_end
    if representation == "eta":
        first = evolve(
            system.generator(pid_a), psi0, t0, tau, stepper,
            curve_metric=system.curve_metric(pid_a),
            energy=system.energy_generator(pid_a),
            patch_id=pid_a,
        )
        switched = transform_state(transition, r_tau, first.final_state)
        second = evolve(
            system.generator(pid_b), switched, tau, t1, stepper,
            curve_metric=system.curve_metric(pid_b),
            energy=system.energy_generator(pid_b),
            patch_id=pid_b,
        )
        return _concat_results(first, second)

    # Hermitian representation: states are Phi = rho psi on each chart
    metric_a = system.patch(pid_a).metric
    metric_b = system.patch(pid_b).metric
    first = evolve(
        system.hermitian_generator(pid_a), psi0, t0, tau, stepper,
        patch_id=pid_a,
    )
    gg = big_g(metric_a, metric_b, transition, r_tau, check_tol=None)
    switched = np.linalg.inv(gg) @ first.final_state
    second = evolve(
        system.hermitian_generator(pid_b), switched, tau, t1, stepper,
        patch_id=pid_b,
    )
    out = _concat_results(first, second)
    # the 2-norm of Phi equals the eta-norm of psi chartwise; record it
    out.eta_norm = np.linalg.norm(out.states, axis=1)
    return out
