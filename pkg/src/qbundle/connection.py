"""Metric-compatible connections and parallel transport.

A connection on one chart is a collection of matrix-valued coefficient fields
A_a(R), one per base coordinate.  Compatibility with a metric field eta(R)
means

    A_a^dag - eta A_a eta^{-1} = i (d_a eta) eta^{-1}        for every a,

which guarantees that parallel transport preserves the eta inner product.
The canonical solution of the compatibility condition is

    A0_a = -(i/2) eta^{-1} (d_a eta),

and the general one differs from it by a pseudo-Hermitian piece omega_a.

Parallel transport along a curve R(t) is the solution of

    i dG/dt = sum_a Rdot^a(t) A_a(R(t)) G,      G(t0) = 1,

a path-ordered exponential computed here by RK4 integration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import (
    DimensionMismatch,
    OmegaNotPseudoHermitian,
    OutOfPatch,
    PatchBoundaryCrossed,
)
from .metric import MetricField, pseudo_hermiticity_residual
from .stepping import StepperConfig, integrate

#: default validation tolerance for the free (pseudo-Hermitian) part
OMEGA_TOL = 1e-8

#: default step for finite-difference curvature, refined once by Richardson
CURVATURE_FD_STEP = 1e-4


class ConnectionForm:
    """Matrix-valued connection coefficients on one chart.

    ``components(R)`` returns the list [A_1(R), ..., A_d(R)] of N x N
    complex matrices at base point R.
    """

    def __init__(
        self,
        patch_id: str,
        components_fn: Callable[[np.ndarray], Sequence[np.ndarray]],
        dim: int = 2,
        domain: Callable[[np.ndarray], bool] | None = None,
    ):
        self.patch_id = patch_id
        self._components_fn = components_fn
        self.dim = dim
        self._domain = domain

    def components(self, point) -> list[np.ndarray]:
        r = np.asarray(point, dtype=float)
        if r.shape != (self.dim,):
            raise DimensionMismatch(
                f"expected a {self.dim}-vector of coordinates, got shape {r.shape}"
            )
        if self._domain is not None and not self._domain(r):
            raise OutOfPatch(f"point {r} is outside patch '{self.patch_id}'")
        comps = [linalg.as_square(c, "connection component") for c in self._components_fn(r)]
        if len(comps) != self.dim:
            raise DimensionMismatch(
                f"connection returned {len(comps)} components, expected {self.dim}"
            )
        return comps

    def contracted(self, point, velocity) -> np.ndarray:
        """sum_a Rdot^a A_a(R): the generator of transport along a velocity."""
        v = np.asarray(velocity, dtype=float)
        comps = self.components(point)
        out = np.zeros_like(comps[0])
        for a in range(self.dim):
            out = out + v[a] * comps[a]
        return out


@dataclass
class CurvePath:
    """Parametrized curve on the base manifold with a chart itinerary.

    position(t) and velocity(t) return real coordinate d-vectors;
    patch_schedule lists ((t_a, t_b), patch_id) entries covering [t_start,
    t_end] in order, naming the chart used on each closed subinterval.
    """

    t_start: float
    t_end: float
    position: Callable[[float], np.ndarray]
    velocity: Callable[[float], np.ndarray]
    patch_schedule: list[tuple[tuple[float, float], str]] = field(default_factory=list)

    def patch_at(self, t: float) -> str | None:
        for (ta, tb), pid in self.patch_schedule:
            if min(ta, tb) - 1e-12 <= t <= max(ta, tb) + 1e-12:
                return pid
        return None

    def patches_in_window(self, t0: float, t1: float) -> set[str]:
        lo, hi = min(t0, t1), max(t0, t1)
        out = set()
        for (ta, tb), pid in self.patch_schedule:
            if max(ta, tb) > lo + 1e-12 and min(ta, tb) < hi - 1e-12:
                out.add(pid)
        return out

    def velocity_consistency(self, n_samples: int = 50, h: float = 1e-6) -> float:
        """Max deviation between declared velocity and a central difference
        of the position over interior samples (a sanity diagnostic)."""
        ts = np.linspace(self.t_start, self.t_end, n_samples + 2)[1:-1]
        worst = 0.0
        for t in ts:
            fd = (np.asarray(self.position(t + h)) - np.asarray(self.position(t - h))) / (2 * h)
            worst = max(worst, float(np.max(np.abs(fd - np.asarray(self.velocity(t))))))
        return worst


def path_from_position(
    t_start: float,
    t_end: float,
    position: Callable[[float], np.ndarray],
    patch_id: str | None = None,
    h: float = 1e-6,
) -> CurvePath:
    """Build a CurvePath with a finite-difference velocity."""

    def velocity(t: float) -> np.ndarray:
        return (np.asarray(position(t + h), dtype=float)
                - np.asarray(position(t - h), dtype=float)) / (2.0 * h)

    schedule = [((t_start, t_end), patch_id)] if patch_id is not None else []
    return CurvePath(t_start, t_end, position, velocity, schedule)


@dataclass
class TransportResult:
    """Sampled solution of a transport integration.

    times : 1-d array of sample times
    operators : stacked transport operators G(t), or None when only a state
        was propagated
    states : stacked state vectors psi(t), or None
    """

    times: np.ndarray
    operators: np.ndarray | None = None
    states: np.ndarray | None = None

    @property
    def final_operator(self) -> np.ndarray:
        if self.operators is None:
            raise ValueError("no transport operators were recorded")
        return self.operators[-1]

    @property
    def final_state(self) -> np.ndarray:
        if self.states is None:
            raise ValueError("no states were recorded")
        return self.states[-1]


# ---------------------------------------------------------------- assembly


def a_zero(metric: MetricField, point) -> list[np.ndarray]:
    """Canonical compatible connection  A0_a = -(i/2) eta^{-1} (d_a eta)."""
    eta_inv = np.linalg.inv(metric.eta(point))
    return [-0.5j * eta_inv @ d for d in metric.partials(point)]


def a_zero_form(metric: MetricField) -> ConnectionForm:
    """The canonical connection packaged as a ConnectionForm on the chart."""
    return ConnectionForm(
        metric.patch_id,
        lambda r: a_zero(metric, r),
        dim=metric.dim,
        domain=metric.contains,
    )


def assemble_connection(
    metric: MetricField,
    omega_fn: Callable[[np.ndarray], Sequence[np.ndarray]] | None = None,
    a0_fn: Callable[[np.ndarray], Sequence[np.ndarray]] | None = None,
    validate_at: Sequence | None = None,
    tol: float = OMEGA_TOL,
) -> ConnectionForm:
    """Build A = A0 + omega on the chart of ``metric``.

    ``a0_fn`` defaults to the canonical compatible connection computed from
    the metric; pass an explicit closed form to override.  ``omega_fn(R)``
    must return one pseudo-Hermitian matrix per coordinate; when
    ``validate_at`` points are given, each component is checked there and an
    :class:`OmegaNotPseudoHermitian` (carrying the component index and point)
    is raised on failure.
    """
    if omega_fn is not None and validate_at is not None:
        for r in validate_at:
            eta = metric.eta(r)
            for a, w in enumerate(omega_fn(np.asarray(r, dtype=float))):
                res = pseudo_hermiticity_residual(w, eta)
                if res > tol:
                    raise OmegaNotPseudoHermitian(a, np.asarray(r), res, tol)

    def components(r: np.ndarray) -> list[np.ndarray]:
        base = a0_fn(r) if a0_fn is not None else a_zero(metric, r)
        if omega_fn is None:
            return list(base)
        return [b + w for b, w in zip(base, omega_fn(r))]

    return ConnectionForm(
        metric.patch_id,
        components,
        dim=metric.dim,
        domain=metric.contains,
    )


def check_metric_compatibility(a_form: ConnectionForm, metric: MetricField, point) -> float:
    """Residual of the compatibility condition at one point.

    Returns  max_a || A_a^dag - eta A_a eta^{-1} - i (d_a eta) eta^{-1} ||
    in the max-entry norm; the caller compares against its own tolerance.
    """
    eta = metric.eta(point)
    eta_inv = np.linalg.inv(eta)
    parts = metric.partials(point)
    worst = 0.0
    for a, comp in enumerate(a_form.components(point)):
        res = comp.conj().T - eta @ comp @ eta_inv - 1j * parts[a] @ eta_inv
        worst = max(worst, linalg.max_abs(res))
    return worst


# ---------------------------------------------------------------- transport


def _check_single_patch(a_form: ConnectionForm, path: CurvePath, t0: float, t1: float):
    patches = path.patches_in_window(t0, t1)
    if len(patches) > 1:
        raise PatchBoundaryCrossed(
            f"window [{t0}, {t1}] spans charts {sorted(patches)}; "
            "split the transport at the patch switch"
        )
    if patches and a_form.patch_id is not None:
        (only,) = patches
        if only is not None and only != a_form.patch_id:
            raise OutOfPatch(
                f"path is on chart '{only}' but connection is on '{a_form.patch_id}'"
            )


def transport_operator(
    a_form: ConnectionForm,
    path: CurvePath,
    t0: float | None = None,
    t1: float | None = None,
    stepper: StepperConfig = StepperConfig(),
) -> TransportResult:
    """Solve  i dG/dt = (sum_a Rdot^a A_a) G,  G(t0) = identity.

    The window [t0, t1] (defaulting to the whole parameter range of the
    path) must stay on a single chart.
    """
    t0 = path.t_start if t0 is None else t0
    t1 = path.t_end if t1 is None else t1
    _check_single_patch(a_form, path, t0, t1)
    probe = a_form.components(path.position(0.5 * (t0 + t1)))[0]
    n = probe.shape[0]

    def rhs(t: float, g: np.ndarray) -> np.ndarray:
        gen = a_form.contracted(path.position(t), path.velocity(t))
        return -1j * (gen @ g)

    times, ops = integrate(rhs, np.eye(n, dtype=complex), t0, t1, stepper)
    return TransportResult(times=times, operators=ops)


def parallel_transport(
    a_form: ConnectionForm,
    path: CurvePath,
    psi0,
    t0: float | None = None,
    t1: float | None = None,
    stepper: StepperConfig = StepperConfig(),
) -> TransportResult:
    """Transport a single state vector: i dpsi/dt = (sum_a Rdot^a A_a) psi."""
    t0 = path.t_start if t0 is None else t0
    t1 = path.t_end if t1 is None else t1
    _check_single_patch(a_form, path, t0, t1)
    psi0 = linalg.as_vector(psi0, name="psi0")

    def rhs(t: float, psi: np.ndarray) -> np.ndarray:
        gen = a_form.contracted(path.position(t), path.velocity(t))
        return -1j * (gen @ psi)

    times, states = integrate(rhs, psi0, t0, t1, stepper)
    return TransportResult(times=times, states=states)


# ---------------------------------------------------------------- curvature


def _curvature_at_step(a_form: ConnectionForm, r: np.ndarray, h: float):
    d = a_form.dim
    comps = a_form.components(r)
    n = comps[0].shape[0]
    # d_a A_b by central differences
    grad = np.empty((d, d, n, n), dtype=complex)  # grad[a][b] = d_a A_b
    for a in range(d):
        rp, rm = r.copy(), r.copy()
        rp[a] += h
        rm[a] -= h
        cp = a_form.components(rp)
        cm = a_form.components(rm)
        for b in range(d):
            grad[a, b] = (cp[b] - cm[b]) / (2.0 * h)
    f = np.empty((d, d, n, n), dtype=complex)
    for a in range(d):
        for b in range(d):
            f[a, b] = grad[a, b] - grad[b, a] + 1j * linalg.commutator(comps[a], comps[b])
    return f


def curvature(a_form: ConnectionForm, point, fd_step: float = CURVATURE_FD_STEP) -> np.ndarray:
    """Curvature tensor F_ab = d_a A_b - d_b A_a + i [A_a, A_b].

    Partial derivatives use central differences with one Richardson
    extrapolation (steps h and h/2), so the derivative error scales like
    h^4.  Returns an antisymmetric (d, d) array of N x N matrices.
    """
    r = np.asarray(point, dtype=float)
    coarse = _curvature_at_step(a_form, r, fd_step)
    fine = _curvature_at_step(a_form, r, 0.5 * fd_step)
    return (4.0 * fine - coarse) / 3.0


# ---------------------------------------------------------------- gauge maps


def gauge_transform_connection(a_form: ConnectionForm, transition, point,
                               new_patch_id: str | None = None) -> list[np.ndarray]:
    """Components of the transformed connection on the other chart:

        A~_a = g^{-1} A_a g - i g^{-1} (d_a g).

    ``transition`` must provide g(R) and partial_g(R) (see
    :class:`qbundle.bundle.TransitionFunctionField`).
    """
    r = np.asarray(point, dtype=float)
    g = transition.g(r)
    g_inv = np.linalg.inv(g)
    dg = transition.partial_g(r)
    comps = a_form.components(r)
    return [g_inv @ comps[a] @ g - 1j * g_inv @ dg[a] for a in range(a_form.dim)]
