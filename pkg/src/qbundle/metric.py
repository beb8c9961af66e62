"""Metric operators, metric-weighted inner products, and pseudo-Hermiticity.

A positive-definite operator eta turns C^N into a Hilbert space with inner
product  <phi, psi>_eta = phi^dag @ eta @ psi.  An operator H is
*pseudo-Hermitian* with respect to eta when

    H^dag = eta @ H @ eta^{-1},

which is exactly the condition for H to be self-adjoint in the eta inner
product.  The positive root rho = sqrt(eta) intertwines the eta-weighted space
with the standard one: h = rho @ H @ rho^{-1} is Hermitian iff H is
pseudo-Hermitian.

:class:`MetricOperator` wraps one metric at a point and caches rho and its
inverse; :class:`MetricField` is a metric-valued field over a coordinate patch
of the base manifold, with analytic or finite-difference partial derivatives.
"""

from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from . import linalg
from .errors import DimensionMismatch, OutOfPatch

#: default tolerance for pseudo-(anti-)Hermiticity residual checks
PSEUDO_HERMITICITY_TOL = 1e-8

#: default relative step for finite-difference partials of metric fields
FD_STEP = 1e-5
#: absolute floor for the finite-difference step
FD_STEP_FLOOR = 1e-7


class MetricOperator:
    """A positive-definite metric on C^N with cached square root.

    Attributes
    ----------
    eta : ndarray
        The metric itself.
    rho : ndarray
        Unique positive root, rho @ rho = eta.
    rho_inv, eta_inv : ndarray
        Cached inverses.
    """

    def __init__(self, eta):
        self.eta = linalg.as_square(eta, "eta")
        self.rho = linalg.hermitian_sqrt(self.eta)
        self.rho_inv = np.linalg.inv(self.rho)
        self.eta_inv = self.rho_inv @ self.rho_inv

    @property
    def dim(self) -> int:
        return self.eta.shape[0]

    def inner(self, phi, psi) -> complex:
        return eta_inner(self.eta, phi, psi)

    def norm(self, psi) -> float:
        return float(np.sqrt(self.inner(psi, psi).real))


def eta_inner(eta, phi, psi) -> complex:
    """Metric-weighted inner product <phi, psi>_eta = phi^dag eta psi.

    Antilinear in ``phi``, linear in ``psi``.
    """
    eta = linalg.as_square(eta, "eta")
    n = eta.shape[0]
    phi = linalg.as_vector(phi, n, "phi")
    psi = linalg.as_vector(psi, n, "psi")
    return complex(np.vdot(phi, eta @ psi))


def _eta_of(metric) -> tuple[np.ndarray, np.ndarray]:
    """Accept a MetricOperator or a bare matrix; return (eta, eta_inv)."""
    if isinstance(metric, MetricOperator):
        return metric.eta, metric.eta_inv
    eta = linalg.as_square(metric, "eta")
    return eta, np.linalg.inv(eta)


def pseudo_hermiticity_residual(m, metric) -> float:
    """max-entry norm of  m^dag - eta m eta^{-1}."""
    eta, eta_inv = _eta_of(metric)
    m = linalg.as_square(m)
    return linalg.max_abs(m.conj().T - eta @ m @ eta_inv)


def is_pseudo_hermitian(m, metric, tol: float = PSEUDO_HERMITICITY_TOL) -> bool:
    return pseudo_hermiticity_residual(m, metric) <= tol


def pseudo_anti_hermiticity_residual(m, metric) -> float:
    """max-entry norm of  m^dag + eta m eta^{-1}."""
    eta, eta_inv = _eta_of(metric)
    m = linalg.as_square(m)
    return linalg.max_abs(m.conj().T + eta @ m @ eta_inv)


def is_pseudo_anti_hermitian(m, metric, tol: float = PSEUDO_HERMITICITY_TOL) -> bool:
    return pseudo_anti_hermiticity_residual(m, metric) <= tol


def split_pseudo(m, metric) -> tuple[np.ndarray, np.ndarray]:
    """Split m into pseudo-Hermitian and pseudo-anti-Hermitian parts.

    Returns (m_ph, m_aph) with m = m_ph + m_aph,
    m_ph = (m + eta^{-1} m^dag eta) / 2.
    """
    eta, eta_inv = _eta_of(metric)
    m = linalg.as_square(m)
    m_ph = 0.5 * (m + eta_inv @ m.conj().T @ eta)
    return m_ph, m - m_ph


def hermitize(m, metric) -> np.ndarray:
    """Similarity transform rho @ m @ rho^{-1}.

    Maps a pseudo-Hermitian operator to an honest Hermitian one on the
    standard Hilbert space (and an arbitrary operator to its rho-conjugate).
    """
    op = metric if isinstance(metric, MetricOperator) else MetricOperator(metric)
    return op.rho @ linalg.as_square(m) @ op.rho_inv


# ---------------------------------------------------------------- fields


class MetricField:
    """Metric-operator-valued field over one coordinate patch.

    Parameters
    ----------
    patch_id : str
        Label of the chart this field lives on.
    eta_fn : callable
        Map from a real coordinate d-vector to the metric matrix.
    partials_fn : callable, optional
        Map from coordinates to the tuple of coordinate partials of the
        metric.  When absent, partials are computed by central differences
        with a step of ``fd_step`` scaled by the coordinate magnitude
        (floored at ``FD_STEP_FLOOR``).
    dim : int
        Number of base-manifold coordinates.
    domain : callable, optional
        Predicate marking the chart's domain; evaluation outside raises
        :class:`OutOfPatch`.
    """

    def __init__(
        self,
        patch_id: str,
        eta_fn: Callable[[np.ndarray], np.ndarray],
        partials_fn: Callable[[np.ndarray], Sequence[np.ndarray]] | None = None,
        dim: int = 2,
        fd_step: float = FD_STEP,
        domain: Callable[[np.ndarray], bool] | None = None,
    ):
        self.patch_id = patch_id
        self._eta_fn = eta_fn
        self._partials_fn = partials_fn
        self.dim = dim
        self.fd_step = fd_step
        self._domain = domain

    def _coords(self, point) -> np.ndarray:
        r = np.asarray(point, dtype=float)
        if r.shape != (self.dim,):
            raise DimensionMismatch(
                f"expected a {self.dim}-vector of coordinates, got shape {r.shape}"
            )
        if self._domain is not None and not self._domain(r):
            raise OutOfPatch(f"point {r} is outside patch '{self.patch_id}'")
        return r

    def contains(self, point) -> bool:
        r = np.asarray(point, dtype=float)
        return self._domain is None or bool(self._domain(r))

    def eta(self, point) -> np.ndarray:
        return linalg.as_square(self._eta_fn(self._coords(point)), "eta")

    def operator(self, point) -> MetricOperator:
        return MetricOperator(self.eta(point))

    def partials(self, point) -> list[np.ndarray]:
        """[d eta / d R^a for each coordinate a], analytic when available."""
        r = self._coords(point)
        if self._partials_fn is not None:
            parts = self._partials_fn(r)
            return [linalg.as_square(p, "partial of eta") for p in parts]
        out = []
        for a in range(self.dim):
            h = max(self.fd_step * abs(r[a]), FD_STEP_FLOOR)
            rp, rm = r.copy(), r.copy()
            rp[a] += h
            rm[a] -= h
            out.append((self._eta_fn(rp) - self._eta_fn(rm)) / (2.0 * h))
        return out

    def eta_dot(self, point, velocity) -> np.ndarray:
        """Time derivative of eta along a curve: sum_a (d eta/d R^a) Rdot^a."""
        v = np.asarray(velocity, dtype=float)
        parts = self.partials(point)
        out = np.zeros_like(parts[0])
        for a in range(self.dim):
            out = out + v[a] * parts[a]
        return out


def constant_metric_field(patch_id: str, eta, dim: int = 2) -> MetricField:
    """Field whose metric does not depend on the base point."""
    eta = linalg.as_square(eta, "eta")
    zero = np.zeros_like(eta)
    return MetricField(
        patch_id,
        lambda r: eta,
        partials_fn=lambda r: [zero] * dim,
        dim=dim,
    )
