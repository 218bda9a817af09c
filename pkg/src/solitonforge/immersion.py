"""Numerical differential geometry of parametrized patches.

A submanifold of C^n is represented by a Chart: a box domain in R^k and a
map into C^n. Derivatives are taken by central finite differences, from
which the induced metric, the mean curvature vector, the pullback of the
symplectic form and (for half-dimensional patches) the Lagrangian angle
are assembled pointwise.

The mean curvature vector is computed as the normal part of
``g^{ij} d^2X/du_i du_j`` with respect to the real inner product Re herm;
the tangential Christoffel terms drop out under the projection, so no
connection coefficients are needed.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import cxgeom
from .errors import DegenerateMetricError, SingularFrameError
from .sampling import domain_box

DEFAULT_H_FIRST = 1e-4
DEFAULT_H_SECOND = 1e-3

# sampler margin guaranteeing jet stencils stay inside the domain
FD_MARGIN = 3 * DEFAULT_H_SECOND

# metric condition numbers above this signal a degenerate parametrization
COND_LIMIT = 1e10


@dataclass(frozen=True)
class Chart:
    """Parametrized patch u in R^k -> X(u) in C^n.

    domain is a sequence of (lo, hi) pairs, one per parameter; map takes a
    length-k array and returns a length-n complex array.
    """

    dim_domain: int
    dim_ambient: int
    domain: tuple
    map: Callable[[np.ndarray], np.ndarray]
    name: str = ""

    def __post_init__(self):
        lo, hi = domain_box(self.domain)
        if len(lo) != self.dim_domain:
            raise ValueError(
                f"domain has {len(lo)} axes but dim_domain = {self.dim_domain}"
            )
        if self.dim_domain > self.dim_ambient:
            raise ValueError("patch dimension exceeds ambient complex dimension")

    def __call__(self, u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.asarray(self.map(u), dtype=complex)
        if out.shape != (self.dim_ambient,):
            raise ValueError(
                f"chart map returned shape {out.shape}, expected ({self.dim_ambient},)"
            )
        return out


@dataclass(frozen=True)
class JetSample:
    """Point value with first and second central-difference derivatives."""

    u: np.ndarray
    point: np.ndarray
    first: np.ndarray   # (k, n): first[i] = dX/du_i
    second: np.ndarray  # (k, k, n), symmetric in the first two axes
    step: tuple         # (h_first, h_second) actually used


@dataclass(frozen=True)
class GeometrySample:
    """Pointwise metric data derived from a jet."""

    metric: np.ndarray          # (k, k) real, g_ij = Re herm(dX_i, dX_j)
    metric_inverse: np.ndarray
    mean_curvature: np.ndarray  # (n,) complex ambient vector
    omega_pullback: np.ndarray  # (k, k) real antisymmetric
    angle: Optional[float] = field(default=None)


def jet(chart, u, h_first=DEFAULT_H_FIRST, h_second=DEFAULT_H_SECOND):
    """Sample chart value and derivatives at u by central differences.

    u must be at least 2*max(h) from the domain boundary. First derivatives
    and second derivatives are O(h^2) accurate.
    """
    u = np.atleast_1d(np.asarray(u, dtype=float))
    k, n = chart.dim_domain, chart.dim_ambient
    lo, hi = domain_box(chart.domain)
    clearance = 2.0 * max(h_first, h_second)
    if np.any(u - lo < clearance) or np.any(hi - u < clearance):
        raise ValueError(
            f"sample point {u} closer than {clearance} to the domain boundary"
        )

    X = chart(u)
    first = np.empty((k, n), dtype=complex)
    second = np.empty((k, k, n), dtype=complex)

    def shifted(i, s, h):
        v = u.copy()
        v[i] += s * h
        return chart(v)

    for i in range(k):
        first[i] = (shifted(i, +1, h_first) - shifted(i, -1, h_first)) / (2 * h_first)

    h2 = h_second
    for i in range(k):
        second[i, i] = (shifted(i, +1, h2) - 2 * X + shifted(i, -1, h2)) / h2**2
        for j in range(i + 1, k):

            def corner(si, sj):
                w = u.copy()
                w[i] += si * h2
                w[j] += sj * h2
                return chart(w)

            mixed = (corner(1, 1) - corner(1, -1) - corner(-1, 1) + corner(-1, -1)) / (
                4 * h2**2
            )
            second[i, j] = mixed
            second[j, i] = mixed

    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(first)) and np.all(np.isfinite(second))):
        raise ValueError(f"chart evaluation not finite near u = {u}")
    return JetSample(u=u, point=X, first=first, second=second, step=(h_first, h2))


def _metric_of(first):
    k = first.shape[0]
    g = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            g[i, j] = g[j, i] = np.vdot(first[j], first[i]).real
    return g


def _invert_metric(g):
    cond = np.linalg.cond(g)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise DegenerateMetricError(
            f"induced metric condition number {cond:.3e} exceeds {COND_LIMIT:.0e}"
        )
    return np.linalg.inv(g)


def normal_project(v, jet_sample, metric_inverse=None):
    """Component of ambient vector v normal to the tangent space of the jet.

    Projection in the real inner product Re herm; idempotent.
    """
    first = jet_sample.first
    if metric_inverse is None:
        metric_inverse = _invert_metric(_metric_of(first))
    coeffs = metric_inverse @ np.array(
        [np.vdot(d, v).real for d in first]
    )
    return v - coeffs @ first


def geometry_at(jet_sample):
    """Metric, mean curvature, symplectic pullback and angle at one jet."""
    first, second = jet_sample.first, jet_sample.second
    k = first.shape[0]
    n = jet_sample.point.shape[0]

    g = _metric_of(first)
    ginv = _invert_metric(g)

    laplacian = np.tensordot(ginv, second, axes=([0, 1], [0, 1]))
    H = normal_project(laplacian, jet_sample, metric_inverse=ginv)

    omega = np.zeros((k, k))
    for i in range(k):
        for j in range(i + 1, k):
            w = cxgeom.symp(first[i], first[j])
            omega[i, j] = w
            omega[j, i] = -w

    angle = None
    if k == n:
        try:
            angle = cxgeom.lagrangian_angle(first.T)
        except SingularFrameError:
            angle = None

    return GeometrySample(
        metric=g,
        metric_inverse=ginv,
        mean_curvature=H,
        omega_pullback=omega,
        angle=angle,
    )


def geometry(chart, u, h_first=DEFAULT_H_FIRST, h_second=DEFAULT_H_SECOND):
    """Convenience wrapper: jet + geometry_at."""
    return geometry_at(jet(chart, u, h_first=h_first, h_second=h_second))


def max_omega_residual(chart, points, h_first=DEFAULT_H_FIRST):
    """Max |omega(dX_i, dX_j)| over the given parameter points.

    First derivatives are normalized to unit length before pairing, so the
    residual is scale free.
    """
    worst = 0.0
    for u in points:
        first = jet(chart, u, h_first=h_first).first
        norms = np.linalg.norm(first, axis=1)
        if np.any(norms == 0.0):
            raise DegenerateMetricError(f"zero tangent vector at u = {u}")
        unit = first / norms[:, None]
        k = unit.shape[0]
        for i in range(k):
            for j in range(i + 1, k):
                worst = max(worst, abs(cxgeom.symp(unit[i], unit[j])))
    return worst
