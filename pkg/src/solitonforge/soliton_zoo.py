"""Concrete self-similar Lagrangians and the generic soliton fitter.

Constructors
    * quadric solitons: phase-rotated real quadrics {sum_i l_i x_i^2 = 1},
      swept by per-coordinate phases e^{i l_i s};
    * the trace in R^n of the corresponding flow;
    * products gamma(s) . X(p) of a plane curve with a unit-sphere Legendrian;
    * a small catalog of Legendrians (great sphere, flat torus link).

Verification
    * fit_soliton solves the linear least-squares problem for constants
      (a, b) in H = (a X + b)^perp over sampled points of any chart.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import immersion
from .cxgeom import symp
from .errors import DegenerateMetricError
from .immersion import Chart, geometry_at, jet, normal_project
from .sampling import sample_box


@dataclass(frozen=True)
class QuadricSpec:
    """Coefficients l_i of the quadric {sum l_i x_i^2 = 1}, all nonzero."""

    lambdas: tuple

    def __post_init__(self):
        lam = tuple(float(v) for v in self.lambdas)
        object.__setattr__(self, "lambdas", lam)
        if len(lam) == 0 or any(v == 0.0 for v in lam):
            raise ValueError(f"all quadric coefficients must be nonzero, got {lam}")
        if sum(lam) <= 0.0:
            raise ValueError(f"quadric coefficients must satisfy sum > 0, got sum = {sum(lam)}")

    @property
    def n(self):
        return len(self.lambdas)

    @property
    def total(self):
        return float(sum(self.lambdas))


def _sphere_point(angles):
    """Spherical coordinates: len(angles)+1 unit-vector components."""
    angles = np.atleast_1d(angles)
    d = len(angles) + 1
    out = np.ones(d)
    for i, th in enumerate(angles):
        out[i] *= math.cos(th)
        out[i + 1 :] *= math.sin(th)
    return out


def _sphere_domain(k):
    """Angle box for a k-dimensional sphere patch, clear of the poles."""
    margin = 0.35
    box = [(margin, math.pi - margin)] * max(k - 1, 0)
    box.append((margin, 2 * math.pi - margin))
    return tuple(box[:k]) if k > 0 else ()


def quadric_point(lambdas, p):
    """Point of {sum l_i x_i^2 = 1} for parameters p (one connected sheet).

    Coordinates in the positive group carry spherical coordinates scaled by
    cosh(rho)/sqrt(l_i); the negative group carries sinh(rho)/sqrt(|l_j|)
    times its own spherical point.  With no negative coefficients the sheet
    is the ellipsoid itself and there is no rho parameter.
    """
    lambdas = np.asarray(lambdas, dtype=float)
    pos = np.flatnonzero(lambdas > 0)
    neg = np.flatnonzero(lambdas < 0)
    p = np.atleast_1d(np.asarray(p, dtype=float))

    x = np.zeros(len(lambdas))
    if len(neg) == 0:
        omega = _sphere_point(p) if len(pos) > 1 else np.ones(1)
        x[pos] = omega / np.sqrt(lambdas[pos])
        return x

    n_pos_ang = len(pos) - 1
    n_neg_ang = len(neg) - 1
    rho = p[n_pos_ang]
    ang_pos = p[:n_pos_ang]
    ang_neg = p[n_pos_ang + 1 :]
    omega = _sphere_point(ang_pos) if n_pos_ang > 0 else np.ones(1)
    zeta = _sphere_point(ang_neg) if n_neg_ang > 0 else np.ones(1)
    x[pos] = math.cosh(rho) * omega / np.sqrt(lambdas[pos])
    x[neg] = math.sinh(rho) * zeta / np.sqrt(-lambdas[neg])
    return x


def quadric_domain(lambdas, rho_max=1.0):
    lambdas = np.asarray(lambdas, dtype=float)
    pos = np.flatnonzero(lambdas > 0)
    neg = np.flatnonzero(lambdas < 0)
    if len(pos) == 0:
        raise ValueError("need at least one positive coefficient to parametrize a sheet")
    dom = list(_sphere_domain(len(pos) - 1))
    if len(neg) > 0:
        dom.append((-rho_max, rho_max))
        dom.extend(_sphere_domain(len(neg) - 1))
    return tuple(dom)


def build_quadric_lagrangian(spec, s_range=(0.0, 2.0 * math.pi)):
    """Lagrangian (p, s) -> (x_1(p) e^{i l_1 s}, ..., x_n(p) e^{i l_n s}).

    The base point x(p) runs over one sheet of {sum l_i x_i^2 = 1}.
    """
    if not isinstance(spec, QuadricSpec):
        spec = QuadricSpec(tuple(spec))
    lam = np.asarray(spec.lambdas)
    base_dom = quadric_domain(lam)
    domain = base_dom + ((float(s_range[0]), float(s_range[1])),)

    def chart_map(u):
        x = quadric_point(lam, u[:-1])
        return x * np.exp(1j * lam * u[-1])

    return Chart(
        dim_domain=len(domain),
        dim_ambient=spec.n,
        domain=domain,
        map=chart_map,
        name=f"quadric{spec.lambdas}",
    )


@dataclass(frozen=True)
class TraceSlice:
    """One time slice {sum l_i x_i^2 = rhs} of the flow trace in R^n."""

    t: float
    rhs: float
    degenerate: bool
    points: object  # (N, n) array of sample points, or None if empty/degenerate


def flow_trace(spec, t_values, n_points=64, seed=0):
    """Hypersurface slices {sum l_i x_i^2 = (-2t) sum l_i} for each t.

    Slices with rhs > 0 are homothetic copies of the unit-level quadric by
    the factor sqrt(rhs); rhs = 0 is the degenerate cone (flagged, no
    points); rhs < 0 slices are parametrized through the sign-flipped
    coefficient vector when it has a positive direction, otherwise empty.
    """
    if not isinstance(spec, QuadricSpec):
        spec = QuadricSpec(tuple(spec))
    lam = np.asarray(spec.lambdas)
    out = []
    for t in t_values:
        rhs = float(-2.0 * t * spec.total)
        if rhs == 0.0:
            out.append(TraceSlice(t=float(t), rhs=rhs, degenerate=True, points=None))
            continue
        coeffs = lam / rhs
        if np.all(coeffs < 0):
            out.append(TraceSlice(t=float(t), rhs=rhs, degenerate=False, points=None))
            continue
        dom = quadric_domain(coeffs)
        params = sample_box(dom, n_points, seed=seed)
        pts = np.array([quadric_point(coeffs, p) for p in params])
        out.append(TraceSlice(t=float(t), rhs=rhs, degenerate=False, points=pts))
    return out


def legendrian_catalog(name, n):
    """Named Legendrian patches of the unit sphere S^{2n-1} in C^n.

    great_sphere: the real unit sphere S^{n-1} in R^n, spherical angles.
    torus: (e^{i t_1}, ..., e^{i t_n})/sqrt(n) on the plane sum t_j = 0,
    parametrized by the first n-1 angles (the link of the classic minimal
    Lagrangian cone).
    """
    if n < 2:
        raise ValueError(f"need ambient complex dimension >= 2, got {n}")
    if name == "great_sphere":
        dom = _sphere_domain(n - 1)

        def sphere_map(u):
            return _sphere_point(u).astype(complex)

        return Chart(n - 1, n, dom, sphere_map, name=f"great_sphere_{n}")
    if name == "torus":
        dom = tuple((0.3, 2 * math.pi - 0.3) for _ in range(n - 1))
        root = 1.0 / math.sqrt(n)

        def torus_map(u):
            t = np.append(u, -np.sum(u))
            return root * np.exp(1j * t)

        return Chart(n - 1, n, dom, torus_map, name=f"torus_{n}")
    raise ValueError(f"unknown Legendrian name {name!r}; choose great_sphere or torus")


def legendrian_residual(chart, n_samples=64, seed=0):
    """Max deviation from |X| = 1 and from the contact condition omega(X, V) = 0."""
    pts = sample_box(chart.domain, n_samples, seed=seed, margin=immersion.FD_MARGIN)
    worst_norm = 0.0
    worst_contact = 0.0
    for u in pts:
        js = jet(chart, u)
        worst_norm = max(worst_norm, abs(np.linalg.norm(js.point) - 1.0))
        for d in js.first:
            worst_contact = max(
                worst_contact, abs(symp(js.point, d / np.linalg.norm(d)))
            )
    return worst_norm, worst_contact


def build_curve_times_legendrian(gamma, legendrian, s_range, leg_tol=1e-8):
    """Lagrangian (s, p) -> gamma(s) . X(p) from a curve and a Legendrian.

    gamma maps s to C*, X is a unit-sphere Legendrian chart.  The inputs
    are validated (unit norm and contact condition within leg_tol); the
    output chart degenerates where gamma'(s) = 0, which surfaces as a
    DegenerateMetricError when geometry is evaluated there.
    """
    worst_norm, worst_contact = legendrian_residual(legendrian)
    if worst_norm > leg_tol or worst_contact > leg_tol:
        raise ValueError(
            f"input is not a unit-sphere Legendrian: |X|-1 residual {worst_norm:.3e}, "
            f"contact residual {worst_contact:.3e} exceed {leg_tol:.0e}"
        )
    domain = ((float(s_range[0]), float(s_range[1])),) + tuple(legendrian.domain)

    def chart_map(u):
        return complex(gamma(u[0])) * legendrian(u[1:])

    return Chart(
        dim_domain=legendrian.dim_domain + 1,
        dim_ambient=legendrian.dim_ambient,
        domain=domain,
        map=chart_map,
        name=f"curve_x_{legendrian.name}",
    )


@dataclass(frozen=True)
class SolitonFit:
    """Least-squares soliton constants for H = (a X + b)^perp.

    residual is the RMS of |H - (aX+b)^perp| over the samples, divided by
    the RMS of |H| (0 reported when H vanishes identically); kernel_dim
    counts the null directions of the normal equations (0 when the fit is
    unambiguous).
    """

    a: float
    b: np.ndarray  # real vector of length 2n, interleaved (x1, y1, ...)
    residual: float
    kernel_dim: int
    n_samples: int


def fit_soliton(chart, n_samples=200, seed=0, h_first=None, h_second=None):
    """Fit constants (a, b) minimizing sum |H - (a X + b)^perp|^2 on samples.

    The unknown b ranges over real vectors of R^{2n}; the normal equations
    are accumulated in sample order and solved directly, falling back to
    the pseudo-inverse (minimum-norm solution) when rank deficient.
    """
    kw = {}
    if h_first is not None:
        kw["h_first"] = h_first
    if h_second is not None:
        kw["h_second"] = h_second
    margin = 3 * kw.get("h_second", immersion.DEFAULT_H_SECOND)
    pts = sample_box(chart.domain, n_samples, seed=seed, margin=margin)

    n = chart.dim_ambient
    dim = 1 + 2 * n
    G = np.zeros((dim, dim))
    rhs = np.zeros(dim)
    h_norm2 = 0.0
    x_norm2 = 0.0
    rows = []

    basis = np.zeros((2 * n, n), dtype=complex)
    for j in range(n):
        basis[2 * j, j] = 1.0
        basis[2 * j + 1, j] = 1.0j

    for u in pts:
        js = jet(chart, u, **kw)
        geo = geometry_at(js)
        H = geo.mean_curvature
        cols = np.empty((dim, n), dtype=complex)
        cols[0] = normal_project(js.point, js, geo.metric_inverse)
        for j in range(2 * n):
            cols[1 + j] = normal_project(basis[j], js, geo.metric_inverse)
        # real design-matrix block for this sample
        A = np.empty((2 * n, dim))
        for j in range(dim):
            A[0::2, j] = cols[j].real
            A[1::2, j] = cols[j].imag
        y = np.empty(2 * n)
        y[0::2] = H.real
        y[1::2] = H.imag
        G += A.T @ A
        rhs += A.T @ y
        h_norm2 += float(y @ y)
        x_norm2 += float(np.vdot(js.point, js.point).real)
        rows.append((A, y))

    sv = np.linalg.svd(G, compute_uv=False)
    tol = max(G.shape) * np.finfo(float).eps * (sv[0] if sv[0] > 0 else 1.0)
    kernel_dim = int(np.sum(sv <= tol))

    # H below finite-difference resolution: the zero constants fit exactly
    h_rms = math.sqrt(h_norm2 / len(rows))
    floor = 1e-8 * max(1.0, math.sqrt(x_norm2 / len(rows)))
    if h_rms < floor:
        return SolitonFit(
            a=0.0, b=np.zeros(2 * n), residual=0.0,
            kernel_dim=max(kernel_dim, 1), n_samples=len(rows),
        )
    if kernel_dim == 0 and np.linalg.cond(G) < 1e12:
        theta = np.linalg.solve(G, rhs)
    else:
        theta = np.linalg.pinv(G, rcond=1e-12) @ rhs
        kernel_dim = max(kernel_dim, 1)

    res2 = 0.0
    for A, y in rows:
        r = y - A @ theta
        res2 += float(r @ r)
    denom = math.sqrt(h_norm2 / len(rows)) if h_norm2 > 0 else 0.0
    residual = math.sqrt(res2 / len(rows)) / denom if denom > 0 else 0.0

    return SolitonFit(
        a=float(theta[0]),
        b=theta[1:].copy(),
        residual=float(residual),
        kernel_dim=kernel_dim,
        n_samples=len(rows),
    )


def chart_omega_residual(chart, n_samples=200, seed=0):
    """Max normalized symplectic pullback over sampled points."""
    pts = sample_box(
        chart.domain, n_samples, seed=seed, margin=immersion.FD_MARGIN
    )
    return immersion.max_omega_residual(chart, pts)
