"""Isotropic data and developing flows in the complex affine group.

A patch Sigma in C^n together with a matrix B and vector b is *developing
data* when every tangent vector V satisfies herm(V, B X + b) = 0.  Such a
patch can be swept into an isotropic family A(s) Sigma + a(s) by the
matrix flow

    A*(s) dA/ds = alpha(s) B,      A*(s) da/ds = alpha(s) b,

from A(0) = I, a(0) = 0, for any driver curve alpha.  When additionally the
angle of the augmented frame (T_p Sigma, B X_p + b) is independent of p,
the choice alpha(s) = conj(det A(s)) produces special Lagrangians, and the
sweep angle obeys

    theta(s, p) = arg det A(s) + arg alpha(s) + theta(0, p)   (mod 2 pi).

Everything here is verified by sampling: tangent bases come from central
differences of the chart, angles from complex determinants, and isotropy
from the pullback of the symplectic form.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import cxgeom, immersion
from .cxgeom import angle_difference, circular_mean, herm, lagrangian_angle, symp
from .errors import SingularFrameError
from .immersion import Chart, geometry_at, jet
from .sampling import sample_box
from .soliton_zoo import legendrian_catalog, quadric_domain, quadric_point

DEFAULT_STEPS_PER_UNIT = 512
DET_FLOOR = 1e-12
UNWRAP_JUMP_LIMIT = math.pi / 2


@dataclass(frozen=True)
class InitialData:
    """Developing data (Sigma, B, b), optionally with hyperquadric provenance.

    sigma is a k-dimensional chart in C^n with k <= n-1.  When the patch
    was cut out of a hyperquadric {Re herm(Lam X, X) = c}, the pair
    (Lam, c) is kept so the stronger hyperquadric checks can run.
    """

    sigma: Chart
    B: np.ndarray
    b: np.ndarray
    quadric: Optional[tuple] = None

    def __post_init__(self):
        n = self.sigma.dim_ambient
        B = np.asarray(self.B, dtype=complex)
        b = np.asarray(self.b, dtype=complex)
        if B.shape != (n, n):
            raise ValueError(f"B must be {n}x{n}, got {B.shape}")
        if b.shape != (n,):
            raise ValueError(f"b must have length {n}, got {b.shape}")
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "b", b)
        if self.sigma.dim_domain > n - 1:
            raise ValueError(
                f"patch dimension {self.sigma.dim_domain} must be <= n-1 = {n - 1}"
            )
        if self.quadric is not None:
            Lam, c = self.quadric
            Lam = np.asarray(Lam, dtype=complex)
            if Lam.shape != (n, n) or np.max(np.abs(Lam - Lam.conj().T)) > 1e-12:
                raise ValueError("quadric matrix must be Hermitian of matching size")
            object.__setattr__(self, "quadric", (Lam, float(c)))
            for u in sample_box(self.sigma.domain, 8, seed=7, margin=1e-2):
                X = self.sigma(u)
                val = herm(Lam @ X, X).real
                if abs(val - float(c)) > 1e-8:
                    raise ValueError(
                        f"patch leaves the hyperquadric: Re<Lam X, X> = {val:.9g} != {c}"
                    )

    @property
    def n(self):
        return self.sigma.dim_ambient


def sphere_data(n):
    """The real unit sphere S^{n-1} with B = iI, b = 0."""
    chart = legendrian_catalog("great_sphere", n)
    return InitialData(
        sigma=chart,
        B=1j * np.eye(n),
        b=np.zeros(n),
        quadric=(np.eye(n), 1.0),
    )


def quadric_data(lambdas):
    """The real quadric {sum l_i x_i^2 = 1} in R^n with B = i diag(l), b = 0."""
    lam = np.asarray(lambdas, dtype=float)
    n = lam.size
    dom = quadric_domain(lam)

    def chart_map(u):
        return quadric_point(lam, u).astype(complex)

    chart = Chart(n - 1, n, dom, chart_map, name=f"real_quadric{tuple(lam)}")
    return InitialData(
        sigma=chart,
        B=1j * np.diag(lam).astype(complex),
        b=np.zeros(n),
        quadric=(np.diag(lam).astype(complex), 1.0),
    )


def _tangent_frame(data_or_chart, u):
    chart = data_or_chart.sigma if isinstance(data_or_chart, InitialData) else data_or_chart
    return jet(chart, u)


@dataclass(frozen=True)
class Eq3Report:
    """Result of the orthogonality check herm(V, B X + b) = 0."""

    max_residual: float
    tol: float
    passed: bool
    n_samples: int


def check_initial_data(data, n_samples=200, tol=1e-8, seed=0):
    """Max |herm(V, B X + b)| over samples, unit V, scaled by |B X + b|."""
    pts = sample_box(
        data.sigma.domain, n_samples, seed=seed, margin=immersion.FD_MARGIN
    )
    worst = 0.0
    for u in pts:
        js = _tangent_frame(data, u)
        w = data.B @ js.point + data.b
        wn = np.linalg.norm(w)
        if wn == 0.0:
            continue
        for d in js.first:
            dn = np.linalg.norm(d)
            if dn == 0.0:
                raise SingularFrameError(f"degenerate tangent vector at u = {u}")
            worst = max(worst, abs(herm(d / dn, w)) / wn)
    return Eq3Report(max_residual=worst, tol=tol, passed=worst < tol, n_samples=len(pts))


@dataclass(frozen=True)
class AngleReport:
    """Circular statistics of the augmented-frame angle over the patch."""

    mean_angle: float
    max_deviation: float
    samples: int


def check_constant_angle(data, n_samples=200, seed=0):
    """Angle of the frame (T_p Sigma, B X_p + b) across sampled p.

    Requires k = n-1 so the frame is square.  The tangent basis comes from
    one chart, hence is consistently oriented; deviations are measured on
    the circle around the circular mean.
    """
    n = data.n
    if data.sigma.dim_domain != n - 1:
        raise ValueError(
            f"constant-angle check needs a patch of dimension n-1 = {n - 1}, "
            f"got {data.sigma.dim_domain}"
        )
    pts = sample_box(
        data.sigma.domain, n_samples, seed=seed, margin=immersion.FD_MARGIN
    )
    angles = []
    for u in pts:
        js = _tangent_frame(data, u)
        w = data.B @ js.point + data.b
        frame = np.column_stack([*js.first, w])
        angles.append(lagrangian_angle(frame))
    angles = np.array(angles)
    mean = circular_mean(angles)
    dev = max(abs(angle_difference(a, mean)) for a in angles)
    return AngleReport(mean_angle=mean, max_deviation=dev, samples=len(pts))


@dataclass(frozen=True)
class HyperquadricReport:
    """Residuals of the Legendrian and constant-angle conditions on a
    hyperquadric {Re herm(Lam X, X) = c}."""

    contact_residual: float
    curvature_residual: float
    n_samples: int


def _orthonormal_tangents(js, ginv=None):
    """Gram-Schmidt (real inner product) orthonormal basis of the tangent space."""
    basis = []
    for d in js.first:
        v = d.copy()
        for e in basis:
            v = v - np.vdot(e, v).real * e
        nv = np.linalg.norm(v)
        if nv < 1e-12:
            raise SingularFrameError("tangent frame degenerate during orthonormalization")
        basis.append(v / nv)
    return basis


def check_quadric_legendrian(chart, Lam, c, n_samples=100, seed=0, h=1e-4):
    """Legendrian and angle-criterion residuals for a patch of a hyperquadric.

    contact_residual: max |omega(Lam X, V)| over unit tangents V, scaled by
    |Lam X|.  curvature_residual: max over unit tangents of
    |omega(-H_h + Lam^2 X / |Lam X|^2, V)| where H_h is the mean curvature
    of the patch inside the hypersurface, obtained from the ambient mean
    curvature by removing the trace of the hypersurface shape operator
    along the unit normal Lam X / |Lam X| (shape operator by central
    differences of the normal field).
    """
    Lam = np.asarray(Lam, dtype=complex)
    pts = sample_box(chart.domain, n_samples, seed=seed, margin=immersion.FD_MARGIN)

    def unit_normal(X):
        g = Lam @ X
        gn = np.linalg.norm(g)
        if gn == 0.0:
            raise SingularFrameError("Lam X = 0: hyperquadric normal undefined")
        return g / gn

    contact = 0.0
    curvature = 0.0
    for u in pts:
        js = jet(chart, u)
        X = js.point
        if abs(herm(Lam @ X, X).real - c) > 1e-6:
            raise ValueError(
                f"patch point at u = {u} is off the hyperquadric level {c}"
            )
        lx = Lam @ X
        lxn = np.linalg.norm(lx)
        geo = geometry_at(js)
        ortho = _orthonormal_tangents(js)
        for e in ortho:
            contact = max(contact, abs(symp(lx, e)) / lxn)

        trace_S = 0.0
        for e in ortho:
            dnu = (unit_normal(X + h * e) - unit_normal(X - h * e)) / (2.0 * h)
            trace_S += -np.vdot(e, dnu).real
        H_h = geo.mean_curvature - trace_S * unit_normal(X)

        w = -H_h + (Lam @ lx) / lxn**2
        for e in ortho:
            curvature = max(curvature, abs(symp(w, e)))
    return HyperquadricReport(
        contact_residual=contact, curvature_residual=curvature, n_samples=len(pts)
    )


# ---------------------------------------------------------------------------
# the developing flow
# ---------------------------------------------------------------------------


class DevelopingPath:
    """Discretized solution (s_i, A(s_i), a(s_i)) of the developing flow.

    Values between nodes come from a single fractional RK4 step off the
    nearest node below, so evaluation is smooth inside node intervals and
    consistent with the stored path at the nodes.  unwrapped_angle holds
    the continuous branch of arg det A along the grid.
    """

    def __init__(self, grid, A, a, driver, alpha_fn, rhs):
        self.grid = grid
        self.A = A
        self.a = a
        self.driver = driver
        self._alpha_fn = alpha_fn
        self._rhs = rhs

        angles = np.array([np.angle(np.linalg.det(M)) for M in A])
        unwrapped = [float(angles[0])]
        for th in angles[1:]:
            prev = unwrapped[-1]
            cand = prev + angle_difference(th, prev % (2 * math.pi))
            if abs(cand - prev) >= UNWRAP_JUMP_LIMIT:
                raise SingularFrameError(
                    f"arg det A jumps by {abs(cand - prev):.3f} >= pi/2 between nodes; "
                    "refine the grid"
                )
            unwrapped.append(cand)
        self.unwrapped_angle = np.array(unwrapped)

    @property
    def s_max(self):
        return float(self.grid[-1])

    def _locate(self, s):
        h = self.grid[1] - self.grid[0]
        i = int(min(max(math.floor(s / h), 0), len(self.grid) - 2))
        return i, h

    def at(self, s):
        """(A(s), a(s)) anywhere in [0, s_max]."""
        s = float(s)
        if s < -1e-12 or s > self.s_max + 1e-9:
            raise ValueError(f"s = {s:.6g} outside the integrated range [0, {self.s_max:.6g}]")
        s = min(max(s, 0.0), self.s_max)
        i, h = self._locate(s)
        ds = s - self.grid[i]
        if ds == 0.0:
            return self.A[i].copy(), self.a[i].copy()
        return _rk4_step(self.grid[i], self.A[i], self.a[i], ds, self._rhs)

    def alpha_at(self, s):
        """Driver value at s (prescribed, or conj det A for the SL driver)."""
        if self._alpha_fn is not None:
            return complex(self._alpha_fn(s))
        A, _ = self.at(s)
        return complex(np.conj(np.linalg.det(A)))

    def angle_at(self, s):
        """Continuously unwrapped arg det A at arbitrary s."""
        A, _ = self.at(s)
        raw = float(np.angle(np.linalg.det(A)))
        i, _ = self._locate(s)
        base = self.unwrapped_angle[i]
        return base + angle_difference(raw, base % (2 * math.pi))


def _rk4_step(s, A, a, h, rhs):
    k1A, k1a = rhs(s, A, a)
    k2A, k2a = rhs(s + h / 2, A + (h / 2) * k1A, a + (h / 2) * k1a)
    k3A, k3a = rhs(s + h / 2, A + (h / 2) * k2A, a + (h / 2) * k2a)
    k4A, k4a = rhs(s + h, A + h * k3A, a + h * k3a)
    return (
        A + (h / 6) * (k1A + 2 * k2A + 2 * k3A + k4A),
        a + (h / 6) * (k1a + 2 * k2a + 2 * k3a + k4a),
    )


def _normalize_range(s_range):
    if np.isscalar(s_range):
        lo, hi = 0.0, float(s_range)
    else:
        lo, hi = float(s_range[0]), float(s_range[1])
    if lo != 0.0:
        raise ValueError(f"developing starts at s = 0, got range starting at {lo}")
    if hi <= 0.0:
        raise ValueError(f"need a positive range, got {hi}")
    return hi


def _integrate(B, b, alpha_of, s_max, steps, driver, alpha_fn):
    n = B.shape[0]

    def rhs(s, A, a):
        al = alpha_of(s, A)
        Astar = A.conj().T
        dA = np.linalg.solve(Astar, al * B)
        da = np.linalg.solve(Astar, al * b)
        return dA, da

    h = s_max / steps
    grid = h * np.arange(steps + 1)
    A = np.empty((steps + 1, n, n), dtype=complex)
    a = np.empty((steps + 1, n), dtype=complex)
    A[0] = np.eye(n)
    a[0] = 0.0
    for i in range(steps):
        A[i + 1], a[i + 1] = _rk4_step(grid[i], A[i], a[i], h, rhs)
        d = np.linalg.det(A[i + 1])
        if not np.isfinite(d) or abs(d) < DET_FLOOR:
            raise SingularFrameError(
                f"A(s) numerically singular at s = {grid[i + 1]:.6g} (|det| = {abs(d):.3e})"
            )
    return DevelopingPath(grid, A, a, driver, alpha_fn, rhs)


def develop(data, alpha, s_range, steps=None):
    """Integrate the developing flow with a prescribed driver alpha(s)."""
    s_max = _normalize_range(s_range)
    if steps is None:
        steps = max(16, int(math.ceil(DEFAULT_STEPS_PER_UNIT * s_max)))
    if steps < 16:
        raise ValueError(f"steps must be >= 16, got {steps}")
    return _integrate(
        data.B,
        data.b,
        lambda s, A: complex(alpha(s)),
        s_max,
        steps,
        driver="prescribed",
        alpha_fn=alpha,
    )


def develop_special_lagrangian(data, s_range, steps=None, angle_tol=1e-6):
    """Integrate the flow with the self-consistent driver alpha = conj det A.

    Requires constant-angle data (checked up front with angle_tol).
    """
    report = check_constant_angle(data, n_samples=40)
    if report.max_deviation > angle_tol:
        raise ValueError(
            f"data does not have constant angle: deviation {report.max_deviation:.3e} "
            f"exceeds {angle_tol:.0e}"
        )
    s_max = _normalize_range(s_range)
    if steps is None:
        steps = max(16, int(math.ceil(DEFAULT_STEPS_PER_UNIT * s_max)))
    if steps < 16:
        raise ValueError(f"steps must be >= 16, got {steps}")
    return _integrate(
        data.B,
        data.b,
        lambda s, A: complex(np.conj(np.linalg.det(A))),
        s_max,
        steps,
        driver="special_lagrangian",
        alpha_fn=None,
    )


def developed_chart(path, data):
    """Chart (s, p) -> A(s) X(p) + a(s) of the swept family."""
    domain = ((0.0, path.s_max),) + tuple(data.sigma.domain)

    def chart_map(u):
        A, a = path.at(u[0])
        return A @ data.sigma(u[1:]) + a

    return Chart(
        dim_domain=data.sigma.dim_domain + 1,
        dim_ambient=data.n,
        domain=domain,
        map=chart_map,
        name=f"developed_{data.sigma.name}",
    )


def isotropy_residual(path, data, n_samples=100, seed=0):
    """Max normalized symplectic pullback of the developed chart."""
    chart = developed_chart(path, data)
    pts = sample_box(
        chart.domain, n_samples, seed=seed, margin=immersion.FD_MARGIN
    )
    return immersion.max_omega_residual(chart, pts)


@dataclass(frozen=True)
class AngleFormulaReport:
    """Deviation of the measured sweep angle from its closed expression."""

    max_deviation: float
    n_samples: int


def angle_formula_check(path, data, n_samples=60, n_s=8, seed=0, h=1e-5):
    """Compare measured sweep angles against arg det A + arg alpha + theta(0, p).

    The measured angle at (s, p) is the angle of the frame consisting of
    the pushed tangent basis A(s) V_j and the finite-difference velocity
    d/ds [A(s) X(p) + a(s)].
    """
    n = data.n
    if data.sigma.dim_domain != n - 1:
        raise ValueError("angle formula needs patches of dimension n-1")
    pts = sample_box(
        data.sigma.domain, n_samples, seed=seed, margin=immersion.FD_MARGIN
    )
    s_lo = path.s_max * 0.02 + 2 * h
    s_values = np.linspace(s_lo, path.s_max - 2 * h, n_s)

    worst = 0.0
    for u in pts:
        js = _tangent_frame(data, u)
        w0 = data.B @ js.point + data.b
        theta0 = lagrangian_angle(np.column_stack([*js.first, w0]))
        for s in s_values:
            A, _ = path.at(s)
            Ap, ap = path.at(s + h)
            Am, am = path.at(s - h)
            vel = ((Ap - Am) @ js.point + (ap - am)) / (2.0 * h)
            frame = np.column_stack([A @ d for d in js.first] + [vel])
            measured = lagrangian_angle(frame)
            predicted = path.angle_at(s) + np.angle(path.alpha_at(s)) + theta0
            worst = max(worst, abs(angle_difference(measured, predicted)))
    return AngleFormulaReport(max_deviation=worst, n_samples=len(pts) * len(s_values))


# ---------------------------------------------------------------------------
# twisted products and two-parameter developing
# ---------------------------------------------------------------------------


def block_embed(B1, B2):
    """Block embeddings of B1 (p x p) and B2 (q x q) into C^{p+q}."""
    p, q = B1.shape[0], B2.shape[0]
    T1 = np.zeros((p + q, p + q), dtype=complex)
    T2 = np.zeros((p + q, p + q), dtype=complex)
    T1[:p, :p] = B1
    T2[p:, p:] = B2
    return T1, T2


def product_chart(chart1, chart2):
    """Chart of Sigma1 x Sigma2 in C^{p+q}."""
    k1 = chart1.dim_domain

    def chart_map(u):
        return np.concatenate([chart1(u[:k1]), chart2(u[k1:])])

    return Chart(
        dim_domain=k1 + chart2.dim_domain,
        dim_ambient=chart1.dim_ambient + chart2.dim_ambient,
        domain=tuple(chart1.domain) + tuple(chart2.domain),
        map=chart_map,
        name=f"{chart1.name}_x_{chart2.name}",
    )


def twisted_product(data1, data2, C, angle_tol=1e-6):
    """Mix two constant-angle data sets into one patch of C^{p+q}.

    Returns (chart, B', B'') where B' and B'' are the two real mixtures
    c11 B1~ + c12 B2~ and c21 B1~ + c22 B2~ of the block embeddings; the
    product patch satisfies the orthogonality condition with respect to
    both.  Requires invertible real C and translation-free inputs (b = 0).
    """
    C = np.asarray(C, dtype=float)
    if C.shape != (2, 2):
        raise ValueError(f"C must be a real 2x2 matrix, got shape {C.shape}")
    if abs(np.linalg.det(C)) < 1e-12:
        raise ValueError("C must be invertible")
    for i, d in enumerate((data1, data2)):
        if np.linalg.norm(d.b) != 0.0:
            raise ValueError(f"factor {i + 1} has b != 0; products need b = 0")
        rep = check_constant_angle(d, n_samples=40)
        if rep.max_deviation > angle_tol:
            raise ValueError(
                f"factor {i + 1} does not have constant angle "
                f"(deviation {rep.max_deviation:.3e})"
            )
    T1, T2 = block_embed(data1.B, data2.B)
    Bp = C[0, 0] * T1 + C[0, 1] * T2
    Bpp = C[1, 0] * T1 + C[1, 1] * T2
    return product_chart(data1.sigma, data2.sigma), Bp, Bpp


@dataclass(frozen=True)
class TwoParamDeveloped:
    """Two-parameter sweep (s1, s2, p) -> A1(s1) A2(s2) X(p)."""

    chart: Chart
    path1: DevelopingPath
    path2: DevelopingPath
    commutator_norm: float


def develop_two_param(
    chart, Bp, Bpp, alpha1, alpha2, ranges, steps=None, commute_tol=1e-8
):
    """Develop a product patch along both mixtures independently.

    The factor flows must commute (they act in complementary blocks after
    a twisted product); the max commutator norm over endpoint pairs is
    checked against commute_tol.
    """
    n = chart.dim_ambient
    zero = np.zeros(n)
    r1 = _normalize_range(ranges[0])
    r2 = _normalize_range(ranges[1])
    st1 = steps if steps is not None else max(16, int(math.ceil(DEFAULT_STEPS_PER_UNIT * r1)))
    st2 = steps if steps is not None else max(16, int(math.ceil(DEFAULT_STEPS_PER_UNIT * r2)))
    path1 = _integrate(
        np.asarray(Bp, dtype=complex), zero, lambda s, A: complex(alpha1(s)),
        r1, st1, driver="prescribed", alpha_fn=alpha1,
    )
    path2 = _integrate(
        np.asarray(Bpp, dtype=complex), zero, lambda s, A: complex(alpha2(s)),
        r2, st2, driver="prescribed", alpha_fn=alpha2,
    )

    worst = 0.0
    for f1 in (0.5, 1.0):
        for f2 in (0.5, 1.0):
            A1, _ = path1.at(f1 * r1)
            A2, _ = path2.at(f2 * r2)
            worst = max(worst, float(np.max(np.abs(A1 @ A2 - A2 @ A1))))
    if worst > commute_tol:
        raise SingularFrameError(
            f"factor flows do not commute: max |A1 A2 - A2 A1| = {worst:.3e}"
        )

    domain = ((0.0, r1), (0.0, r2)) + tuple(chart.domain)

    def chart_map(u):
        A1, _ = path1.at(u[0])
        A2, _ = path2.at(u[1])
        return A1 @ (A2 @ chart(u[2:]))

    swept = Chart(
        dim_domain=chart.dim_domain + 2,
        dim_ambient=n,
        domain=domain,
        map=chart_map,
        name=f"two_param_{chart.name}",
    )
    return TwoParamDeveloped(
        chart=swept, path1=path1, path2=path2, commutator_norm=worst
    )
