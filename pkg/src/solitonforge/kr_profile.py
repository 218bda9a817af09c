"""Radial profiles of gradient Kahler-Ricci solitons on the model cone.

The transverse geometry is the Fubini-Study structure of the cone
C^{m+1} \\ {0} over the round sphere; a general transverse Einstein
constant ``kappa`` enters through a rescaled radial log-coordinate

    s = (2m + 2) / kappa * log|z|,

so that the transverse Kahler form ``i d dbar s`` has Ricci constant
exactly ``kappa``.  The profile function ``phi`` solves the linear ODE

    phi'(sigma) + (m/sigma - mu) * phi(sigma) - (kappa + 2*lambda*sigma) = 0,

where ``sigma = 1 + F'(s)`` and ``phi(sigma) = F''(s)`` for the radial
potential F.  The Kahler metric of the ansatz is assembled from
``P(s) = s + F(s)`` and verified pointwise against the gradient soliton
equation by finite differences.

Calibration of the verified identity
------------------------------------
With the conventions of this library (omega = i g_{ij} dz^i dzbar^j,
rho = -i d dbar log det g) the identity satisfied by ODE solutions is

    -1/2 rho(omega_phi) = lambda * omega_phi + i d dbar (1/2 * mu * sigma).

The factor 1/2 on the potential term (``POTENTIAL_CAL``) was determined
once numerically on the shrinking branch (m=1, lambda=-1, mu=-1) and is
frozen; the lambda term needs no correction (``LAMBDA_CAL = 1``).
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import BlowUpError, PositivityError, QuadratureError

# frozen convention-calibration constants of the verified soliton identity
LAMBDA_CAL = 1.0
POTENTIAL_CAL = 0.5

QUAD_EPSABS = 1e-12
QUAD_EPSREL = 1e-10

# potential integration halts where phi drops below PHI_FLOOR, sigma below
# SIGMA_FLOOR, or |phi| above SLOPE_CAP (the radial ODE d sigma/ds = phi has a
# square-root singularity where phi ~ K/sigma; stopping at the cap keeps the
# solver out of it)
PHI_FLOOR = 1e-9
SIGMA_FLOOR = 1e-5
SLOPE_CAP = 1e5

BLOWUP_LIMIT = 1e12


@dataclass(frozen=True)
class SasakiModel:
    """Transverse dimension and Einstein constants of the model.

    kappa is the transverse Kahler-Einstein constant; the associated
    eta-Einstein constant is alpha = kappa - 2.
    """

    m: int
    kappa: float

    def __post_init__(self):
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 1):
            raise ValueError(f"transverse dimension m must be a positive integer, got {self.m}")

    @property
    def alpha(self):
        return self.kappa - 2.0

    @property
    def beta(self):
        return 2.0 * self.m - self.alpha


@dataclass(frozen=True)
class ProfileParams:
    """Constants of the profile ODE plus an initial condition phi(sigma0)."""

    model: SasakiModel
    lam: float
    mu: float
    sigma0: float
    phi0: float
    c: float = 0.0

    def __post_init__(self):
        if self.sigma0 <= 0:
            raise ValueError(f"sigma0 must be positive, got {self.sigma0}")


def calabi_yau_params(m, sigma0=1.0):
    """Parameters whose solution is the cone profile phi = 2*sigma."""
    return ProfileParams(
        model=SasakiModel(m=m, kappa=2.0 * m + 2.0),
        lam=0.0,
        mu=0.0,
        sigma0=sigma0,
        phi0=2.0 * sigma0,
    )


class Profile:
    """A solved profile: phi(sigma) plus the radial potential evaluators.

    sigma_of_s and F solve d sigma/ds = phi(sigma), F'(s) = sigma(s) - 1
    from sigma(0) = sigma0, F(0) = 0; they are built on first use over the
    requested s_span, truncated where phi or sigma leaves the trusted
    range.  The round trip F''(s) = phi(sigma(s)) holds on s_range to
    integrator tolerance.
    """

    def __init__(self, params, phi, s_span=(-3.0, 3.0), source="closed-form"):
        self.params = params
        self.phi = phi
        self.source = source
        self._s_span = (float(s_span[0]), float(s_span[1]))
        self._potential = None

    def _ensure_potential(self):
        if self._potential is None:
            self._potential = _Potential(self.phi, self.params.sigma0, self._s_span)
        return self._potential

    @property
    def s_range(self):
        """The s interval actually covered by the potential sweep."""
        return self._ensure_potential().reached

    def sigma_of_s(self, s):
        return self._ensure_potential().sigma(s)

    def F(self, s):
        return self._ensure_potential().F(s)


class _StopSweep(Exception):
    pass


class _Potential:
    """Dense radial potential from a fixed-step RK4 sweep of both directions.

    Values between nodes come from a single fractional RK4 step off the
    node below, which keeps the evaluators smooth inside node intervals
    (dense-output kinks would otherwise pollute finite differences taken
    through the metric).  Each direction truncates at the first node where
    phi <= PHI_FLOOR, sigma <= SIGMA_FLOOR, |phi| >= SLOPE_CAP, or phi's
    own domain ends.
    """

    STEPS_PER_UNIT = 512

    def __init__(self, phi, sigma_anchor, s_span):
        s_lo, s_hi = float(s_span[0]), float(s_span[1])
        if not (s_lo <= 0.0 <= s_hi):
            raise ValueError("s_span must contain the anchor s = 0")
        self.sigma_anchor = float(sigma_anchor)

        def phi_guarded(sigma):
            if sigma <= SIGMA_FLOOR:
                raise _StopSweep
            try:
                val = phi(sigma)
            except ValueError:
                raise _StopSweep from None
            if abs(val) >= SLOPE_CAP:
                raise _StopSweep
            return val

        self._phi = phi_guarded
        self._fwd = self._sweep(s_hi) if s_hi > 0 else None
        self._bwd = self._sweep(s_lo) if s_lo < 0 else None
        hi = self._fwd[0][-1] if self._fwd is not None else 0.0
        lo = self._bwd[0][-1] if self._bwd is not None else 0.0
        self.reached = (float(lo), float(hi))

    def _step(self, y, h):
        """One RK4 step of (sigma, F)' = (phi(sigma), sigma - 1)."""
        p = self._phi

        def f(y):
            return np.array([p(y[0]), y[0] - 1.0])

        k1 = f(y)
        k2 = f(y + (h / 2) * k1)
        k3 = f(y + (h / 2) * k2)
        k4 = f(y + h * k3)
        return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)

    def _sweep(self, s_end):
        steps = max(8, int(math.ceil(self.STEPS_PER_UNIT * abs(s_end))))
        h = s_end / steps
        grid = h * np.arange(steps + 1)
        ys = np.empty((steps + 1, 2))
        ys[0] = (self.sigma_anchor, 0.0)
        last = 0
        for i in range(steps):
            try:
                if self._phi(ys[i][0]) <= PHI_FLOOR:
                    break
                ys[i + 1] = self._step(ys[i], h)
            except _StopSweep:
                break
            if not np.all(np.isfinite(ys[i + 1])):
                break
            last = i + 1
        return grid[: last + 1], ys[: last + 1], h

    def _eval(self, s):
        s = float(s)
        lo, hi = self.reached
        if s < lo - 1e-12 or s > hi + 1e-12:
            raise PositivityError(
                f"s = {s:.6g} outside the integrated range [{lo:.6g}, {hi:.6g}] "
                "(sweep stopped at a positivity or domain bound)"
            )
        s = min(max(s, lo), hi)
        if s == 0.0:
            return np.array([self.sigma_anchor, 0.0])
        grid, ys, h = self._fwd if s > 0.0 else self._bwd
        i = int(min(abs(s) // abs(h), len(grid) - 2))
        ds = s - grid[i]
        if ds == 0.0:
            return ys[i]
        try:
            return self._step(ys[i], ds)
        except _StopSweep:
            raise PositivityError(
                f"profile left the trusted range during evaluation at s = {s:.6g}"
            ) from None

    def sigma(self, s):
        return float(self._eval(s)[0])

    def F(self, s):
        return float(self._eval(s)[1])


def _closed_phi(params):
    """phi by the integrating-factor formula, adaptive quadrature inside."""
    m = params.model.m
    kappa, lam, mu = params.model.kappa, params.lam, params.mu
    s0, p0 = params.sigma0, params.phi0
    C = s0**m * math.exp(-mu * s0) * p0

    def weight(tau):
        return tau**m * math.exp(-mu * tau) * (kappa + 2.0 * lam * tau)

    def phi(sigma):
        sigma = float(sigma)
        if sigma <= 0:
            raise ValueError(f"profile queried at sigma = {sigma} <= 0")
        I, err = quad(weight, s0, sigma, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
        if err > max(QUAD_EPSABS * 10, 1e-8 * abs(I)):
            raise QuadratureError(
                f"quadrature error {err:.3e} too large for integral {I:.3e} at sigma = {sigma}"
            )
        return sigma ** (-m) * math.exp(mu * sigma) * (C + I)

    return phi


def _attach_potential(params, phi, s_span, source="closed-form"):
    return Profile(params=params, phi=phi, s_span=s_span, source=source)


def solve_profile_closed(params, s_span=(-3.0, 3.0)):
    """Solve the profile ODE in closed form (integrating factor + quadrature).

    The returned Profile evaluates phi at arbitrary sigma > 0; the radial
    potential is integrated over s_span (truncated where positivity fails).
    """
    return _attach_potential(params, _closed_phi(params), s_span)


def solve_profile_numeric(params, steps=4096, sigma_max=None, s_span=(-3.0, 3.0)):
    """Solve the profile ODE by classic fixed-step RK4 on [sigma0, sigma_max].

    sigma_max defaults to 10*sigma0.  Aborts with BlowUpError (carrying the
    last valid sigma) if |phi| exceeds 1e12 during the sweep.
    """
    if steps < 16:
        raise ValueError(f"steps must be >= 16, got {steps}")
    if sigma_max is None:
        sigma_max = 10.0 * params.sigma0
    if sigma_max <= params.sigma0:
        raise ValueError("sigma_max must exceed sigma0")
    m = params.model.m
    kappa, lam, mu = params.model.kappa, params.lam, params.mu

    def f(sigma, p):
        return (kappa + 2.0 * lam * sigma) - (m / sigma - mu) * p

    h = (sigma_max - params.sigma0) / steps
    grid = params.sigma0 + h * np.arange(steps + 1)
    vals = np.empty(steps + 1)
    vals[0] = params.phi0
    p = params.phi0
    for i in range(steps):
        s = grid[i]
        k1 = f(s, p)
        k2 = f(s + h / 2, p + h * k1 / 2)
        k3 = f(s + h / 2, p + h * k2 / 2)
        k4 = f(s + h, p + h * k3)
        p = p + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        if not np.isfinite(p) or abs(p) > BLOWUP_LIMIT:
            raise BlowUpError(
                f"profile blew up past sigma = {grid[i]:.6g} (|phi| > {BLOWUP_LIMIT:.0e})",
                last_valid=grid[i],
            )
        vals[i + 1] = p

    spline = CubicSpline(grid, vals)

    def phi(sigma):
        sigma = float(sigma)
        if sigma < grid[0] - 1e-12 or sigma > grid[-1] + 1e-12:
            raise ValueError(
                f"numeric profile queried at sigma = {sigma:.6g} outside [{grid[0]:.6g}, {grid[-1]:.6g}]"
            )
        return float(spline(np.clip(sigma, grid[0], grid[-1])))

    return _attach_potential(params, phi, s_span, source="rk4")


def profile_to_potential(profile, s_range, sigma_anchor=None):
    """Integrate sigma(s) and F(s) over an explicit s interval.

    dsigma/ds = phi(sigma) and F'(s) = sigma(s) - 1, anchored at s = 0 with
    sigma(0) = sigma_anchor (default: the profile's sigma0) and F(0) = 0.
    Raises PositivityError if phi <= 0 is encountered before covering s_range.
    """
    if sigma_anchor is None:
        sigma_anchor = profile.params.sigma0
    pot = _Potential(profile.phi, sigma_anchor, s_range)
    lo, hi = pot.reached
    if lo > s_range[0] + 1e-9 or hi < s_range[1] - 1e-9:
        raise PositivityError(
            f"phi lost positivity inside the requested range: reached [{lo:.6g}, {hi:.6g}] "
            f"of [{s_range[0]:.6g}, {s_range[1]:.6g}]"
        )
    return pot.F, pot.sigma


def ode_residual(profile, sigma, delta=1e-5):
    """Residual of the profile ODE at sigma, relative to max(1, |phi|).

    phi' is taken by a 5-point central difference so the check is
    independent of how the profile was produced.
    """
    m = profile.params.model.m
    kappa = profile.params.model.kappa
    lam, mu = profile.params.lam, profile.params.mu
    h = delta * max(1.0, abs(sigma))
    pm2, pm1 = profile.phi(sigma - 2 * h), profile.phi(sigma - h)
    pp1, pp2 = profile.phi(sigma + h), profile.phi(sigma + 2 * h)
    dphi = (pm2 - 8 * pm1 + 8 * pp1 - pp2) / (12 * h)
    p = profile.phi(sigma)
    res = dphi + (m / sigma - mu) * p - (kappa + 2 * lam * sigma)
    return abs(res) / max(1.0, abs(p))


# ---------------------------------------------------------------------------
# metric assembly and pointwise verification on the model cone
# ---------------------------------------------------------------------------


def _radial_scale(profile):
    kappa = profile.params.model.kappa
    if kappa <= 0:
        raise ValueError(
            f"metric assembly requires kappa > 0 on the model cone, got kappa = {kappa}"
        )
    return (2.0 * profile.params.model.m + 2.0) / kappa


def _check_point(z, profile):
    z = np.asarray(z, dtype=complex)
    n = profile.params.model.m + 1
    if z.shape != (n,):
        raise ValueError(f"point must lie in C^{n}, got shape {z.shape}")
    r2 = np.vdot(z, z).real
    if r2 == 0.0:
        raise ValueError("metric is undefined at the cone vertex z = 0")
    return z, r2


def cone_metric_at(z, profile):
    """Hermitian metric matrix g_{i jbar} of the radial ansatz at z.

    Assembled from P(s) = s + F(s) via P'(s) = sigma(s), P''(s) = phi(sigma):
    g = sigma(s) * dd(s) + phi(sigma(s)) * d(s) (x) dbar(s), with
    s = (2m+2)/kappa * log|z|.  Raises PositivityError when the result is
    not positive definite (the profile is invalid at this radius).
    """
    z, r2 = _check_point(z, profile)
    c = _radial_scale(profile)
    n = z.shape[0]
    s = 0.5 * c * math.log(r2)
    sigma = profile.sigma_of_s(s)
    ph = profile.phi(sigma)

    zb = z.conj()
    dd = c * (np.eye(n) / (2.0 * r2) - np.outer(zb, z) / (2.0 * r2**2))
    ds = c * zb / (2.0 * r2)
    g = sigma * dd + ph * np.outer(ds, ds.conj())
    g = 0.5 * (g + g.conj().T)

    eigs = np.linalg.eigvalsh(g)
    if eigs[0] <= 0.0:
        raise PositivityError(
            f"cone metric not positive definite at |z| = {math.sqrt(r2):.6g} "
            f"(min eigenvalue {eigs[0]:.3e}; sigma = {sigma:.6g}, phi = {ph:.6g})"
        )
    return g


def mixed_hessian(f, z, h):
    """Matrix of d^2 f / dz_i dzbar_j of a real scalar f, by central FD.

    Second derivatives are taken in the 2n real coordinates and combined
    index-pairwise as 1/4 (dxdx + dydy) + i/4 (dxdy - dydx).
    """
    z = np.asarray(z, dtype=complex)
    n = z.shape[0]
    x = np.empty(2 * n)
    x[0::2] = z.real
    x[1::2] = z.imag

    def fx(xr):
        return f(xr[0::2] + 1j * xr[1::2])

    f0 = fx(x)

    def d2(p, q):
        if p == q:
            xp = x.copy(); xp[p] += h
            xm = x.copy(); xm[p] -= h
            return (fx(xp) - 2.0 * f0 + fx(xm)) / h**2
        xpp = x.copy(); xpp[p] += h; xpp[q] += h
        xpm = x.copy(); xpm[p] += h; xpm[q] -= h
        xmp = x.copy(); xmp[p] -= h; xmp[q] += h
        xmm = x.copy(); xmm[p] -= h; xmm[q] -= h
        return (fx(xpp) - fx(xpm) - fx(xmp) + fx(xmm)) / (4.0 * h**2)

    H = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            xi, yi, xj, yj = 2 * i, 2 * i + 1, 2 * j, 2 * j + 1
            H[i, j] = 0.25 * (d2(xi, xj) + d2(yi, yj)) + 0.25j * (d2(xi, yj) - d2(yi, xj))
    if not np.all(np.isfinite(H)):
        raise PositivityError(f"finite-difference Hessian not finite at z = {z}")
    return H


def ricci_form_at(z, profile, h=1e-3):
    """Ricci matrix R_{i jbar} = -d^2 log det g / dz_i dzbar_j at z, by FD."""
    z, _ = _check_point(z, profile)

    def logdet(zz):
        return math.log(np.linalg.det(cone_metric_at(zz, profile)).real)

    return -mixed_hessian(logdet, z, h)


def soliton_residual(z, profile, h=1e-3):
    """Pointwise residual of the gradient soliton identity, scaled by |g|.

    Evaluates -1/2 R - LAMBDA_CAL*lambda*g - Hess(POTENTIAL_CAL*mu*sigma)
    and returns its max-entry norm divided by the max-entry norm of g.
    """
    z, _ = _check_point(z, profile)
    lam, mu = profile.params.lam, profile.params.mu
    c = _radial_scale(profile)

    g = cone_metric_at(z, profile)
    R = ricci_form_at(z, profile, h=h)

    def potential(zz):
        r2 = np.vdot(zz, zz).real
        return POTENTIAL_CAL * mu * profile.sigma_of_s(0.5 * c * math.log(r2))

    Hq = mixed_hessian(potential, z, h) if mu != 0.0 else np.zeros_like(g)

    M = -0.5 * R - LAMBDA_CAL * lam * g - Hq
    return float(np.max(np.abs(M)) / np.max(np.abs(g)))


@dataclass(frozen=True)
class ProfileReport:
    """Descriptive profile diagnostics over a sigma grid."""

    sign_changes: int
    positivity_interval: Optional[tuple]
    growth_ratio: float
    sigma_min: float
    sigma_max: float
    n_grid: int


def profile_diagnostics(profile, sigma_max=None, n_grid=512):
    """Sign changes, positivity interval and right-end growth of phi.

    Purely descriptive: no claim about completeness of the metric is made.
    """
    s0 = profile.params.sigma0
    if sigma_max is None:
        sigma_max = 10.0 * s0
    grid = np.linspace(s0, sigma_max, n_grid)
    vals = np.array([profile.phi(s) for s in grid])

    signs = np.sign(vals)
    nonzero = signs[signs != 0]
    changes = int(np.count_nonzero(np.diff(nonzero) != 0))

    pos = vals > 0.0
    interval = None
    if np.any(pos):
        idx = np.flatnonzero(pos)
        # first maximal run of positivity
        run_end = idx[0]
        while run_end + 1 < len(vals) and pos[run_end + 1]:
            run_end += 1
        interval = (float(grid[idx[0]]), float(grid[run_end]))

    ratio = float(vals[-1] / grid[-1])
    return ProfileReport(
        sign_changes=changes,
        positivity_interval=interval,
        growth_ratio=ratio,
        sigma_min=float(s0),
        sigma_max=float(sigma_max),
        n_grid=n_grid,
    )
