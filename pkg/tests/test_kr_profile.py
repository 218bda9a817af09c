import math

import numpy as np
import pytest

from solitonforge.errors import BlowUpError, PositivityError
from solitonforge.kr_profile import (
    Profile,
    ProfileParams,
    SasakiModel,
    calabi_yau_params,
    cone_metric_at,
    mixed_hessian,
    ode_residual,
    profile_diagnostics,
    profile_to_potential,
    ricci_form_at,
    solve_profile_closed,
    solve_profile_numeric,
    soliton_residual,
)

# frozen oracle values (independent high-precision computation):
# (m=1, kappa=4, lambda=-1, mu=-1, phi(1)=2): the bracket integrates to
# -2(sigma-2)^2 e^sigma + 2e, giving phi(2) = 2/e; a 10^6-step RK4 sweep
# reproduces it to 5e-11.
PHI2_SHRINKER = 2.0 / math.e
# (m=1, kappa=4, lambda=1, mu=2, phi(1)=0): phi(3) = 11 e^4 / 6 - 13/2
PHI3_EXPANDER = 11.0 * math.exp(4.0) / 6.0 - 6.5


def shrinker_params(phi0=2.0):
    return ProfileParams(SasakiModel(1, 4.0), lam=-1.0, mu=-1.0, sigma0=1.0, phi0=phi0)


def annulus_points(n, dim, seed, r_min=0.8, r_max=1.2):
    rng = np.random.default_rng(seed)
    z = rng.normal(size=(n, dim)) + 1j * rng.normal(size=(n, dim))
    z = z / np.linalg.norm(z, axis=1)[:, None]
    return z * rng.uniform(r_min, r_max, n)[:, None]


def test_sasaki_model_constants():
    model = SasakiModel(2, 3.0)
    assert model.alpha == pytest.approx(1.0)
    assert model.beta == pytest.approx(3.0)
    with pytest.raises(ValueError):
        SasakiModel(0, 1.0)


def test_calabi_yau_closed_form():
    prof = solve_profile_closed(calabi_yau_params(1))
    for sigma in np.linspace(1.0, 10.0, 37):
        assert prof.phi(sigma) == pytest.approx(2.0 * sigma, abs=1e-10)


def test_zero_solution():
    params = ProfileParams(SasakiModel(1, 0.0), lam=0.0, mu=0.0, sigma0=1.0, phi0=0.0)
    prof = solve_profile_closed(params)
    for sigma in (0.5, 1.0, 3.0):
        assert prof.phi(sigma) == pytest.approx(0.0, abs=1e-12)


def test_shrinker_against_frozen_oracle():
    prof = solve_profile_closed(shrinker_params())
    assert prof.phi(2.0) == pytest.approx(PHI2_SHRINKER, abs=1e-12)
    numeric = solve_profile_numeric(shrinker_params(), steps=2**14, sigma_max=3.0)
    assert numeric.phi(2.0) == pytest.approx(PHI2_SHRINKER, abs=1e-9)


def test_numeric_matches_cy():
    prof = solve_profile_numeric(calabi_yau_params(1), steps=4096)
    for sigma in np.linspace(1.0, 10.0, 17):
        assert prof.phi(sigma) == pytest.approx(2.0 * sigma, abs=1e-10)


def test_rk4_order_by_step_halving():
    params = shrinker_params()
    exact = PHI2_SHRINKER
    errs = []
    for steps in (64, 128):
        prof = solve_profile_numeric(params, steps=steps, sigma_max=2.0)
        errs.append(abs(prof.phi(2.0) - exact))
    assert errs[0] / errs[1] >= 12.0


def test_expander_closed_vs_frozen_and_numeric():
    params = ProfileParams(SasakiModel(1, 4.0), lam=1.0, mu=2.0, sigma0=1.0, phi0=0.0)
    closed = solve_profile_closed(params)
    assert closed.phi(3.0) == pytest.approx(PHI3_EXPANDER, rel=1e-12)
    numeric = solve_profile_numeric(params, steps=2**14, sigma_max=3.0)
    assert abs(numeric.phi(3.0) - closed.phi(3.0)) / abs(closed.phi(3.0)) < 1e-10


def test_numeric_blowup_detection():
    params = ProfileParams(SasakiModel(1, 4.0), lam=1.0, mu=2.0, sigma0=1.0, phi0=1.0)
    with pytest.raises(BlowUpError) as exc:
        solve_profile_numeric(params, steps=4096, sigma_max=40.0)
    assert exc.value.last_valid is not None
    assert 1.0 < exc.value.last_valid < 40.0


def test_numeric_rejects_few_steps():
    with pytest.raises(ValueError):
        solve_profile_numeric(calabi_yau_params(1), steps=8)


def test_ode_residual_random_tuples():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(20):
        m = int(rng.integers(1, 4))
        kappa = float(rng.uniform(-2.0, 6.0))
        lam = float(rng.choice([-1.0, 0.0, 1.0]))
        mu = float(rng.uniform(-2.0, 2.0))
        phi0 = float(rng.uniform(0.1, 3.0))
        prof = solve_profile_closed(
            ProfileParams(SasakiModel(m, kappa), lam=lam, mu=mu, sigma0=1.0, phi0=phi0)
        )
        for sigma in rng.uniform(1.0, 2.5, 100):
            worst = max(worst, ode_residual(prof, float(sigma)))
    assert worst < 1e-8


def test_potential_cy():
    prof = solve_profile_closed(calabi_yau_params(1))
    for s in np.linspace(-1.0, 1.5, 21):
        assert prof.sigma_of_s(s) == pytest.approx(math.exp(2 * s), rel=1e-9)
        assert prof.F(s) == pytest.approx(math.exp(2 * s) / 2 - s - 0.5, abs=1e-9)


def test_potential_constant_profile():
    # phi == k > 0 integrates to sigma(s) = sigma0 + k s
    params = ProfileParams(SasakiModel(1, 1.0), lam=0.0, mu=0.0, sigma0=2.0, phi0=1.5)
    prof = Profile(params, lambda sigma: 1.5, s_span=(-1.0, 1.0))
    F, sigma = profile_to_potential(prof, (-1.0, 1.0))
    for s in np.linspace(-0.9, 0.9, 11):
        assert sigma(s) == pytest.approx(2.0 + 1.5 * s, abs=1e-10)
        # F' = sigma - 1 integrates to (sigma0 - 1) s + 0.75 s^2
        assert F(s) == pytest.approx(s + 0.75 * s * s, abs=1e-10)


def test_potential_roundtrip_second_derivative():
    h = 1e-3
    for params in (calabi_yau_params(1), shrinker_params(0.75)):
        prof = solve_profile_closed(params)
        lo, hi = prof.s_range
        for s in np.linspace(max(lo + 0.05, -1.0), min(hi - 0.05, 1.5), 41):
            stencil = (
                -prof.F(s - 2 * h) + 16 * prof.F(s - h) - 30 * prof.F(s)
                + 16 * prof.F(s + h) - prof.F(s + 2 * h)
            ) / (12 * h * h)
            assert abs(stencil - prof.phi(prof.sigma_of_s(s))) < 1e-7


def test_potential_defining_ode():
    h = 1e-4
    prof = solve_profile_closed(calabi_yau_params(1))
    for s in np.linspace(-0.9, 0.9, 19):
        ds = (
            -prof.sigma_of_s(s + 2 * h) + 8 * prof.sigma_of_s(s + h)
            - 8 * prof.sigma_of_s(s - h) + prof.sigma_of_s(s - 2 * h)
        ) / (12 * h)
        assert abs(ds - prof.phi(prof.sigma_of_s(s))) < 1e-7


def test_potential_requires_positivity():
    params = ProfileParams(SasakiModel(1, 0.0), lam=0.0, mu=0.0, sigma0=1.0, phi0=0.0)
    prof = solve_profile_closed(params)
    with pytest.raises(PositivityError):
        profile_to_potential(prof, (-0.5, 0.5))


def test_cone_metric_cy_is_half_identity():
    prof = solve_profile_closed(calabi_yau_params(1))
    rng = np.random.default_rng(3)
    for _ in range(5):
        z = rng.normal(size=2) + 1j * rng.normal(size=2)
        g = cone_metric_at(z, prof)
        np.testing.assert_allclose(g, 0.5 * np.eye(2), atol=1e-10)


def test_cone_metric_hermitian_and_unitary_equivariant():
    prof = solve_profile_closed(shrinker_params(0.75))
    rng = np.random.default_rng(4)
    z = np.array([0.5 + 0.2j, -0.3 + 0.6j])
    g = cone_metric_at(z, prof)
    np.testing.assert_allclose(g, g.conj().T, atol=0)
    # radial ansatz: rows transform with conj(U), columns with U^T
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    U, _ = np.linalg.qr(A)
    g2 = cone_metric_at(U @ z, prof)
    np.testing.assert_allclose(g2, U.conj() @ g @ U.T, atol=1e-10)


def test_cone_metric_positivity_error():
    params = ProfileParams(SasakiModel(1, 4.0), lam=0.0, mu=0.0, sigma0=1.0, phi0=-1.0)
    prof = Profile(params, lambda sigma: -1.0)
    with pytest.raises(PositivityError):
        cone_metric_at(np.array([1.0 + 0j, 0.0]), prof)


def test_mixed_hessian_on_quadratic():
    # f = |z1|^2 + 2 |z2|^2 has constant mixed Hessian diag(1, 2)
    def f(z):
        return (abs(z[0]) ** 2 + 2 * abs(z[1]) ** 2).real

    H = mixed_hessian(f, np.array([0.3 + 0.1j, -0.2 + 0.5j]), 1e-3)
    np.testing.assert_allclose(H, np.diag([1.0, 2.0]), atol=1e-9)


def test_ricci_cy_flat():
    prof = solve_profile_closed(calabi_yau_params(1))
    z = np.array([0.8 + 0.1j, 0.2 - 0.5j])
    R = ricci_form_at(z, prof, h=1e-3)
    assert np.max(np.abs(R)) < 1e-5
    np.testing.assert_allclose(R, R.conj().T, atol=1e-8)


def _analytic_ricci(z, prof):
    """Independent curvature route: R = (kappa - W') u - W'' v with
    W = m log sigma + log phi, derivatives through the profile ODE."""
    params = prof.params
    m, kappa = params.model.m, params.model.kappa
    lam, mu = params.lam, params.mu
    c = (2.0 * m + 2.0) / kappa
    r2 = np.vdot(z, z).real
    t = 0.5 * c * math.log(r2)
    sg = prof.sigma_of_s(t)
    ph = prof.phi(sg)
    dphi = (kappa + 2 * lam * sg) - (m / sg - mu) * ph
    ddphi = -(m / sg - mu) * dphi + (m / sg**2) * ph + 2 * lam
    W1 = m * ph / sg + dphi                      # dW/dt
    W2 = m * ph * (dphi * sg - ph) / sg**2 + ddphi * ph  # d2W/dt2
    zb = z.conj()
    n = len(z)
    u = c * (np.eye(n) / (2 * r2) - np.outer(zb, z) / (2 * r2**2))
    dt = c * zb / (2 * r2)
    v = np.outer(dt, dt.conj())
    return (kappa - W1) * u - W2 * v


def test_ricci_matches_analytic_route_and_converges():
    prof = solve_profile_closed(shrinker_params(0.75))
    z = np.array([0.7 + 0.3j, -0.4 + 0.45j])
    exact = _analytic_ricci(z, prof)
    errs = []
    for h in (2e-3, 1e-3):
        R = ricci_form_at(z, prof, h=h)
        errs.append(np.max(np.abs(R - exact)))
    assert errs[1] < 1e-5
    assert errs[0] / errs[1] > 3.0  # second-order stencil


def test_soliton_residual_cy():
    prof = solve_profile_closed(calabi_yau_params(1))
    for z in annulus_points(5, 2, 5):
        assert soliton_residual(z, prof) < 1e-5


def test_soliton_residual_shrinker():
    prof = solve_profile_closed(shrinker_params(0.75))
    for z in annulus_points(20, 2, 6):
        assert soliton_residual(z, prof) < 1e-4


def test_soliton_residual_perturbed_profile_fails():
    base = solve_profile_closed(shrinker_params(0.75))
    perturbed = Profile(base.params, lambda sigma: base.phi(sigma) + 0.1)
    for z in annulus_points(3, 2, 7):
        assert soliton_residual(z, perturbed) > 1e-2


def test_diagnostics_cy():
    prof = solve_profile_closed(calabi_yau_params(1))
    report = profile_diagnostics(prof)
    assert report.sign_changes == 0
    assert report.positivity_interval[0] == pytest.approx(1.0)
    assert report.growth_ratio == pytest.approx(2.0, abs=1e-9)


def test_diagnostics_zero_profile():
    params = ProfileParams(SasakiModel(1, 0.0), lam=0.0, mu=0.0, sigma0=1.0, phi0=0.0)
    report = profile_diagnostics(solve_profile_closed(params))
    assert report.positivity_interval is None


def test_diagnostics_shrinker_vs_numeric():
    closed = solve_profile_closed(shrinker_params())
    numeric = solve_profile_numeric(shrinker_params(), steps=2**13, sigma_max=4.0)
    rc = profile_diagnostics(closed, sigma_max=4.0)
    rn = profile_diagnostics(numeric, sigma_max=4.0)
    assert rc.sign_changes == rn.sign_changes
    assert rc.growth_ratio == pytest.approx(rn.growth_ratio, abs=1e-8)
