import math

import numpy as np
import pytest

from conftest import sphere_chart
from solitonforge.errors import DegenerateMetricError
from solitonforge.immersion import Chart, geometry, geometry_at, jet, normal_project


def test_jet_linear_map_has_zero_second_derivatives():
    rng = np.random.default_rng(0)
    M = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    chart = Chart(2, 3, ((-1, 1), (-1, 1)), lambda u: M @ u)
    js = jet(chart, [0.2, -0.3])
    np.testing.assert_allclose(js.first, M.T, atol=1e-9)
    assert np.max(np.abs(js.second)) < 1e-9


def test_jet_quadratic_exact_value():
    chart = Chart(1, 2, ((0.0, 2.0),), lambda u: np.array([u[0] ** 2, 0.0]))
    js = jet(chart, [1.0], h_second=1e-3)
    assert js.second[0, 0, 0] == pytest.approx(2.0, abs=1e-6)


def test_jet_circle_speed(unit_circle):
    js = jet(unit_circle, [1.3])
    assert np.linalg.norm(js.first[0]) == pytest.approx(1.0, abs=1e-8)


def test_jet_boundary_clearance(unit_circle):
    with pytest.raises(ValueError):
        jet(unit_circle, [1e-4])


def test_jet_nonfinite_detected():
    def half_line(u):
        return np.array([math.sqrt(u[0]) if u[0] >= 0 else float("nan")])

    chart = Chart(1, 1, ((-1.0, 1.0),), half_line)
    with pytest.raises(ValueError):
        jet(chart, [0.0004], h_second=1e-3)


def test_circle_mean_curvature(unit_circle):
    for t in (0.5, 2.0, 4.4):
        geo = geometry(unit_circle, [t])
        np.testing.assert_allclose(geo.mean_curvature, -unit_circle([t]), atol=1e-6)


def test_sphere_mean_curvature_magnitude():
    # round 2-sphere of radius R: |H| = 2/R, pointing inward
    R = 2.0
    chart = sphere_chart(3, radius=R)
    u = np.array([1.1, 2.3])
    geo = geometry(chart, u)
    assert np.linalg.norm(geo.mean_curvature) == pytest.approx(2.0 / R, abs=1e-6)
    inward = -chart(u) / R
    np.testing.assert_allclose(
        geo.mean_curvature, (2.0 / R) * inward, atol=1e-6
    )


def test_affine_plane_flat():
    v1 = np.array([1.0, 0.5j])
    v2 = np.array([0.25j, 1.0])
    p0 = np.array([0.3, -0.2 + 0.1j])
    chart = Chart(2, 2, ((-1, 1), (-1, 1)), lambda u: p0 + u[0] * v1 + u[1] * v2)
    geo = geometry(chart, [0.1, 0.4])
    assert np.max(np.abs(geo.mean_curvature)) < 1e-9
    # pullback is the constant omega(v1, v2)
    expected = np.imag(np.vdot(v1, v2))
    assert geo.omega_pullback[0, 1] == pytest.approx(expected, abs=1e-9)


def test_normal_project_tangent_and_normal(unit_circle):
    js = jet(unit_circle, [0.8])
    tangent = js.first[0]
    assert np.max(np.abs(normal_project(tangent, js))) < 1e-10
    normal = js.point  # radial direction is normal for the circle
    np.testing.assert_allclose(normal_project(normal, js), normal, atol=1e-10)


def test_normal_project_idempotent():
    chart = sphere_chart(4)
    rng = np.random.default_rng(1)
    js = jet(chart, [1.0, 1.4, 2.2])
    v = rng.normal(size=4) + 1j * rng.normal(size=4)
    once = normal_project(v, js)
    twice = normal_project(once, js)
    np.testing.assert_allclose(twice, once, atol=1e-12)


def test_mean_curvature_scaling():
    # scaling the chart by c scales H by 1/c
    base = sphere_chart(3)
    c = 2.5
    scaled = Chart(2, 3, base.domain, lambda u: c * base(u))
    u = np.array([1.2, 2.0])
    h1 = geometry(base, u).mean_curvature
    h2 = geometry(scaled, u).mean_curvature
    np.testing.assert_allclose(h2, h1 / c, atol=1e-6)


def test_fd_convergence_order():
    chart = sphere_chart(3)
    u = np.array([1.0, 2.1])
    exact = -2.0 * chart(u)  # unit 2-sphere: H = -2X
    errs = []
    for h in (2e-3, 1e-3):
        geo = geometry(chart, u, h_first=h / 10, h_second=h)
        errs.append(np.max(np.abs(geo.mean_curvature - exact)))
    assert errs[0] / errs[1] > 3.0


def test_real_chart_has_zero_pullback():
    # any patch inside R^n < C^n pulls omega back to zero
    def saddle(u):
        return np.array([u[0], u[1], u[0] ** 2 - u[1] ** 2], dtype=complex)

    chart = Chart(2, 3, ((-1, 1), (-1, 1)), saddle)
    rng = np.random.default_rng(2)
    for _ in range(10):
        u = rng.uniform(-0.8, 0.8, 2)
        geo = geometry(chart, u)
        assert np.max(np.abs(geo.omega_pullback)) < 1e-10


def test_reparametrization_invariance():
    # H as an ambient vector is unchanged under an affine domain change
    base = sphere_chart(3)
    rng = np.random.default_rng(3)
    M = np.array([[1.1, 0.3], [-0.2, 0.9]])
    shift = np.array([0.05, -0.1])
    reparam = Chart(2, 3, ((-0.4, 0.4), (-0.4, 0.4)),
                    lambda u: base(M @ u + np.array([1.3, 2.0]) + shift))
    for _ in range(5):
        u = rng.uniform(-0.3, 0.3, 2)
        h_re = geometry(reparam, u).mean_curvature
        h_base = geometry(base, M @ u + np.array([1.3, 2.0]) + shift).mean_curvature
        np.testing.assert_allclose(h_re, h_base, atol=1e-5)


def test_degenerate_metric_raises():
    chart = Chart(2, 2, ((-1, 1), (-1, 1)),
                  lambda u: np.array([u[0] + u[1], 2.0 * (u[0] + u[1])], dtype=complex))
    with pytest.raises(DegenerateMetricError):
        geometry(chart, [0.1, 0.2])


def test_lagrangian_angle_attached_when_half_dimensional(unit_circle):
    geo = geometry(unit_circle, [0.7])
    # tangent i e^{i t}: angle = t + pi/2
    assert geo.angle == pytest.approx(0.7 + math.pi / 2, abs=1e-8)
    geo_sphere = geometry(sphere_chart(3), [1.0, 1.0])
    assert geo_sphere.angle is None  # k = 2 < n = 3
