import math

import numpy as np
import pytest

import sqglab


def periodic_grid(n):
    x = np.arange(n) * 2 * np.pi / n
    return np.meshgrid(x, x, indexing="ij")


def test_fractional_laplacian_of_a_mode():
    x, y = periodic_grid(32)
    theta = np.sin(2 * x + y)
    out = sqglab.fractional_laplacian(theta, 1.0)
    assert out.shape == theta.shape
    np.testing.assert_allclose(out, math.sqrt(5) * theta, atol=1e-12)


def test_extension_route_agrees_with_spectral_route():
    x, y = periodic_grid(32)
    theta = np.cos(x) * np.sin(2 * y)
    spectral = sqglab.fractional_laplacian(theta)
    coarse = np.abs(sqglab.extension_lambda(theta, 0.02) - spectral).max()
    fine = np.abs(sqglab.extension_lambda(theta, 0.01) - spectral).max()
    assert fine < coarse / 3.5


def test_velocity_is_divergence_free():
    x, y = periodic_grid(32)
    theta = np.sin(x) * np.cos(3 * y) + 0.2 * np.cos(2 * x)
    u = sqglab.sqg_velocity(theta)
    assert len(u) == 2
    assert np.abs(sqglab.divergence(u)).max() < 1e-12


def test_short_run_and_diagnostics(tmp_path):
    traj = sqglab.run([16, 16], t_end=0.2, dt=0.01, seed=3, k_max=4)
    assert not traj.aborted
    assert len(traj.snapshots) == 21
    theta0 = traj.snapshots[0]
    e0 = float((theta0**2).sum()) * (2 * np.pi / 16) ** 2
    assert abs(traj.energy_residual[-1]) < 1e-6 * e0

    levels = sqglab.spanning_levels(theta0, 4)
    results = sqglab.level_set_sweep(traj, levels, 0.0, 0.2)
    assert [r["status"] for r in results] == ["pass"] * 4

    traj.write(tmp_path / "traj")
    back = sqglab.read_trajectory(tmp_path / "traj")
    np.testing.assert_array_equal(back.snapshots[-1], traj.snapshots[-1])


def test_zero_drift_is_a_mild_solution():
    traj = sqglab.run([16, 16], t_end=0.1, dt=0.01, seed=1, k_max=4, drift="zero")
    assert sqglab.duhamel_residual(traj, 0.1) < 1e-10


def test_cordoba_inequality_on_a_smooth_field():
    x, y = periodic_grid(32)
    theta = np.sin(x) + 0.5 * np.cos(2 * y)
    square = sqglab.cordoba_min_residual(theta)
    soft = sqglab.cordoba_min_residual(theta, softplus_level=0.0, width=0.3)
    assert square["min_residual"] >= -1e-8 * square["scale"]
    assert soft["min_residual"] >= -1e-8 * soft["scale"]


def test_barriers():
    profile = sqglab.barrier_b2(3.0, 0.5, boundary_value=1.0) * math.exp(3 * math.pi)
    assert abs(profile / (4 / math.pi) - 1) < 0.01
    lam = sqglab.barrier_b1_lambda(32, 1)
    assert 0 < lam < 0.5


def test_isoperimetric_ramp():
    s = np.linspace(-1, 1, 65)
    x, _ = np.meshgrid(s, s, indexing="ij")
    r = sqglab.isoperimetric(np.clip(x / 0.5, 0, 1))
    assert r["lhs"] == pytest.approx(2.0, rel=1e-12)
    assert r["rhs"] == pytest.approx(2.0, rel=1e-12)


def test_invalid_input_raises():
    with pytest.raises(ValueError):
        sqglab.fractional_laplacian(np.zeros((12, 16)))
    with pytest.raises(ValueError):
        sqglab.run([16, 16], t_end=0.1, drift="sideways")
