"""Acceptance gate: one test per criterion, summarized at the end of the run.

Run on its own with ``pytest tests/test_acceptance.py`` or
``python tests/test_acceptance.py``. Measured quantities are attached to each
test and echoed in the "acceptance criteria" summary section.
"""

import math
import sys
import time
import warnings

import numpy as np
import pytest

from stripvortex import kernels as K
from stripvortex.config import PresetSpec, SimConfig, build_initial_system
from stripvortex.dynamics import cde_rhs, mean_flow_diagnostics, velocity, velocity_field, velocity_gradient
from stripvortex.evolution import integrate, run
from stripvortex.geometry import PatchSystem, gamma_star, point_in_region, signed_area, vertical_moment
from stripvortex.quadrature import integrate_with_log_singularity, log_kernel_weights

from conftest import circle_system, image_sum_velocity, layer_system, make_system

acceptance = pytest.mark.acceptance


@pytest.fixture
def note(record_property):
    def _note(name, value):
        record_property(name, f"{value:.3g}" if isinstance(value, float) else value)

    return _note


@acceptance(1, "symmetric image sums converge to K_inf at rate 1/N")
def test_criterion_01_kernel_oracle(note):
    start = time.perf_counter()
    probes = [(0.2, 0.1), (0.25, 0.0), (-0.4, 0.3), (0.05, -0.2)]
    ns = np.array([100, 1000, 10_000])
    worst = {1000: 0.0, 10_000: 0.0}
    slopes = []
    for d in probes:
        errs = np.array([np.abs(K.k_sym_truncated(d, n) - K.k_inf(d)).max() for n in ns])
        worst[1000] = max(worst[1000], errs[1])
        worst[10_000] = max(worst[10_000], errs[2])
        slopes.append(-np.polyfit(np.log(ns), np.log(errs), 1)[0])
    elapsed = time.perf_counter() - start
    note("err_1e3", worst[1000])
    note("err_1e4", worst[10_000])
    note("min_slope", min(slopes))
    note("seconds", elapsed)
    assert worst[1000] <= 1e-3
    assert worst[10_000] <= 2e-5 * 2
    assert min(slopes) >= 0.9
    assert elapsed < 1.0


@acceptance(2, "grad K_inf equals the FD Jacobian of K_inf; beta symmetric and trace-free")
def test_criterion_02_gradient_consistency(note):
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    probes = []
    while len(probes) < 100:
        d = rng.uniform([-0.5, -1.0], [0.5, 1.0])
        if K.rho(d) > 0.1:
            probes.append(d)
    probes = np.array(probes)
    h = 1e-6
    fd = np.stack([(K.k_inf(probes + h * e) - K.k_inf(probes - h * e)) / (2 * h) for e in np.eye(2)], axis=-1)
    g = K.grad_k_inf(probes)
    rel = np.abs(g - fd).max(axis=(1, 2)) / np.abs(g).max(axis=(1, 2))
    b = K.beta(probes)
    elapsed = time.perf_counter() - start
    note("max_rel", float(rel.max()))
    note("seconds", elapsed)
    assert rel.max() <= 1e-5
    assert np.array_equal(b[:, 0, 1], b[:, 1, 0])
    assert np.array_equal(b[:, 0, 0] + b[:, 1, 1], np.zeros(len(b)))
    assert np.array_equal(np.trace(g, axis1=1, axis2=2), np.zeros(len(g)))
    assert elapsed < 1.0


@acceptance(3, "K_inf parity identities and far-field limits")
def test_criterion_03_symmetries(note):
    rng = np.random.default_rng(3)
    d = rng.uniform([-0.5, -2.0], [0.5, 2.0], size=(10_000, 2))
    d = d[K.rho(d) > 1e-6]
    k = K.k_inf(d)
    scale = np.abs(k).max(axis=1)
    flip1 = K.k_inf(d * [-1, 1])
    flip2 = K.k_inf(d * [1, -1])
    err = max(
        (np.abs(flip1 - k * [1, -1]).max(axis=1) / scale).max(),
        (np.abs(flip2 - k * [-1, 1]).max(axis=1) / scale).max(),
    )
    up, down = K.k_inf((0.3, 5.0)), K.k_inf((0.3, -5.0))
    far = max(np.abs(up - [-0.5, 0.0]).max(), np.abs(down - [0.5, 0.0]).max())
    note("parity_rel", float(err))
    note("far_limit", float(far))
    assert err <= 1e-14
    assert far <= 1e-12


@acceptance(4, "flat layer is an exact steady shear")
def test_criterion_04_exact_shear(note):
    start = time.perf_counter()
    system = layer_system(h=0.25, n_nodes=128, omega0=1.0)
    probes = np.array([[0.0, 0.5], [0.3, 0.9], [0.1, 0.1], [-0.4, -0.2], [0.2, -0.5], [-0.1, -1.5]])
    expected = np.where(np.abs(probes[:, 1:]) >= 0.25, -0.25 * np.sign(probes[:, 1:]), -probes[:, 1:])
    expected = np.column_stack([expected[:, 0], np.zeros(len(probes))])
    vel_err = np.abs(velocity_field(system, probes) - expected).max()
    normal = max(np.abs(v[:, 1]).max() for v in cde_rhs(system))
    m2, _, m1_sum = mean_flow_diagnostics(system, 1.0)
    config = SimConfig(1.0, (PresetSpec("flat_layer", h=0.25),), 128, 1.0, dt=1e-2)
    result = run(config)
    bottom, top = result.frames[-1].contours
    drift = max(np.abs(bottom.nodes[:, 1] + 0.25).max(), np.abs(top.nodes[:, 1] - 0.25).max())
    elapsed = time.perf_counter() - start
    note("velocity_err", float(vel_err))
    note("normal_rhs", float(normal))
    note("mean_flow", float(max(abs(m2), abs(m1_sum))))
    note("profile_drift", float(drift))
    note("seconds", elapsed)
    assert vel_err <= 1e-10
    assert normal <= 1e-10
    assert abs(m2) <= 1e-10 and abs(m1_sum) <= 1e-10
    assert result.ok and drift < 1e-9
    assert elapsed < 10.0


@acceptance(5, "circle patch conserves area, vertical moment and |gamma|_*")
@pytest.mark.slow
def test_criterion_05_conservation(note):
    start = time.perf_counter()
    r = 0.15
    config = SimConfig(2 * math.pi, (PresetSpec("circle", center=(0.0, 0.0), radius=r),), 256, 1.0, dt=1e-3)
    result = run(config)
    elapsed = time.perf_counter() - start
    assert result.ok, result.breakdown
    d0 = result.frames[0].diagnostics
    area_drift = max(abs(f.diagnostics["area"] - d0["area"]) for f in result.frames) / d0["area"]
    # the initial moment is zero, so its drift is measured against area x radius
    moment_drift = max(abs(f.diagnostics["vertical_moment"] - d0["vertical_moment"]) for f in result.frames)
    moment_drift /= d0["area"] * r
    g0 = d0["gamma_star"][0]
    g_dev = max(abs(f.diagnostics["gamma_star"][0] - g0) for f in result.frames) / g0
    note("area_drift", float(area_drift))
    note("moment_drift", float(moment_drift))
    note("gamma_star_dev", float(g_dev))
    note("seconds", elapsed)
    assert area_drift < 1e-6
    assert moment_drift < 1e-6
    assert elapsed < 120.0
    assert g_dev <= 0.01


@acceptance(6, "strip velocity equals the 501-image planar sum")
def test_criterion_06_image_equivalence(note):
    start = time.perf_counter()
    system = circle_system(r=0.15, n_nodes=256, omega0=1.0)
    x = (0.0, 0.4)
    strip = velocity(system, x)
    images = image_sum_velocity(system, x, n_images=250)
    err = np.abs(strip - images).max()
    elapsed = time.perf_counter() - start
    note("abs_err", float(err))
    note("seconds", elapsed)
    assert err <= 1e-3
    assert elapsed < 30.0


def _fd_gradient(system, x, h=1e-4):
    x = np.asarray(x, dtype=float)
    return np.column_stack([(velocity(system, x + h * e) - velocity(system, x - h * e)) / (2 * h) for e in np.eye(2)])


@acceptance(7, "PV-quadrature grad u matches FD of velocity, with the rotation jump")
def test_criterion_07_velocity_gradient(note):
    start = time.perf_counter()
    cases = [
        (layer_system(h=0.25, n_nodes=128), [(0.0, 0.0), (0.2, 0.1), (0.0, 0.5), (-0.3, -0.45)]),
        (circle_system(r=0.15, n_nodes=256, omega0=1.0), [(0.0, 0.0), (0.05, -0.03), (0.0, 0.3), (0.4, 0.1)]),
    ]
    worst = 0.0
    jump_err = 0.0
    seen_inside = seen_outside = False
    for system, probes in cases:
        for x in probes:
            g = velocity_gradient(system, x)
            worst = max(worst, np.abs(g - _fd_gradient(system, x)).max())
            inside = point_in_region(system, x)
            seen_inside |= inside
            seen_outside |= not inside
            # the antisymmetric part of grad u is the rotation jump term
            rot = 0.5 * (g[1, 0] - g[0, 1])
            jump_err = max(jump_err, abs(rot - (0.5 * system.omega0 if inside else 0.0)))
    elapsed = time.perf_counter() - start
    note("max_fd_err", float(worst))
    note("jump_err", float(jump_err))
    note("seconds", elapsed)
    assert seen_inside and seen_outside
    assert worst <= 2e-3
    assert jump_err <= 2e-3
    assert elapsed < 60.0


@acceptance(8, "log-kernel weights are exact on Fourier modes; velocity converges spectrally")
def test_criterion_08_spectral_accuracy(note):
    n = 64
    w = log_kernel_weights(n)
    a = 2 * np.pi * np.arange(n) / n
    fourier_err = 0.0
    for m in range(1, n // 2):
        f = np.cos(m * a)
        for i in (0, 5, 17, 40):
            val = 2 * integrate_with_log_singularity(np.zeros(n), f, i, w)
            fourier_err = max(fourier_err, abs(val - (-2 * np.pi / m) * math.cos(m * a[i])))

    def ellipse(n_nodes):
        return make_system(PresetSpec("ellipse", center=(0.0, 0.0), semi_axes=(0.3, 0.1)), n_nodes=n_nodes)

    probe = (0.0, 0.14)
    ref = velocity(ellipse(1024), probe)
    e128 = np.abs(velocity(ellipse(128), probe) - ref).max()
    e256 = np.abs(velocity(ellipse(256), probe) - ref).max()
    ratio = e128 / max(e256, np.finfo(float).tiny)
    note("fourier_err", float(fourier_err))
    note("e128", float(e128))
    note("e256", float(e256))
    note("ratio", float(ratio))
    assert fourier_err <= 1e-10
    assert ratio > 10


def _perturbed_layer_config(t_end, dt, omega0=1.0):
    spec = PresetSpec("perturbed_layer", h=0.25, amplitude=0.02, mode=2)
    return SimConfig(omega0, (spec,), 128, t_end, dt=dt, save_every=10**9, redistribute_every=0)


def _final_nodes(config, system=None):
    system = system if system is not None else build_initial_system(config)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        result = integrate(system, config)
    assert result.ok, result.breakdown
    return result.frames[-1].contours


@acceptance(9, "RK4 is fourth order and time-reversible on the perturbed layer")
def test_criterion_09_time_convergence(note):
    ref = _final_nodes(_perturbed_layer_config(0.5, 0.003125))

    def error(dt):
        out = _final_nodes(_perturbed_layer_config(0.5, dt))
        return max(np.abs(a.nodes - b.nodes).max() for a, b in zip(out, ref))

    e_coarse, e_fine = error(0.05), error(0.025)
    factor = e_coarse / e_fine

    forward = _perturbed_layer_config(0.25, 1e-3)
    start = build_initial_system(forward)
    mid = _final_nodes(forward, start)
    backward = _perturbed_layer_config(0.25, 1e-3, omega0=-forward.omega0)
    back = _final_nodes(backward, PatchSystem(mid, backward.omega0))
    round_trip = max(np.abs(a.nodes - b.nodes).max() for a, b in zip(back, start.contours))
    note("e_dt0.05", float(e_coarse))
    note("e_dt0.025", float(e_fine))
    note("factor", float(factor))
    note("round_trip", float(round_trip))
    assert 10 <= factor <= 22
    assert round_trip <= 1e-6


@acceptance(10, "ln rho - ln|x| is harmonic on 0.05 < |x| < 0.45")
def test_criterion_10_harmonic_remainder(note):
    rng = np.random.default_rng(10)
    r = rng.uniform(0.05, 0.45, 10_000)
    t = rng.uniform(0, 2 * np.pi, 10_000)
    d = np.column_stack([r * np.cos(t), r * np.sin(t)])
    h = 1e-3

    def f(x):
        return K.log_rho(x) - np.log(np.hypot(x[:, 0], x[:, 1]))

    lap = (f(d + [h, 0]) + f(d - [h, 0]) + f(d + [0, h]) + f(d - [0, h]) - 4 * f(d)) / h**2
    note("max_laplacian", float(np.abs(lap).max()))
    assert np.abs(lap).max() <= 1e-4


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
