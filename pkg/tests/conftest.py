import numpy as np
import pytest

from stripvortex.config import PresetSpec, SimConfig, build_initial_system


def make_system(*specs, n_nodes=128, omega0=1.0):
    return build_initial_system(SimConfig(omega0, tuple(specs), n_nodes, 0.0))


def circle_system(r=0.15, center=(0.0, 0.0), n_nodes=128, omega0=1.0):
    return make_system(PresetSpec("circle", center=center, radius=r), n_nodes=n_nodes, omega0=omega0)


def layer_system(h=0.25, n_nodes=128, omega0=1.0, amplitude=None, mode=2):
    if amplitude is None:
        spec = PresetSpec("flat_layer", h=h)
    else:
        spec = PresetSpec("perturbed_layer", h=h, amplitude=amplitude, mode=mode)
    return make_system(spec, n_nodes=n_nodes, omega0=omega0)


def image_sum_velocity(system, x, n_images=250):
    """Velocity from the planar patch law summed over horizontal images |n| <= n_images.

    Independent of the periodic kernel: uses only log|x - y| and the
    plain trapezoid rule on each translated contour.
    """
    x = np.asarray(x, dtype=float)
    total = np.zeros(2)
    for c in system.contours:
        t = c.tangent()
        for n in range(-n_images, n_images + 1):
            d = x - (c.nodes + [n, 0.0])
            logs = np.log(np.hypot(d[:, 0], d[:, 1]))
            total += 2.0 * np.pi / c.n * (logs[:, None] * t).sum(axis=0)
    return -system.omega0 / (2.0 * np.pi) * total


# -- acceptance reporting ------------------------------------------------------

ACCEPTANCE_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not (rep.when == "call" or rep.failed):
        return
    number, title = marker.args
    detail = ", ".join(f"{k}={v}" for k, v in item.user_properties)
    ACCEPTANCE_RESULTS[number] = (title, rep.passed and rep.when == "call", detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, ok, detail = ACCEPTANCE_RESULTS[number]
        line = f"{'PASS' if ok else 'FAIL'}  criterion {number:2d}: {title}"
        terminalreporter.write_line(line + (f"  [{detail}]" if detail else ""))


@pytest.fixture
def flat_layer():
    return layer_system()


@pytest.fixture
def circle():
    return circle_system()


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)
