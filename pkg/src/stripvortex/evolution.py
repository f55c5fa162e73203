"""Time stepping of the contour dynamics equation and per-frame diagnostics."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .config import SimConfig, build_initial_system
from .dynamics import cde_rhs, local_spacing, mean_flow_diagnostics
from .errors import ContourProximityError, InvalidArgumentError, RedistributionError
from .geometry import Contour, PatchSystem, gamma_star, signed_area, vertical_moment

log = logging.getLogger(__name__)

#: Clearance above the vortical region used for the frame mean-flow probe.
MEAN_PROBE_CLEARANCE = 1.0


@dataclass(frozen=True)
class FrameRecord:
    t: float
    contours: tuple
    diagnostics: dict

    @property
    def system_nodes(self):
        return [c.nodes for c in self.contours]


@dataclass
class RunResult:
    frames: list = field(default_factory=list)
    breakdown: Optional[str] = None
    steps: int = 0

    @property
    def ok(self) -> bool:
        return self.breakdown is None


def compute_diagnostics(system: PatchSystem, quadrature="spectral") -> dict:
    """Conserved and monitored quantities for one snapshot."""
    speeds = cde_rhs(system, quadrature=quadrature, check=False)
    max_speed = max((float(np.hypot(v[:, 0], v[:, 1]).max()) for v in speeds), default=0.0)
    m2, _, m1_sum = mean_flow_diagnostics(system, system.x2_extent() + MEAN_PROBE_CLEARANCE)
    return {
        "area": signed_area(system),
        "vertical_moment": vertical_moment(system),
        "gamma_star": [gamma_star(c) for c in system.contours],
        "max_speed": max_speed,
        "m2": m2,
        "m1_sum": m1_sum,
    }


def make_frame(t, system: PatchSystem, quadrature="spectral") -> FrameRecord:
    return FrameRecord(float(t), system.contours, compute_diagnostics(system, quadrature))


def rk4_step(system: PatchSystem, dt: float, quadrature="spectral") -> PatchSystem:
    """One classical Runge-Kutta step of all node positions at once."""
    if not dt > 0:
        raise InvalidArgumentError(f"dt must be positive, got {dt}")
    x0 = [c.nodes for c in system.contours]

    def rhs(nodes, stage):
        try:
            return cde_rhs(system.with_nodes(nodes), quadrature=quadrature)
        except ContourProximityError as exc:
            exc.stage = stage
            raise

    k1 = rhs(x0, 1)
    k2 = rhs([x + 0.5 * dt * k for x, k in zip(x0, k1)], 2)
    k3 = rhs([x + 0.5 * dt * k for x, k in zip(x0, k2)], 3)
    k4 = rhs([x + dt * k for x, k in zip(x0, k3)], 4)
    new = [x + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d) for x, a, b, c, d in zip(x0, k1, k2, k3, k4)]
    return system.with_nodes(new)


def _trig_eval(coeffs, n, theta, derivative=False):
    """Evaluate the real trigonometric interpolant given by ``rfft`` coefficients.

    The Nyquist mode is split evenly between +-N/2, giving a cos(N theta/2)
    term.
    """
    k = np.arange(coeffs.shape[0])
    e = np.exp(1j * np.outer(theta, k))
    c = coeffs.copy()
    c[1:] *= 2.0
    if n % 2 == 0:
        c[-1] = coeffs[-1]
    if derivative:
        c = c * (1j * k).reshape((-1,) + (1,) * (c.ndim - 1))
        if n % 2 == 0:
            c[-1] = 0.0
    return (e @ c).real / n


def redistribute(contour: Contour, tol=1e-12, max_iter=50) -> Contour:
    """Resample the node list so nodes are equispaced in arc length.

    Node 0 is kept fixed; the curve is reconstructed from the trigonometric
    interpolant of its periodic part.
    """
    n = contour.n
    w = contour.winding
    coeffs = np.fft.rfft(contour.periodic_part(), axis=0)
    speed = np.hypot(*contour.tangent().T)
    s_coeffs = np.fft.rfft(speed)
    total = 2.0 * np.pi * s_coeffs[0].real / n

    k = np.arange(1, s_coeffs.shape[0])
    # antiderivative of the periodic part of the speed; Nyquist mode dropped
    anti = np.zeros_like(s_coeffs)
    anti[1:] = s_coeffs[1:] / (1j * k)
    if n % 2 == 0:
        anti[-1] = 0.0

    def arclength(theta):
        return total / (2.0 * np.pi) * theta + _trig_eval(anti, n, theta) - _trig_eval(anti, n, np.zeros(1))[0]

    s_smooth = s_coeffs.copy()
    if n % 2 == 0:
        s_smooth[-1] = 0.0

    def speed_at(theta):
        return _trig_eval(s_smooth, n, theta)

    target = total * np.arange(n) / n
    theta = contour.alphas.copy()
    for _ in range(max_iter):
        err = arclength(theta) - target
        if np.abs(err).max() <= tol * total:
            break
        theta = theta - err / speed_at(theta)
        theta[0] = 0.0
    else:
        raise RedistributionError(f"arc-length iteration did not converge in {max_iter} steps")

    nodes = _trig_eval(coeffs, n, theta)
    nodes[:, 0] += w * theta / (2.0 * np.pi)
    return Contour(nodes, w)


def _cfl_check(system, dt, quadrature):
    speeds = cde_rhs(system, quadrature=quadrature, check=False)
    vmax = max((float(np.hypot(*v.T).max()) for v in speeds), default=0.0)
    hmin = min((float(local_spacing(c).min()) for c in system.contours), default=math.inf)
    if dt * vmax >= hmin:
        warnings.warn(
            f"dt * max speed = {dt * vmax:.3e} exceeds the smallest node spacing {hmin:.3e}",
            RuntimeWarning,
            stacklevel=3,
        )


def _step_schedule(t_end, dt):
    n_full = int(math.floor(t_end / dt + 1e-9))
    steps = [dt] * n_full
    rest = t_end - n_full * dt
    if rest > 1e-12 * max(1.0, t_end):
        steps.append(rest)
    return steps


def integrate(system: PatchSystem, config: SimConfig, on_frame: Optional[Callable] = None) -> RunResult:
    """Advance ``system`` to ``config.t_end`` and collect frames.

    A :class:`ContourProximityError` ends the run early; the frames recorded
    so far are kept and ``breakdown`` describes what happened.
    """
    result = RunResult()

    def emit(t, sys):
        frame = make_frame(t, sys, config.quadrature)
        result.frames.append(frame)
        if on_frame is not None:
            on_frame(frame)

    emit(0.0, system)
    steps = _step_schedule(config.t_end, config.dt)
    if not steps:
        return result
    _cfl_check(system, config.dt, config.quadrature)
    for i, h in enumerate(steps, start=1):
        try:
            system = rk4_step(system, h, config.quadrature)
        except ContourProximityError as exc:
            t = (i - 1) * config.dt
            result.breakdown = f"breakdown at t = {t:.6g} (step {i}): {exc}"
            log.warning(result.breakdown)
            return result
        result.steps = i
        if config.redistribute_every and i % config.redistribute_every == 0:
            try:
                system = PatchSystem(tuple(redistribute(c) for c in system.contours), system.omega0)
            except RedistributionError as exc:
                log.warning("step %d: %s; continuing without redistribution", i, exc)
        if i % config.save_every == 0 or i == len(steps):
            emit(config.t_end if i == len(steps) else i * config.dt, system)
    return result


def run(config: SimConfig, on_frame: Optional[Callable] = None) -> RunResult:
    return integrate(build_initial_system(config), config, on_frame)
