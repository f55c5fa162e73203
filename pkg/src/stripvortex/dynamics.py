"""Velocity, CDE right-hand side and velocity gradient of a patch system.

The velocity of a patch with boundary contours gamma_j is

    u(x) = -(omega0 / 2 pi) sum_j  int_0^{2 pi} log rho(x - gamma_j(a)) gamma_j'(a) da

and the boundary moves with the same formula evaluated on the contour
itself, where the log singularity is handled by :mod:`.quadrature`.
"""

from __future__ import annotations

import warnings

import numpy as np

from . import kernels
from .errors import (
    ContourProximityError,
    InvalidArgumentError,
    InvalidProbeError,
    NearBoundaryError,
    ProximityWarning,
)
from .geometry import (
    PatchSystem,
    as_strip_point,
    crossing_parity,
    distance_to_boundary,
    gamma_star,
    min_strip_distance,
    point_in_region,
)
from .quadrature import log_kernel_weights, log_sin_matrix, punctured_log_matrix

CROSS_WARN = 1e-3
GAMMA_WARN = 1e-2
HARD_FACTOR = 0.1

ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])

QUADRATURES = ("spectral", "punctured")


def _points(x):
    x = np.asarray(x, dtype=float)
    if x.shape[-1:] != (2,):
        raise InvalidArgumentError(f"points need a trailing axis of length 2, got {x.shape}")
    return x.reshape(-1, 2)


def local_spacing(contour) -> np.ndarray:
    """Mean length of the two segments meeting at each node."""
    a, b = contour.segment_ends()
    seg = np.hypot(*(b - a).T)
    return 0.5 * (seg + np.roll(seg, 1))


def near_boundary_mask(system: PatchSystem, points, factor=2.0) -> np.ndarray:
    """True where a point is closer than ``factor`` x local node spacing to a node."""
    pts = _points(points)
    mask = np.zeros(len(pts), dtype=bool)
    for c in system.contours:
        spacing = local_spacing(c)
        for start in range(0, len(pts), 2048):
            p = pts[start:start + 2048]
            d = p[:, None, :] - c.nodes[None, :, :]
            dx = d[..., 0] - np.floor(d[..., 0] + 0.5)
            dist = np.sqrt(dx * dx + d[..., 1] ** 2)
            j = dist.argmin(axis=1)
            close = dist[np.arange(len(p)), j] < factor * spacing[j]
            mask[start:start + 2048] |= close
    return mask


def velocity_field(system: PatchSystem, points, check=True) -> np.ndarray:
    """Velocity at many off-boundary points, shape ``(M, 2)``.

    With ``check`` the points are screened against the contours first and a
    :class:`NearBoundaryError` is raised for any that are too close.
    """
    pts = _points(points)
    if check and system.contours:
        bad = near_boundary_mask(system, pts)
        if bad.any():
            i = int(np.argmax(bad))
            raise NearBoundaryError(
                f"probe {tuple(pts[i])} is within two node spacings of a contour; use cde_rhs on the boundary"
            )
    out = np.zeros((len(pts), 2))
    if system.omega0 == 0.0:
        return out
    for c in system.contours:
        t = c.tangent()
        w = 2.0 * np.pi / c.n
        for start in range(0, len(pts), 1024):
            p = pts[start:start + 1024]
            L = kernels.log_rho(p[:, None, :] - c.nodes[None, :, :])
            out[start:start + 1024] += w * (L @ t)
    return -system.omega0 / (2.0 * np.pi) * out


def velocity(system: PatchSystem, x) -> np.ndarray:
    """Velocity at a single point off the patch boundary."""
    p = as_strip_point(x)
    return velocity_field(system, [[p.x1, p.x2]])[0]


def check_proximity(system: PatchSystem, warn_gamma=GAMMA_WARN, warn_cross=CROSS_WARN) -> dict:
    """Warn or raise when contours degenerate; returns the measured values."""
    gs = [gamma_star(c) for c in system.contours]
    cross = np.inf
    cs = system.contours
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            cross = min(cross, min_strip_distance(cs[i].nodes, cs[j].nodes))
    g = min(gs, default=np.inf)
    if g < HARD_FACTOR * warn_gamma:
        raise ContourProximityError(f"|gamma|_* = {g:.3e} below hard limit {HARD_FACTOR * warn_gamma:.1e}")
    if cross < HARD_FACTOR * warn_cross:
        raise ContourProximityError(f"contour separation {cross:.3e} below hard limit {HARD_FACTOR * warn_cross:.1e}")
    if g < warn_gamma:
        warnings.warn(f"|gamma|_* = {g:.3e} below {warn_gamma:.1e}", ProximityWarning, stacklevel=2)
    if cross < warn_cross:
        warnings.warn(f"contour separation {cross:.3e} below {warn_cross:.1e}", ProximityWarning, stacklevel=2)
    return {"gamma_star": gs, "min_separation": cross}


def cde_rhs(system: PatchSystem, quadrature="spectral", check=True) -> tuple:
    """Node velocities d gamma_k / dt for every contour, one ``(N_k, 2)`` array each.

    Self-interaction uses the log-singular split with diagonal limit
    ``S(a, a) = ln(pi |gamma'(a)|)``; interactions between distinct contours
    use the plain trapezoid rule. Contributions are summed in contour order.
    """
    if quadrature not in QUADRATURES:
        raise InvalidArgumentError(f"unknown quadrature {quadrature!r}")
    if check:
        check_proximity(system)
    cs = system.contours
    if system.omega0 == 0.0:
        return tuple(np.zeros_like(c.nodes) for c in cs)
    tangents = [c.tangent() for c in cs]
    out = []
    for k, ck in enumerate(cs):
        acc = np.zeros((ck.n, 2))
        for j, cj in enumerate(cs):
            t = tangents[j]
            h = 2.0 * np.pi / cj.n
            with np.errstate(divide="ignore", invalid="ignore"):
                L = kernels.log_rho(ck.nodes[:, None, :] - cj.nodes[None, :, :])
            if j != k:
                acc += h * (L @ t)
                continue
            S = L - log_sin_matrix(ck.n)
            np.fill_diagonal(S, np.log(np.pi * np.hypot(t[:, 0], t[:, 1])))
            if quadrature == "spectral":
                log_part = 0.5 * (log_kernel_weights(ck.n).matrix() @ t)
            else:
                log_part = punctured_log_matrix(ck.n) @ t
            acc += h * (S @ t) + log_part
        out.append(-system.omega0 / (2.0 * np.pi) * acc)
    return tuple(out)


def _char_radius(system):
    g = min((gamma_star(c) for c in system.contours), default=0.5)
    return 0.5 * np.pi * g


def velocity_gradient(system: PatchSystem, x, h_cell=None, refine=8) -> np.ndarray:
    """grad u at an off-boundary point: rotation jump term plus a PV area integral.

    The PV integral is a midpoint sum over square cells of side ``h_cell``
    centred so the probe sits on a cell corner. Cells whose centres lie in
    the disk of radius ``4 h_cell`` are dropped; that excluded set is
    symmetric under the square's symmetry group, so grad K integrates to
    zero on it and the harmonic part contributes exactly its mean value
    ``-pi/6`` on the off-diagonal. Cells cut by the boundary are split
    ``refine`` x ``refine`` times for their area fraction.
    """
    p = as_strip_point(x)
    x0 = p.as_array()
    if h_cell is None:
        h_cell = min(0.005, _char_radius(system) / 20.0)
    n1 = int(np.ceil(1.0 / h_cell))
    n1 += n1 % 2
    h = 1.0 / n1
    r_pv = 4.0 * h

    if not system.contours or system.omega0 == 0.0:
        return np.zeros((2, 2))
    dist = distance_to_boundary(x0[None, :], system.contours)[0]
    if dist < r_pv + 2.0 * h or near_boundary_mask(system, x0[None, :])[0]:
        raise NearBoundaryError(f"probe ({p.x1}, {p.x2}) too close to the boundary for the PV quadrature")
    inside = point_in_region(system, p)
    omega_x = system.omega0 if inside else 0.0

    lo = min(c.nodes[:, 1].min() for c in system.contours)
    hi = max(c.nodes[:, 1].max() for c in system.contours)
    j_lo = int(np.floor((lo - x0[1]) / h)) - 1
    j_hi = int(np.ceil((hi - x0[1]) / h)) + 1
    ix = np.arange(-n1 // 2, n1 // 2)
    jy = np.arange(j_lo, j_hi)
    gx, gy = np.meshgrid(x0[0] + (ix + 0.5) * h, x0[1] + (jy + 0.5) * h, indexing="ij")
    centres = np.column_stack([gx.ravel(), gy.ravel()])

    rel = centres - x0
    excluded = np.hypot(rel[:, 0], rel[:, 1]) < r_pv
    centres = centres[~excluded]

    frac = crossing_parity(centres, system.contours).astype(float)
    cut = distance_to_boundary(centres, system.contours) < h
    if cut.any():
        offs = (np.arange(refine) + 0.5) / refine - 0.5
        sx, sy = np.meshgrid(offs * h, offs * h, indexing="ij")
        sub = (centres[cut][:, None, :] + np.column_stack([sx.ravel(), sy.ravel()])[None, :, :]).reshape(-1, 2)
        frac[cut] = crossing_parity(sub, system.contours).reshape(-1, refine * refine).mean(axis=1)

    keep = frac > 0
    grads = kernels.grad_k_inf(x0 - centres[keep])
    pv = system.omega0 * h * h * np.einsum("k,kij->ij", frac[keep], grads)

    area_excl = excluded.sum() * h * h
    c = kernels.GRAD_OFFDIAG_CIRCLE_MEAN
    pv += omega_x * area_excl * np.array([[0.0, c], [c, 0.0]])
    return 0.5 * omega_x * ROTATION + pv


def mean_flow_diagnostics(system: PatchSystem, x2_probe, samples=64):
    """Horizontal means (m2, m1(x2_probe), m1(x2_probe) + m1(-x2_probe)).

    The probe heights must clear every contour by at least 0.5.
    """
    x2_probe = float(x2_probe)
    if samples < 64:
        raise InvalidArgumentError("mean-flow diagnostics need at least 64 samples")
    if abs(x2_probe) < system.x2_extent() + 0.5:
        raise InvalidProbeError(
            f"|x2_probe| = {abs(x2_probe)} must exceed the vortical extent {system.x2_extent()} by 0.5"
        )
    if system.omega0 == 0.0 or not system.contours:
        return 0.0, 0.0, 0.0
    x1 = -0.5 + np.arange(samples) / samples
    up = velocity_field(system, np.column_stack([x1, np.full(samples, x2_probe)]), check=False)
    down = velocity_field(system, np.column_stack([x1, np.full(samples, -x2_probe)]), check=False)
    m2 = float(up[:, 1].mean())
    m1_at = float(up[:, 0].mean())
    return m2, m1_at, m1_at + float(down[:, 0].mean())
