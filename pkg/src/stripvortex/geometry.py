"""Points, contours and patch regions on the periodic strip [-1/2, 1/2) x R.

Contours are stored *lifted*: node x1 coordinates are real numbers, not
wrapped, and a wrapping contour closes up with the offset ``(winding, 0)``,
i.e. gamma(alpha + 2 pi) = gamma(alpha) + (winding, 0). Node ``j`` sits at
parameter ``alpha_j = 2 pi j / N``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    AmbiguousMembershipError,
    DegenerateContourError,
    InvalidArgumentError,
    InvalidDiscretizationError,
    UnsupportedWindingError,
)


def wrap_x1(t):
    """Map ``t`` into [-1/2, 1/2) via ``t - floor(t + 1/2)``.

    Works elementwise on arrays. Scalars must be finite.
    """
    if np.ndim(t) == 0:
        t = float(t)
        if not math.isfinite(t):
            raise InvalidArgumentError(f"wrap_x1 needs a finite value, got {t}")
        return t - math.floor(t + 0.5)
    t = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(t)):
        raise InvalidArgumentError("wrap_x1 needs finite values")
    return t - np.floor(t + 0.5)


@dataclass(frozen=True)
class StripPoint:
    x1: float
    x2: float

    def __post_init__(self):
        object.__setattr__(self, "x1", wrap_x1(self.x1))
        object.__setattr__(self, "x2", float(self.x2))

    def __iter__(self):
        yield self.x1
        yield self.x2

    def as_array(self):
        return np.array([self.x1, self.x2])


def as_strip_point(p) -> StripPoint:
    if isinstance(p, StripPoint):
        return p
    x1, x2 = p
    return StripPoint(x1, x2)


def strip_distance(p, q) -> float:
    """Distance on the cylinder between two points."""
    p, q = as_strip_point(p), as_strip_point(q)
    return math.hypot(wrap_x1(p.x1 - q.x1), p.x2 - q.x2)


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Contour:
    """A closed (possibly cylinder-wrapping) boundary curve.

    Use :func:`validate_contour` to build one from raw input; the
    constructor assumes ``nodes`` is already a valid ``(N, 2)`` array.
    """

    nodes: np.ndarray
    winding: int = 0

    def __post_init__(self):
        object.__setattr__(self, "nodes", _readonly(self.nodes))
        object.__setattr__(self, "winding", int(self.winding))

    @property
    def n(self) -> int:
        return self.nodes.shape[0]

    @property
    def alphas(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n) / self.n

    @property
    def closure(self) -> np.ndarray:
        return np.array([float(self.winding), 0.0])

    def periodic_part(self) -> np.ndarray:
        """gamma(alpha) - (winding * alpha / 2 pi, 0), which is 2 pi periodic."""
        p = self.nodes.copy()
        p[:, 0] -= self.winding * np.arange(self.n) / self.n
        return p

    def tangent(self) -> np.ndarray:
        """d gamma / d alpha at the nodes, by spectral differentiation."""
        dp = spectral_derivative(self.periodic_part())
        dp[:, 0] += self.winding / (2.0 * np.pi)
        return dp

    def segment_ends(self) -> tuple[np.ndarray, np.ndarray]:
        """Start and end points of the N polyline segments, closure included."""
        b = np.roll(self.nodes, -1, axis=0)
        b[-1] += self.closure
        return self.nodes, b

    def translated(self, shift) -> "Contour":
        return Contour(self.nodes + np.asarray(shift, dtype=float), self.winding)

    def __eq__(self, other):
        if not isinstance(other, Contour):
            return NotImplemented
        return self.winding == other.winding and np.array_equal(self.nodes, other.nodes)

    __hash__ = None


def spectral_derivative(samples: np.ndarray) -> np.ndarray:
    """Derivative in alpha of 2 pi periodic samples along axis 0.

    The Nyquist mode is dropped, which keeps the result real.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    k = np.fft.rfftfreq(n, d=1.0 / n)
    if n % 2 == 0:
        k[-1] = 0.0
    coeffs = np.fft.rfft(samples, axis=0)
    shape = (-1,) + (1,) * (samples.ndim - 1)
    return np.fft.irfft(1j * k.reshape(shape) * coeffs, n=n, axis=0)


def validate_contour(nodes, closure=(0.0, 0.0)) -> Contour:
    """Check a lifted node list and return it as a :class:`Contour`.

    ``closure`` is the declared offset gamma(2 pi) - gamma(0); its x1
    component, rounded, is the winding number.
    """
    nodes = np.asarray(nodes, dtype=float)
    if nodes.ndim != 2 or nodes.shape[1] != 2:
        raise InvalidArgumentError(f"nodes must have shape (N, 2), got {nodes.shape}")
    n = nodes.shape[0]
    if n < 8 or n % 2:
        raise InvalidDiscretizationError(f"node count must be even and >= 8, got {n}")
    if not np.all(np.isfinite(nodes)):
        raise InvalidArgumentError("nodes contain non-finite values")
    c1, c2 = (float(v) for v in closure)
    winding = int(round(c1))
    if abs(c1 - winding) > 1e-9 or abs(c2) > 1e-9:
        raise InvalidArgumentError(f"closure offset must be (integer, 0), got ({c1}, {c2})")
    if winding not in (-1, 0, 1):
        raise UnsupportedWindingError(f"winding {winding} not supported; simple curves wrap 0 or +/-1 times")
    contour = Contour(nodes, winding)
    a, b = contour.segment_ends()
    gaps = np.hypot(*(b - a).T)
    if np.any(gaps <= 0.0):
        j = int(np.argmin(gaps))
        raise DegenerateContourError(f"nodes {j} and {(j + 1) % n} coincide")
    return contour


@dataclass(frozen=True)
class PatchSystem:
    """Boundary contours of a patch region carrying vorticity ``omega0``.

    Each contour keeps the region on its left. Windings must sum to zero so
    the vorticity has bounded vertical support.
    """

    contours: tuple = ()
    omega0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "contours", tuple(self.contours))
        object.__setattr__(self, "omega0", float(self.omega0))
        total = sum(c.winding for c in self.contours)
        if total != 0:
            raise UnsupportedWindingError(f"contour windings must sum to 0, got {total}")

    def with_nodes(self, node_arrays, omega0=None) -> "PatchSystem":
        contours = tuple(Contour(x, c.winding) for x, c in zip(node_arrays, self.contours))
        return PatchSystem(contours, self.omega0 if omega0 is None else omega0)

    def x2_extent(self) -> float:
        """Largest |x2| over all nodes (0 for an empty system)."""
        if not self.contours:
            return 0.0
        return float(max(np.abs(c.nodes[:, 1]).max() for c in self.contours))


def _polylines_cross(c: Contour, d: Contour) -> bool:
    """True if any segment of ``c`` intersects any segment of ``d`` on the cylinder."""
    a1, b1 = c.segment_ends()
    a2, b2 = d.segment_ends()
    # move each segment of d to the copy nearest each segment of c
    mid = 0.5 * (a2[None, :, 0] + b2[None, :, 0]) - 0.5 * (a1[:, None, 0] + b1[:, None, 0])
    shift = -np.floor(mid + 0.5)
    p = np.stack(np.broadcast_arrays(a2[None, :, 0] + shift, a2[None, :, 1]), axis=-1)
    q = np.stack(np.broadcast_arrays(b2[None, :, 0] + shift, b2[None, :, 1]), axis=-1)
    a = a1[:, None, :]
    b = b1[:, None, :]

    def orient(u, v, w):
        return (v[..., 0] - u[..., 0]) * (w[..., 1] - u[..., 1]) - (v[..., 1] - u[..., 1]) * (w[..., 0] - u[..., 0])

    o1, o2 = orient(a, b, p), orient(a, b, q)
    o3, o4 = orient(p, q, a), orient(p, q, b)
    return bool(np.any((o1 * o2 <= 0) & (o3 * o4 <= 0)))


def check_separated(system: PatchSystem) -> None:
    """Raise if two distinct contours touch or cross on the cylinder."""
    cs = system.contours
    for i in range(len(cs)):
        for j in range(i + 1, len(cs)):
            if min_strip_distance(cs[i].nodes, cs[j].nodes) <= 0.0 or _polylines_cross(cs[i], cs[j]):
                raise DegenerateContourError(f"contours {i} and {j} touch or cross")


def min_strip_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Smallest cylinder distance between any node of ``a`` and any node of ``b``."""
    d = a[:, None, :] - b[None, :, :]
    dx = d[..., 0] - np.floor(d[..., 0] + 0.5)
    return float(np.sqrt((dx * dx + d[..., 1] ** 2).min()))


def _relative_segments(points, a, b):
    """Segment endpoints relative to each point, shifted to the nearest copy.

    Returns arrays of shape (M, S) for the shifted x1 of both endpoints and
    the raw x2 coordinates.
    """
    ax = a[None, :, 0] - points[:, None, 0]
    ax = ax - np.floor(ax + 0.5)
    bx = ax + (b[:, 0] - a[:, 0])[None, :]
    return ax, bx


def crossing_parity(points: np.ndarray, contours: Sequence[Contour], chunk=4096) -> np.ndarray:
    """Parity of upward vertical-ray crossings for many points at once.

    No boundary tolerance is applied; see :func:`point_in_region`.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if not contours:
        return np.zeros(len(points), dtype=bool)
    a = np.concatenate([c.segment_ends()[0] for c in contours])
    b = np.concatenate([c.segment_ends()[1] for c in contours])
    out = np.empty(len(points), dtype=bool)
    for start in range(0, len(points), chunk):
        p = points[start:start + chunk]
        ax, bx = _relative_segments(p, a, b)
        dx = bx - ax
        count = np.zeros(len(p), dtype=np.int64)
        # segments are shorter than 1/2, so after the shift only the copies
        # of the ray at offsets -1, 0, +1 can be hit
        for c in (-1.0, 0.0, 1.0):
            hit = (ax > c) != (bx > c)
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (c - ax) / dx
            y = a[None, :, 1] + t * (b[None, :, 1] - a[None, :, 1])
            count += np.sum(hit & (y > p[:, None, 1]), axis=1)
        out[start:start + chunk] = count % 2 == 1
    return out


def distance_to_boundary(points: np.ndarray, contours: Sequence[Contour], chunk=2048) -> np.ndarray:
    """Cylinder distance from each point to the union of contour polylines."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if not contours:
        return np.full(len(points), np.inf)
    a = np.concatenate([c.segment_ends()[0] for c in contours])
    b = np.concatenate([c.segment_ends()[1] for c in contours])
    seg = b - a
    seg_len2 = np.einsum("ij,ij->i", seg, seg)
    out = np.empty(len(points))
    for start in range(0, len(points), chunk):
        p = points[start:start + chunk]
        # shift each segment so its midpoint is the copy nearest the point
        mid = a[None, :, 0] + 0.5 * seg[None, :, 0] - p[:, None, 0]
        shift = -np.floor(mid + 0.5)
        qx = p[:, None, 0] - (a[None, :, 0] + shift)
        qy = p[:, None, 1] - a[None, :, 1]
        t = np.clip((qx * seg[:, 0] + qy * seg[:, 1]) / seg_len2, 0.0, 1.0)
        ex = qx - t * seg[:, 0]
        ey = qy - t * seg[:, 1]
        out[start:start + chunk] = np.sqrt(ex * ex + ey * ey).min(axis=1)
    return out


def boundary_tolerance(system: PatchSystem) -> float:
    return 1e-12 * (1.0 + system.x2_extent())


def point_in_region(system: PatchSystem, p) -> bool:
    """True when ``p`` lies in the patch region (odd number of ray crossings)."""
    p = as_strip_point(p)
    pts = p.as_array()[None, :]
    tol = boundary_tolerance(system)
    if distance_to_boundary(pts, system.contours)[0] <= tol:
        raise AmbiguousMembershipError(f"point ({p.x1}, {p.x2}) lies on a patch boundary")
    return bool(crossing_parity(pts, system.contours)[0])


def _contour_integral(contour: Contour, values: np.ndarray) -> float:
    """Trapezoid rule for the closed integral of ``values * dx1``."""
    dx1 = contour.tangent()[:, 0]
    return 2.0 * np.pi / contour.n * float(np.dot(values, dx1))


def signed_area(system: PatchSystem) -> float:
    """Area of the patch region per period, -sum of closed integrals of x2 dx1."""
    return -sum(_contour_integral(c, c.nodes[:, 1]) for c in system.contours)


def vertical_moment(system: PatchSystem) -> float:
    """First vertical moment of the region, -sum of closed integrals of x2^2/2 dx1."""
    return -sum(_contour_integral(c, 0.5 * c.nodes[:, 1] ** 2) for c in system.contours)


def gamma_star(contour: Contour) -> float:
    """Discrete infimum of chord length over parameter distance.

    Parameter distances are taken on the circle (at most pi); for a wrapping
    contour the chord uses the lift that matches that choice.
    """
    x = contour.nodes
    a = contour.alphas
    dalpha = a[:, None] - a[None, :]
    diff = x[:, None, :] - x[None, :, :]
    best = np.inf
    for m in (-1, 0, 1):
        d = np.abs(dalpha + 2.0 * np.pi * m)
        ok = (d > 0) & (d <= np.pi * (1 + 1e-12))
        if not ok.any():
            continue
        cx = diff[..., 0] + contour.winding * m
        chord = np.hypot(cx, diff[..., 1])
        best = min(best, float((chord[ok] / d[ok]).min()))
    return best


def replicate(system: PatchSystem, copies: int) -> list[Contour]:
    """Horizontal copies of every contour for n = -(copies//2) .. copies//2."""
    if int(copies) != copies or copies < 1:
        raise InvalidArgumentError(f"copies must be a positive integer, got {copies}")
    half = int(copies) // 2
    return [c.translated((n, 0.0)) for n in range(-half, half + 1) for c in system.contours]
