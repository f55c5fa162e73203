"""Biot-Savart kernels on the periodic strip and in the plane.

All functions take displacement vectors ``d`` as array_like of shape ``(2,)``
or ``(..., 2)`` and broadcast over the leading axes. Vector results have a
trailing axis of length 2; matrix results have trailing shape ``(2, 2)``
with rows indexing velocity components and columns indexing partial
derivatives, so ``grad[..., i, j] = d K^i / d x_j``.

The periodic quantities are evaluated through ``E = exp(-2 pi |x2|)``
rather than cosh/sinh directly. That keeps them finite for any height and
avoids the cancellation in ``cosh(2 pi x2) - cos(2 pi x1)`` near the
lattice ``Z x {0}``.
"""

import numpy as np

from .errors import InvalidArgumentError, KernelSingularityError

EPS_SING = 1e-14

#: Mean of the off-diagonal entries of grad K_inf over any circle centred at
#: the origin (radius < 1). grad K averages to zero on circles and the
#: harmonic remainder grad H has mean value grad H(0) = -pi/6 off the
#: diagonal; the brute-force check lives in tests/test_kernels.py.
GRAD_OFFDIAG_CIRCLE_MEAN = -np.pi / 6.0

_LN2 = np.log(2.0)


def _split(d):
    d = np.asarray(d, dtype=float)
    if d.shape[-1:] != (2,):
        raise InvalidArgumentError(f"expected trailing axis of length 2, got shape {d.shape}")
    return d[..., 0], d[..., 1]


def _stable_parts(x1, x2):
    """Return E, (1 - E) and 4 E rho^2 for E = exp(-2 pi |x2|)."""
    a = 2.0 * np.pi * np.abs(x2)
    E = np.exp(-a)
    one_minus_E = -np.expm1(-a)
    s = np.sin(np.pi * x1)
    den = one_minus_E**2 + 4.0 * E * s * s
    return E, one_minus_E, den


def rho(d):
    """sqrt(sin^2(pi x1) + sinh^2(pi x2)); vanishes exactly on Z x {0}."""
    x1, x2 = _split(d)
    return np.sqrt(np.sin(np.pi * x1) ** 2 + np.sinh(np.pi * x2) ** 2)


def log_rho(d):
    """Natural log of :func:`rho`, finite for arbitrarily large ``|x2|``.

    Returns ``-inf`` on the lattice; callers that need a guard use
    :func:`green`.
    """
    x1, x2 = _split(d)
    _, _, den = _stable_parts(x1, x2)
    with np.errstate(divide="ignore"):
        return np.pi * np.abs(x2) - _LN2 + 0.5 * np.log(den)


def _check_rho(x1, x2):
    r2 = np.sin(np.pi * x1) ** 2 + np.sinh(np.pi * np.minimum(np.abs(x2), 1.0)) ** 2
    if np.any(r2 <= EPS_SING**2):
        raise KernelSingularityError("kernel evaluated at a lattice point (rho <= 1e-14)")


def green(d):
    """Periodic Green's function (2 pi)^-1 log rho."""
    x1, x2 = _split(d)
    _check_rho(x1, x2)
    return log_rho(d) / (2.0 * np.pi)


def k_inf(d):
    """Periodic Biot-Savart kernel K_inf = grad^perp G.

    Equal to ``(-sinh(2 pi x2), sin(2 pi x1)) / (2 (cosh(2 pi x2) - cos(2 pi x1)))``.
    """
    x1, x2 = _split(d)
    _check_rho(x1, x2)
    E, one_minus_E, den = _stable_parts(x1, x2)
    k1 = -np.sign(x2) * one_minus_E * (1.0 + E) / (2.0 * den)
    k2 = np.sin(2.0 * np.pi * x1) * E / den
    return np.stack([k1, k2], axis=-1)


def k_classical(d):
    """Planar Biot-Savart kernel (1/2 pi) x^perp / |x|^2."""
    x1, x2 = _split(d)
    r2 = x1 * x1 + x2 * x2
    if np.any(r2 <= EPS_SING**2):
        raise KernelSingularityError("classical kernel evaluated at the origin")
    return np.stack([-x2, x1], axis=-1) / (2.0 * np.pi * r2[..., None])


def _image_offsets(n_images):
    if int(n_images) != n_images or n_images < 0:
        raise InvalidArgumentError(f"image count must be a non-negative integer, got {n_images}")
    return np.arange(1, int(n_images) + 1, dtype=float)


def k_sym_truncated(d, n_images):
    """Symmetric partial image sum of :func:`k_classical` over ``|n| <= n_images``.

    Terms are added in +/-n pairs, which is what makes the series converge.
    """
    d = np.asarray(d, dtype=float)
    n = _image_offsets(n_images)
    total = k_classical(d)
    if n.size == 0:
        return total
    shift = np.zeros((n.size, 2))
    shift[:, 0] = n
    dd = d[..., None, :]
    pairs = k_classical(dd - shift) + k_classical(dd + shift)
    return total + pairs.sum(axis=-2)


def beta(d):
    """The symmetric, trace-free matrix beta with grad K_inf = (pi/2) beta / rho^2."""
    x1, x2 = _split(d)
    _check_rho(x1, x2)
    E, one_minus_E, den = _stable_parts(x1, x2)
    u = 2.0 * np.pi * x1
    s_half = np.sin(np.pi * x1)
    b11 = np.sin(u) * np.sign(x2) * one_minus_E * (1.0 + E) / den
    # cos u cosh v - 1, rescaled by 2E and rearranged to avoid cancellation
    b12 = (np.cos(u) * one_minus_E**2 - 4.0 * E * s_half * s_half) / den
    return np.stack([np.stack([b11, b12], -1), np.stack([b12, -b11], -1)], -2)


def grad_k_inf(d):
    """Jacobian of :func:`k_inf`, equal to (pi/2) beta(d) / rho(d)^2."""
    x1, x2 = _split(d)
    _check_rho(x1, x2)
    E, _, den = _stable_parts(x1, x2)
    # rho^2 = den / (4E), so (pi/2) / rho^2 = 2 pi E / den
    scale = 2.0 * np.pi * E / den
    return beta(d) * scale[..., None, None]


def grad_k_classical(d):
    """(1/2 pi) sigma(x) / |x|^2, the Jacobian of :func:`k_classical`."""
    x1, x2 = _split(d)
    r2 = x1 * x1 + x2 * x2
    if np.any(r2 <= EPS_SING**2):
        raise KernelSingularityError("classical kernel gradient evaluated at the origin")
    c = 1.0 / (2.0 * np.pi * r2 * r2)
    s11 = 2.0 * x1 * x2 * c
    s12 = (x2 * x2 - x1 * x1) * c
    return np.stack([np.stack([s11, s12], -1), np.stack([s12, -s11], -1)], -2)


def grad_k_sym_truncated(d, n_images):
    """Image sum of :func:`grad_k_classical` over ``|n| <= n_images``."""
    d = np.asarray(d, dtype=float)
    n = _image_offsets(n_images)
    total = grad_k_classical(d)
    if n.size == 0:
        return total
    shift = np.zeros((n.size, 2))
    shift[:, 0] = n
    dd = d[..., None, :]
    pairs = grad_k_classical(dd - shift) + grad_k_classical(dd + shift)
    return total + pairs.sum(axis=-3)
