"""Periodic quadrature, including the spectral rule for a log singularity.

On the grid ``alpha_j = 2 pi j / N`` the self-interaction integrand of the
contour dynamics equation is split as

    log rho(gamma(alpha_i) - gamma(alpha')) = S(alpha_i, alpha')
                                              + (1/2) ln(4 sin^2((alpha_i - alpha')/2))

with ``S`` smooth. ``S`` is integrated with the plain trapezoid rule and the
log factor with circulant weights built from its Fourier series
``ln(4 sin^2(t/2)) = -2 sum_{m>=1} cos(m t) / m``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError, InvalidDiscretizationError


def trapezoid_periodic(samples, period=2.0 * np.pi):
    """(period / N) * sum of samples along axis 0."""
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 0 or samples.shape[0] == 0:
        raise InvalidArgumentError("trapezoid_periodic needs at least one sample")
    return period / samples.shape[0] * samples.sum(axis=0)


@dataclass(frozen=True, eq=False)
class LogKernelWeights:
    """Circulant weights ``w[k]`` for the kernel ln(4 sin^2(t/2)) at node offset k."""

    n: int
    w: np.ndarray

    def matrix(self) -> np.ndarray:
        """The N x N circulant matrix ``W[i, j] = w[(i - j) mod N]``."""
        return _circulant(self.n)


def _check_even(n):
    if int(n) != n or n < 8 or n % 2:
        raise InvalidDiscretizationError(f"log-kernel weights need an even N >= 8, got {n}")
    return int(n)


@lru_cache(maxsize=32)
def _weights_array(n):
    k = np.arange(n)
    m = np.arange(1, n // 2)
    series = (np.cos(2.0 * np.pi * np.outer(k, m) / n) / m).sum(axis=1)
    w = -(2.0 * np.pi / n) * 2.0 * (series + np.cos(np.pi * k) / n)
    # enforce the exact even symmetry w[k] = w[N-k]
    w = 0.5 * (w + np.roll(w[::-1], 1))
    w.setflags(write=False)
    return w


@lru_cache(maxsize=32)
def _circulant(n):
    w = _weights_array(n)
    idx = (np.arange(n)[:, None] - np.arange(n)[None, :]) % n
    mat = w[idx]
    mat.setflags(write=False)
    return mat


@lru_cache(maxsize=32)
def log_sin_matrix(n):
    """``(1/2) ln(4 sin^2((alpha_i - alpha_j)/2))`` with zeros on the diagonal."""
    a = 2.0 * np.pi * np.arange(n) / n
    t = a[:, None] - a[None, :]
    with np.errstate(divide="ignore"):
        out = np.log(np.abs(2.0 * np.sin(0.5 * t)))
    np.fill_diagonal(out, 0.0)
    out.setflags(write=False)
    return out


def log_kernel_weights(n) -> LogKernelWeights:
    n = _check_even(n)
    return LogKernelWeights(n, _weights_array(n))


def integrate_with_log_singularity(smooth_samples, log_factor_samples, i, weights: LogKernelWeights):
    """Integrate ``smooth + ln|2 sin((alpha_i - alpha')/2)| * f`` over one period.

    ``smooth_samples`` must already hold the analytic diagonal limit at
    index ``i``. Samples may be scalars or vectors per node (axis 0 is the
    node axis).
    """
    smooth = np.asarray(smooth_samples, dtype=float)
    f = np.asarray(log_factor_samples, dtype=float)
    n = weights.n
    if smooth.shape[0] != n or f.shape[0] != n:
        raise InvalidArgumentError("sample count does not match the weights")
    if int(i) != i or not 0 <= i < n:
        raise InvalidArgumentError(f"node index {i} out of range for N = {n}")
    row = weights.w[(int(i) - np.arange(n)) % n]
    return trapezoid_periodic(smooth) + 0.5 * np.tensordot(row, f, axes=(0, 0))


def punctured_trapezoid_log(smooth_samples, log_factor_samples, i):
    """Low-order counterpart of :func:`integrate_with_log_singularity`.

    The singular node is dropped from the trapezoid sum for the log part and
    replaced by ``f_i * h ln(h / 2 pi)``, the weight that makes the rule
    exact for constant ``f``. Error is O(h^3) for smooth ``f``.
    """
    smooth = np.asarray(smooth_samples, dtype=float)
    f = np.asarray(log_factor_samples, dtype=float)
    n = f.shape[0]
    if smooth.shape[0] != n:
        raise InvalidArgumentError("sample arrays must be aligned")
    if int(i) != i or not 0 <= i < n:
        raise InvalidArgumentError(f"node index {i} out of range for N = {n}")
    i = int(i)
    h = 2.0 * np.pi / n
    logs = log_sin_matrix(n)[i]
    log_part = h * np.tensordot(logs, f, axes=(0, 0)) + f[i] * h * np.log(h / (2.0 * np.pi))
    return trapezoid_periodic(smooth) + log_part


def punctured_log_matrix(n):
    """Matrix form of the log part of :func:`punctured_trapezoid_log`, per node."""
    h = 2.0 * np.pi / n
    mat = h * np.array(log_sin_matrix(n))
    np.fill_diagonal(mat, h * np.log(h / (2.0 * np.pi)))
    return mat
