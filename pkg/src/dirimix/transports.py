"""Charts of the open simplex.

* additive log-ratio ``psi``: R^{J-1} -> simplex, ``x_j = e^{t_j}/S(t)``,
  ``x_J = 1/S(t)`` with ``S(t) = 1 + sum_r e^{t_r}``;
* orthant chart ``phi``: R_{>0}^{J-1} -> simplex, ``x_j = y_j/(1+Y)``,
  ``x_J = 1/(1+Y)``.

The baseline coordinate is always the last one. To use another baseline,
permute coordinates before and after.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .kernels import InvertedDirichlet, SimplexPoint, as_orthant_point, kernel_log_density
from .numeric_core import log_normalizer, positive_vector

FD_STEP = 1e-6


@dataclass(frozen=True)
class LogRatioPoint:
    t: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        if t.ndim == 0:
            t = t[None]
        if not np.all(np.isfinite(t)):
            raise ValueError("log-ratio coordinates must be finite")
        object.__setattr__(self, "t", t)

    @property
    def log_S(self):
        """``log S(t)``, computed stably."""
        zeros = np.zeros(self.t.shape[:-1] + (1,))
        return logsumexp(np.concatenate([self.t, zeros], axis=-1), axis=-1)


@dataclass(frozen=True)
class OrthantPoint:
    y: np.ndarray

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float)
        if y.ndim == 0:
            y = y[None]
        object.__setattr__(self, "y", as_orthant_point(y, y.shape[-1]))

    @property
    def Y(self):
        return self.y.sum(axis=-1)


def _t(t) -> LogRatioPoint:
    return t if isinstance(t, LogRatioPoint) else LogRatioPoint(t)


def _y(y) -> OrthantPoint:
    return y if isinstance(y, OrthantPoint) else OrthantPoint(y)


def _x(x) -> SimplexPoint:
    if isinstance(x, SimplexPoint):
        return x
    arr = np.asarray(x, dtype=float)
    return SimplexPoint.from_full(arr)


def alr_transform(x) -> LogRatioPoint:
    """``t_j = log(x_j / x_J)`` for a full simplex point."""
    x = _x(x).x
    return LogRatioPoint(np.log(x[..., :-1]) - np.log(x[..., -1:]))


def alr_inverse(t) -> SimplexPoint:
    t = _t(t)
    zeros = np.zeros(t.t.shape[:-1] + (1,))
    z = np.concatenate([t.t, zeros], axis=-1)
    x = np.exp(z - logsumexp(z, axis=-1, keepdims=True))
    return SimplexPoint.from_full(x / x.sum(axis=-1, keepdims=True))


def alr_jacobian_det(x):
    """Absolute Jacobian determinant of ``t -> (x_1, ..., x_{J-1})``: ``prod_j x_j``."""
    return _scalar(np.prod(_x(x).x, axis=-1))


def alr_log_density(alpha, t):
    """``log g_alpha(t) = log c(alpha) + <alpha_{1:J-1}, t> - alpha_+ log S(t)``."""
    a = np.asarray([float(v) for v in positive_vector(alpha)])
    t = _t(t)
    if t.t.shape[-1] != len(a) - 1:
        raise ValueError(f"expected {len(a) - 1} log-ratio coordinates, got {t.t.shape[-1]}")
    return _scalar(log_normalizer(a) + t.t @ a[:-1] - a.sum() * t.log_S)


def alr_density(alpha, t):
    """Density of ``psi^{-1}(X)`` for ``X ~ Dir(alpha)``."""
    return _scalar(np.exp(alr_log_density(alpha, t)))


def chart_transform(y) -> SimplexPoint:
    y = _y(y)
    denom = 1.0 + y.Y[..., None]
    x = np.concatenate([y.y / denom, 1.0 / denom], axis=-1)
    return SimplexPoint.from_full(x / x.sum(axis=-1, keepdims=True))


def chart_inverse(x) -> OrthantPoint:
    """``y_j = x_j / x_J``."""
    x = _x(x).x
    return OrthantPoint(x[..., :-1] / x[..., -1:])


def chart_jacobian_det(y):
    """``(1 + Y)^{-J}`` with J = dim(y) + 1."""
    y = _y(y)
    J = y.y.shape[-1] + 1
    return _scalar((1.0 + y.Y) ** (-J))


def transported_log_density(alpha, y):
    """Log of ``h_alpha(y)``, the inverted Dirichlet density."""
    return kernel_log_density(InvertedDirichlet(alpha), _y(y).y)


def fd_jacobian_det(func, z, step: float = FD_STEP) -> float:
    """Central finite-difference determinant of ``z -> func(z)`` at one point.

    ``func`` maps a vector of length d to a vector of length d; the step for
    coordinate k is ``step * max(1, |z_k|)``.
    """
    z = np.asarray(z, dtype=float)
    d = z.shape[0]
    jac = np.empty((d, d))
    for k in range(d):
        h = step * max(1.0, abs(z[k]))
        zp, zm = z.copy(), z.copy()
        zp[k] += h
        zm[k] -= h
        jac[:, k] = (np.asarray(func(zp)) - np.asarray(func(zm))) / (2 * h)
    return float(abs(np.linalg.det(jac)))


def alr_jacobian_fd(x, step: float = FD_STEP) -> float:
    """Finite-difference oracle for :func:`alr_jacobian_det`."""
    t0 = alr_transform(x).t
    return fd_jacobian_det(lambda t: alr_inverse(t).coords, t0, step)


def chart_jacobian_fd(y, step: float = FD_STEP) -> float:
    """Finite-difference oracle for :func:`chart_jacobian_det`."""
    y0 = _y(y).y
    return fd_jacobian_det(lambda v: chart_transform(v).coords, y0, step)


def permute_baseline(x, baseline: int):
    """Move coordinate ``baseline`` (1-based) to the last position."""
    arr = np.asarray(getattr(x, "x", x), dtype=float)
    J = arr.shape[-1]
    order = [j for j in range(J) if j != baseline - 1] + [baseline - 1]
    return arr[..., order]


def _scalar(value):
    value = np.asarray(value)
    return float(value) if value.ndim == 0 else value

