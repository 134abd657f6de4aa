"""Spatial spread of derivative kernels and its offset from continuous theory."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import sqrt

import numpy as np
from numpy.polynomial import hermite_e
from scipy.integrate import quad

from .kernels1d import MAX_ORDER, MethodId, derivative_kernel, gaussian_derivative


@dataclass(frozen=True)
class SpreadReport:
    method: MethodId
    order: int
    sigma: float
    spread: float
    offset: float


def abs_variance(coeffs) -> float:
    """Variance of |h| over offsets -R..R for a centred coefficient array."""
    h = np.abs(np.asarray(coeffs, dtype=float))
    mass = h.sum()
    if mass == 0:
        raise ValueError("variance of an all-zero kernel is undefined")
    r = (len(h) - 1) // 2
    n = np.arange(-r, r + 1, dtype=float)
    mean = np.dot(n, h) / mass
    return float(np.dot(n * n, h) / mass - mean * mean)


def discrete_abs_variance(kernel) -> float:
    """V(|h|) of a ``DiscreteKernel``, ``DifferenceOp`` or coefficient array."""
    coeffs = kernel.coeffs if hasattr(kernel, "coeffs") else kernel
    return abs_variance(coeffs)


@lru_cache(maxsize=None)
def continuous_abs_spread(order: int, s: float) -> float:
    """sqrt(V(|g_{x^order}(.; s)|)) by adaptive quadrature.

    |g_{x^a}| is even, so the mean vanishes and only the half line is
    integrated, split at the zeros of the Hermite factor.
    """
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in [0, {MAX_ORDER}], got {order}")
    if not np.isfinite(s) or s <= 0:
        raise ValueError(f"scale parameter must be > 0, got {s}")
    sigma = sqrt(s)
    if order:
        roots = hermite_e.hermeroots([0] * order + [1]).real
    else:
        roots = np.array([])
    knots = [0.0] + sorted(sigma * r for r in roots if r > 1e-12) + [12.0 * sigma]

    def h(x):
        return abs(float(gaussian_derivative(x, s, order)))

    num = den = 0.0
    for a, b in zip(knots[:-1], knots[1:]):
        num += quad(lambda x: x * x * h(x), a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
        den += quad(h, a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
    return sqrt(num / den)


def spread_report(method: MethodId, order: int, s: float) -> SpreadReport:
    kernel = derivative_kernel(method, float(s), order)
    spread = sqrt(discrete_abs_variance(kernel))
    return SpreadReport(method, order, sqrt(s), spread, spread - continuous_abs_spread(order, float(s)))
