"""Special functions used by the discrete kernels.

The error function is evaluated with a positive-term series below 2.5 and a
continued fraction for the complement above, so results do not depend on the
platform libm.  Exponentially scaled modified Bessel functions of integer
order are computed with Miller's backward recurrence.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import ceil, sqrt

import numpy as np

_TWO_OVER_SQRT_PI = 1.1283791670955126
_INV_SQRT_PI = 0.5641895835477563

_SERIES_LIMIT = 2.5
_SATURATION = 6.0
_CF_DEPTH = 80

BESSEL_TAIL_EPS = 1e-15
_MILLER_EXTRA = 15
_RESCALE_AT = 1e250


def _erf_series(a: np.ndarray) -> np.ndarray:
    # erf(a) = 2/sqrt(pi) exp(-a^2) sum_n 2^n a^(2n+1) / (1*3*...*(2n+1))
    term = a.copy()
    total = a.copy()
    a2 = 2.0 * a * a
    n = 0
    while True:
        n += 1
        term = term * a2 / (2 * n + 1)
        total = total + term
        if np.all(term <= 1e-17 * total):
            break
    return _TWO_OVER_SQRT_PI * np.exp(-a * a) * total


def _erfc_cf(a: np.ndarray) -> np.ndarray:
    # erfc(a) = exp(-a^2)/sqrt(pi) / (a + (1/2)/(a + 1/(a + (3/2)/(a + ...))))
    f = a.copy()
    for k in range(_CF_DEPTH, 0, -1):
        f = a + (0.5 * k) / f
    return np.exp(-a * a) * _INV_SQRT_PI / f


def erf(x):
    """Error function, absolute error below 1e-12.

    Accepts a scalar or an array and returns the same shape.  Odd symmetry is
    exact: the magnitude is computed from |x| and the sign copied back.
    """
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("erf requires finite arguments")
    a = np.abs(np.atleast_1d(xa))
    out = np.ones_like(a)
    low = a < _SERIES_LIMIT
    mid = (~low) & (a < _SATURATION)
    if np.any(low):
        out[low] = _erf_series(a[low])
    if np.any(mid):
        out[mid] = 1.0 - _erfc_cf(a[mid])
    out = np.copysign(out, np.atleast_1d(xa))
    if xa.ndim == 0:
        return float(out[0])
    return out.reshape(xa.shape)


def erfc(x):
    """Complementary error function, accurate in relative terms for large x."""
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("erfc requires finite arguments")
    v = np.atleast_1d(xa)
    a = np.abs(v)
    out = np.empty_like(a)
    low = a < _SERIES_LIMIT
    if np.any(low):
        out[low] = 1.0 - _erf_series(a[low])
    if np.any(~low):
        out[~low] = _erfc_cf(a[~low])
    out = np.where(v < 0, 2.0 - out, out)
    if xa.ndim == 0:
        return float(out[0])
    return out.reshape(xa.shape)


@dataclass(frozen=True, eq=False)
class BesselSequence:
    """Values e^{-s} I_k(s) for k = 0..N at a fixed scale s.

    Only the non-negative orders are stored; I_{-k} = I_k.
    """

    scale: float
    values: np.ndarray

    @property
    def max_order(self) -> int:
        return len(self.values) - 1

    def at(self, k: int) -> float:
        k = abs(k)
        if k > self.max_order:
            return 0.0
        return float(self.values[k])

    def total(self) -> float:
        return float(self.values[0] + 2.0 * self.values[1:].sum())


def bessel_tail_order(s: float) -> int:
    """Lower bound on the truncation order used for a Bessel sequence at scale s."""
    return int(ceil(s + 10.0 * sqrt(s) + 10.0))


def _miller(s: float, top: int) -> np.ndarray:
    t = np.zeros(top + 2)
    t[top] = 1.0
    for k in range(top, 0, -1):
        t[k - 1] = t[k + 1] + (2.0 * k / s) * t[k]
        if t[k - 1] > _RESCALE_AT:
            t[k - 1:] /= _RESCALE_AT
    t = t[: top + 1]
    return t / (t[0] + 2.0 * t[1:].sum())


def scaled_bessel_i(s: float, max_order: int) -> BesselSequence:
    """Return e^{-s} I_k(s) for k = 0..max_order.

    Uses backward recurrence I_{k-1} = I_{k+1} + (2k/s) I_k seeded above the
    truncation order, normalised by I_0 + 2 sum_k I_k = e^s.  The truncation
    order grows until the last retained value drops below ``BESSEL_TAIL_EPS``.
    """
    if not np.isfinite(s) or s < 0:
        raise ValueError(f"scale must be a finite non-negative number, got {s}")
    if max_order < 0:
        raise ValueError(f"max_order must be non-negative, got {max_order}")
    if s == 0:
        values = np.zeros(max_order + 1)
        values[0] = 1.0
        values.flags.writeable = False
        return BesselSequence(0.0, values)

    n_tail = bessel_tail_order(s)
    while True:
        seq = _miller(s, max(max_order, n_tail) + _MILLER_EXTRA)
        if seq[n_tail] < BESSEL_TAIL_EPS:
            break
        n_tail *= 2
    values = seq[: max_order + 1].copy()
    values.flags.writeable = False
    return BesselSequence(float(s), values)


def disc_gauss_tail(s: float) -> BesselSequence:
    """Bessel sequence at scale s out to the truncation order of the tail rule."""
    n_tail = bessel_tail_order(s)
    seq = scaled_bessel_i(s, n_tail)
    while seq.values[-1] >= BESSEL_TAIL_EPS:
        n_tail *= 2
        seq = scaled_bessel_i(s, n_tail)
    return seq
