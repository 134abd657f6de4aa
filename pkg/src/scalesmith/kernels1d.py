"""1-D discrete smoothing kernels and Gaussian derivative approximations.

Every kernel is stored in convolution orientation: ``coeffs[R + n]`` is K(n)
and ``(K * f)(x) = sum_n K(n) f(x - n)``.  Derivative kernels therefore carry
the sign of the true derivative, e.g. the sampled first-order kernel is
positive at n = -1.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from math import ceil, pi, sqrt

import numpy as np

from . import diffops
from .specfun import disc_gauss_tail, erf, erfc

MAX_ORDER = 4

# Gaussian-family kernels keep R = max(4, ceil(TRUNCATION_SIGMAS * sigma) + order);
# the neglected tail mass is then below 2e-15.
TRUNCATION_SIGMAS = 8.0
MIN_RADIUS = 4

# Discrete-analogue kernels drop trailing Bessel values below this.
DISC_TRIM = 1e-17


class SmoothingKernel(enum.Enum):
    SAMPLED = "SampledGauss"
    NORM_SAMPLED = "NormSampledGauss"
    INTEGRATED = "IntGauss"
    DISCRETE = "DiscGauss"


class MethodId(enum.Enum):
    SAMPLED_DER = "SampledDer"
    INTEGRATED_DER = "IntegratedDer"
    DISC_ANALOGUE_CD = "DiscAnalogueCD"
    HYBRID_SAMPLED_CD = "HybridSampledCD"
    HYBRID_INT_CD = "HybridIntCD"

    @property
    def smoothing(self) -> SmoothingKernel:
        """Smoothing kernel paired with this method, also used for model signals."""
        return _SMOOTHING[self]

    @property
    def central_differences(self) -> bool:
        return self in _CD_METHODS

    @classmethod
    def parse(cls, name: str) -> "MethodId":
        for m in cls:
            if name in (m.value, m.name):
                return m
        raise ValueError(f"unknown method {name!r}; choose from {[m.value for m in cls]}")


_SMOOTHING = {
    MethodId.SAMPLED_DER: SmoothingKernel.SAMPLED,
    MethodId.INTEGRATED_DER: SmoothingKernel.INTEGRATED,
    MethodId.DISC_ANALOGUE_CD: SmoothingKernel.DISCRETE,
    MethodId.HYBRID_SAMPLED_CD: SmoothingKernel.NORM_SAMPLED,
    MethodId.HYBRID_INT_CD: SmoothingKernel.INTEGRATED,
}
_CD_METHODS = frozenset(
    {MethodId.DISC_ANALOGUE_CD, MethodId.HYBRID_SAMPLED_CD, MethodId.HYBRID_INT_CD}
)
ALL_METHODS = tuple(MethodId)


@dataclass(frozen=True, eq=False)
class DiscreteKernel:
    """Finite symmetric-support kernel with offsets -R..R."""

    coeffs: np.ndarray
    scale: float
    order: int
    name: str = ""

    def __post_init__(self):
        if self.coeffs.ndim != 1 or len(self.coeffs) % 2 != 1:
            raise ValueError("kernel coefficients must be a 1-D array of odd length")

    @property
    def radius(self) -> int:
        return (len(self.coeffs) - 1) // 2

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(-self.radius, self.radius + 1)

    def at(self, n: int) -> float:
        if abs(n) > self.radius:
            return 0.0
        return float(self.coeffs[self.radius + n])

    def moment(self, k: int) -> float:
        return float(np.sum(self.offsets.astype(float) ** k * self.coeffs))


def _frozen(coeffs: np.ndarray, s: float, order: int, name: str) -> DiscreteKernel:
    coeffs = np.ascontiguousarray(coeffs, dtype=float)
    coeffs.flags.writeable = False
    return DiscreteKernel(coeffs, float(s), order, name)


def default_radius(s: float, order: int = 0) -> int:
    return max(MIN_RADIUS, int(ceil(TRUNCATION_SIGMAS * sqrt(s))) + order)


def _check_scale(s: float, allow_zero: bool = False) -> None:
    if not np.isfinite(s) or s < 0 or (s == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise ValueError(f"scale parameter must be {bound}, got {s}")


def _check_order(order: int, low: int = 1) -> None:
    if not low <= order <= MAX_ORDER:
        raise ValueError(f"derivative order must be in [{low}, {MAX_ORDER}], got {order}")


def _symmetrise(coeffs: np.ndarray, parity: int) -> np.ndarray:
    # enforce exact (anti)symmetry by mirroring the non-negative half
    r = (len(coeffs) - 1) // 2
    out = coeffs.copy()
    out[:r] = parity * coeffs[r + 1:][::-1]
    if parity < 0:
        out[r] = 0.0
    return out


def gaussian(x, s: float) -> np.ndarray:
    return np.exp(-np.asarray(x, dtype=float) ** 2 / (2.0 * s)) / sqrt(2.0 * pi * s)


def gaussian_derivative(x, s: float, order: int) -> np.ndarray:
    """Continuous Gaussian derivative g_{x^order}(x; s) via its Hermite factor."""
    x = np.asarray(x, dtype=float)
    g = gaussian(x, s)
    if order == 0:
        return g
    if order == 1:
        return -(x / s) * g
    if order == 2:
        return ((x * x - s) / s**2) * g
    if order == 3:
        return -((x**3 - 3.0 * s * x) / s**3) * g
    if order == 4:
        return ((x**4 - 6.0 * s * x * x + 3.0 * s * s) / s**4) * g
    raise ValueError(f"Gaussian derivative order must be in [0, {MAX_ORDER}], got {order}")


def sampled_gaussian(s: float, radius: int | None = None) -> DiscreteKernel:
    _check_scale(s)
    r = default_radius(s) if radius is None else radius
    if r < 1:
        raise ValueError("radius must be at least 1")
    c = gaussian(np.arange(-r, r + 1), s)
    return _frozen(_symmetrise(c, 1), s, 0, SmoothingKernel.SAMPLED.value)


def norm_sampled_gaussian(s: float, radius: int | None = None) -> DiscreteKernel:
    base = sampled_gaussian(s, radius)
    c = base.coeffs / base.coeffs.sum()
    return _frozen(c, s, 0, SmoothingKernel.NORM_SAMPLED.value)


def _half_pixel_cdf_diff(n: np.ndarray, sigma: float) -> np.ndarray:
    # Phi((n + 1/2)/sigma) - Phi((n - 1/2)/sigma) for n >= 0, erfc form in the tail
    a = (n - 0.5) / (sigma * sqrt(2.0))
    b = (n + 0.5) / (sigma * sqrt(2.0))
    out = 0.5 * (erfc(a) - erfc(b))
    out[n == 0] = erf(0.5 / (sigma * sqrt(2.0)))
    return out


def integrated_gaussian(s: float, radius: int | None = None) -> DiscreteKernel:
    _check_scale(s)
    r = default_radius(s) if radius is None else radius
    if r < 1:
        raise ValueError("radius must be at least 1")
    half = _half_pixel_cdf_diff(np.arange(0, r + 1, dtype=float), sqrt(s))
    c = np.concatenate([half[:0:-1], half])
    return _frozen(c, s, 0, SmoothingKernel.INTEGRATED.value)


def disc_gaussian(s: float) -> DiscreteKernel:
    """Discrete analogue of the Gaussian, e^{-s} I_n(s).

    The Bessel sequence is computed out to the tail-rule order and trailing
    values below ``DISC_TRIM`` are dropped.
    """
    _check_scale(s, allow_zero=True)
    seq = disc_gauss_tail(s).values
    above = np.nonzero(seq >= DISC_TRIM)[0]
    r = int(above[-1]) if len(above) else 0
    half = seq[: r + 1]
    c = np.concatenate([half[:0:-1], half])
    return _frozen(c, s, 0, SmoothingKernel.DISCRETE.value)


def smoothing_kernel(kind: SmoothingKernel, s: float) -> DiscreteKernel:
    if kind is SmoothingKernel.DISCRETE:
        return disc_gaussian(s)
    if kind is SmoothingKernel.SAMPLED:
        return sampled_gaussian(s)
    if kind is SmoothingKernel.NORM_SAMPLED:
        return norm_sampled_gaussian(s)
    if kind is SmoothingKernel.INTEGRATED:
        return integrated_gaussian(s)
    raise ValueError(f"unknown smoothing kernel {kind!r}")


def sampled_gaussian_derivative(s: float, order: int, radius: int | None = None) -> DiscreteKernel:
    _check_scale(s)
    _check_order(order)
    r = default_radius(s, order) if radius is None else radius
    c = gaussian_derivative(np.arange(-r, r + 1), s, order)
    return _frozen(_symmetrise(c, (-1) ** order), s, order, MethodId.SAMPLED_DER.value)


def integrated_gaussian_derivative(s: float, order: int, radius: int | None = None) -> DiscreteKernel:
    """Gaussian derivative integrated over each unit pixel.

    The integral of g_{x^a} over [n - 1/2, n + 1/2] is the difference of
    g_{x^(a-1)} at the two pixel edges.
    """
    _check_scale(s)
    _check_order(order)
    r = default_radius(s, order) if radius is None else radius
    n = np.arange(-r, r + 1, dtype=float)
    c = gaussian_derivative(n + 0.5, s, order - 1) - gaussian_derivative(n - 0.5, s, order - 1)
    return _frozen(_symmetrise(c, (-1) ** order), s, order, MethodId.INTEGRATED_DER.value)


def equivalent_hybrid_kernel(method: MethodId, s: float, order: int) -> DiscreteKernel:
    """Single kernel equivalent to smoothing followed by a central difference.

    For analysis only; the 2-D pipeline smooths once and applies the
    difference stencils to the smoothed data.
    """
    if not method.central_differences:
        raise ValueError(f"{method.value} is not a central-difference method")
    _check_order(order, low=0)
    smooth = smoothing_kernel(method.smoothing, s)
    op = diffops.central_difference(order)
    c = diffops.compose(op.coeffs, smooth.coeffs)
    return _frozen(_symmetrise(c, (-1) ** order), s, order, method.value)


@lru_cache(maxsize=4096)
def derivative_kernel(method: MethodId, s: float, order: int) -> DiscreteKernel:
    """The method's full equivalent kernel for derivative order 0..4."""
    _check_order(order, low=0)
    if method.central_differences:
        return equivalent_hybrid_kernel(method, s, order)
    if order == 0:
        return smoothing_kernel(method.smoothing, s)
    if method is MethodId.SAMPLED_DER:
        return sampled_gaussian_derivative(s, order)
    return integrated_gaussian_derivative(s, order)


@lru_cache(maxsize=4096)
def cached_smoothing(kind: SmoothingKernel, s: float) -> DiscreteKernel:
    return smoothing_kernel(kind, s)
