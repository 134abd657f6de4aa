"""Discrete blob, edge and ridge model images.

Each model is built with the smoothing kernel paired with the derivative
method under test, so that input and analysis use the same discretisation.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from math import ceil

import numpy as np

from .grid2d import Image2D, support_radius
from .kernels1d import DiscreteKernel, MethodId, SmoothingKernel, cached_smoothing

SIGMA_MAX = 5.0


class ModelKind(enum.Enum):
    BLOB = "blob"
    EDGE = "edge"
    RIDGE = "ridge"

    @classmethod
    def parse(cls, name: str) -> "ModelKind":
        try:
            return cls(name.lower())
        except ValueError:
            raise ValueError(f"unknown model kind {name!r}; choose from blob, edge, ridge") from None


def model_size(sigma0: float, method: MethodId, sigma_max: float = SIGMA_MAX) -> int:
    """Odd side length keeping every search scale up to sigma_max clear of the border."""
    half = max(
        int(ceil(6.0 * (sigma0 + sigma_max))),
        model_kernel(sigma0, method).radius,
        support_radius(method, sigma_max**2),
    )
    return 2 * half + 1


def model_kernel(sigma0: float, method: MethodId) -> DiscreteKernel:
    if sigma0 < 0 or (sigma0 == 0 and method.smoothing is not SmoothingKernel.DISCRETE):
        raise ValueError(f"reference scale must be positive, got {sigma0}")
    return cached_smoothing(method.smoothing, float(sigma0) ** 2)


@dataclass(frozen=True)
class ModelSpec:
    kind: ModelKind
    sigma0: float
    method: MethodId
    size: int | None = None

    def side(self, sigma_max: float = SIGMA_MAX) -> int:
        return self.size if self.size is not None else model_size(self.sigma0, self.method, sigma_max)


def _kernel_and_side(spec: ModelSpec) -> tuple[np.ndarray, int]:
    kernel = model_kernel(spec.sigma0, spec.method)
    n = spec.side()
    if n % 2 == 0:
        raise ValueError(f"model side length must be odd, got {n}")
    if n < 2 * kernel.radius + 1:
        raise ValueError(
            f"side length {n} too small for kernel radius {kernel.radius} at sigma0={spec.sigma0}"
        )
    return kernel.coeffs, n


def _centered(coeffs: np.ndarray, n: int) -> np.ndarray:
    line = np.zeros(n)
    r = (len(coeffs) - 1) // 2
    c = n // 2
    line[c - r: c + r + 1] = coeffs
    return line


def make_blob(spec: ModelSpec) -> Image2D:
    """2-D delta at the centre smoothed separably at s0 = sigma0^2."""
    coeffs, n = _kernel_and_side(spec)
    line = _centered(coeffs, n)
    return Image2D.from_array(np.outer(line, line))


def step_profile(coeffs: np.ndarray, n: int) -> np.ndarray:
    """Step H(x) in {-1/2, 0, +1/2} on the infinite line smoothed with ``coeffs``,
    sampled at offsets -(n//2)..n//2.

    Computed on the non-negative side and mirrored, so the profile is exactly
    antisymmetric with 0 at the centre.
    """
    r = (len(coeffs) - 1) // 2
    half = coeffs[r:]
    c = n // 2
    d = np.arange(1, c + 1)
    # sum_{n<d} T(n) = sum_{n<0} T(n) + sum_{0<=n<d} T(n); sum_{n>d} T(n)
    padded = np.concatenate([half, np.zeros(max(0, c + 1 - len(half)))])
    cum = np.cumsum(padded)
    left = cum[-1] - padded[0]
    below = left + cum[d - 1]
    above = cum[-1] - cum[d]
    pos = 0.5 * (below - above)
    return np.concatenate([-pos[::-1], [0.0], pos])


def make_edge(spec: ModelSpec) -> Image2D:
    """Ideal step along x smoothed along x only, constant along y."""
    coeffs, n = _kernel_and_side(spec)
    row = step_profile(coeffs, n)
    return Image2D.from_array(np.tile(row, (n, 1)))


def make_ridge(spec: ModelSpec) -> Image2D:
    """1-D delta along x smoothed along x, constant along y."""
    coeffs, n = _kernel_and_side(spec)
    return Image2D.from_array(np.tile(_centered(coeffs, n), (n, 1)))


def make_model(spec: ModelSpec) -> Image2D:
    if spec.kind is ModelKind.BLOB:
        return make_blob(spec)
    if spec.kind is ModelKind.EDGE:
        return make_edge(spec)
    return make_ridge(spec)
