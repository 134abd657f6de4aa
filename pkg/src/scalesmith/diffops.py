"""Central difference operators and direct 1-D convolution.

A difference operator is stored as its stencil: ``taps[r + n]`` is the weight
applied to the sample ``f(x + n)``, so ``central_difference(1).taps`` reads
(-1/2, 0, +1/2).  ``coeffs`` gives the same operator as a convolution kernel,
``K(n) = taps(-n)``, which is the orientation every ``DiscreteKernel`` uses:
``(K * f)(x) = sum_n K(n) f(x - n)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

MAX_ORDER = 4

_DX = np.array([-0.5, 0.0, 0.5])
_DXX = np.array([1.0, -2.0, 1.0])


class BoundaryPolicy(enum.Enum):
    STRICT = "strict"
    REPLICATE = "replicate"


class BoundaryError(ValueError):
    """Kernel support does not fit inside the signal under the strict policy."""


@dataclass(frozen=True, eq=False)
class DifferenceOp:
    order: int
    taps: np.ndarray

    @property
    def radius(self) -> int:
        return (len(self.taps) - 1) // 2

    @property
    def coeffs(self) -> np.ndarray:
        return self.taps[::-1]

    def apply_at(self, values: np.ndarray) -> float:
        """Apply the stencil to ``values`` centred on the evaluation point."""
        return float(np.dot(self.taps, values))


def central_difference(order: int) -> DifferenceOp:
    """Central difference stencil of the given order (0..4).

    Odd orders are delta_x composed with powers of delta_xx, even orders are
    powers of delta_xx; order 0 is the identity.
    """
    if not 0 <= order <= MAX_ORDER:
        raise ValueError(f"difference order must be in [0, {MAX_ORDER}], got {order}")
    taps = np.array([1.0])
    if order % 2 == 1:
        taps = _DX.copy()
    for _ in range(order // 2):
        taps = np.convolve(taps, _DXX)
    taps.flags.writeable = False
    return DifferenceOp(order, taps)


def _pad(signal: np.ndarray, radius: int, axis: int, boundary: BoundaryPolicy) -> np.ndarray:
    if boundary is BoundaryPolicy.REPLICATE:
        width = [(0, 0)] * signal.ndim
        width[axis] = (radius, radius)
        return np.pad(signal, width, mode="edge")
    if signal.shape[axis] < 2 * radius + 1:
        raise BoundaryError(
            f"kernel of radius {radius} needs {2 * radius + 1} samples, "
            f"signal has {signal.shape[axis]}"
        )
    return signal


def convolve_axis(data, coeffs, axis: int = -1,
                  boundary: BoundaryPolicy = BoundaryPolicy.STRICT) -> np.ndarray:
    """Direct convolution of ``data`` with odd-length ``coeffs`` along one axis.

    ``coeffs[R + n]`` holds K(n).  Under STRICT the output keeps only the
    samples whose full kernel support lies inside the input (length shrinks
    by 2R); under REPLICATE the input is edge-extended and the length kept.
    """
    data = np.asarray(data, dtype=float)
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or len(coeffs) % 2 != 1:
        raise ValueError("kernel must be a 1-D array of odd length")
    radius = (len(coeffs) - 1) // 2
    axis = axis % data.ndim
    padded = _pad(data, radius, axis, boundary)
    windows = sliding_window_view(padded, len(coeffs), axis=axis)
    # windows[..., m] holds f(x - R + m); reverse the kernel so that K(n) meets f(x - n)
    out = windows @ coeffs[::-1]
    return np.ascontiguousarray(out)


def convolve_1d(signal, kernel, boundary: BoundaryPolicy = BoundaryPolicy.STRICT) -> np.ndarray:
    """Discrete convolution ``out(x) = sum_n K(n) signal(x - n)``.

    ``kernel`` may be a ``DiscreteKernel``, a ``DifferenceOp`` or a plain
    coefficient array.
    """
    signal = np.asarray(signal, dtype=float)
    if signal.ndim != 1 or signal.size == 0:
        raise ValueError("signal must be a non-empty 1-D array")
    coeffs = kernel.coeffs if hasattr(kernel, "coeffs") else kernel
    return convolve_axis(signal, coeffs, 0, boundary)


def compose(a, b) -> np.ndarray:
    """Full convolution of two centred coefficient arrays (result stays centred)."""
    return np.convolve(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
