"""2-D images, separable derivative responses and scale-normalised detectors."""
from __future__ import annotations

import enum
import threading
import weakref
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .diffops import BoundaryError, BoundaryPolicy, central_difference, convolve_axis
from .kernels1d import MethodId, cached_smoothing, derivative_kernel

# stencil radius needed for derivative orders up to 4
_NEIGHBOURHOOD = 2


@dataclass(frozen=True, eq=False)
class Image2D:
    """Rectangular grid of finite reals, ``data[y, x]`` in row-major order."""

    data: np.ndarray

    def __post_init__(self):
        if self.data.ndim != 2 or 0 in self.data.shape:
            raise ValueError("image data must be a non-empty 2-D array")
        if not np.all(np.isfinite(self.data)):
            raise ValueError("image data must be finite")

    @classmethod
    def from_array(cls, array) -> "Image2D":
        data = np.array(array, dtype=float, copy=True)
        data.flags.writeable = False
        return cls(data)

    @property
    def width(self) -> int:
        return self.data.shape[1]

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def center(self) -> tuple[int, int]:
        return self.height // 2, self.width // 2

    def center_value(self) -> float:
        cy, cx = self.center
        return float(self.data[cy, cx])


class Detector(enum.Enum):
    LAPLACIAN = "LaplacianBlob"
    DET_HESSIAN = "DetHessianBlob"
    GRADMAG = "GradMagEdge"
    RIDGE = "PrincCurvRidge"

    @property
    def gamma(self) -> float:
        return {"LaplacianBlob": 1.0, "DetHessianBlob": 1.0,
                "GradMagEdge": 0.5, "PrincCurvRidge": 0.75}[self.value]

    @property
    def polarity(self) -> str:
        """Which extremum over scale is sought: 'min' or 'max'."""
        return "min" if self in (Detector.LAPLACIAN, Detector.RIDGE) else "max"

    @property
    def model(self) -> str:
        return {"LaplacianBlob": "blob", "DetHessianBlob": "blob",
                "GradMagEdge": "edge", "PrincCurvRidge": "ridge"}[self.value]

    @property
    def orders(self) -> tuple[tuple[int, int], ...]:
        """Partial derivatives (order_x, order_y) the detector combines."""
        if self is Detector.LAPLACIAN:
            return ((2, 0), (0, 2))
        if self is Detector.GRADMAG:
            return ((1, 0), (0, 1))
        return ((2, 0), (0, 2), (1, 1))

    @classmethod
    def parse(cls, name: str) -> "Detector":
        for d in cls:
            if name in (d.value, d.name):
                return d
        raise ValueError(f"unknown detector {name!r}; choose from {[d.value for d in cls]}")


def combine(detector: Detector, jet: dict, s: float):
    """Scale-normalised detector value from partial derivatives (scalars or arrays)."""
    if detector is Detector.LAPLACIAN:
        return s * (jet[2, 0] + jet[0, 2])
    if detector is Detector.DET_HESSIAN:
        return s * s * (jet[2, 0] * jet[0, 2] - jet[1, 1] ** 2)
    if detector is Detector.GRADMAG:
        return s ** (detector.gamma / 2) * np.sqrt(jet[1, 0] ** 2 + jet[0, 1] ** 2)
    lxx, lyy, lxy = jet[2, 0], jet[0, 2], jet[1, 1]
    return s ** detector.gamma * (lxx + lyy - np.sqrt((lxx - lyy) ** 2 + 4.0 * lxy**2))


class _LRU(OrderedDict):
    def __init__(self, maxsize: int):
        super().__init__()
        self.maxsize = maxsize

    def fetch(self, key, compute):
        if key in self:
            self.move_to_end(key)
            return self[key]
        value = compute()
        self[key] = value
        if len(self) > self.maxsize:
            self.popitem(last=False)
        return value


def support_radius(method: MethodId, s: float, max_order: int = 2) -> int:
    """Largest distance from the evaluation point that a response at scale s reads."""
    if method.central_differences:
        return cached_smoothing(method.smoothing, s).radius + _NEIGHBOURHOOD
    return max(derivative_kernel(method, s, o).radius for o in range(max_order + 1))


class ScaleSpace:
    """Derivative responses of one image, with the smoothing stage shared.

    For central-difference methods the image is smoothed once per
    (method, scale) and the result cached; difference stencils of any order
    are then applied to the cached data.  Instances are not meant to be
    shared between threads; ``engine_for`` hands out a lock-guarded one.
    """

    def __init__(self, image: Image2D, cache_size: int = 80):
        self.image = image
        self._neighbourhoods = _LRU(cache_size)
        self._smoothed = _LRU(cache_size)

    # -- centre evaluation -------------------------------------------------

    def _patch(self, ry: int, rx: int) -> np.ndarray:
        cy, cx = self.image.center
        h, w = self.image.data.shape
        if cy - ry < 0 or cx - rx < 0 or cy + ry >= h or cx + rx >= w:
            raise BoundaryError(
                f"support radius ({ry}, {rx}) exceeds the {w}x{h} image around its centre"
            )
        return self.image.data[cy - ry: cy + ry + 1, cx - rx: cx + rx + 1]

    def smoothed_neighbourhood(self, method: MethodId, s: float) -> np.ndarray:
        """Smoothed values on the 5x5 block around the centre."""
        def compute():
            k = cached_smoothing(method.smoothing, s).coeffs
            r = (len(k) - 1) // 2 + _NEIGHBOURHOOD
            patch = self._patch(r, r)
            return convolve_axis(convolve_axis(patch, k, axis=1), k, axis=0)
        return self._neighbourhoods.fetch((method, float(s)), compute)

    def center_derivative(self, method: MethodId, order_x: int, order_y: int, s: float,
                          equivalent: bool = False) -> float:
        """L_{x^a y^b} at the image centre.

        With ``equivalent=True`` a central-difference method is evaluated by
        direct convolution with its equivalent kernels instead of the shared
        smoothing path; the two agree to rounding.
        """
        if method.central_differences and not equivalent:
            block = self.smoothed_neighbourhood(method, s)
            tx = central_difference(order_x)
            ty = central_difference(order_y)
            c = _NEIGHBOURHOOD
            sub = block[c - ty.radius: c + ty.radius + 1, c - tx.radius: c + tx.radius + 1]
            return float(ty.taps @ sub @ tx.taps)
        kx = derivative_kernel(method, float(s), order_x).coeffs
        ky = derivative_kernel(method, float(s), order_y).coeffs
        patch = self._patch((len(ky) - 1) // 2, (len(kx) - 1) // 2)
        return float(ky[::-1] @ patch @ kx[::-1])

    def center_jet(self, method: MethodId, s: float, orders) -> dict:
        return {o: self.center_derivative(method, o[0], o[1], s) for o in orders}

    def detector_value(self, detector: Detector, method: MethodId, s: float) -> float:
        return float(combine(detector, self.center_jet(method, s, detector.orders), s))

    # -- full-image responses ----------------------------------------------

    def smoothed(self, method: MethodId, s: float,
                 boundary: BoundaryPolicy = BoundaryPolicy.STRICT) -> np.ndarray:
        def compute():
            k = cached_smoothing(method.smoothing, s).coeffs
            tmp = convolve_axis(self.image.data, k, axis=1, boundary=boundary)
            return convolve_axis(tmp, k, axis=0, boundary=boundary)
        return self._smoothed.fetch((method, float(s), boundary), compute)

    def response(self, method: MethodId, order_x: int, order_y: int, s: float,
                 boundary: BoundaryPolicy = BoundaryPolicy.STRICT,
                 x_first: bool = True) -> Image2D:
        """Full-image derivative response.

        Under STRICT the output shrinks by the support radius along each axis,
        keeping the centre pixel at the centre.
        """
        if method.central_differences:
            base = self.smoothed(method, s, boundary)
            kx = central_difference(order_x).coeffs
            ky = central_difference(order_y).coeffs
        else:
            base = self.image.data
            kx = derivative_kernel(method, float(s), order_x).coeffs
            ky = derivative_kernel(method, float(s), order_y).coeffs
        return Image2D.from_array(separable(base, kx, ky, boundary, x_first))

    def detector_map(self, detector: Detector, method: MethodId, s: float,
                     boundary: BoundaryPolicy = BoundaryPolicy.REPLICATE) -> np.ndarray:
        jet = {o: self.response(method, o[0], o[1], s, boundary).data for o in detector.orders}
        if boundary is BoundaryPolicy.STRICT:
            jet = _crop_common(jet)
        return np.asarray(combine(detector, jet, s))


def separable(data, kx, ky, boundary: BoundaryPolicy = BoundaryPolicy.STRICT,
              x_first: bool = True) -> np.ndarray:
    if x_first:
        return convolve_axis(convolve_axis(data, kx, axis=1, boundary=boundary),
                             ky, axis=0, boundary=boundary)
    return convolve_axis(convolve_axis(data, ky, axis=0, boundary=boundary),
                         kx, axis=1, boundary=boundary)


def _crop_common(arrays: dict) -> dict:
    h = min(a.shape[0] for a in arrays.values())
    w = min(a.shape[1] for a in arrays.values())
    out = {}
    for key, a in arrays.items():
        dy = (a.shape[0] - h) // 2
        dx = (a.shape[1] - w) // 2
        out[key] = a[dy: dy + h, dx: dx + w]
    return out


_engines: "weakref.WeakKeyDictionary[Image2D, ScaleSpace]" = weakref.WeakKeyDictionary()
_engines_lock = threading.Lock()


def engine_for(image: Image2D) -> ScaleSpace:
    with _engines_lock:
        engine = _engines.get(image)
        if engine is None:
            engine = _engines[image] = ScaleSpace(image)
        return engine


def derivative_response(image: Image2D, method: MethodId, order_x: int, order_y: int,
                        s: float, boundary: BoundaryPolicy = BoundaryPolicy.STRICT) -> Image2D:
    return engine_for(image).response(method, order_x, order_y, s, boundary)


def laplacian_norm(image: Image2D, method: MethodId, s: float) -> float:
    return engine_for(image).detector_value(Detector.LAPLACIAN, method, s)


def dethessian_norm(image: Image2D, method: MethodId, s: float) -> float:
    return engine_for(image).detector_value(Detector.DET_HESSIAN, method, s)


def gradmag_norm(image: Image2D, method: MethodId, s: float) -> float:
    return engine_for(image).detector_value(Detector.GRADMAG, method, s)


def ridge_strength_norm(image: Image2D, method: MethodId, s: float) -> float:
    return engine_for(image).detector_value(Detector.RIDGE, method, s)


def write_pgm(path, values, mode: str = "signfold", comment: str = "") -> Path:
    """Write a 16-bit binary PGM (P5, big-endian samples).

    mode 'signfold': pixel = round(65535 * |v| / max|v|), sign discarded.
    mode 'minmax':   pixel = round(65535 * (v - min) / (max - min)).
    A constant image maps to 0.
    """
    a = np.asarray(values, dtype=float)
    if mode == "signfold":
        a = np.abs(a)
        lo, hi = 0.0, float(a.max())
        note = "signfold: pixel = round(65535 * |v| / max|v|); negative values shown by magnitude"
    elif mode == "minmax":
        lo, hi = float(a.min()), float(a.max())
        note = "minmax: pixel = round(65535 * (v - min) / (max - min))"
    else:
        raise ValueError(f"unknown PGM mode {mode!r}")
    span = hi - lo
    scaled = np.zeros_like(a) if span == 0 else (a - lo) / span
    pixels = np.rint(scaled * 65535).astype(">u2")
    lines = [f"# scalesmith {note}", f"# range {lo!r} {hi!r}"]
    if comment:
        lines += [f"# {line}" for line in comment.splitlines()]
    header = "P5\n" + "\n".join(lines) + f"\n{a.shape[1]} {a.shape[0]}\n65535\n"
    path = Path(path)
    path.write_bytes(header.encode("ascii") + pixels.tobytes())
    return path


def read_pgm(path) -> tuple[np.ndarray, list[str]]:
    """Read a 16-bit P5 file written by ``write_pgm``; returns (pixels, comments)."""
    raw = Path(path).read_bytes()
    pos = 0
    tokens: list[str] = []
    comments: list[str] = []
    while len(tokens) < 4:
        end = raw.index(b"\n", pos)
        line = raw[pos:end].decode("ascii")
        pos = end + 1
        if line.startswith("#"):
            comments.append(line[1:].strip())
        else:
            tokens += line.split()
    if tokens[0] != "P5" or tokens[3] != "65535":
        raise ValueError("not a 16-bit P5 file")
    w, h = int(tokens[1]), int(tokens[2])
    pixels = np.frombuffer(raw[pos:], dtype=">u2").reshape(h, w)
    return pixels.astype(np.uint16), comments
