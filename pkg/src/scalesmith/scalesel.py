"""Scale search over a log-spaced grid with parabolic refinement."""
from __future__ import annotations

from dataclasses import dataclass, field
from math import exp, log

import numpy as np

from .grid2d import Detector, ScaleSpace
from .kernels1d import MethodId
from .signals import ModelKind, ModelSpec, make_model, model_size


class NoExtremumError(ValueError):
    """The signature has no extremum (all values equal)."""


@dataclass(frozen=True, eq=False)
class ScaleGrid:
    sigma_min: float
    sigma_max: float
    levels: int
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 < self.sigma_min < self.sigma_max:
            raise ValueError("need 0 < sigma_min < sigma_max")
        if self.levels < 3:
            raise ValueError("a scale grid needs at least 3 levels")
        values = np.geomspace(self.sigma_min, self.sigma_max, self.levels)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def log_step(self) -> float:
        return (log(self.sigma_max) - log(self.sigma_min)) / (self.levels - 1)

    def __len__(self) -> int:
        return self.levels


@dataclass(frozen=True, eq=False)
class ScaleSignature:
    grid: ScaleGrid
    values: np.ndarray

    def __post_init__(self):
        if len(self.values) != len(self.grid):
            raise ValueError("signature length does not match its grid")


@dataclass(frozen=True)
class ScaleEstimate:
    sigma_hat: float
    level_index: int
    interpolated: bool


def _check_model(spec: ModelSpec, detector: Detector) -> None:
    if spec.kind is not ModelKind(detector.model):
        raise ValueError(f"{detector.value} expects a {detector.model} model, got {spec.kind.value}")


def signature_of(engine: ScaleSpace, detector: Detector, method: MethodId,
                 grid: ScaleGrid) -> ScaleSignature:
    values = np.array([engine.detector_value(detector, method, float(sig * sig))
                       for sig in grid.values])
    return ScaleSignature(grid, values)


def scale_signature(spec: ModelSpec, detector: Detector, grid: ScaleGrid) -> ScaleSignature:
    """Detector response at the image centre for every level of the grid."""
    _check_model(spec, detector)
    if spec.size is None:
        spec = ModelSpec(spec.kind, spec.sigma0, spec.method,
                         model_size(spec.sigma0, spec.method, grid.sigma_max))
    engine = ScaleSpace(make_model(spec), cache_size=len(grid))
    return signature_of(engine, detector, spec.method, grid)


def _interior_extrema(v: np.ndarray) -> np.ndarray:
    # local maxima of v; plateaus count once, at their first sample
    inner = np.arange(1, len(v) - 1)
    return inner[(v[inner] > v[inner - 1]) & (v[inner] >= v[inner + 1])]


def select_scale(signature: ScaleSignature, polarity: str) -> ScaleEstimate:
    """Local extremum over scale of the requested polarity.

    Among interior local extrema the one with the largest absolute response
    wins and is refined by a parabola through its neighbours in log sigma.
    Without an interior extremum the extreme endpoint is returned unrefined.
    """
    v = np.asarray(signature.values, dtype=float)
    if v.size == 0:
        raise NoExtremumError("empty signature")
    if np.all(v == v[0]):
        raise NoExtremumError("signature is flat")
    if polarity == "min":
        oriented = -v
    elif polarity == "max":
        oriented = v
    else:
        raise ValueError(f"polarity must be 'min' or 'max', got {polarity!r}")
    sigmas = signature.grid.values
    candidates = _interior_extrema(oriented)
    if len(candidates) == 0:
        i = 0 if oriented[0] >= oriented[-1] else len(v) - 1
        return ScaleEstimate(float(sigmas[i]), i, False)
    i = int(candidates[np.argmax(np.abs(v[candidates]))])
    left, mid, right = v[i - 1], v[i], v[i + 1]
    curvature = left - 2.0 * mid + right
    if curvature == 0:
        return ScaleEstimate(float(sigmas[i]), i, False)
    h = signature.grid.log_step
    shift = 0.5 * h * (left - right) / curvature
    return ScaleEstimate(exp(log(sigmas[i]) + shift), i, True)


def relative_error(sigma_hat: float, sigma_ref: float) -> float:
    if not sigma_ref > 0:
        raise ValueError("reference scale must be positive")
    return sigma_hat / sigma_ref - 1.0


def estimate(method: MethodId, detector: Detector, sigma0: float, grid: ScaleGrid) -> ScaleEstimate:
    spec = ModelSpec(ModelKind(detector.model), sigma0, method)
    return select_scale(scale_signature(spec, detector, grid), detector.polarity)
