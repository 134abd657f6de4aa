"""Discrete Gaussian-derivative kernels, spread measures and scale-selection benchmarks."""

__version__ = "0.1.0"

from .diffops import BoundaryError, BoundaryPolicy, DifferenceOp, central_difference
from .grid2d import Detector, Image2D, ScaleSpace
from .kernels1d import DiscreteKernel, MethodId, SmoothingKernel, derivative_kernel, disc_gaussian
from .measures import SpreadReport, spread_report
from .scalesel import NoExtremumError, ScaleEstimate, ScaleGrid, ScaleSignature, scale_signature, select_scale
from .signals import ModelKind, ModelSpec, make_model
from .specfun import BesselSequence, erf, scaled_bessel_i

__all__ = [
    "BesselSequence", "BoundaryError", "BoundaryPolicy", "Detector", "DifferenceOp",
    "DiscreteKernel", "Image2D", "MethodId", "ModelKind", "ModelSpec", "NoExtremumError",
    "ScaleEstimate", "ScaleGrid", "ScaleSignature", "ScaleSpace", "SmoothingKernel",
    "SpreadReport", "central_difference", "derivative_kernel", "disc_gaussian", "erf",
    "make_model", "scale_signature", "scaled_bessel_i", "select_scale", "spread_report",
]
