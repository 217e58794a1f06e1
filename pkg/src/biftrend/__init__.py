"""Bifractional-Brownian-driven linear SDEs and windowed trend estimation.

Layers, bottom up: `bifbm` (covariance model), `sampling` (exact Gaussian
path sampling), `trend` (deterministic trend expressions), `sde`
(pathwise integration and the zero-noise limit), `kernels` and
`estimators` (windowed increment averages), `asymptotics` (rates, limit
variance, bias constants), `harness` (seeded Monte Carlo experiments),
`report` and `cli` (figures, delimited output, manifests).
"""

__version__ = "0.1.0"

from .bifbm import BifBmParams, covariance, covariance_density, validate_params
from .errors import BiftrendError
from .kernels import kernel_from_name, poly_kernel, uniform_kernel
from .sampling import SamplePath, TimeGrid, build_factor, sample_paths
from .sde import limit_path, simulate
from .trend import evaluate, parse

__all__ = [
    "__version__",
    "BifBmParams",
    "BiftrendError",
    "SamplePath",
    "TimeGrid",
    "build_factor",
    "covariance",
    "covariance_density",
    "evaluate",
    "kernel_from_name",
    "limit_path",
    "parse",
    "poly_kernel",
    "sample_paths",
    "simulate",
    "uniform_kernel",
    "validate_params",
]
