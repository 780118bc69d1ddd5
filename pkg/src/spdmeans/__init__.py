"""Means, distances and property checks on the cone of SPD matrices."""
from .exceptions import (
    DimMismatchError,
    DomainError,
    NonSquareError,
    NotDensityError,
    NotPositiveDefiniteError,
    NotSymmetricError,
    ParameterError,
    SpdError,
    UnknownPropertyError,
)
from .linalg import DensityMatrix, EigenDecomposition, SpdMatrix, eigh, fun_calc, spd_power, validate_spd
from .means import (
    Family,
    MeanSpec,
    arithmetic,
    diamond,
    evaluate,
    geodesic,
    geometric,
    harmonic,
    heron,
    power_mean_bs,
    power_mean_ka,
    weight_on_b,
)
from .metrics import MetricKind, d_bures, d_hellinger, d_logdet, d_riemannian, distance, fidelity
from .properties import CurveSpec, Observation, PropertyReport
from .search import SamplerConfig, hunt, paper_registry, random_density, random_spd

__version__ = "0.1.0"
