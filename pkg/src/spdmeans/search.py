"""Random SPD sampling, counterexample hunting, and the printed counterexamples."""
import itertools
import zlib
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ParameterError, UnknownPropertyError
from .linalg import DensityMatrix, EigenDecomposition, SpdMatrix, validate_spd
from .means import MeanSpec, evaluate
from .metrics import MetricKind, distance


@dataclass(frozen=True)
class SamplerConfig:
    """Ranges for random SPD draws.

    Condition numbers and trace scales are drawn log-uniformly from
    ``cond_range`` and ``scale_range``; the dimension uniformly from the
    inclusive ``dim_range``.
    """

    dim_range: tuple = (2, 6)
    cond_range: tuple = (1.0, 1e4)
    scale_range: tuple = (1.0, 100.0)
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.dim_range
        if not 1 <= lo <= hi:
            raise ParameterError(f"bad dim_range {self.dim_range}")
        clo, chi = self.cond_range
        if not 1.0 <= clo <= chi:
            raise ParameterError(f"bad cond_range {self.cond_range}")
        slo, shi = self.scale_range
        if not 0.0 < slo <= shi:
            raise ParameterError(f"bad scale_range {self.scale_range}")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "dim_range", (int(lo), int(hi)))
        object.__setattr__(self, "cond_range", (float(clo), float(chi)))
        object.__setattr__(self, "scale_range", (float(slo), float(shi)))
        object.__setattr__(self, "seed", int(self.seed))

    def replace(self, **changes):
        d = {k: getattr(self, k) for k in ("dim_range", "cond_range", "scale_range", "seed")}
        d.update(changes)
        return SamplerConfig(**d)


def stream_id(name):
    """Stable integer tag for a named RNG stream."""
    return zlib.crc32(name.encode("utf-8"))


def trial_rng(seed, trial, stream=0):
    """Independent generator for one trial; order of execution is irrelevant."""
    return np.random.default_rng([int(seed), int(stream), int(trial)])


def _log_uniform(rng, lo, hi):
    if lo == hi:
        return lo
    return float(np.exp(rng.uniform(np.log(lo), np.log(hi))))


def random_orthogonal(n, rng):
    """Haar-distributed orthogonal matrix (QR of a Gaussian with sign fix)."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.sign(np.diag(R))


def random_spd(config, rng, dim=None):
    """Random SPD matrix with a prescribed condition number.

    The spectrum is log-uniform between 1 and the drawn condition number
    with both extremes pinned, rotated by a Haar orthogonal matrix and
    rescaled to a log-uniform trace.
    """
    n = int(rng.integers(config.dim_range[0], config.dim_range[1] + 1)) if dim is None else dim
    cond = _log_uniform(rng, *config.cond_range)
    if n == 1:
        spectrum = np.ones(1)
    else:
        inner = rng.uniform(0.0, np.log(cond), size=n - 2)
        spectrum = np.exp(np.concatenate(([0.0], inner, [np.log(cond)])))
    scale = _log_uniform(rng, *config.scale_range)
    spectrum *= scale / spectrum.sum()
    Q = random_orthogonal(n, rng)
    return validate_spd(EigenDecomposition(spectrum, Q).reconstruct())


def random_pair(config, rng):
    n = int(rng.integers(config.dim_range[0], config.dim_range[1] + 1))
    return random_spd(config, rng, n), random_spd(config, rng, n)


def random_density(config, rng, dim=None):
    return DensityMatrix.normalize(random_spd(config, rng, dim))


def random_density_pair(config, rng):
    n = int(rng.integers(config.dim_range[0], config.dim_range[1] + 1))
    return random_density(config, rng, n), random_density(config, rng, n)


# --------------------------------------------------------------------------
# hunting
# --------------------------------------------------------------------------


def _expand(params):
    """Cartesian product over list-valued entries of ``params``."""
    params = dict(params or {})
    keys = sorted(params)
    choices = [v if isinstance(v, list) else [v] for v in (params[k] for k in keys)]
    return [dict(zip(keys, combo)) for combo in itertools.product(*choices)]


def _hunt_targets():
    from . import properties as pr

    def in_betweenness(A, B, metric, mean):
        return pr.check_in_betweenness(metric, MeanSpec.from_dict(mean), A, B)

    def sandwich(A, B):
        return pr.check_sandwich(A, B)

    def monotonicity(A, B, metric, curve, direction):
        return pr.check_monotonicity(metric, pr.CurveSpec.from_dict(curve), A, B, direction)

    def in_sphere(A, B, metric, curve, center=None):
        center = MeanSpec.from_dict(center or {"family": "geodesic", "t": 0.5})
        return pr.check_in_sphere(metric, center, pr.CurveSpec.from_dict(curve), A, B)

    def triangle(A, B):
        return pr.check_triangle_refinement(A, B)

    def sqrt_bound(A, B, p, t):
        return pr.check_sqrt_bound(p, t, A, B)

    def reparam(A, B, p, t, r):
        return pr.check_reparam_identity(p, t, r, A, B)

    def log_major(A, B, alpha):
        return pr.check_log_majorization(A, B, alpha)

    def convexity(A, B, p, t_grid=None):
        return pr.check_trace_convexity(p, A, B, t_grid or pr.uniform_grid(11))

    def fidelity(A, B, p, t):
        return pr.check_fidelity_dominance(
            p, t, DensityMatrix.normalize(A), DensityMatrix.normalize(B)
        )

    return {
        "in_betweenness": in_betweenness,
        "sandwich": sandwich,
        "monotonicity": monotonicity,
        "in_sphere": in_sphere,
        "triangle": triangle,
        "sqrt_bound": sqrt_bound,
        "reparam": reparam,
        "log_major": log_major,
        "convexity": convexity,
        "fidelity": fidelity,
    }


HUNTABLE = (
    "convexity",
    "fidelity",
    "in_betweenness",
    "in_sphere",
    "log_major",
    "monotonicity",
    "reparam",
    "sandwich",
    "sqrt_bound",
    "triangle",
)


def iter_hunt(property_id, params, config, trials):
    """Yield ``(trial, report)`` for every violation, in trial order."""
    targets = _hunt_targets()
    if property_id not in targets:
        raise UnknownPropertyError(property_id)
    check = targets[property_id]
    grid = _expand(params)
    stream = stream_id("hunt:" + property_id)
    for trial in range(int(trials)):
        rng = trial_rng(config.seed, trial, stream)
        A, B = random_pair(config, rng)
        for point in grid:
            report = check(A, B, **point)
            if not report.passed:
                yield trial, report.with_params(trial=trial)


def hunt(property_id, params, config, trials, limit=None):
    """Search random pairs for violations of a property.

    Parameters
    ----------
    property_id : str
        One of :data:`HUNTABLE`.
    params : dict
        Keyword arguments for the checker; list values are expanded into a
        grid and every grid point is checked on every draw.
    config : SamplerConfig
    trials : int
        Number of random pairs.
    limit : int, optional
        Stop after this many violations.

    Returns
    -------
    list of PropertyReport
        Violations only, sorted by margin (most negative first).
    """
    found = []
    for _, report in iter_hunt(property_id, params, config, trials):
        found.append(report)
        if limit is not None and len(found) >= limit:
            break
    return sorted(found, key=lambda r: r.margin)


# --------------------------------------------------------------------------
# printed counterexamples
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PaperCase:
    """A printed counterexample: the pair, the mean, and the printed values.

    ``expected`` holds ``(label, value, tolerance)`` triples where the label
    is ``"d(A,mean)"`` or ``"d(A,B)"``.
    """

    id: str
    A: SpdMatrix
    B: SpdMatrix
    property_id: str
    metric: MetricKind
    mean: MeanSpec
    expected: tuple = field(default_factory=tuple)
    source: str = ""

    def evaluate(self):
        """Computed values keyed by expected label."""
        return {
            "d(A,mean)": distance(self.metric, self.A, evaluate(self.mean, self.A, self.B)),
            "d(A,B)": distance(self.metric, self.A, self.B),
        }

    def compare(self):
        """Rows ``(label, expected, computed, tolerance, ok)``."""
        got = self.evaluate()
        return [
            (label, value, got[label], tol, abs(got[label] - value) <= tol)
            for label, value, tol in self.expected
        ]

    def to_dict(self):
        return {
            "id": self.id,
            "A": self.A.tolist(),
            "B": self.B.tolist(),
            "property_id": self.property_id,
            "metric": self.metric.value,
            "mean": self.mean.to_dict(),
            "expected": [list(e) for e in self.expected],
            "source": self.source,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            id=d["id"],
            A=validate_spd(d["A"], semidefinite=True),
            B=validate_spd(d["B"], semidefinite=True),
            property_id=d["property_id"],
            metric=MetricKind(d["metric"]),
            mean=MeanSpec.from_dict(d["mean"]),
            expected=tuple((str(l), float(v), float(t)) for l, v, t in d["expected"]),
            source=d.get("source", ""),
        )


def _case(cid, A, B, metric, mean, values, tol, source):
    # d_h and d_b are defined on the closed PSD cone; B of case 1 is singular
    return PaperCase(
        id=cid,
        A=validate_spd(A, semidefinite=True),
        B=validate_spd(B, semidefinite=True),
        property_id="in_betweenness",
        metric=MetricKind(metric),
        mean=MeanSpec.from_dict(mean),
        expected=(("d(A,mean)", values[0], tol), ("d(A,B)", values[1], tol)),
        source=source,
    )


def paper_registry():
    """The four printed in-betweenness counterexamples."""
    return [
        _case(
            "hellinger_geometric",
            [[113, -36], [-36, 17]],
            [[12, -12], [-12, 12]],
            "hellinger",
            {"family": "geodesic", "t": 0.5},
            (7.94782, 7.8729),
            1e-3,
            "Hellinger counterexample for the geometric mean",
        ),
        _case(
            "hellinger_harmonic",
            [[58, -24], [-24, 10]],
            [[13, -8], [-8, 5]],
            "hellinger",
            {"family": "harmonic"},
            (5.66315, 4.20652),
            1e-3,
            "Hellinger counterexample for the harmonic mean",
        ),
        _case(
            "bures_power_ka_p1_10",
            [[5, 14], [14, 41]],
            [[1, -3], [-3, 18]],
            "bures",
            {"family": "power_ka", "p": 0.1, "t": 0.125},
            (3.70465, 3.60022),
            1e-3,
            "Bures-Wasserstein counterexample for P_{1/10}(1/8)",
        ),
        _case(
            "hellinger_power_ka_p1_3",
            [[167.621, 47.0079], [47.0079, 14.0587]],
            [[37.903, 23.3273], [23.3273, 14.4432]],
            "hellinger",
            {"family": "power_ka", "p": 1.0 / 3.0, "t": 0.25},
            (7.26351, 7.22887),
            1e-4,
            "Hellinger counterexample for P_{1/3}(1/4)",
        ),
    ]
