"""Executable inequalities and identities about means and metrics.

Each checker evaluates one inequality on one input and returns a
:class:`PropertyReport` whose ``margin`` is the slack of the inequality
(negative = violated). A check passes when ``margin >= -tolerance``, with

    tolerance = rtol * (right-hand magnitude) + ABS_FLOOR * (natural scale)

``rtol`` defaults to 1e-9. The absolute floor is tiny (1e-12 in the units of
the metric) and only matters for degenerate inputs such as ``A = B``, where
the right-hand side is zero and the left-hand side is pure roundoff.
"""
import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import means as _means
from .exceptions import (
    AlphaOutOfRangeError,
    GridTooSmallError,
    ParameterError,
    POutOfRangeError,
)
from .linalg import DensityMatrix, as_spd, check_same_dim, congruence, eigh, sym_power
from .means import Family, MeanSpec
from .metrics import MetricKind, d_bures, d_hellinger, d_logdet, distance, fidelity

RTOL = 1e-9
ABS_FLOOR = 1e-12


# --------------------------------------------------------------------------
# report types
# --------------------------------------------------------------------------


def _jsonable(value):
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "to_dict"):
        return value.to_dict()
    return value


@dataclass(frozen=True)
class PropertyReport:
    """Outcome of one property check, or of a sweep of them.

    ``witness`` holds the matrices and parameters at the worst margin as
    plain nested lists so that it serializes at full precision. For
    aggregated reports ``trials`` counts the checks and ``violations`` the
    failed ones.
    """

    property_id: str
    passed: bool
    margin: float
    tolerance: float
    witness: Optional[dict] = None
    grid: Optional[tuple] = None
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)
    trials: int = 1
    violations: int = 0

    @property
    def slack(self):
        return self.margin + self.tolerance

    def with_params(self, **extra):
        witness = self.witness
        if witness is not None:
            witness = {**witness, "params": {**witness.get("params", {}), **_jsonable(extra)}}
        return replace(self, params={**self.params, **_jsonable(extra)}, witness=witness)

    def to_dict(self):
        return {
            "type": "report",
            "property_id": self.property_id,
            "passed": self.passed,
            "margin": self.margin,
            "tolerance": self.tolerance,
            "trials": self.trials,
            "violations": self.violations,
            "params": self.params,
            "grid": None if self.grid is None else list(self.grid),
            "details": self.details,
            "witness": self.witness,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            property_id=d["property_id"],
            passed=bool(d["passed"]),
            margin=float(d["margin"]),
            tolerance=float(d["tolerance"]),
            witness=d.get("witness"),
            grid=None if d.get("grid") is None else tuple(d["grid"]),
            params=d.get("params", {}),
            details=d.get("details", {}),
            trials=int(d.get("trials", 1)),
            violations=int(d.get("violations", 0)),
        )


@dataclass(frozen=True)
class Observation:
    """Descriptive tally with no pass/fail semantics."""

    observation_id: str
    counts: dict
    params: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "type": "observation",
            "observation_id": self.observation_id,
            "counts": self.counts,
            "params": self.params,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["observation_id"], d["counts"], d.get("params", {}))


def record_from_dict(d):
    return Observation.from_dict(d) if d.get("type") == "observation" else PropertyReport.from_dict(d)


def _report(property_id, parts, A, B, params, grid=None, extra=None):
    """Build a single-input report from ``(name, margin, tolerance)`` parts.

    The worst part (least slack) determines ``margin`` and ``tolerance``.
    """
    worst = min(parts, key=lambda part: part[1] + part[2])
    _, margin, tol = worst
    passed = bool(margin >= -tol)
    details = {name: m for name, m, _ in parts} if len(parts) > 1 else {}
    if extra:
        details.update(extra)
    witness = {"A": np.asarray(A).tolist(), "B": np.asarray(B).tolist(), "params": _jsonable(params)}
    return PropertyReport(
        property_id=property_id,
        passed=passed,
        margin=float(margin),
        tolerance=float(tol),
        witness=witness,
        grid=None if grid is None else tuple(float(t) for t in grid),
        params=_jsonable(params),
        details=_jsonable(details),
        trials=1,
        violations=0 if passed else 1,
    )


def aggregate(reports, property_id=None, params=None, grid=None):
    """Reduce reports to one: worst slack wins, counts are summed.

    Ties keep the earliest report, so the result depends only on input order.
    """
    reports = list(reports)
    if not reports:
        raise ValueError("nothing to aggregate")
    worst = reports[0]
    for r in reports[1:]:
        if r.slack < worst.slack:
            worst = r
    trials = sum(r.trials for r in reports)
    violations = sum(r.violations for r in reports)
    return PropertyReport(
        property_id=property_id or worst.property_id,
        passed=violations == 0,
        margin=worst.margin,
        tolerance=worst.tolerance,
        witness=worst.witness,
        grid=worst.grid if grid is None else tuple(grid),
        params=_jsonable(params) if params is not None else worst.params,
        details=worst.details,
        trials=trials,
        violations=violations,
    )


# --------------------------------------------------------------------------
# curves
# --------------------------------------------------------------------------


class Direction(str, enum.Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"


CURVE_KINDS = (Family.POWER_BS, Family.POWER_KA, Family.GEODESIC, Family.DIAMOND, Family.HERON)


def uniform_grid(n):
    """``n`` equally spaced points on ``[0, 1]``."""
    if n < 2:
        raise GridTooSmallError("a grid needs at least 2 points")
    return tuple(float(i) / (n - 1) for i in range(n))


@dataclass(frozen=True)
class CurveSpec:
    """A one-parameter family of means sampled on ``t_grid``."""

    kind: Family
    t_grid: tuple = field(default_factory=lambda: uniform_grid(21))
    p: Optional[float] = None

    def __post_init__(self):
        kind = Family(self.kind)
        if kind not in CURVE_KINDS:
            raise ParameterError(f"{kind.value} is not a curve kind")
        grid = tuple(float(t) for t in self.t_grid)
        if not grid:
            raise GridTooSmallError("empty t_grid")
        if any(not 0.0 <= t <= 1.0 for t in grid):
            raise ParameterError("t_grid must lie in [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ParameterError("t_grid must be strictly ascending")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "t_grid", grid)
        # validates p
        MeanSpec(kind, grid[0], self.p)

    def spec(self, t):
        return MeanSpec(self.kind, t, self.p)

    def points(self, A, B):
        return [_means.evaluate(self.spec(t), A, B) for t in self.t_grid]

    def to_dict(self):
        d = {"kind": self.kind.value, "t_grid": list(self.t_grid)}
        if self.p is not None:
            d["p"] = self.p
        return d

    @classmethod
    def from_dict(cls, d):
        grid = d.get("t_grid")
        if grid is None:
            grid = uniform_grid(int(d.get("grid_size", 21)))
        return cls(Family(d["kind"]), tuple(grid), d.get("p"))


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------


def _pair(A, B):
    A, B = as_spd(A), as_spd(B)
    check_same_dim(A, B)
    return A, B


def _scale(metric, A, B):
    """Natural magnitude of ``metric`` values for the pair ``(A, B)``."""
    metric = MetricKind(metric)
    if metric in (MetricKind.BURES, MetricKind.HELLINGER):
        return math.sqrt(A.trace + B.trace)
    if metric is MetricKind.FIDELITY:
        return A.trace * B.trace
    return float(A.dim)


def _tol(rhs, scale, rtol=RTOL):
    return rtol * abs(rhs) + ABS_FLOOR * scale


def _require_distance(metric):
    metric = MetricKind(metric)
    if not metric.is_distance:
        raise ParameterError("fidelity is not a distance")
    return metric


# --------------------------------------------------------------------------
# checkers
# --------------------------------------------------------------------------


def check_in_betweenness(metric, spec, A, B, rtol=RTOL):
    """``d(A, mean(A, B)) <= d(A, B)``; margin is ``d(A,B) - d(A,mean)``."""
    metric = _require_distance(metric)
    A, B = _pair(A, B)
    d_ab = distance(metric, A, B)
    d_am = distance(metric, A, _means.evaluate(spec, A, B))
    params = {"metric": metric, "mean": spec}
    parts = [("in_betweenness", d_ab - d_am, _tol(d_ab, _scale(metric, A, B), rtol))]
    return _report(
        "in_betweenness", parts, A, B, params, extra={"d(A,B)": d_ab, "d(A,mean)": d_am}
    )


def curve_distances(metric, curve, A, B, anchor=None):
    """``d(anchor, curve(t))`` for every grid point (anchor defaults to ``A``)."""
    anchor = A if anchor is None else anchor
    return np.array([distance(metric, anchor, M) for M in curve.points(A, B)])


def check_monotonicity(metric, curve, A, B, direction, rtol=RTOL):
    """``t -> d(A, curve(t))`` is monotone in ``direction`` on the grid.

    The margin is the smallest step in the requested direction.
    """
    metric = _require_distance(metric)
    direction = Direction(direction)
    if len(curve.t_grid) < 3:
        raise GridTooSmallError("monotonicity needs at least 3 grid points")
    A, B = _pair(A, B)
    values = curve_distances(metric, curve, A, B)
    steps = np.diff(values)
    if direction is Direction.DECREASING:
        steps = -steps
    tol = _tol(np.max(np.abs(values)), _scale(metric, A, B), rtol)
    params = {"metric": metric, "curve": curve, "direction": direction}
    return _report(
        "monotonicity",
        [("step", float(np.min(steps)), tol)],
        A,
        B,
        params,
        grid=curve.t_grid,
        extra={"values": values, "d(A,B)": distance(metric, A, B)},
    )


def check_in_sphere(metric, center, curve, A, B, rtol=RTOL):
    """Every curve point lies within ``d(A,B)/2`` of ``center(A, B)``."""
    metric = _require_distance(metric)
    A, B = _pair(A, B)
    radius = 0.5 * distance(metric, A, B)
    c = _means.evaluate(center, A, B)
    dist = curve_distances(metric, curve, A, B, anchor=c)
    params = {"metric": metric, "center": center, "curve": curve}
    parts = [("radius", float(radius - np.max(dist)), _tol(radius, _scale(metric, A, B), rtol))]
    return _report("in_sphere", parts, A, B, params, grid=curve.t_grid, extra={"radius": radius})


def check_sandwich(A, B, rtol=RTOL):
    """``d_b <= d_h <= sqrt(2) d_b``."""
    A, B = _pair(A, B)
    db, dh = d_bures(A, B), d_hellinger(A, B)
    s = _scale(MetricKind.HELLINGER, A, B)
    parts = [
        ("lower", dh - db, _tol(dh, s, rtol)),
        ("upper", math.sqrt(2.0) * db - dh, _tol(dh, s, rtol)),
    ]
    return _report("sandwich", parts, A, B, {}, extra={"d_b": db, "d_h": dh})


def check_commuting_equality(A, B, atol=1e-9):
    """For commuting ``A, B``: ``d_b(A, B) = d_h(A, B)``."""
    A, B = _pair(A, B)
    gap = abs(d_bures(A, B) - d_hellinger(A, B))
    return _report("sandwich_commuting", [("equality", -gap, atol)], A, B, {})


def check_reparam_identity(p, t, r, A, B, rtol=RTOL):
    """``P_p(r; A, P_p(t; A, B)) = P_p(r + (1-r) t; A, B)``.

    margin = ``rtol`` minus the relative Frobenius error; tolerance 0.
    """
    A, B = _pair(A, B)
    inner = _means.power_mean_ka(p, t, A, B)
    lhs = _means.power_mean_ka(p, r, A, inner).entries
    rhs = _means.power_mean_ka(p, r + (1.0 - r) * t, A, B).entries
    err = float(np.linalg.norm(lhs - rhs) / np.linalg.norm(rhs))
    params = {"p": p, "t": t, "r": r}
    return _report("reparam", [("identity", rtol - err, 0.0)], A, B, params, extra={"rel_err": err})


def log_majorization_spectra(A, H, alpha):
    """Descending spectra ``(lambda(A H^(1/a) A), lambda(A^½ (A^(a/2) H A^(a/2))^(1/a) A^½))``.

    Both are squared singular values of square-root factors, which keeps
    the small eigenvalues accurate to about ``eps * cond`` instead of
    ``eps * cond^2``.
    """
    A, H = _pair(A, H)
    # A H^(1/a) A = X^T X with X = H^(1/2a) A
    lhs = np.linalg.svd(sym_power(H, 0.5 / alpha) @ A.entries, compute_uv=False) ** 2
    # (A^(a/2) H A^(a/2))^(1/2a) = U S^(1/a) U^T for A^(a/2) H^(1/2) = U S V^T
    U, S, _ = np.linalg.svd(sym_power(A, alpha / 2.0) @ sym_power(H, 0.5))
    W = (U * S ** (1.0 / alpha)) @ U.T
    rhs = np.linalg.svd(W @ sym_power(A, 0.5), compute_uv=False) ** 2
    return lhs, rhs


def check_log_majorization(A, H, alpha, atol=1e-9):
    """``lambda(A H^(1/a) A)`` is log-majorized by ``lambda(A^½ (A^(a/2) H A^(a/2))^(1/a) A^½)``.

    Partial sums of descending log-eigenvalues of the right side must
    dominate those of the left; the full sums (log-determinants) agree.
    Gaps are scale invariant, so the tolerance is absolute.
    """
    alpha = float(alpha)
    if not alpha >= 1.0:
        raise AlphaOutOfRangeError(f"alpha={alpha!r} < 1")
    A, H = _pair(A, H)
    lhs, rhs = log_majorization_spectra(A, H, alpha)
    ll, lr = np.log(lhs), np.log(rhs)
    gaps = np.cumsum(lr) - np.cumsum(ll)
    tol = atol
    parts = [("partial", float(np.min(gaps)), tol), ("det", -abs(float(gaps[-1])), tol)]
    return _report("log_major", parts, A, H, {"alpha": alpha})


def _chord_margins(ts, values):
    """``min`` over interior points of chord value minus function value."""
    ts, values = np.asarray(ts), np.asarray(values)
    t0, t1, t2 = ts[:-2], ts[1:-1], ts[2:]
    w = (t1 - t0) / (t2 - t0)
    chord = (1.0 - w) * values[:-2] + w * values[2:]
    return chord - values[1:-1]


def trace_functions(p, A, B, t_grid):
    """``f(t) = Tr P_p(t)`` and ``g(t) = Tr(A^¼ P_p(t)^½ A^¼)`` on the grid."""
    A, B = _pair(A, B)
    A4 = sym_power(A, 0.25)
    f, g = [], []
    for t in t_grid:
        P = _means.power_mean_ka(p, t, A, B)
        f.append(P.trace)
        g.append(float(np.trace(congruence(A4, sym_power(P, 0.5)))))
    return np.array(f), np.array(g)


def _check_convexity_args(p, t_grid):
    p = float(p)
    if not 0.5 <= p <= 1.0:
        raise POutOfRangeError(f"p={p!r} outside [1/2, 1]")
    if len(t_grid) < 3:
        raise GridTooSmallError("convexity needs at least 3 grid points")
    return p


def convexity_parts(p, A, B, t_grid, rtol=RTOL):
    """Separate reports for convexity of ``f`` and concavity of ``g``.

    Property ids are ``convexity_f`` and ``concavity_g``.
    """
    p = _check_convexity_args(p, t_grid)
    A, B = _pair(A, B)
    f, g = trace_functions(p, A, B, t_grid)
    s = A.trace + B.trace
    part_f = ("f_convex", float(np.min(_chord_margins(t_grid, f))), _tol(np.max(np.abs(f)), s, rtol))
    part_g = ("g_concave", float(np.min(-_chord_margins(t_grid, g))), _tol(np.max(np.abs(g)), s, rtol))
    params = {"p": p}
    return {
        "convexity_f": _report("convexity_f", [part_f], A, B, params, grid=t_grid),
        "concavity_g": _report("concavity_g", [part_g], A, B, params, grid=t_grid),
    }


def check_trace_convexity(p, A, B, t_grid, rtol=RTOL):
    """``t -> Tr P_p(t)`` convex and ``t -> Tr(A^½ P_p(t)^½)`` concave.

    Checked on consecutive grid triples against the chord (the midpoint
    test on a uniform grid). ``details`` carries both margins.
    """
    parts = convexity_parts(p, A, B, t_grid, rtol)
    rf, rg = parts["convexity_f"], parts["concavity_g"]
    combined = [("f_convex", rf.margin, rf.tolerance), ("g_concave", rg.margin, rg.tolerance)]
    A, B = _pair(A, B)
    return _report("convexity", combined, A, B, {"p": float(p)}, grid=t_grid)


def _as_density(M):
    if isinstance(M, DensityMatrix):
        return M
    return DensityMatrix(as_spd(M).entries)


def check_fidelity_dominance(p, t, rho, sigma, atol=1e-9):
    """``F(rho, mean) >= F(rho, sigma)`` for both power-mean families, ``p >= 1``."""
    p = float(p)
    if not p >= 1.0:
        raise POutOfRangeError(f"p={p!r} < 1")
    rho, sigma = _as_density(rho), _as_density(sigma)
    check_same_dim(rho, sigma)
    base = fidelity(rho, sigma)
    f_bs = fidelity(rho, _means.power_mean_bs(p, t, rho, sigma))
    f_ka = fidelity(rho, _means.power_mean_ka(p, t, rho, sigma))
    parts = [("power_bs", f_bs - base, atol), ("power_ka", f_ka - base, atol)]
    return _report("fidelity", parts, rho, sigma, {"p": p, "t": t}, extra={"F": base})


def check_triangle_refinement(A, B, rtol=RTOL):
    """``d_l(A, A#B) + d_l(A#B, A∇B) <= d_l(A, B)``."""
    A, B = _pair(A, B)
    G = _means.geometric(A, B)
    M = _means.arithmetic(0.5, A, B)
    total = d_logdet(A, B)
    margin = total - d_logdet(A, G) - d_logdet(G, M)
    return _report("triangle", [("moc", margin, _tol(total, A.dim, rtol))], A, B, {})


def check_sqrt_bound(p, t, A, B, rtol=RTOL):
    """``d_b(A, mu_p) <= d_h(A, mu_p) <= sqrt(1-t) d_h(A, B)``."""
    p, t = float(p), float(t)
    if not 0.5 <= p <= 1.0:
        raise POutOfRangeError(f"p={p!r} outside [1/2, 1]")
    A, B = _pair(A, B)
    mu = _means.power_mean_bs(p, t, A, B)
    db_m, dh_m = d_bures(A, mu), d_hellinger(A, mu)
    bound = math.sqrt(1.0 - t) * d_hellinger(A, B)
    s = _scale(MetricKind.HELLINGER, A, B)
    parts = [
        ("bures_le_hellinger", dh_m - db_m, _tol(dh_m, s, rtol)),
        ("hellinger_le_bound", bound - dh_m, _tol(bound, s, rtol)),
    ]
    return _report("sqrt_bound", parts, A, B, {"p": p, "t": t})


def scalar_lemma_values(a, t_grid):
    t = np.asarray(t_grid, dtype=float)
    return 0.5 * (a ** (t / 2.0) + a ** (-t / 2.0))


def check_scalar_lemma(a, t_grid, atol=1e-12):
    """``t -> (a^(t/2) + a^(-t/2)) / 2`` is nondecreasing on ``[0, 1]``."""
    a = float(a)
    if not a > 0:
        raise ParameterError(f"a={a!r} must be positive")
    if len(t_grid) < 2:
        raise GridTooSmallError("need at least 2 grid points")
    f = scalar_lemma_values(a, t_grid)
    tol = atol * max(1.0, float(np.max(f)))
    margin = float(np.min(np.diff(f)))
    passed = bool(margin >= -tol)
    return PropertyReport(
        property_id="scalar_lemma",
        passed=passed,
        margin=margin,
        tolerance=tol,
        witness={"params": {"a": a}},
        grid=tuple(float(t) for t in t_grid),
        params={"a": a},
        violations=0 if passed else 1,
    )
