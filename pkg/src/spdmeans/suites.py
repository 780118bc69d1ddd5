"""Randomized sweeps that run the property checkers over many inputs.

Each suite draws its inputs from its own RNG stream (derived from the
master seed, the suite name and the trial index), so suites are
independent of one another and of execution order. A suite returns a list
of aggregated :class:`~spdmeans.properties.PropertyReport` objects, one per
parameter setting, plus descriptive :class:`~spdmeans.properties.Observation`
tallies where a statement is reported rather than asserted.
"""
from collections import Counter, defaultdict

import numpy as np

from . import properties as pr
from .linalg import EigenDecomposition, SpdMatrix, congruence, sym_power
from .means import MeanSpec
from .search import (
    SamplerConfig,
    random_density_pair,
    random_pair,
    stream_id,
    trial_rng,
)

#: Power exponents for the Hellinger/Bures sweeps.
P_HALF_TO_ONE = (0.5, 0.6, 0.75, 0.9, 1.0)
#: Power exponents for the fidelity sweep.
P_FIDELITY = (1.0, 1.5, 2.0, 4.0)
ALPHAS = (1.0, 1.5, 2.0, 3.0)
T_STEP_TENTH = pr.uniform_grid(11)
T_UPPER_HALF = tuple(0.5 + i / 20 for i in range(11))
GRID21 = pr.uniform_grid(21)

DEFAULT_CONFIG = SamplerConfig(dim_range=(2, 6), cond_range=(1.0, 1e4), seed=42)

#: Per-suite sampler defaults, used when the caller does not override them.
SUITE_DEFAULTS = {
    "log_major": {"dim_range": (2, 5), "cond_range": (1.0, 1e3)},
}

SUITES = (
    "in_betweenness",
    "monotonicity",
    "in_sphere",
    "sandwich",
    "reparam",
    "log_major",
    "convexity",
    "fidelity",
    "triangle",
    "sqrt_bound",
)


def suite_config(name, seed=None, dim_range=None, cond_range=None, base=DEFAULT_CONFIG):
    changes = dict(SUITE_DEFAULTS.get(name, {}))
    if dim_range is not None:
        changes["dim_range"] = tuple(dim_range)
    if cond_range is not None:
        changes["cond_range"] = tuple(cond_range)
    if seed is not None:
        changes["seed"] = seed
    return base.replace(**changes)


def _pairs(name, config, trials):
    stream = stream_id("suite:" + name)
    for i in range(trials):
        yield random_pair(config, trial_rng(config.seed, i, stream))


def _reduce(buckets, property_id):
    """Aggregate ``{key: (params, grid, [reports])}`` in insertion order."""
    return [
        pr.aggregate(reports, property_id=property_id, params=params, grid=grid)
        for params, grid, reports in buckets.values()
    ]


class _Buckets(dict):
    def add(self, key, params, grid, report):
        if key not in self:
            self[key] = (params, grid, [])
        self[key][2].append(report)


def run_in_betweenness(config, trials):
    hell, bures, logdet = _Buckets(), _Buckets(), _Buckets()
    for A, B in _pairs("in_betweenness", config, trials):
        for p in P_HALF_TO_ONE:
            for family in ("power_bs", "power_ka"):
                for t in T_STEP_TENTH:
                    r = pr.check_in_betweenness("hellinger", MeanSpec(family, t, p), A, B)
                    params = {"metric": "hellinger", "family": family, "p": p}
                    hell.add((family, p), params, T_STEP_TENTH, r)
            for t in T_UPPER_HALF:
                r = pr.check_in_betweenness("bures", MeanSpec("power_bs", t, p), A, B)
                params = {"metric": "bures", "family": "power_bs", "p": p}
                bures.add(p, params, T_UPPER_HALF, r)
        for t in GRID21:
            r = pr.check_in_betweenness("logdet", MeanSpec("diamond", t), A, B)
            logdet.add("diamond", {"metric": "logdet", "family": "diamond"}, GRID21, r)
    return (
        _reduce(hell, "in_betweenness")
        + _reduce(bures, "in_betweenness")
        + _reduce(logdet, "in_betweenness")
    )


def _direction(values, tol):
    steps = np.diff(values)
    if np.all(steps >= -tol):
        return "increasing"
    if np.all(steps <= tol):
        return "decreasing"
    return "neither"


def run_monotonicity(config, trials):
    hell, logdet = _Buckets(), _Buckets()
    prop4 = defaultdict(Counter)
    bures_dir = defaultdict(Counter)
    bures_curve = {p: pr.CurveSpec("power_bs", T_UPPER_HALF, p) for p in P_HALF_TO_ONE}
    for A, B in _pairs("monotonicity", config, trials):
        for p in P_HALF_TO_ONE:
            curve = pr.CurveSpec("power_ka", GRID21, p)
            r = pr.check_monotonicity("hellinger", curve, A, B, "decreasing")
            hell.add(p, {"metric": "hellinger", "curve": curve, "direction": "decreasing"}, GRID21, r)
            # in-betweenness on every grid point vs. monotone decrease, same pair
            values, d_ab = np.asarray(r.details["values"]), r.details["d(A,B)"]
            between = bool(np.all(values <= d_ab + pr.RTOL * d_ab))
            prop4[p][f"in_between={between},monotone={r.passed}"] += 1

            vals = pr.curve_distances("bures", bures_curve[p], A, B)
            bures_dir[p][_direction(vals, pr.RTOL * max(np.max(vals), 1e-300))] += 1
        curve = pr.CurveSpec("geodesic", GRID21)
        r = pr.check_monotonicity("logdet", curve, A, B, "increasing")
        logdet.add("geodesic", {"metric": "logdet", "curve": curve, "direction": "increasing"}, GRID21, r)
    reports = _reduce(hell, "monotonicity") + _reduce(logdet, "monotonicity")
    observations = [
        pr.Observation(
            "prop4_agreement",
            dict(sorted(prop4[p].items())),
            {"metric": "hellinger", "family": "power_ka", "p": p, "grid": list(GRID21)},
        )
        for p in P_HALF_TO_ONE
    ] + [
        pr.Observation(
            "bures_power_bs_direction",
            {k: bures_dir[p][k] for k in ("increasing", "decreasing", "neither")},
            {"metric": "bures", "family": "power_bs", "p": p, "grid": list(T_UPPER_HALF)},
        )
        for p in P_HALF_TO_ONE
    ]
    return reports + observations


def run_in_sphere(config, trials):
    buckets = _Buckets()
    center = MeanSpec("geodesic", 0.5)
    curves = [pr.CurveSpec(kind, GRID21) for kind in ("geodesic", "diamond", "heron")]
    for A, B in _pairs("in_sphere", config, trials):
        for curve in curves:
            r = pr.check_in_sphere("logdet", center, curve, A, B)
            params = {"metric": "logdet", "center": center, "curve": curve.kind}
            buckets.add(curve.kind, params, GRID21, r)
    return _reduce(buckets, "in_sphere")


def random_diagonal_pair(config, rng):
    n = int(rng.integers(config.dim_range[0], config.dim_range[1] + 1))
    out = []
    for _ in range(2):
        logs = rng.uniform(0.0, np.log(config.cond_range[1]), size=n)
        scale = np.exp(rng.uniform(np.log(config.scale_range[0]), np.log(config.scale_range[1])))
        w = np.exp(logs)
        w *= scale / w.sum()
        out.append(SpdMatrix._from_eig(EigenDecomposition(w, np.eye(n))))
    return out


def run_sandwich(config, trials, commuting_trials=100):
    reports = [pr.check_sandwich(A, B) for A, B in _pairs("sandwich", config, trials)]
    out = [pr.aggregate(reports, params={})] if reports else []
    stream = stream_id("suite:sandwich_commuting")
    eq = [
        pr.check_commuting_equality(*random_diagonal_pair(config, trial_rng(config.seed, i, stream)))
        for i in range(commuting_trials)
    ]
    if eq:
        out.append(pr.aggregate(eq, params={"diagonal": True}))
    return out


def run_reparam(config, trials):
    stream = stream_id("suite:reparam")
    reports = []
    for i in range(trials):
        rng = trial_rng(config.seed, i, stream)
        A, B = random_pair(config, rng)
        p = float(rng.uniform(0.25, 2.0))
        t, r = (float(x) for x in rng.uniform(0.0, 1.0, size=2))
        reports.append(pr.check_reparam_identity(p, t, r, A, B))
    return [pr.aggregate(reports, params={"p_range": [0.25, 2.0]})] if reports else []


def run_log_major(config, trials):
    buckets = _Buckets()
    stream = stream_id("suite:log_major")
    instance = []
    for i in range(trials):
        rng = trial_rng(config.seed, i, stream)
        A, H = random_pair(config, rng)
        for alpha in ALPHAS:
            buckets.add(alpha, {"alpha": alpha}, None, pr.check_log_majorization(A, H, alpha))
        # proof instance: alpha = 2, A -> A^(1/2), H = (sI + (1-s) C^p)^(1/p), C = A^-1/2 B A^-1/2
        s = float(rng.uniform(0.0, 1.0))
        p = float(rng.uniform(0.5, 1.0))
        C = SpdMatrix(congruence(sym_power(A, -0.5), H.entries))
        Hs = SpdMatrix(sym_power(SpdMatrix(s * np.eye(A.dim) + (1.0 - s) * sym_power(C, p)), 1.0 / p))
        r = pr.check_log_majorization(SpdMatrix(sym_power(A, 0.5)), Hs, 2.0)
        instance.append(r.with_params(s=s, p=p))
    out = _reduce(buckets, "log_major")
    if instance:
        out.append(pr.aggregate(instance, property_id="log_major_instance", params={"alpha": 2.0}))
    return out


def run_convexity(config, trials):
    f_b, g_b = _Buckets(), _Buckets()
    for A, B in _pairs("convexity", config, trials):
        for p in P_HALF_TO_ONE:
            parts = pr.convexity_parts(p, A, B, T_STEP_TENTH)
            f_b.add(p, {"p": p}, T_STEP_TENTH, parts["convexity_f"])
            g_b.add(p, {"p": p}, T_STEP_TENTH, parts["concavity_g"])
    return _reduce(f_b, "convexity_f") + _reduce(g_b, "concavity_g")


def run_fidelity(config, trials):
    buckets = _Buckets()
    stream = stream_id("suite:fidelity")
    for i in range(trials):
        rho, sigma = random_density_pair(config, trial_rng(config.seed, i, stream))
        for p in P_FIDELITY:
            for t in T_STEP_TENTH:
                buckets.add(p, {"p": p}, T_STEP_TENTH, pr.check_fidelity_dominance(p, t, rho, sigma))
    return _reduce(buckets, "fidelity")


def run_triangle(config, trials):
    reports = [pr.check_triangle_refinement(A, B) for A, B in _pairs("triangle", config, trials)]
    return [pr.aggregate(reports, params={})] if reports else []


def run_sqrt_bound(config, trials):
    buckets = _Buckets()
    for A, B in _pairs("sqrt_bound", config, trials):
        for p in P_HALF_TO_ONE:
            for t in T_UPPER_HALF:
                buckets.add(p, {"p": p}, T_UPPER_HALF, pr.check_sqrt_bound(p, t, A, B))
    return _reduce(buckets, "sqrt_bound")


RUNNERS = {
    "in_betweenness": run_in_betweenness,
    "monotonicity": run_monotonicity,
    "in_sphere": run_in_sphere,
    "sandwich": run_sandwich,
    "reparam": run_reparam,
    "log_major": run_log_major,
    "convexity": run_convexity,
    "fidelity": run_fidelity,
    "triangle": run_triangle,
    "sqrt_bound": run_sqrt_bound,
}


def run_suite(name, trials=1000, seed=None, dim_range=None, cond_range=None):
    """Run one suite (or ``"all"``) and return its reports and observations."""
    names = SUITES if name == "all" else (name,)
    for n in names:
        if n not in RUNNERS:
            raise KeyError(n)
    out = []
    for n in names:
        config = suite_config(n, seed, dim_range, cond_range)
        out.extend(RUNNERS[n](config, int(trials)))
    return out


def failed(records):
    """Reports (not observations) that did not pass."""
    return [r for r in records if isinstance(r, pr.PropertyReport) and not r.passed]
