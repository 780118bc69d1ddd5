import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from spdmeans.exceptions import DimMismatchError, ParameterError, ZeroPError
from spdmeans.linalg import eigh, sym_power, validate_spd
from spdmeans.means import (
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
from spdmeans.search import SamplerConfig, random_orthogonal, random_pair, random_spd, trial_rng

from conftest import rel_err, spd_pairs

D14, D916 = np.diag([1.0, 4.0]), np.diag([9.0, 16.0])


def _min_eig(X):
    return eigh(X).eigenvalues[0]


class TestPowerMeanBS:
    def test_diagonal(self):
        M = power_mean_bs(2, 0.5, D14, D916)
        np.testing.assert_allclose(M.entries, np.diag([math.sqrt(41), math.sqrt(136)]), rtol=1e-14)

    def test_harmonic_scalar(self):
        np.testing.assert_allclose(power_mean_bs(-1, 0.5, np.eye(2), 3 * np.eye(2)).entries, 1.5 * np.eye(2))

    @given(spd_pairs(), st.floats(0, 1), st.sampled_from([-1.0, 0.5, 1.0, 2.0]))
    @settings(max_examples=40)
    def test_idempotent(self, AB, t, p):
        A, _ = AB
        assert rel_err(power_mean_bs(p, t, A, A).entries, A.entries) <= 1e-10

    def test_endpoints(self, pairs):
        for A, B in pairs[:10]:
            assert rel_err(power_mean_bs(0.7, 1, A, B).entries, A.entries) <= 1e-10
            assert rel_err(power_mean_bs(0.7, 0, A, B).entries, B.entries) <= 1e-10

    def test_errors(self):
        with pytest.raises(ZeroPError):
            power_mean_bs(0, 0.5, D14, D916)
        with pytest.raises(DimMismatchError):
            power_mean_bs(1, 0.5, D14, np.eye(3))
        with pytest.raises(ParameterError):
            power_mean_bs(1, 1.5, D14, D916)

    def test_against_oracle(self, pairs):
        for A, B in pairs[:5]:
            ref = oracle.power_mean_bs(mp.mpf("0.6"), mp.mpf("0.3"), oracle.M(A.entries), oracle.M(B.entries))
            got = power_mean_bs(0.6, 0.3, A, B).entries
            assert rel_err(got, np.array(ref.tolist(), dtype=float)) <= 1e-9


class TestPowerMeanKA:
    def test_scalar(self):
        np.testing.assert_allclose(power_mean_ka(0.5, 0.5, np.eye(2), 9 * np.eye(2)).entries, 4 * np.eye(2))

    def test_endpoints(self, pairs):
        for A, B in pairs[:10]:
            assert rel_err(power_mean_ka(0.3, 1, A, B).entries, A.entries) <= 1e-10
            assert rel_err(power_mean_ka(0.3, 0, A, B).entries, B.entries) <= 1e-10

    def test_p1_equals_bs(self, pairs):
        for A, B in pairs:
            assert rel_err(power_mean_ka(1, 0.3, A, B).entries, power_mean_bs(1, 0.3, A, B).entries) <= 1e-10

    def test_half_half_expansion(self, pairs):
        # expansion of A^½ ((I + C^½)/2)^2 A^½ carries 2 A#B
        for A, B in pairs:
            P = power_mean_ka(0.5, 0.5, A, B).entries
            G = geometric(A, B).entries
            assert rel_err(P, (A.entries + B.entries + 2 * G) / 4) <= 1e-9

    def test_half_half_single_coefficient_is_wrong(self):
        A, B = np.eye(2), 9 * np.eye(2)
        P = power_mean_ka(0.5, 0.5, A, B).entries
        single = (A + B + geometric(A, B).entries) / 4
        assert rel_err(P, single) > 0.1

    def test_against_oracle(self, pairs):
        for A, B in pairs[:5]:
            ref = oracle.power_mean_ka(mp.mpf(1) / 3, mp.mpf("0.25"), oracle.M(A.entries), oracle.M(B.entries))
            got = power_mean_ka(1 / 3, 0.25, A, B).entries
            assert rel_err(got, np.array(ref.tolist(), dtype=float)) <= 1e-9

    @given(spd_pairs(), st.floats(0.25, 2), st.floats(0, 1), st.floats(0, 1))
    @settings(max_examples=60)
    def test_reparametrization(self, AB, p, t, r):
        A, B = AB
        lhs = power_mean_ka(p, r, A, power_mean_ka(p, t, A, B)).entries
        rhs = power_mean_ka(p, r + (1 - r) * t, A, B).entries
        assert rel_err(lhs, rhs) <= 1e-9


class TestGeodesic:
    def test_diagonal(self):
        np.testing.assert_allclose(geodesic(0.5, D14, D916).entries, np.diag([3.0, 8.0]), rtol=1e-14)

    def test_matrix_root(self):
        np.testing.assert_allclose(geodesic(0.5, np.eye(2), [[5, 4], [4, 5]]).entries, [[2, 1], [1, 2]], rtol=1e-13)

    @given(spd_pairs(), st.floats(0, 1))
    @settings(max_examples=40)
    def test_idempotent(self, AB, t):
        A, _ = AB
        assert rel_err(geodesic(t, A, A).entries, A.entries) <= 1e-10

    def test_endpoints(self, pairs):
        for A, B in pairs[:10]:
            assert rel_err(geodesic(0, A, B).entries, A.entries) <= 1e-10
            assert rel_err(geodesic(1, A, B).entries, B.entries) <= 1e-10

    def test_congruence_covariance(self, pairs):
        rng = np.random.default_rng(5)
        cfg = SamplerConfig(cond_range=(1, 100))
        for A, B in pairs:
            X = random_spd(cfg, rng, A.dim).entries
            lhs = X @ geodesic(0.3, A, B).entries @ X
            rhs = geodesic(0.3, validate_spd(X @ A.entries @ X), validate_spd(X @ B.entries @ X)).entries
            assert rel_err(lhs, rhs) <= 1e-8

    def test_against_oracle(self, pairs):
        for A, B in pairs[:5]:
            ref = oracle.geodesic(mp.mpf("0.7"), oracle.M(A.entries), oracle.M(B.entries))
            assert rel_err(geodesic(0.7, A, B).entries, np.array(ref.tolist(), dtype=float)) <= 1e-9


class TestOtherMeans:
    def test_arithmetic(self):
        np.testing.assert_allclose(arithmetic(0.5, np.eye(2), 9 * np.eye(2)).entries, 5 * np.eye(2))
        np.testing.assert_array_equal(arithmetic(0, D14, D916).entries, D14)
        np.testing.assert_allclose(arithmetic(0.25, np.diag([4.0, 8.0]), np.diag([8.0, 4.0])).entries, np.diag([5.0, 7.0]))

    def test_harmonic(self):
        np.testing.assert_allclose(harmonic(np.eye(2), 3 * np.eye(2)).entries, 1.5 * np.eye(2))
        np.testing.assert_allclose(harmonic(D14, D14).entries, D14)

    def test_harmonic_delegates(self, pairs):
        for A, B in pairs[:10]:
            np.testing.assert_allclose(harmonic(A, B).entries, power_mean_bs(-1, 0.5, A, B).entries, rtol=1e-12)

    def test_heron(self):
        np.testing.assert_allclose(heron(0.5, np.eye(2), 9 * np.eye(2)).entries, 4 * np.eye(2))
        np.testing.assert_allclose(heron(0, D14, D916).entries, arithmetic(0.5, D14, D916).entries)
        np.testing.assert_allclose(heron(1, D14, D916).entries, geometric(D14, D916).entries)
        np.testing.assert_allclose(heron(0.3, D14, D14).entries, D14)

    def test_diamond(self):
        for t in (0.0, 0.2, 0.5, 1.0):
            expect = 3 ** (1 - t) * 5**t * np.eye(2)
            np.testing.assert_allclose(diamond(t, np.eye(2), 9 * np.eye(2)).entries, expect, rtol=1e-13)
        np.testing.assert_allclose(diamond(0, D14, D916).entries, geometric(D14, D916).entries)
        np.testing.assert_allclose(diamond(0.4, D14, D14).entries, D14)

    def test_agm_order(self):
        cfg = SamplerConfig(cond_range=(1, 1e3), seed=3)
        for i in range(200):
            A, B = random_pair(cfg, trial_rng(cfg.seed, i))
            Hm, G, M = harmonic(A, B).entries, geometric(A, B).entries, arithmetic(0.5, A, B).entries
            scale = np.linalg.norm(M)
            assert _min_eig(G - Hm) >= -1e-9 * scale
            assert _min_eig(M - G) >= -1e-9 * scale

    def test_root_order(self, pairs):
        # (t A^p + (1-t) B^p)^(1/2p) >= t A^½ + (1-t) B^½ for p in [1/2, 1]
        for A, B in pairs:
            for p in (0.5, 0.75, 1.0):
                for t in (0.2, 0.5, 0.9):
                    X = t * sym_power(A, p) + (1 - t) * sym_power(B, p)
                    lhs = sym_power(validate_spd(X), 1 / (2 * p))
                    rhs = t * sym_power(A, 0.5) + (1 - t) * sym_power(B, 0.5)
                    assert _min_eig(lhs - rhs) >= -1e-9 * np.linalg.norm(rhs)

    def test_arithmetic_dominates_power_mean(self, pairs):
        for A, B in pairs:
            for p in (0.5, 0.75):
                mu = power_mean_bs(p, 0.4, A, B).entries
                lin = 0.4 * A.entries + 0.6 * B.entries
                assert _min_eig(lin - mu) >= -1e-9 * np.linalg.norm(lin)


class TestScalarReduction:
    @given(
        st.lists(st.floats(0.01, 100), min_size=3, max_size=3),
        st.lists(st.floats(0.01, 100), min_size=3, max_size=3),
        st.floats(0, 1),
    )
    @settings(max_examples=50)
    def test_commuting(self, a, b, t):
        a, b = np.array(a), np.array(b)
        A, B = np.diag(a), np.diag(b)
        checks = [
            (power_mean_bs(0.5, t, A, B), (t * a**0.5 + (1 - t) * b**0.5) ** 2),
            (power_mean_ka(0.5, t, A, B), a * (t + (1 - t) * (b / a) ** 0.5) ** 2),
            (geodesic(t, A, B), a ** (1 - t) * b**t),
            (arithmetic(t, A, B), (1 - t) * a + t * b),
            (harmonic(A, B), 2 * a * b / (a + b)),
            (heron(t, A, B), t * np.sqrt(a * b) + (1 - t) * (a + b) / 2),
            (diamond(t, A, B), np.sqrt(a * b) ** (1 - t) * ((a + b) / 2) ** t),
        ]
        for M, d in checks:
            np.testing.assert_allclose(M.entries, np.diag(d), rtol=1e-12, atol=0)


class TestMeanSpec:
    def test_validation(self):
        with pytest.raises(ParameterError):
            MeanSpec("geodesic", 1.5)
        with pytest.raises(ZeroPError):
            MeanSpec("power_bs", 0.5)
        with pytest.raises(ZeroPError):
            MeanSpec("power_ka", 0.5, 0.0)
        with pytest.raises(ParameterError):
            MeanSpec("geodesic", 0.5, 2.0)
        with pytest.raises(ValueError):
            MeanSpec("log_euclidean", 0.5)

    def test_roundtrip(self):
        for spec in (MeanSpec("power_ka", 0.25, 1 / 3), MeanSpec("heron", 0.1), MeanSpec("harmonic")):
            assert MeanSpec.from_dict(spec.to_dict()) == spec

    def test_rejects_unknown_keys(self):
        with pytest.raises(ParameterError):
            MeanSpec.from_dict({"family": "geodesic", "t": 0.5, "weight": 1})

    def test_evaluate_dispatch(self):
        np.testing.assert_allclose(evaluate(MeanSpec("geodesic", 0.5), D14, D916).entries, np.diag([3.0, 8.0]))
        np.testing.assert_array_equal(evaluate(MeanSpec("arithmetic", 0), D14, D916).entries, D14)
        for t in (0.0, 0.3, 1.0):
            np.testing.assert_allclose(
                evaluate(MeanSpec("power_ka", t, 1), D14, D916).entries,
                evaluate(MeanSpec("power_bs", t, 1), D14, D916).entries,
            )

    def test_weight_conventions(self):
        assert weight_on_b("power_bs", 0.25) == 0.75
        assert weight_on_b("power_ka", 1.0) == 0.0
        assert weight_on_b("geodesic", 0.25) == 0.25
        assert weight_on_b("arithmetic", 1.0) == 1.0
        assert weight_on_b("heron", 0.5) is None
        assert all(Family(f).needs_p == (f in ("power_bs", "power_ka")) for f in [x.value for x in Family])

    def test_weight_conventions_match_values(self, pairs):
        A, B = pairs[0]
        for family in ("power_bs", "power_ka", "geodesic", "arithmetic"):
            p = 0.5 if family.startswith("power") else None
            at_one = evaluate(MeanSpec(family, 1.0, p), A, B).entries
            target = B if weight_on_b(family, 1.0) == 1.0 else A
            assert rel_err(at_one, target.entries) <= 1e-10
