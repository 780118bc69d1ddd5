import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracle
from spdmeans.exceptions import DimMismatchError, DomainError, NotPositiveDefiniteError
from spdmeans.linalg import DensityMatrix, sym_power, validate_spd
from spdmeans.metrics import (
    MetricKind,
    bures_from_fidelity,
    clamp_radicand,
    d_bures,
    d_hellinger,
    d_logdet,
    d_logdet_displayed,
    d_riemannian,
    distance,
    fidelity,
)
from spdmeans.search import SamplerConfig, random_orthogonal, random_spd

from conftest import spd_pairs

D14, D916 = np.diag([1.0, 4.0]), np.diag([9.0, 16.0])
CASE1 = ([[113, -36], [-36, 17]], [[12, -12], [-12, 12]])
CASE3 = ([[5, 14], [14, 41]], [[1, -3], [-3, 18]])
DISTANCES = (d_riemannian, d_bures, d_hellinger, d_logdet)


class TestFrozenValues:
    def test_riemannian(self):
        e = math.e
        assert d_riemannian(np.eye(2), np.diag([e**2, e**-2])) == pytest.approx(2 * math.sqrt(2), rel=1e-12)

    def test_bures_commuting(self):
        assert d_bures(D14, D916) == pytest.approx(math.sqrt(8), rel=1e-12)

    def test_hellinger_commuting(self):
        assert d_hellinger(D14, D916) == pytest.approx(math.sqrt(8), rel=1e-12)

    def test_logdet(self):
        assert d_logdet(D14, D916) == pytest.approx(math.log(25 / 12), rel=1e-12)
        assert d_logdet(D14, D916) == pytest.approx(0.73397, abs=1e-5)

    def test_printed_bures(self):
        A, B = CASE3
        assert d_bures(A, B) == pytest.approx(3.60022, abs=1e-5)

    def test_printed_hellinger(self):
        A, B = CASE1
        B = validate_spd(B, semidefinite=True)
        assert d_hellinger(A, B) == pytest.approx(7.8729, abs=1e-4)


class TestAgainstOracle:
    def test_all_metrics(self, pairs):
        for A, B in pairs[:8]:
            a, b = oracle.M(A.entries), oracle.M(B.entries)
            assert d_hellinger(A, B) == pytest.approx(float(oracle.d_hellinger(a, b)), rel=1e-8)
            assert d_bures(A, B) == pytest.approx(float(oracle.d_bures(a, b)), rel=1e-8)
            assert d_logdet(A, B) == pytest.approx(float(oracle.d_logdet(a, b)), rel=1e-8)
            assert d_riemannian(A, B) == pytest.approx(float(oracle.d_riemannian(a, b)), rel=1e-8)

    def test_near_equal_inputs(self):
        # the Frobenius forms keep relative accuracy where the trace forms cancel
        rng = np.random.default_rng(8)
        A = random_spd(SamplerConfig(cond_range=(10, 10)), rng, 3)
        E = rng.standard_normal((3, 3))
        B = validate_spd(A.entries + 1e-7 * (E + E.T))
        a, b = oracle.M(A.entries), oracle.M(B.entries)
        assert d_hellinger(A, B) == pytest.approx(float(oracle.d_hellinger(a, b)), rel=1e-6)
        assert d_bures(A, B) == pytest.approx(float(oracle.d_bures(a, b)), rel=1e-6)


class TestAxioms:
    @given(spd_pairs())
    @settings(max_examples=40)
    def test_symmetric(self, AB):
        A, B = AB
        for d in DISTANCES:
            x, y = d(A, B), d(B, A)
            assert abs(x - y) <= 1e-10 * max(1.0, x)

    @given(spd_pairs())
    @settings(max_examples=40)
    def test_zero_on_diagonal(self, AB):
        A, _ = AB
        for d in DISTANCES:
            assert d(A, A) <= 1e-10 * max(1.0, math.sqrt(A.trace))

    def test_nonnegative_logdet(self, pairs):
        assert all(d_logdet(A, B) >= 0 for A, B in pairs)

    def test_dim_mismatch(self):
        for d in DISTANCES:
            with pytest.raises(DimMismatchError):
                d(np.eye(2), np.eye(3))

    def test_congruence_invariance(self, pairs):
        rng = np.random.default_rng(4)
        for A, B in pairs:
            X = random_spd(SamplerConfig(cond_range=(1, 10)), rng, A.dim).entries
            XA, XB = validate_spd(X @ A.entries @ X), validate_spd(X @ B.entries @ X)
            assert d_riemannian(XA, XB) == pytest.approx(d_riemannian(A, B), rel=1e-9, abs=1e-12)
            assert d_logdet(XA, XB) == pytest.approx(d_logdet(A, B), rel=1e-9, abs=1e-12)


class TestLogdetForms:
    def test_identity_form(self, pairs):
        # d_l(I, X) = log det((X^½ + X^-½)/2)
        for _, X in pairs:
            rhs = np.linalg.slogdet((sym_power(X, 0.5) + sym_power(X, -0.5)) / 2)[1]
            assert d_logdet(np.eye(X.dim), X) == pytest.approx(rhs, rel=1e-9, abs=1e-12)

    def test_displayed_form_not_zero_at_equality(self):
        assert abs(d_logdet_displayed(D916, D916)) > 1

    def test_rejects_singular(self):
        B = validate_spd(CASE1[1], semidefinite=True)
        with pytest.raises(NotPositiveDefiniteError):
            d_logdet(CASE1[0], B)
        with pytest.raises(NotPositiveDefiniteError):
            d_riemannian(CASE1[0], B)


class TestFidelity:
    def test_identical(self):
        rho = np.eye(2) / 2
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-15)

    def test_near_orthogonal(self):
        eps = 1e-6
        rho = DensityMatrix.normalize(np.diag([1.0, 0.0]) + eps * np.eye(2))
        sigma = DensityMatrix.normalize(np.diag([0.0, 1.0]) + eps * np.eye(2))
        assert 0 <= fidelity(rho, sigma) <= 1e-3

    def test_bounds_and_identity(self):
        cfg = SamplerConfig(cond_range=(1, 1e3), seed=2)
        rng = np.random.default_rng(2)
        for _ in range(50):
            rho = DensityMatrix.normalize(random_spd(cfg, rng, 3))
            sigma = DensityMatrix.normalize(random_spd(cfg, rng, 3))
            F = fidelity(rho, sigma)
            assert 0 <= F <= 1 + 1e-10
            assert d_bures(rho, sigma) ** 2 == pytest.approx(2 - 2 * math.sqrt(F), abs=1e-12)

    def test_bures_two_routes(self, pairs):
        for A, B in pairs:
            assert d_bures(A, B) == pytest.approx(bures_from_fidelity(A, B), rel=1e-6, abs=1e-9)


class TestProofSteps:
    def test_araki_lieb_thirring_step(self, pairs):
        for A, B in pairs:
            lhs = np.sum(np.sqrt(np.linalg.eigvalsh(sym_power(A, 0.5) @ B.entries @ sym_power(A, 0.5))))
            B4 = sym_power(B, 0.25)
            rhs = np.trace(B4 @ sym_power(A, 0.5) @ B4)
            assert lhs >= rhs - 1e-9 * (A.trace + B.trace)

    def test_agm_trace(self, pairs):
        for A, B in pairs:
            X = sym_power(A, 0.5) @ sym_power(B, 0.5)
            assert np.trace(A.entries + B.entries - (X + X.T)) >= -1e-9 * (A.trace + B.trace)

    def test_variational_characterization(self, pairs):
        rng = np.random.default_rng(6)
        for A, B in pairs:
            Ar, Br = sym_power(A, 0.5), sym_power(B, 0.5)
            db = d_bures(A, B)
            for _ in range(5):
                Q = random_orthogonal(A.dim, rng)
                assert np.linalg.norm(Ar - Br @ Q) >= db - 1e-9
            # polar factor of B^½ A^½ attains the minimum
            W, _, Vt = np.linalg.svd(Br @ Ar)
            U = W @ Vt
            assert np.linalg.norm(Ar - Br @ U) == pytest.approx(db, rel=1e-8, abs=1e-10)


class TestHelpers:
    def test_clamp(self):
        assert clamp_radicand(-1e-12, 1.0) == 0.0
        assert clamp_radicand(0.5, 1.0) == 0.5
        with pytest.raises(DomainError):
            clamp_radicand(-1e-3, 1.0)

    def test_kind_serialization(self):
        for kind in MetricKind:
            assert MetricKind(kind.value) is kind
        assert not MetricKind("fidelity").is_distance

    def test_dispatch(self):
        assert distance("logdet", D14, D916) == d_logdet(D14, D916)
        assert distance(MetricKind.FIDELITY, D14, D14) == pytest.approx(25.0)
