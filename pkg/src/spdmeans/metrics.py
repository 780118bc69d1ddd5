"""Distances on the SPD cone and quantum fidelity.

``d_logdet`` uses the half-coefficient form

    log det((A+B)/2) - ½ log det(AB),

which is the form satisfying ``d_l(I, X) = log det((X^½ + X^-½)/2)``. The
variant with coefficient 2 on ``log det(AB)`` does not vanish at ``A = B``
and is provided only as
:func:`d_logdet_displayed` for comparison.

Hellinger and Bures-Wasserstein distances are evaluated as Frobenius norms
of differences,

    d_h(A, B) = ||A^½ - B^½||_F
    d_b(A, B) = ||A^½ - B^½ U||_F,  U the optimal orthogonal factor,

which equal the trace formulas exactly but avoid cancellation when
``A`` is close to ``B``.
"""
import enum
import math

import numpy as np

from .exceptions import DomainError, NotPositiveDefiniteError
from .linalg import as_spd, check_same_dim, congruence, eigh, sym_power

#: Relative size of a negative radicand still attributed to roundoff.
RADICAND_TOL = 1e-10


class MetricKind(str, enum.Enum):
    RIEMANNIAN = "riemannian"
    BURES = "bures"
    HELLINGER = "hellinger"
    LOGDET = "logdet"
    FIDELITY = "fidelity"

    @property
    def is_distance(self):
        return self is not MetricKind.FIDELITY


def _pair(A, B):
    A, B = as_spd(A), as_spd(B)
    check_same_dim(A, B)
    return A, B


def _strict(*mats):
    for M in mats:
        if M.semidefinite:
            raise NotPositiveDefiniteError("metric requires strictly positive definite inputs")


def clamp_radicand(value, scale):
    """Clamp a roundoff-negative radicand to 0; raise if clearly negative."""
    if value >= 0:
        return value
    if value >= -RADICAND_TOL * scale:
        return 0.0
    raise DomainError(f"negative radicand {value:.3g} (scale {scale:.3g})")


def d_riemannian(A, B):
    """Affine-invariant distance ``(sum log^2 lambda_i(A^-½ B A^-½))^½``."""
    A, B = _pair(A, B)
    _strict(A, B)
    w = eigh(congruence(sym_power(A, -0.5), B.entries)).eigenvalues
    if w[0] <= 0:
        raise NotPositiveDefiniteError("A^-1/2 B A^-1/2 lost definiteness")
    return float(np.sqrt(np.sum(np.log(w) ** 2)))


def _optimal_rotation(A_root, B_root):
    # max tr(A^½ B^½ U) over orthogonal U: U = Q P^T for A^½ B^½ = P S Q^T
    P, _, Qt = np.linalg.svd(A_root @ B_root)
    return Qt.T @ P.T


def d_bures(A, B):
    """Bures-Wasserstein distance.

    Equal to ``(Tr(A+B) - 2 Tr((A^½ B A^½)^½))^½``; computed as
    ``||A^½ - B^½ U||_F`` with the optimal orthogonal ``U``.
    """
    A, B = _pair(A, B)
    Ar, Br = sym_power(A, 0.5), sym_power(B, 0.5)
    U = _optimal_rotation(Ar, Br)
    return float(np.linalg.norm(Ar - Br @ U))


def d_hellinger(A, B):
    """Hellinger (Bhattacharyya) distance ``||A^½ - B^½||_F``."""
    A, B = _pair(A, B)
    return float(np.linalg.norm(sym_power(A, 0.5) - sym_power(B, 0.5)))


def _logdet(M):
    L = np.linalg.cholesky(M)
    return 2.0 * float(np.sum(np.log(np.diag(L))))


def d_logdet(A, B):
    """Log-determinant divergence ``log det((A+B)/2) - ½ log det(AB)``.

    Determinants via Cholesky factors. Nonnegative, symmetric, and zero
    only at ``A = B``.
    """
    A, B = _pair(A, B)
    _strict(A, B)
    try:
        la, lb = _logdet(A.entries), _logdet(B.entries)
        lm = _logdet(0.5 * (A.entries + B.entries))
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(str(exc)) from exc
    value = lm - 0.5 * (la + lb)
    return clamp_radicand(value, abs(lm) + 0.5 * (abs(la) + abs(lb)) + A.dim)


def d_logdet_displayed(A, B):
    """``log det((A+B)/2) - 2 log det(AB)``, as sometimes printed.

    Not a divergence; kept for side-by-side comparison with :func:`d_logdet`.
    """
    A, B = _pair(A, B)
    _strict(A, B)
    return _logdet(0.5 * (A.entries + B.entries)) - 2.0 * (_logdet(A.entries) + _logdet(B.entries))


def root_fidelity(A, B):
    """``Tr((A^½ B A^½)^½)``, the square root of the fidelity."""
    A, B = _pair(A, B)
    Ar = sym_power(A, 0.5)
    w = eigh(congruence(Ar, B.entries)).eigenvalues
    top = max(abs(w[-1]), np.finfo(float).tiny)
    if w[0] < -RADICAND_TOL * top:
        raise DomainError("A^1/2 B A^1/2 is not positive semidefinite")
    return float(np.sum(np.sqrt(np.clip(w, 0.0, None))))


def fidelity(A, B):
    """Fidelity ``F(A, B) = (Tr((A^½ B A^½)^½))^2``.

    Accepts any SPD pair; for density matrices ``0 <= F <= 1``.
    """
    return root_fidelity(A, B) ** 2


def bures_from_fidelity(A, B):
    """Bures-Wasserstein distance through the trace formula (clamped radicand)."""
    A, B = _pair(A, B)
    tr = A.trace + B.trace
    return math.sqrt(clamp_radicand(tr - 2.0 * root_fidelity(A, B), tr))


_DISTANCES = {
    MetricKind.RIEMANNIAN: d_riemannian,
    MetricKind.BURES: d_bures,
    MetricKind.HELLINGER: d_hellinger,
    MetricKind.LOGDET: d_logdet,
    MetricKind.FIDELITY: fidelity,
}


def distance(kind, A, B):
    """Dispatch on :class:`MetricKind` (fidelity included)."""
    return _DISTANCES[MetricKind(kind)](A, B)
