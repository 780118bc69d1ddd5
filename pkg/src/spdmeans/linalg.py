"""Validated SPD matrices and spectral functional calculus.

Every mean and metric in the package is built from :func:`eigh` and
:func:`fun_calc`; there are no Newton/Schur iterations anywhere.
"""
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import (
    ConvergenceFailure,
    DimMismatchError,
    DomainError,
    NonSquareError,
    NotDensityError,
    NotPositiveDefiniteError,
    NotSymmetricError,
    SpdError,
)

#: Relative eigenvalue floor: SPD requires ``lambda_min > SPD_FLOOR * lambda_max``.
SPD_FLOOR = 1e-12
#: Allowed negative eigenvalue (relative) on the semidefinite path.
PSD_FLOOR = 1e-10
#: Default relative asymmetry accepted by :func:`validate_spd`.
SYM_TOL = 1e-8


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectral factorization ``M = V diag(w) V^T`` with ascending ``w``."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def apply(self, values):
        """Return ``V diag(values) V^T``, symmetrized."""
        V = self.eigenvectors
        out = (V * values) @ V.T
        return (out + out.T) / 2

    def reconstruct(self):
        return self.apply(self.eigenvalues)


def _as_square(M):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise NonSquareError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise SpdError("matrix has non-finite entries")
    return M


def eigh(M):
    """Eigendecomposition of a real symmetric matrix.

    The input is symmetrized as ``(M + M^T) / 2`` before factorization.

    Parameters
    ----------
    M : array_like, shape (n, n)

    Returns
    -------
    EigenDecomposition
        Ascending eigenvalues, orthogonal eigenvectors as columns.
    """
    M = _as_square(M)
    try:
        w, V = np.linalg.eigh((M + M.T) / 2)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    return EigenDecomposition(w, V)


class SpdMatrix:
    """Real symmetric positive definite matrix with its cached spectrum.

    Construction validates symmetry (relative to the largest entry) and
    positivity (``lambda_min > SPD_FLOOR * lambda_max``). With
    ``semidefinite=True`` eigenvalues down to ``-PSD_FLOOR * lambda_max`` are
    accepted and clamped to zero; such matrices carry the flag so that
    callers needing inverses or logarithms can reject them.

    Instances are immutable: ``entries`` is a read-only array.
    """

    __slots__ = ("_entries", "_eig", "semidefinite")

    def __init__(self, M, tol=SYM_TOL, semidefinite=False):
        if isinstance(M, SpdMatrix):
            M = M.entries
        M = _as_square(M)
        scale = np.max(np.abs(M)) if M.size else 0.0
        asym = np.max(np.abs(M - M.T)) if M.size else 0.0
        if asym > tol * max(scale, np.finfo(float).tiny):
            raise NotSymmetricError(
                f"asymmetry {asym:.3g} exceeds tolerance {tol:.3g} (relative to {scale:.3g})"
            )
        eig = eigh(M)
        w = eig.eigenvalues
        top = np.max(np.abs(w))
        if semidefinite:
            if w[0] < -PSD_FLOOR * top or top == 0:
                raise NotPositiveDefiniteError(
                    f"not positive semidefinite: min eigenvalue {w[0]:.6g}"
                )
            eig = EigenDecomposition(np.clip(w, 0.0, None), eig.eigenvectors)
        elif not w[0] > SPD_FLOOR * top:
            raise NotPositiveDefiniteError(
                f"not positive definite: min eigenvalue {w[0]:.6g} "
                f"<= floor {SPD_FLOOR * top:.3g}"
            )
        self._init((M + M.T) / 2, eig, semidefinite)

    def _init(self, entries, eig, semidefinite):
        entries = np.array(entries, dtype=float)
        entries.flags.writeable = False
        eig.eigenvalues.flags.writeable = False
        eig.eigenvectors.flags.writeable = False
        self._entries = entries
        self._eig = eig
        self.semidefinite = bool(semidefinite)

    @classmethod
    def _from_eig(cls, eig, semidefinite=False):
        # trusted constructor: positivity still enforced, no second eigh
        w = eig.eigenvalues
        order = np.argsort(w)
        eig = EigenDecomposition(w[order], eig.eigenvectors[:, order])
        w = eig.eigenvalues
        top = np.max(np.abs(w))
        floor = -PSD_FLOOR * top if semidefinite else SPD_FLOOR * top
        if (semidefinite and w[0] < floor) or (not semidefinite and not w[0] > floor):
            raise NotPositiveDefiniteError(f"result lost definiteness: min eigenvalue {w[0]:.6g}")
        if semidefinite:
            eig = EigenDecomposition(np.clip(w, 0.0, None), eig.eigenvectors)
        obj = cls.__new__(cls)
        obj._init(eig.reconstruct(), eig, semidefinite)
        return obj

    @property
    def entries(self):
        return self._entries

    @property
    def eig(self):
        return self._eig

    @property
    def dim(self):
        return self._entries.shape[0]

    @property
    def trace(self):
        return float(np.trace(self._entries))

    @property
    def condition_number(self):
        w = self._eig.eigenvalues
        return np.inf if w[0] == 0 else float(w[-1] / w[0])

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries.copy()
        return self._entries.astype(dtype)

    def __repr__(self):
        flag = ", semidefinite=True" if self.semidefinite else ""
        return f"SpdMatrix({self._entries.tolist()!r}{flag})"

    def tolist(self):
        return self._entries.tolist()


class DensityMatrix(SpdMatrix):
    """SPD matrix with unit trace (a quantum state)."""

    __slots__ = ()
    TRACE_TOL = 1e-12

    def __init__(self, M, tol=SYM_TOL):
        super().__init__(M, tol=tol)
        if abs(self.trace - 1.0) > self.TRACE_TOL:
            raise NotDensityError(f"trace {self.trace!r} != 1")

    @classmethod
    def normalize(cls, M):
        M = as_spd(M).entries
        return cls(M / np.trace(M))


def validate_spd(M, tol=SYM_TOL, semidefinite=False):
    """Validate ``M`` and return it as an :class:`SpdMatrix`.

    Small asymmetries (``max|M - M^T| <= tol * max|M|``) are removed by
    symmetrization; anything larger raises :class:`NotSymmetricError`.
    Raises :class:`NotPositiveDefiniteError` when the smallest eigenvalue is
    at or below ``SPD_FLOOR * lambda_max``.
    """
    return SpdMatrix(M, tol=tol, semidefinite=semidefinite)


def as_spd(M):
    """Return ``M`` unchanged if already validated, else validate it."""
    return M if isinstance(M, SpdMatrix) else SpdMatrix(M)


def _spectral_map(f, w):
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if fw.shape != w.shape:
        fw = np.broadcast_to(fw, w.shape).astype(float)
    if not np.all(np.isfinite(fw)):
        bad = w[~np.isfinite(fw)]
        raise DomainError(f"function undefined at eigenvalue(s) {bad.tolist()}")
    return fw


def fun_calc(M, f: Callable[[np.ndarray], np.ndarray]):
    """Apply a scalar function through the spectral decomposition.

    Parameters
    ----------
    M : SpdMatrix or array_like
        Validated (or validatable) SPD matrix.
    f : callable
        Vectorized scalar function on positive reals.

    Returns
    -------
    ndarray, shape (n, n)
        ``V diag(f(w)) V^T``. Not wrapped as :class:`SpdMatrix` since ``f``
        may take non-positive values (``log`` for instance).
    """
    M = as_spd(M)
    return M.eig.apply(_spectral_map(f, M.eig.eigenvalues))


def spd_power(M, r):
    """Real power ``M^r`` of an SPD matrix.

    For a semidefinite ``M`` only ``r > 0`` is defined.
    """
    M = as_spd(M)
    r = float(r)
    if r == 0.0:
        return SpdMatrix._from_eig(EigenDecomposition(np.ones(M.dim), np.eye(M.dim)))
    w = M.eig.eigenvalues
    if M.semidefinite and r < 0 and np.any(w == 0):
        raise DomainError("negative power of a singular matrix")
    wr = _spectral_map(lambda x: x**r, w)
    return SpdMatrix._from_eig(EigenDecomposition(wr, M.eig.eigenvectors), M.semidefinite)


def sym_power(M, r):
    """``M^r`` as a plain array, without re-validating the result.

    Used for intermediate quantities whose condition number may exceed
    the SPD floor (``A^4`` of a moderately conditioned ``A``).
    """
    M = as_spd(M)
    if M.semidefinite and r < 0 and np.any(M.eig.eigenvalues == 0):
        raise DomainError("negative power of a singular matrix")
    return M.eig.apply(_spectral_map(lambda x: x**r, M.eig.eigenvalues))


def psd_power(M, r):
    """``M^r`` for a symmetric array, with tiny negative eigenvalues clamped."""
    e = eigh(M)
    w = e.eigenvalues
    top = np.max(np.abs(w)) if w.size else 0.0
    if w.size and w[0] < -PSD_FLOOR * top:
        raise NotPositiveDefiniteError(f"not positive semidefinite: min eigenvalue {w[0]:.6g}")
    w = np.clip(w, 0.0, None)
    return e.apply(_spectral_map(lambda x: x**r, w))


def congruence(X, M):
    """``X M X^T`` symmetrized."""
    out = X @ M @ X.T
    return (out + out.T) / 2


def check_same_dim(*mats):
    dims = {m.dim for m in mats}
    if len(dims) > 1:
        raise DimMismatchError(f"dimension mismatch: {sorted(dims)}")
