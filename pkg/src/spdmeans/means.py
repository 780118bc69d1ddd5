"""Two-variable matrix means and the curves they trace.

Weight conventions follow each family's defining formula and therefore
differ between families:

============  ======================================  =================
family        formula                                 ``t = 1`` gives
============  ======================================  =================
power_bs      ``(t A^p + (1-t) B^p)^(1/p)``            ``A``
power_ka      ``A^½ (t I + (1-t) C^p)^(1/p) A^½``      ``A``
geodesic      ``A^½ C^t A^½``                          ``B``
arithmetic    ``(1-t) A + t B``                        ``B``
harmonic      ``power_bs(-1, 1/2)``                    (no weight)
heron         ``t A#B + (1-t) A∇B``                    ``A#B``
diamond       ``(A#B) #_t (A∇B)``                      ``A∇B``
============  ======================================  =================

where ``C = A^-½ B A^-½``. :func:`weight_on_b` converts a family's ``t``
into the weight carried by ``B`` for the families that join ``A`` and ``B``.
"""
import enum
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import DomainError, ParameterError, ZeroPError
from .linalg import (
    EigenDecomposition,
    SpdMatrix,
    as_spd,
    check_same_dim,
    congruence,
    eigh,
    sym_power,
)


class Family(str, enum.Enum):
    POWER_BS = "power_bs"
    POWER_KA = "power_ka"
    GEODESIC = "geodesic"
    ARITHMETIC = "arithmetic"
    HARMONIC = "harmonic"
    HERON = "heron"
    DIAMOND = "diamond"

    @property
    def needs_p(self):
        return self in (Family.POWER_BS, Family.POWER_KA)


#: Which endpoint ``t = 1`` reaches, per family.
WEIGHT_CONVENTION = {
    Family.POWER_BS: "A",
    Family.POWER_KA: "A",
    Family.GEODESIC: "B",
    Family.ARITHMETIC: "B",
    Family.HARMONIC: None,
    Family.HERON: "A#B",
    Family.DIAMOND: "A∇B",
}


def weight_on_b(family, t):
    """Weight on ``B`` implied by parameter ``t`` of ``family``.

    Returns ``None`` for families whose curve does not join ``A`` and ``B``.
    """
    end = WEIGHT_CONVENTION[Family(family)]
    if end == "A":
        return 1.0 - t
    if end == "B":
        return t
    return None


def _check_t(t):
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ParameterError(f"t={t!r} outside [0, 1]")
    return t


def _check_p(p):
    if p is None:
        raise ZeroPError("p is required for power means")
    p = float(p)
    if p == 0.0:
        raise ZeroPError("p = 0 is not supported")
    if not math.isfinite(p):
        raise ParameterError(f"p={p!r} is not finite")
    return p


@dataclass(frozen=True)
class MeanSpec:
    """A mean family together with its parameters.

    ``p`` is required (nonzero) for ``power_bs``/``power_ka`` and must be
    omitted otherwise. ``t`` is ignored by ``harmonic``.
    """

    family: Family
    t: float = 0.5
    p: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "t", _check_t(self.t))
        if self.family.needs_p:
            object.__setattr__(self, "p", _check_p(self.p))
        elif self.p is not None:
            raise ParameterError(f"family {self.family.value} takes no p")

    def to_dict(self):
        d = {"family": self.family.value}
        if self.p is not None:
            d["p"] = self.p
        d["t"] = self.t
        return d

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - {"family", "p", "t"}
        if unknown:
            raise ParameterError(f"unknown MeanSpec keys {sorted(unknown)}")
        return cls(Family(d["family"]), d.get("t", 0.5), d.get("p"))

    def with_t(self, t):
        return MeanSpec(self.family, t, self.p)


def _pair(A, B):
    A, B = as_spd(A), as_spd(B)
    check_same_dim(A, B)
    return A, B


def _from_array(M, semidefinite):
    return SpdMatrix(M, semidefinite=semidefinite)


def _root(X, q, semidefinite):
    """``X^q`` for a symmetric array known to be PSD, as SpdMatrix."""
    e = eigh(X)
    w = e.eigenvalues
    if semidefinite or q > 0:
        # X is a positive combination; tiny negatives are roundoff
        w = np.clip(w, 0.0, None)
    with np.errstate(all="ignore"):
        wq = w**q
    if not np.all(np.isfinite(wq)):
        raise DomainError(f"power {q} undefined on the spectrum {w.tolist()}")
    return SpdMatrix._from_eig(EigenDecomposition(wq, e.eigenvectors), semidefinite)


def _kubo_ando(A, B, f):
    """``A^½ f(A^-½ B A^-½) A^½`` with ``f`` applied to the spectrum."""
    if A.semidefinite and A.eig.eigenvalues[0] == 0:
        raise DomainError("Kubo-Ando means need an invertible first argument")
    root = sym_power(A, 0.5)
    inv_root = sym_power(A, -0.5)
    e = eigh(congruence(inv_root, B.entries))
    w = e.eigenvalues
    if B.semidefinite:
        w = np.clip(w, 0.0, None)
    with np.errstate(all="ignore"):
        fw = np.asarray(f(w), dtype=float)
    if not np.all(np.isfinite(fw)):
        raise DomainError("representing function undefined on the spectrum of A^-1/2 B A^-1/2")
    return _from_array(congruence(root, e.apply(fw)), B.semidefinite)


def power_mean_bs(p, t, A, B):
    """Power mean ``(t A^p + (1-t) B^p)^(1/p)``; ``t`` weights ``A``.

    ``p = -1, t = 1/2`` is the harmonic mean, ``p = 1`` the weighted
    arithmetic mean with weight ``t`` on ``A``.
    """
    p, t = _check_p(p), _check_t(t)
    A, B = _pair(A, B)
    # exact endpoints: (B^p)^(1/p) loses the small spectrum once cond^p ~ 1/eps
    if t == 0.0:
        return B
    if t == 1.0:
        return A
    X = t * sym_power(A, p) + (1.0 - t) * sym_power(B, p)
    return _root(X, 1.0 / p, A.semidefinite or B.semidefinite)


def power_mean_ka(p, t, A, B):
    """Kubo-Ando power mean ``A^½ (t I + (1-t) C^p)^(1/p) A^½``.

    ``C = A^-½ B A^-½``; ``t = 1`` gives ``A`` and ``t = 0`` gives ``B``.
    For ``p = 1/2, t = 1/2`` this expands to ``(A + B + 2 A#B) / 4``.
    """
    p, t = _check_p(p), _check_t(t)
    A, B = _pair(A, B)
    return _kubo_ando(A, B, lambda w: (t + (1.0 - t) * w**p) ** (1.0 / p))


def geodesic(t, A, B):
    """Weighted geometric mean ``A #_t B = A^½ C^t A^½``; ``t = 1`` gives ``B``."""
    t = _check_t(t)
    A, B = _pair(A, B)
    return _kubo_ando(A, B, lambda w: w**t)


def geometric(A, B):
    return geodesic(0.5, A, B)


def arithmetic(t, A, B):
    """Weighted arithmetic mean ``(1-t) A + t B``."""
    t = _check_t(t)
    A, B = _pair(A, B)
    return _from_array((1.0 - t) * A.entries + t * B.entries, A.semidefinite or B.semidefinite)


def harmonic(A, B):
    return power_mean_bs(-1.0, 0.5, A, B)


def heron(t, A, B):
    """Weighted Heron mean ``t A#B + (1-t) A∇B``."""
    t = _check_t(t)
    A, B = _pair(A, B)
    G = geodesic(0.5, A, B)
    M = 0.5 * (A.entries + B.entries)
    return _from_array(t * G.entries + (1.0 - t) * M, G.semidefinite)


def diamond(t, A, B):
    """Geodesic from ``A#B`` (``t = 0``) to ``A∇B`` (``t = 1``)."""
    t = _check_t(t)
    A, B = _pair(A, B)
    return geodesic(t, geodesic(0.5, A, B), arithmetic(0.5, A, B))


def evaluate(spec, A, B):
    """Evaluate the mean described by ``spec`` at ``(A, B)``."""
    f = spec.family
    if f is Family.POWER_BS:
        return power_mean_bs(spec.p, spec.t, A, B)
    if f is Family.POWER_KA:
        return power_mean_ka(spec.p, spec.t, A, B)
    if f is Family.GEODESIC:
        return geodesic(spec.t, A, B)
    if f is Family.ARITHMETIC:
        return arithmetic(spec.t, A, B)
    if f is Family.HARMONIC:
        return harmonic(A, B)
    if f is Family.HERON:
        return heron(spec.t, A, B)
    if f is Family.DIAMOND:
        return diamond(spec.t, A, B)
    raise ParameterError(f"unknown family {f!r}")
