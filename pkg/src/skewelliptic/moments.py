"""Closed-form moments of skew-elliptical laws.

Third-order moments are stored as ``k^2 x k`` matrices in Kronecker layout:
``E[X_i X_j X_r]`` lives at row ``(i-1)k + r`` and column ``j`` (1-based).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distribution import SkewElliptical
from .generators import GeneratorFamily, MomentExistenceError
from .numerics import DomainError, kron, psd_inverse_sqrt, vec


@dataclass(frozen=True)
class CanonicalMoments:
    """Nonzero mixed moments (order <= 4) of the canonical form
    ``SE(0, I, (delta*, 0, ...), g)``; ``None`` where the moment does not
    exist.

    ``first = E[Y1]``, ``second = E[Yj^2]`` (all j), ``third_own = E[Y1^3]``,
    ``third_cross = E[Y1 Yj^2]`` (j > 1), ``fourth_own = E[Yj^4]`` and
    ``fourth_cross = E[Yi^2 Yj^2]`` (i != j).
    """

    first: float | None
    second: float | None
    third_own: float | None
    third_cross: float | None
    fourth_own: float | None
    fourth_cross: float | None


@dataclass(frozen=True)
class ThirdMomentTensor:
    """Third-order moment array in ``k^2 x k`` Kronecker layout."""

    matrix: np.ndarray

    @property
    def k(self) -> int:
        return self.matrix.shape[1]

    def lookup(self, i: int, j: int, r: int) -> float:
        """``E[X_i X_j X_r]`` with 1-based indices."""
        k = self.k
        for idx in (i, j, r):
            if not (isinstance(idx, (int, np.integer)) and 1 <= idx <= k):
                raise IndexError(f"index {idx!r} outside 1..{k}")
        return float(self.matrix[(i - 1) * k + (r - 1), j - 1])

    def as_array(self) -> np.ndarray:
        """Dense ``k x k x k`` array ``E[i, j, r]`` (0-based)."""
        k = self.k
        # row (i, r) and column j -> [i, r, j]
        return self.matrix.reshape(k, k, k).transpose(0, 2, 1).copy()

    @classmethod
    def from_array(cls, E: np.ndarray) -> "ThirdMomentTensor":
        k = E.shape[0]
        return cls(np.asarray(E, dtype=float).transpose(0, 2, 1).reshape(k * k, k))


def tensor_lookup(T: ThirdMomentTensor, i: int, j: int, r: int) -> float:
    return T.lookup(i, j, r)


def _constants(fam: GeneratorFamily, order: int):
    top = fam.max_moment_order()
    if top < order:
        cond = fam.existence_condition(top + 1)
        raise MomentExistenceError(top + 1, cond)
    return fam.moment_constants(order)


def canonical_moments(fam: GeneratorFamily, delta_star: float) -> CanonicalMoments:
    """Mixed moments of the canonical form up to the highest existing order."""
    top = fam.max_moment_order()
    if top < 1:
        raise MomentExistenceError(1, fam.existence_condition(1))
    mc = fam.moment_constants(top)
    s = float(delta_star)
    vals = [
        mc.a * s,
        mc.b,
        None if mc.c is None else mc.c * (3 * s - s**3),
        None if mc.c is None else mc.c * s,
        None if mc.d is None else 3 * mc.d,
        mc.d,
    ]
    return CanonicalMoments(*vals)


def mean_and_covariance(D: SkewElliptical) -> tuple[np.ndarray, np.ndarray]:
    """``xi = mu + a delta`` and ``Var(Y) = b Omega - a^2 delta delta^T``."""
    mc = _constants(D.family, 2)
    xi = D.mu + mc.a * D.delta
    V = mc.b * D.Omega - mc.a**2 * np.outer(D.delta, D.delta)
    return xi, 0.5 * (V + V.T)


def raw_second_moment(D: SkewElliptical) -> np.ndarray:
    """``E[Y Y^T] = mu mu^T + a (mu delta^T + delta mu^T) + b Omega``."""
    mc = _constants(D.family, 2)
    mu, de = D.mu, D.delta
    return np.outer(mu, mu) + mc.a * (np.outer(mu, de) + np.outer(de, mu)) + mc.b * D.Omega


def _skew_block(Om: np.ndarray, de: np.ndarray) -> np.ndarray:
    """``delta x Omega + vec(Omega) delta^T + (I x delta) Omega - (I x delta)(delta delta^T)``."""
    k = de.size
    Id = kron(np.eye(k), de)
    return kron(de, Om) + np.outer(vec(Om), de) + Id @ Om - Id @ np.outer(de, de)


def raw_third_moment(D: SkewElliptical) -> ThirdMomentTensor:
    """``E[Y x Y^T x Y]`` from ``mu, Omega, delta`` and the constants ``a, b, c``."""
    mc = _constants(D.family, 3)
    mu, de, Om = D.mu, D.delta, D.Omega
    mm = np.outer(mu, mu)
    M = kron(mm, mu)
    M += mc.a * (kron(np.outer(de, mu), mu) + kron(np.outer(mu, de), mu) + kron(mm, de))
    M += mc.b * (kron(Om, mu) + kron(mu, Om) + np.outer(vec(Om), mu))
    M += mc.c * _skew_block(Om, de)
    return ThirdMomentTensor(M)


def standardized_third_moment(D: SkewElliptical) -> ThirdMomentTensor:
    """Third moments of ``Z = Var(Y)^{-1/2} (Y - E[Y])`` (symmetric root)."""
    mc = _constants(D.family, 3)
    _, V = mean_and_covariance(D)
    S = psd_inverse_sqrt(V)
    OZ = S @ D.Omega @ S
    dZ = S @ D.delta
    a, b, c = mc.a, mc.b, mc.c
    M = 2 * a**3 * kron(np.outer(dZ, dZ), dZ)
    M -= a * b * (kron(OZ, dZ) + kron(dZ, OZ) + np.outer(vec(OZ), dZ))
    M += c * _skew_block(OZ, dZ)
    return ThirdMomentTensor(M)


def central_third_moment(mean, M2, M3: ThirdMomentTensor | np.ndarray) -> ThirdMomentTensor:
    """Central third moments from raw ones:
    ``M3 - M2 x E - E x M2 - vec(M2) E^T + 2 E E^T x E``."""
    E = np.atleast_1d(np.asarray(mean, dtype=float))
    M2 = np.atleast_2d(np.asarray(M2, dtype=float))
    raw = M3.matrix if isinstance(M3, ThirdMomentTensor) else np.asarray(M3, dtype=float)
    k = E.size
    if M2.shape != (k, k) or raw.shape != (k * k, k):
        raise DomainError("central_third_moment: non-conformable inputs")
    out = raw - kron(M2, E) - kron(E, M2) - np.outer(vec(M2), E) + 2 * kron(np.outer(E, E), E)
    return ThirdMomentTensor(out)


def transform_tensor(T: ThirdMomentTensor, A: np.ndarray) -> ThirdMomentTensor:
    """Third moments of ``A X`` given those of ``X``."""
    E = np.einsum("ai,bj,cr,ijr->abc", A, A, A, T.as_array())
    return ThirdMomentTensor.from_array(E)
