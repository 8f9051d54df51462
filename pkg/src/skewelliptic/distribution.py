"""The skew-elliptical distribution object.

``SE_k(mu, Omega, delta, g)`` has density

.. math::

    f(y) = 2|\\Omega|^{-1/2}\\int_{-\\infty}^{\\alpha^\\top(y-\\mu)}
           g^{(k+1)}\\big(r^2 + (y-\\mu)^\\top\\Omega^{-1}(y-\\mu)\\big)\\,dr,
    \\qquad \\alpha = \\frac{\\Omega^{-1}\\delta}{\\sqrt{1-\\delta^\\top\\Omega^{-1}\\delta}}.

It is the law of ``mu + R (delta |U1| + B Up)`` where ``(U1, Up)`` is uniform on
the unit sphere of R^{k+1}, ``R`` has the radial law of ``g`` and
``B B^T = Omega - delta delta^T``.

Shape conventions
-----------------
The affine image with scale ``I_k`` has shape ``(s, 0, ..., 0)`` with
``s = sqrt(delta^T Omega^{-1} delta)``; this is the ``"exact"`` canonical shape
and the one every closed form in this package is consistent with (density,
sampler, moment tensors).  Some published tables were computed by plugging
``delta^T Omega^{-1} delta`` itself into the canonical-shape formulas; that
number is available as the ``"squared"`` convention.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .generators import GeneratorFamily
from .numerics import DomainError

Convention = Literal["exact", "squared"]
CONVENTIONS = ("exact", "squared")


class ValidationError(DomainError):
    """Base class for invalid distribution parameters."""


class DimensionError(ValidationError):
    pass


class ScaleMatrixError(ValidationError):
    """Omega is not symmetric positive definite."""


class ShapeNormError(ValidationError):
    """``delta^T Omega^{-1} delta >= 1``."""


class ShapeComponentError(ValidationError):
    """Some ``|delta_i| > 1``."""


class UnsupportedMarginalError(DomainError):
    """No closed-form univariate marginal density for this family."""


class BoundaryShapeWarning(UserWarning):
    """A shape component sits exactly on ``|delta_i| = 1``."""


def _check_convention(convention: str) -> None:
    if convention not in CONVENTIONS:
        raise DomainError(f"convention must be one of {CONVENTIONS}, got {convention!r}")


@dataclass(frozen=True, eq=False)
class SkewElliptical:
    """Parameters ``(mu, Omega, delta)`` and a generator family.

    Use :func:`validate` (or :meth:`SkewElliptical.create`) to build one;
    the raw constructor only checks shapes and positive definiteness.
    """

    mu: np.ndarray
    Omega: np.ndarray
    delta: np.ndarray
    family: GeneratorFamily
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        mu = np.atleast_1d(np.asarray(self.mu, dtype=float)).copy()
        Om = np.atleast_2d(np.asarray(self.Omega, dtype=float)).copy()
        de = np.atleast_1d(np.asarray(self.delta, dtype=float)).copy()
        k = mu.size
        if mu.ndim != 1 or de.shape != (k,) or Om.shape != (k, k):
            raise DimensionError(f"dimension mismatch: mu {mu.shape}, Omega {Om.shape}, delta {de.shape}")
        if self.family.k != k:
            raise DimensionError(f"family dimension {self.family.k} does not match k={k}")
        if not (np.all(np.isfinite(mu)) and np.all(np.isfinite(Om)) and np.all(np.isfinite(de))):
            raise ValidationError("parameters must be finite")
        if np.max(np.abs(Om - Om.T)) > 1e-12 * max(1.0, np.max(np.abs(Om))):
            raise ScaleMatrixError("Omega is not symmetric")
        Om = 0.5 * (Om + Om.T)
        try:
            L = np.linalg.cholesky(Om)
        except np.linalg.LinAlgError:
            raise ScaleMatrixError("Omega is not positive definite") from None
        for name, arr in (("mu", mu), ("Omega", Om), ("delta", de)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        L.setflags(write=False)
        object.__setattr__(self, "_chol", L)
        w = np.linalg.solve(Om, de)
        q = float(de @ w)
        if not q < 1:
            raise ShapeNormError(f"delta^T Omega^-1 delta = {q:.6g} must be < 1")
        object.__setattr__(self, "_omega_inv_delta", w)
        object.__setattr__(self, "_shape_norm_sq", q)

    @classmethod
    def create(cls, mu, Omega, delta, family: GeneratorFamily) -> "SkewElliptical":
        return validate(mu, Omega, delta, family)

    @property
    def k(self) -> int:
        return self.mu.size

    @property
    def shape_norm_sq(self) -> float:
        """``delta^T Omega^{-1} delta``."""
        return self._shape_norm_sq

    @property
    def alpha(self) -> np.ndarray:
        return self._omega_inv_delta / math.sqrt(1.0 - self._shape_norm_sq)

    def delta_star(self, convention: Convention = "exact") -> float:
        """Canonical shape: ``sqrt(delta^T Omega^-1 delta)`` (exact) or
        ``delta^T Omega^-1 delta`` (squared)."""
        _check_convention(convention)
        q = self._shape_norm_sq
        return math.sqrt(q) if convention == "exact" else q

    def with_family(self, family: GeneratorFamily) -> "SkewElliptical":
        return SkewElliptical(self.mu, self.Omega, self.delta, family, self.warnings)

    # convenience methods forwarding to module functions
    def pdf(self, y):
        return pdf(self, y)

    def sample(self, n: int, seed=None, block_size: int = 65536) -> np.ndarray:
        return sample(self, n, seed, block_size)

    def __repr__(self):
        return (f"SkewElliptical(k={self.k}, family={self.family.label}, mu={self.mu.tolist()}, "
                f"Omega={self.Omega.tolist()}, delta={self.delta.tolist()})")


def validate(mu, Omega, delta, family: GeneratorFamily | str) -> SkewElliptical:
    """Build a :class:`SkewElliptical`, checking every parameter constraint.

    Raises a distinct :class:`ValidationError` subclass for a dimension
    mismatch, a non-PD or asymmetric ``Omega``, ``delta^T Omega^-1 delta >= 1``
    and ``|delta_i| > 1``.  Components with ``|delta_i| = 1`` are accepted with
    a :class:`BoundaryShapeWarning`.
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=float))
    if isinstance(family, str):
        family = GeneratorFamily.parse(family, mu.size)
    de = np.atleast_1d(np.asarray(delta, dtype=float))
    notes: list[str] = []
    if de.ndim == 1 and np.any(np.abs(de) > 1):
        bad = np.flatnonzero(np.abs(de) > 1)
        raise ShapeComponentError(f"|delta_i| > 1 at component(s) {(bad + 1).tolist()}")
    if np.any(np.abs(de) == 1):
        msg = "shape component on the boundary |delta_i| = 1"
        warnings.warn(msg, BoundaryShapeWarning, stacklevel=2)
        notes.append(msg)
    return SkewElliptical(mu, Omega, de, family, tuple(notes))


def pdf(D: SkewElliptical, y) -> float | np.ndarray:
    """Density at ``y`` (a length-``k`` vector or an ``n x k`` array)."""
    Y = np.asarray(y, dtype=float)
    single = Y.ndim <= 1
    Y = Y.reshape(-1, D.k)
    Z = Y - D.mu
    S = np.linalg.solve(D._chol, Z.T)
    q = np.sum(S * S, axis=0)
    x = Z @ D.alpha
    log_det_half = float(np.sum(np.log(np.diag(D._chol))))
    scale = 2.0 * math.exp(-log_det_half)
    fam = D.family
    out = np.array([scale * fam.tail(float(xi), float(qi)) for xi, qi in zip(x, q)])
    out = np.maximum(out, 0.0)
    return float(out[0]) if single else out


def affine_transform(D: SkewElliptical, A, b) -> SkewElliptical:
    """Law of ``A Y + b``: ``SE(A mu + b, A Omega A^T, A delta, g)``."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if A.shape != (D.k, D.k) or b.shape != (D.k,):
        raise DimensionError("A must be k x k and b length k")
    if np.linalg.matrix_rank(A) < D.k:
        raise DomainError("affine map A is singular")
    Om = A @ D.Omega @ A.T
    # the componentwise bound on delta belongs to one particular stochastic
    # representation and is not preserved by affine maps; the law stays valid
    return SkewElliptical(A @ D.mu + b, 0.5 * (Om + Om.T), A @ D.delta, D.family)


@dataclass(frozen=True)
class CanonicalForm:
    """``A_star`` maps ``Y - mu`` to scale ``I`` and shape ``(delta_star, 0, ...)``.

    ``delta_star`` is the exact canonical shape; ``squared_delta_star`` is
    ``delta^T Omega^-1 delta``.
    """

    A_star: np.ndarray
    delta_star: float
    squared_delta_star: float


def _complete_basis(v: np.ndarray) -> np.ndarray:
    """Orthogonal matrix with first column ``v / |v|`` (modified Gram-Schmidt,
    two passes)."""
    k = v.size
    cols = [v / np.linalg.norm(v)]
    # add coordinate axes in order of least alignment with v
    for j in np.argsort(np.abs(cols[0]), kind="stable"):
        if len(cols) == k:
            break
        w = np.zeros(k)
        w[j] = 1.0
        for _ in range(2):
            for c in cols:
                w = w - (c @ w) * c
        nrm = np.linalg.norm(w)
        if nrm > 1e-8:
            cols.append(w / nrm)
    return np.column_stack(cols)


def canonicalize(D: SkewElliptical) -> CanonicalForm:
    """Linear map taking ``D`` to canonical form.

    With ``Omega = C^T C`` (``C`` upper Cholesky) and ``P`` orthogonal with
    first column along ``C Omega^{-1} delta``, ``A_star = (C^{-1} P)^T``.
    """
    C = D._chol.T
    if np.all(D.delta == 0):
        P = np.eye(D.k)
    else:
        P = _complete_basis(C @ D._omega_inv_delta)
    A_star = np.linalg.solve(C, P).T
    return CanonicalForm(A_star, D.delta_star("exact"), D.delta_star("squared"))


def canonical(D: SkewElliptical) -> SkewElliptical:
    """The canonical member ``SE(0, I, (delta*, 0, ...), g)`` of ``D``'s orbit."""
    delta = np.zeros(D.k)
    delta[0] = D.delta_star("exact")
    return SkewElliptical(np.zeros(D.k), np.eye(D.k), delta, D.family)


def delta_from_lambda(lam, Omega) -> np.ndarray:
    """``delta = Omega^{1/2} lambda / sqrt(1 + lambda^T lambda)`` with the
    symmetric square root."""
    from .numerics import psd_sqrt

    lam = np.atleast_1d(np.asarray(lam, dtype=float))
    Om = np.atleast_2d(np.asarray(Omega, dtype=float))
    return psd_sqrt(Om) @ lam / math.sqrt(1.0 + lam @ lam)


def lambda_from_delta(delta, Omega) -> np.ndarray:
    """Inverse of :func:`delta_from_lambda`; needs ``delta^T Omega^-1 delta < 1``."""
    from .numerics import psd_inverse_sqrt

    de = np.atleast_1d(np.asarray(delta, dtype=float))
    v = psd_inverse_sqrt(np.atleast_2d(np.asarray(Omega, dtype=float))) @ de
    s = v @ v
    if not s < 1:
        raise ShapeNormError("delta^T Omega^-1 delta must be < 1")
    return v / math.sqrt(1.0 - s)


_MARGINAL_TAGS = {
    "normal": "normal generator g^(2)",
    "t": "Student t generator g^(2) with the same degrees of freedom",
}


@dataclass(frozen=True)
class LinearForm:
    """Univariate parameters of ``C^T Y`` and the marginal generator tag."""

    mu: float
    omega: float
    delta: float
    generator: str
    family: GeneratorFamily

    def pdf(self, x):
        """Density of ``C^T Y``; only for normal and Student t families."""
        if self.family.kind not in _MARGINAL_TAGS:
            raise UnsupportedMarginalError(
                f"no closed-form marginal generator for family {self.family.kind!r}"
            )
        D1 = SkewElliptical([self.mu], [[self.omega]], [self.delta], self.family.with_dim(1))
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = pdf(D1, xs.reshape(-1, 1))
        return float(out[0]) if np.ndim(x) == 0 else out


def linear_form(D: SkewElliptical, C) -> LinearForm:
    """Parameters ``(C^T mu, C^T Omega C, C^T delta)`` of the univariate law of
    ``C^T Y``."""
    C = np.atleast_1d(np.asarray(C, dtype=float))
    if C.shape != (D.k,):
        raise DimensionError("C must have length k")
    if not np.any(C):
        raise DomainError("C must be nonzero")
    tag = _MARGINAL_TAGS.get(D.family.kind, f"two-dimensional marginal of the {D.family.kind} generator")
    return LinearForm(float(C @ D.mu), float(C @ D.Omega @ C), float(C @ D.delta), tag, D.family)


def sample(D: SkewElliptical, n: int, seed=None, block_size: int = 65536) -> np.ndarray:
    """``n`` independent draws as an ``n x k`` array.

    Rows are generated in blocks of ``block_size`` with independent child
    streams of ``SeedSequence(seed)``, so output is reproducible for a fixed
    ``(seed, block_size)``.
    """
    n = int(n)
    if n < 1:
        raise DomainError("n must be a positive integer")
    if block_size < 1:
        raise DomainError("block_size must be positive")
    k = D.k
    B = _noise_factor(D)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    n_blocks = -(-n // block_size)
    out = np.empty((n, k))
    for i, child in enumerate(ss.spawn(n_blocks)):
        lo = i * block_size
        m = min(block_size, n - lo)
        rng = np.random.default_rng(child)
        G = rng.standard_normal((m, k + 1))
        U = G / np.linalg.norm(G, axis=1, keepdims=True)
        R = D.family.sample_radius(rng, m)
        out[lo:lo + m] = D.mu + R[:, None] * (np.abs(U[:, :1]) * D.delta + U[:, 1:] @ B.T)
    return out


def _noise_factor(D: SkewElliptical) -> np.ndarray:
    """Lower factor ``B`` with ``B B^T = Omega - delta delta^T``."""
    M = D.Omega - np.outer(D.delta, D.delta)
    M = 0.5 * (M + M.T)
    try:
        return np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(M)
        return vecs * np.sqrt(np.clip(vals, 0.0, None))
