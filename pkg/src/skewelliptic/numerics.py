"""Numeric kernels shared by the rest of the package.

Special functions, half-line quadrature, scalar root finding, a damped
Newton solver for small nonlinear systems, and symmetric matrix helpers.
Everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
from scipy import integrate, optimize, special

__all__ = [
    "DomainError",
    "NumericError",
    "BracketError",
    "QuadratureSpec",
    "RootBracket",
    "NewtonResult",
    "log_gamma",
    "std_normal",
    "hurwitz_lerch_psi",
    "integrate_half_line",
    "find_root",
    "newton_system",
    "sym_eigen",
    "psd_inverse_sqrt",
    "psd_sqrt",
    "kron",
    "vec",
]


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericError(ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    ``estimate`` and ``error_bound`` carry the best available answer.
    """

    def __init__(self, message: str, estimate: float = math.nan, error_bound: float = math.inf):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class BracketError(NumericError):
    """The supplied interval does not bracket a root."""


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-13
    rel_tol: float = 1e-12
    max_subdivisions: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")


DEFAULT_QUADRATURE = QuadratureSpec()


@dataclass(frozen=True)
class RootBracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DomainError(f"bracket requires lo < hi, got [{self.lo}, {self.hi}]")


# ---------------------------------------------------------------------------
# special functions


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for ``x > 0``."""
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    return float(special.gammaln(x))


def std_normal(x: float) -> tuple[float, float]:
    """Standard normal ``(pdf, cdf)`` at ``x``.

    The cdf goes through ``erfc`` so the lower tail keeps full relative
    precision.
    """
    if math.isinf(x):
        return 0.0, (1.0 if x > 0 else 0.0)
    pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
    cdf = 0.5 * math.erfc(-x / math.sqrt(2.0))
    return pdf, cdf


def _alternating_sum(terms: Callable[[int], float], n_terms: int = 60) -> float:
    """Sum ``sum_{n>=0} (-1)^n terms(n)`` with Cohen-Rodriguez Villegas-Zagier
    acceleration.  ``terms`` must be positive and completely monotone-ish in
    ``n``; the error then decays like ``5.8**-n_terms``.
    """
    d = (3.0 + math.sqrt(8.0)) ** n_terms
    d = 0.5 * (d + 1.0 / d)
    b = -1.0
    c = -d
    s = 0.0
    for k in range(n_terms):
        c = b - c
        s += c * terms(k)
        b = (k + n_terms) * (k - n_terms) * b / ((k + 0.5) * (k + 1.0))
    return s / d


def hurwitz_lerch_psi(mu: float, z: float, s: float, a: float) -> float:
    r"""Generalized Hurwitz-Lerch zeta function

    .. math:: \Psi^*_\mu(z, s, a) = \sum_{n\ge 0} \frac{(\mu)_n}{n!}\frac{z^n}{(n+a)^s}.

    The ``z = -1`` branch (the only one the logistic family needs) is summed
    with alternating-series acceleration.  ``|z| < 1`` is summed directly.
    """
    if not a > 0:
        raise DomainError("hurwitz_lerch_psi requires a > 0")
    if abs(z) > 1:
        raise DomainError(f"series diverges for |z| > 1 (z={z})")
    if z == 0:
        return float(a ** (-s))

    def coef(n: int) -> float:
        # (mu)_n / n!  computed in log space
        if mu == 1:
            return 1.0
        return math.exp(special.gammaln(mu + n) - special.gammaln(mu) - special.gammaln(n + 1.0))

    if z == 1:
        # terms behave like n^(mu-1-s)
        if not s > mu:
            raise DomainError(f"series diverges at z=1 unless s > mu (s={s}, mu={mu})")
        if mu == 1:
            return float(special.zeta(s, a))
        raise DomainError("z=1 is only supported for mu=1")
    if z == -1:
        if mu <= 0 or not s > mu - 1:
            raise DomainError(f"alternating series diverges for s <= mu - 1 (s={s}, mu={mu})")
        return _alternating_sum(lambda n: coef(n) / (n + a) ** s)
    # |z| < 1: geometric convergence
    total = 0.0
    n = 0
    while True:
        term = coef(n) * z**n / (n + a) ** s
        total += term
        if abs(term) <= 1e-17 * max(1.0, abs(total)) and n > 5:
            break
        n += 1
        if n > 100000:
            raise NumericError("hurwitz_lerch_psi series did not converge", total)
    return total


# ---------------------------------------------------------------------------
# quadrature and roots


def integrate_half_line(
    f: Callable[[float], float],
    side: Literal["lower", "upper"],
    cutoff: float,
    spec: QuadratureSpec = DEFAULT_QUADRATURE,
    points: Sequence[float] | None = None,
) -> float:
    """Integrate ``f`` over ``(-inf, cutoff]`` (``side="lower"``) or
    ``[cutoff, inf)`` (``side="upper"``).

    ``cutoff`` may itself be infinite, in which case the whole line is
    covered.  Raises :class:`NumericError` when QUADPACK reports failure or
    the estimate is not finite.
    """
    if side == "lower":
        lo, hi = -math.inf, cutoff
    elif side == "upper":
        lo, hi = cutoff, math.inf
    else:
        raise DomainError(f"side must be 'lower' or 'upper', got {side!r}")
    if lo == hi:
        return 0.0
    if lo > hi:
        return 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if math.isinf(lo) and math.isinf(hi):
            # split at zero so each half gets the semi-infinite transformation
            out_l = _quad(f, -math.inf, 0.0, spec)
            out_r = _quad(f, 0.0, math.inf, spec)
            return out_l + out_r
        if points and not (math.isinf(lo) or math.isinf(hi)):
            return _quad(f, lo, hi, spec, points)
        return _quad(f, lo, hi, spec)


def _quad(f, lo, hi, spec, points=None) -> float:
    kwargs = dict(epsabs=spec.abs_tol, epsrel=spec.rel_tol, limit=spec.max_subdivisions, full_output=1)
    if points is not None:
        kwargs["points"] = points
    try:
        res = integrate.quad(f, lo, hi, **kwargs)
    except (OverflowError, FloatingPointError) as exc:  # pragma: no cover - defensive
        raise NumericError(f"quadrature overflow on [{lo}, {hi}]") from exc
    value, err = res[0], res[1]
    ier_failed = len(res) > 3
    if not (math.isfinite(value) and math.isfinite(err)):
        raise NumericError(f"integral on [{lo}, {hi}] is divergent or not finite", value, err)
    if ier_failed:
        tol = max(spec.abs_tol, spec.rel_tol * abs(value))
        # QUADPACK roundoff complaints with a tiny error estimate are harmless
        if err > 100 * tol:
            raise NumericError(f"quadrature on [{lo}, {hi}] failed: {res[3]}", value, err)
    return float(value)


def find_root(f: Callable[[float], float], bracket: RootBracket, tol: float = 1e-14) -> float:
    """Bracketed scalar root (Brent's method, bisection safeguarded)."""
    flo, fhi = f(bracket.lo), f(bracket.hi)
    if flo == 0:
        return bracket.lo
    if fhi == 0:
        return bracket.hi
    if np.sign(flo) == np.sign(fhi):
        raise BracketError(
            f"no sign change on [{bracket.lo}, {bracket.hi}]: f={flo:.3g}, {fhi:.3g}"
        )
    return float(optimize.brentq(f, bracket.lo, bracket.hi, xtol=tol, rtol=4 * np.finfo(float).eps, maxiter=500))


@dataclass(frozen=True)
class NewtonResult:
    x: np.ndarray
    iterations: int
    converged: bool
    residual: float


def newton_system(
    F: Callable[[np.ndarray], np.ndarray],
    J: Callable[[np.ndarray], np.ndarray],
    x0: Sequence[float],
    tol: float = 1e-12,
    max_iter: int = 50,
    project: Callable[[np.ndarray], np.ndarray] | None = None,
) -> NewtonResult:
    """Damped Newton-Raphson for ``F(x) = 0``.

    Steps are halved until the residual max-norm decreases (up to 30
    halvings).  ``project``, if given, is applied after every step, e.g. to
    pull an iterate back onto a constraint manifold.  Non-convergence is
    reported via ``converged=False`` rather than raised.
    """
    x = np.array(x0, dtype=float)
    fx = np.asarray(F(x), dtype=float)
    res = float(np.max(np.abs(fx)))
    for it in range(1, max_iter + 1):
        if res <= tol:
            return NewtonResult(x, it - 1, True, res)
        jac = np.asarray(J(x), dtype=float)
        try:
            step = np.linalg.solve(jac, -fx)
        except np.linalg.LinAlgError:
            step, *_ = np.linalg.lstsq(jac, -fx, rcond=None)
        if not np.all(np.isfinite(step)):
            return NewtonResult(x, it, False, res)
        t = 1.0
        for _ in range(30):
            cand = x + t * step
            if project is not None:
                cand = project(cand)
            fc = np.asarray(F(cand), dtype=float)
            rc = float(np.max(np.abs(fc)))
            if rc < res or rc <= tol:
                break
            t *= 0.5
        else:
            return NewtonResult(x, it, False, res)
        x, fx, res = cand, fc, rc
    return NewtonResult(x, max_iter, res <= tol, res)


# ---------------------------------------------------------------------------
# dense symmetric linear algebra


def sym_eigen(M: np.ndarray, asym_tol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix.

    Returns eigenvalues in descending order and an orthonormal matrix whose
    columns are the eigenvectors.  Each eigenvector is signed so that its
    first nonzero component is positive.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DomainError("sym_eigen requires a square matrix")
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    if np.max(np.abs(M - M.T), initial=0.0) > asym_tol * scale:
        raise DomainError("matrix is not symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (M + M.T))
    order = np.argsort(vals)[::-1]
    vals, vecs = vals[order], vecs[:, order]
    for j in range(vecs.shape[1]):
        col = vecs[:, j]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size and col[nz[0]] < 0:
            vecs[:, j] = -col
    return vals, vecs


def psd_inverse_sqrt(M: np.ndarray) -> np.ndarray:
    """Symmetric positive-definite inverse square root ``M^{-1/2}``."""
    vals, vecs = sym_eigen(M)
    if np.any(vals <= 0):
        raise DomainError("matrix is not positive definite")
    S = (vecs / np.sqrt(vals)) @ vecs.T
    return 0.5 * (S + S.T)


def psd_sqrt(M: np.ndarray) -> np.ndarray:
    """Symmetric positive-(semi)definite square root ``M^{1/2}``."""
    vals, vecs = sym_eigen(M)
    if np.any(vals < -1e-12 * max(1.0, abs(vals[0]))):
        raise DomainError("matrix is not positive semidefinite")
    S = (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ vecs.T
    return 0.5 * (S + S.T)


def kron(A, B) -> np.ndarray:
    """Kronecker product; 1-D inputs are treated as column vectors."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if A.ndim == 1:
        A = A[:, None]
    if B.ndim == 1:
        B = B[:, None]
    return np.kron(A, B)


def vec(M) -> np.ndarray:
    """Stack the columns of ``M`` into a single column (returned 1-D)."""
    return np.asarray(M, dtype=float).reshape(-1, order="F")
