"""Sample statistics: standardization, directional skewness and kurtosis,
their extrema over unit directions, and Monte Carlo calibration.

Directional statistics on a standardized sample ``X`` (``sum_j X_j X_j^T = I``)
simplify to ``b1(C) = n (sum_j (C^T X_j)^3)^2`` and
``b2(C) = n sum_j (C^T X_j)^4``.  Their extrema solve the bordered systems

``sum_j (C^T X_j)^2 X_j - lambda C = 0,  C^T C = 1``  (skewness)

``sum_j (C^T X_j)^3 X_j - gamma C = 0,   C^T C = 1``  (kurtosis)

which are attacked with damped Newton steps from the best points of a lattice
on the unit hemisphere.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import ndtri
from scipy.stats import qmc

from .distribution import SkewElliptical
from .generators import GeneratorFamily
from .measures import srivastava_from_moments
from .moments import ThirdMomentTensor
from .numerics import DomainError, newton_system, psd_inverse_sqrt


class DegenerateSampleError(DomainError):
    """The scatter matrix of a sample is singular (or too few rows)."""


@dataclass(frozen=True)
class Sample:
    """``n x k`` data matrix with ``n > k``."""

    data: np.ndarray

    def __post_init__(self):
        Y = np.asarray(self.data, dtype=float)
        if Y.ndim == 1:
            Y = Y[:, None]
        if Y.ndim != 2:
            raise DomainError("sample data must be a 2-D array")
        n, k = Y.shape
        if not n > k:
            raise DegenerateSampleError(f"need more rows than columns, got n={n}, k={k}")
        if not np.all(np.isfinite(Y)):
            raise DomainError("sample contains non-finite values")
        Y = Y.copy()
        Y.setflags(write=False)
        object.__setattr__(self, "data", Y)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def k(self) -> int:
        return self.data.shape[1]


@dataclass(frozen=True)
class TestConfig:
    """Settings for the directional optimizations.

    ``K`` centres the kurtosis statistic; calibration replaces it with the
    null median of ``b2``.
    """

    resolution: int = 64
    tolerance: float = 1e-12
    max_iterations: int = 50
    K: float = 3.0
    seed: int | None = None
    n_refine: int = 5

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if self.resolution < 8:
            raise DomainError("lattice resolution must be >= 8")
        if not self.tolerance > 0:
            raise DomainError("tolerance must be > 0")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be >= 1")


@dataclass(frozen=True)
class DirectionalOptimum:
    value: float
    direction: np.ndarray
    multiplier: float
    iterations: int
    converged: bool
    residual: float
    lattice_best: float


@dataclass(frozen=True)
class TestResult:
    b1_star: float
    b1_direction: np.ndarray
    b2_max: float
    b2_min: float
    b2_star_sq: float
    b2_directions: tuple[np.ndarray, np.ndarray]
    iterations: tuple[int, int, int]
    converged: tuple[bool, bool, bool]
    residuals: tuple[float, float, float]
    K: float
    n: int

    __test__ = False

    def to_dict(self) -> dict:
        d = asdict(self)
        d["b1_direction"] = self.b1_direction.tolist()
        d["b2_directions"] = [c.tolist() for c in self.b2_directions]
        d["iterations"] = list(self.iterations)
        d["converged"] = list(self.converged)
        d["residuals"] = list(self.residuals)
        return d


# ---------------------------------------------------------------------------
# standardization and directional statistics


def standardize(S: Sample | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Centre and whiten: ``X_j = A*^T (Y_j - Ybar)`` with ``A* = A^{-1/2}``
    and ``A`` the scatter matrix, so that ``sum_j X_j X_j^T = I``."""
    if not isinstance(S, Sample):
        S = Sample(S)
    Yc = S.data - S.data.mean(axis=0)
    A = Yc.T @ Yc
    lam = np.linalg.eigvalsh(A)
    if not lam[0] > 1e-12 * max(lam[-1], 1e-300):
        raise DegenerateSampleError("scatter matrix is singular: the rows lie in a hyperplane")
    A_star = psd_inverse_sqrt(A)
    return Yc @ A_star, A_star


def _unit(C, k: int) -> np.ndarray:
    C = np.atleast_1d(np.asarray(C, dtype=float))
    if C.shape != (k,):
        raise DomainError(f"direction must have length {k}")
    if abs(np.linalg.norm(C) - 1.0) > 1e-10:
        raise DomainError("direction C must be a unit vector")
    return C


def directional_b1(X: np.ndarray, C) -> float:
    """``n [sum (Z_j - Zbar)^3]^2 / [sum (Z_j - Zbar)^2]^3`` with ``Z_j = C^T X_j``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 1:
        X = X.T
    C = _unit(C, X.shape[1])
    z = X @ C
    z = z - z.mean()
    s2 = np.sum(z**2)
    if s2 == 0:
        raise DegenerateSampleError("projection has zero spread")
    return float(z.size * np.sum(z**3) ** 2 / s2**3)


def directional_b2(X: np.ndarray, C) -> float:
    """``n sum (Z_j - Zbar)^4 / [sum (Z_j - Zbar)^2]^2``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[0] == 1:
        X = X.T
    C = _unit(C, X.shape[1])
    z = X @ C
    z = z - z.mean()
    s2 = np.sum(z**2)
    if s2 == 0:
        raise DegenerateSampleError("projection has zero spread")
    return float(z.size * np.sum(z**4) / s2**2)


# ---------------------------------------------------------------------------
# lattice and Newton refinement


def hemisphere_lattice(k: int, resolution: int) -> np.ndarray:
    """Unit directions covering a hemisphere (``C`` and ``-C`` are equivalent).

    ``k = 2``: angles ``pi j / resolution``.  ``k = 3``: Fibonacci points on
    the upper hemisphere.  ``k >= 4``: scrambled Sobol points pushed through
    the normal quantile and normalized.
    """
    if k == 1:
        return np.ones((1, 1))
    if k == 2:
        t = np.pi * np.arange(resolution) / resolution
        return np.column_stack([np.cos(t), np.sin(t)])
    if k == 3:
        m = resolution * resolution // 2
        i = np.arange(m) + 0.5
        z = i / m
        phi = np.pi * (1 + math.sqrt(5)) * i
        rho = np.sqrt(1 - z * z)
        return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])
    m = max(resolution * resolution, 256 * k)
    u = qmc.Sobol(k, scramble=True, seed=12345).random(1 << int(math.ceil(math.log2(m))))
    g = ndtri(np.clip(u, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _power_system(X: np.ndarray, power: int):
    """Residual and Jacobian of ``sum (C^T X)^power X - m C = 0, C^T C = 1``."""
    k = X.shape[1]

    def F(x):
        C, m = x[:k], x[k]
        z = X @ C
        return np.concatenate([X.T @ z**power - m * C, [C @ C - 1.0]])

    def J(x):
        C, m = x[:k], x[k]
        z = X @ C
        top = np.hstack([power * (X.T * z ** (power - 1)) @ X - m * np.eye(k), -C[:, None]])
        bottom = np.concatenate([2 * C, [0.0]])
        return np.vstack([top, bottom])

    def project(x):
        C = x[:k] / np.linalg.norm(x[:k])
        return np.concatenate([C, [x[k]]])

    return F, J, project


def _optimize_direction(X: np.ndarray, cfg: TestConfig, kind: str) -> DirectionalOptimum:
    """Extremize ``sum (C^T X)^3`` squared (kind ``"skew"``), or ``sum (C^T X)^4``
    (kinds ``"kmax"``/``"kmin"``), over unit ``C``."""
    n, k = X.shape
    power = 2 if kind == "skew" else 3
    L = hemisphere_lattice(k, cfg.resolution)
    Z = X @ L.T
    if kind == "skew":
        score = np.sum(Z**3, axis=0) ** 2
        sign = 1.0
    else:
        score = np.sum(Z**4, axis=0)
        sign = 1.0 if kind == "kmax" else -1.0

    def objective(C):
        z = X @ C
        return float(np.sum(z**3) ** 2) if kind == "skew" else float(np.sum(z**4))

    order = np.argsort(-sign * score, kind="stable")
    lattice_best = float(score[order[0]])
    if k == 1:
        C = np.ones(1)
        val = objective(C)
        return DirectionalOptimum(val, C, float(np.sum(X[:, 0] ** (power + 1))), 0, True, 0.0, val)
    F, J, project = _power_system(X, power)
    best = DirectionalOptimum(lattice_best, L[order[0]], math.nan, 0, False, math.inf, lattice_best)
    for idx in order[: cfg.n_refine]:
        C0 = L[idx]
        m0 = float(np.sum((X @ C0) ** (power + 1)))
        res = newton_system(F, J, np.concatenate([C0, [m0]]), cfg.tolerance, cfg.max_iterations, project)
        if not res.converged:
            continue
        C = res.x[:k] / np.linalg.norm(res.x[:k])
        val = objective(C)
        # a converged stationary point replaces an unrefined lattice value it
        # matches up to rounding
        slack = 0.0 if best.converged else 1e-12 * abs(best.value)
        if sign * val > sign * best.value - slack:
            best = DirectionalOptimum(val, C, float(res.x[k]), res.iterations, True, res.residual, lattice_best)
    C = best.direction
    if C[np.flatnonzero(np.abs(C) > 1e-12)[0]] < 0:
        C = -C
    return DirectionalOptimum(best.value, C, best.multiplier, best.iterations, best.converged, best.residual, lattice_best)


def b1_star(X: np.ndarray, cfg: TestConfig = TestConfig()) -> DirectionalOptimum:
    """``max_C b1(C) = n lambda*^2`` on a standardized sample.

    ``value`` is ``b1*``; ``multiplier`` is ``lambda*``.
    """
    X = np.asarray(X, dtype=float)
    opt = _optimize_direction(X, cfg, "skew")
    n = X.shape[0]
    return DirectionalOptimum(n * opt.value, opt.direction, opt.multiplier, opt.iterations, opt.converged, opt.residual, n * opt.lattice_best)


def b2_extremes(X: np.ndarray, cfg: TestConfig = TestConfig()) -> tuple[DirectionalOptimum, DirectionalOptimum]:
    """``(max_C b2(C), min_C b2(C))`` on a standardized sample."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    out = []
    for kind in ("kmax", "kmin"):
        o = _optimize_direction(X, cfg, kind)
        out.append(DirectionalOptimum(n * o.value, o.direction, o.multiplier, o.iterations, o.converged, o.residual, n * o.lattice_best))
    return out[0], out[1]


def b2_star_sq(X: np.ndarray, cfg: TestConfig = TestConfig()) -> TestResult:
    """Both directional extrema and ``[b2*]^2 = max((b2max - K)^2, (b2min - K)^2)``."""
    X = np.asarray(X, dtype=float)
    s = b1_star(X, cfg)
    hi, lo = b2_extremes(X, cfg)
    K = cfg.K
    sq = max((hi.value - K) ** 2, (lo.value - K) ** 2)
    return TestResult(
        b1_star=s.value,
        b1_direction=s.direction,
        b2_max=hi.value,
        b2_min=lo.value,
        b2_star_sq=sq,
        b2_directions=(hi.direction, lo.direction),
        iterations=(s.iterations, hi.iterations, lo.iterations),
        converged=(s.converged, hi.converged, lo.converged),
        residuals=(s.residual, hi.residual, lo.residual),
        K=K,
        n=X.shape[0],
    )


def directional_tests(S: Sample | np.ndarray, cfg: TestConfig = TestConfig()) -> TestResult:
    """Standardize raw data and run both directional optimizations."""
    X, _ = standardize(S)
    return b2_star_sq(X, cfg)


# ---------------------------------------------------------------------------
# plug-in moment statistics


def _whiten_mle(S: Sample) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    Y = S.data
    mean = Y.mean(axis=0)
    Yc = Y - mean
    cov = Yc.T @ Yc / S.n
    lam = np.linalg.eigvalsh(cov)
    if not lam[0] > 1e-12 * max(lam[-1], 1e-300):
        raise DegenerateSampleError("scatter matrix is singular: the rows lie in a hyperplane")
    return Yc @ psd_inverse_sqrt(cov), mean, cov


def sample_mardia(S: Sample | np.ndarray) -> tuple[float, float]:
    """Mardia's sample ``b_{1,k}`` and ``b_{2,k}``.

    ``b1 = n^{-2} sum_{i,j} g_ij^3`` equals the squared Frobenius norm of the
    sample third-moment array of the whitened data, which avoids the
    ``n x n`` matrix of ``g_ij``.
    """
    if not isinstance(S, Sample):
        S = Sample(S)
    W, _, _ = _whiten_mle(S)
    n = S.n
    E = np.einsum("ni,nj,nr->ijr", W, W, W) / n
    b1 = float(np.sum(E * E))
    b2 = float(np.mean(np.sum(W * W, axis=1) ** 2))
    return b1, b2


@dataclass
class EmpiricalReport:
    n: int
    k: int
    mardia_skew: float
    mardia_kurt: float
    excess_kurt: float
    bbq_vector: list
    bbq_scalar: float
    mori_vector: list
    kollo_vector: list
    srivastava: float
    mean: list
    covariance: list
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def empirical_measures(S: Sample | np.ndarray) -> EmpiricalReport:
    """Plug-in versions of the moment-based measures from sample moments.

    The whitening uses the symmetric inverse square root of the
    (``1/n``-normalized) sample covariance, matching the population
    standardization.
    """
    if not isinstance(S, Sample):
        S = Sample(S)
    W, mean, cov = _whiten_mle(S)
    n, k = S.n, S.k
    E = np.einsum("ni,nj,nr->ijr", W, W, W) / n
    s = np.einsum("iir->r", E)
    T = 3.0 / (k * (k + 2)) * s
    b = np.einsum("ijr->r", E)
    Yc = S.data - mean
    central = ThirdMomentTensor.from_array(np.einsum("ni,nj,nr->ijr", Yc, Yc, Yc) / n)
    sv = srivastava_from_moments(cov, central)
    b1 = float(np.sum(E * E))
    b2 = float(np.mean(np.sum(W * W, axis=1) ** 2))
    flags = ["srivastava: axis-unstable (near-equal covariance eigenvalues)"] if sv.axis_unstable else []
    return EmpiricalReport(
        n=n, k=k, mardia_skew=b1, mardia_kurt=b2, excess_kurt=b2 - k * (k + 2),
        bbq_vector=T.tolist(), bbq_scalar=float(T @ T), mori_vector=s.tolist(), kollo_vector=b.tolist(),
        srivastava=sv.value, mean=mean.tolist(), covariance=cov.tolist(), flags=flags,
    )


# ---------------------------------------------------------------------------
# calibration


@dataclass(frozen=True)
class Calibration:
    """Null critical values: reject skewness if ``b1* > K_b1`` and kurtosis if
    ``[b2*]^2 > K_b2`` (``[b2*]^2`` centred at ``K``)."""

    K_b1: float
    K_b2: float
    K: float
    alpha: float
    n: int
    n_reps: int
    family: str
    seed: int | None
    b1_null: np.ndarray = field(repr=False)
    b2_sq_null: np.ndarray = field(repr=False)


def _null_stats(fam: GeneratorFamily, k: int, n: int, cfg: TestConfig, child: np.random.SeedSequence):
    D = SkewElliptical(np.zeros(k), np.eye(k), np.zeros(k), fam.with_dim(k))
    data_seed, dir_seed = child.spawn(2)
    X, _ = standardize(D.sample(n, data_seed))
    u = np.random.default_rng(dir_seed).standard_normal(k)
    u /= np.linalg.norm(u)
    s = b1_star(X, cfg)
    hi, lo = b2_extremes(X, cfg)
    return s.value, hi.value, lo.value, directional_b2(X, u)


def calibrate_critical_values(
    fam: GeneratorFamily,
    k: int,
    n: int,
    n_reps: int,
    alpha: float,
    cfg: TestConfig = TestConfig(),
    seed: int | None = None,
) -> Calibration:
    """Monte Carlo critical values under the symmetric (``delta = 0``) member
    of ``fam``.

    Each replicate draws ``n`` points from its own child stream of
    ``SeedSequence(seed)``.  ``K`` is the median over replicates of ``b2``
    along an independent uniformly random direction; thresholds are the
    empirical ``1 - alpha`` quantiles of ``b1*`` and ``[b2*]^2``.
    """
    if not 0 < alpha < 1:
        raise DomainError("alpha must lie in (0, 1)")
    if n_reps < 2:
        raise DomainError("n_reps must be >= 2")
    seed = cfg.seed if seed is None else seed
    ss = np.random.SeedSequence(seed)
    stats = np.array([_null_stats(fam, k, n, cfg, c) for c in ss.spawn(n_reps)])
    b1, hi, lo, rnd = stats.T
    K = float(np.median(rnd))
    sq = np.maximum((hi - K) ** 2, (lo - K) ** 2)
    return Calibration(
        K_b1=float(np.quantile(b1, 1 - alpha)),
        K_b2=float(np.quantile(sq, 1 - alpha)),
        K=K, alpha=alpha, n=n, n_reps=n_reps, family=fam.label, seed=seed,
        b1_null=b1, b2_sq_null=sq,
    )
