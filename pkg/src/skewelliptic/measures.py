"""Population skewness and kurtosis measures.

Scalar measures (Mardia, Malkovich-Afifi, Isogai, Song) depend on the law only
through the generator family and the canonical shape ``delta*``; they take
``delta*`` directly, and the ``D``-level wrappers pick it with
:meth:`SkewElliptical.delta_star`.  Vectorial measures (BBQ, Mori-Rohatgi-
Szekely, Kollo, Srivastava) are contractions of the standardized third-moment
tensor of the actual parameters.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np
from scipy import optimize

from .distribution import Convention, SkewElliptical
from .generators import GeneratorFamily, MomentExistenceError
from .moments import (
    ThirdMomentTensor,
    central_third_moment,
    mean_and_covariance,
    raw_second_moment,
    raw_third_moment,
    standardized_third_moment,
)
from .numerics import BracketError, DomainError, RootBracket, find_root, sym_eigen


def _constants(fam: GeneratorFamily, order: int):
    top = fam.max_moment_order()
    if top < order:
        raise MomentExistenceError(top + 1, fam.existence_condition(top + 1))
    return fam.moment_constants(order)


def _eta(delta_star: float) -> float:
    """Slope ``eta(1) = delta* / sqrt(1 - delta*^2)`` of the canonical skewing
    argument."""
    if not abs(delta_star) < 1:
        raise DomainError(f"|delta*| must be < 1, got {delta_star}")
    return delta_star / math.sqrt(1.0 - delta_star**2)


# ---------------------------------------------------------------------------
# Mardia and Malkovich-Afifi


def mardia_skewness(fam: GeneratorFamily, delta_star: float, k: int | None = None) -> float:
    """Mardia's ``beta_{1,k}`` as a function of the moment constants and ``delta*``."""
    k = fam.k if k is None else k
    mc = _constants(fam, 3)
    a, b, c = mc.a, mc.b, mc.c
    s2 = delta_star**2
    v = b - a * a * s2
    own = (3 * (c - a * b) * delta_star + (2 * a**3 - c) * delta_star**3) ** 2 / v**3
    cross = 3 * (k - 1) * (c - a * b) ** 2 * s2 / (b * b * v)
    return own + cross


def mardia_kurtosis(fam: GeneratorFamily, delta_star: float, k: int | None = None) -> float:
    """Mardia's ``beta_{2,k}``."""
    k = fam.k if k is None else k
    mc = _constants(fam, 4)
    a, b, c, d = mc.a, mc.b, mc.c, mc.d
    s2 = delta_star**2
    v = b - a * a * s2
    own = (3 * d + 6 * a * (a * b - 2 * c) * s2 + a * (4 * c - 3 * a**3) * s2 * s2) / v**2
    rest = (k * k - 1) * d / b**2
    mixed = 2 * (k - 1) * (d + a * (a * b - 2 * c) * s2) / (b * v)
    return own + rest + mixed


def excess_kurtosis(fam: GeneratorFamily, delta_star: float, k: int | None = None) -> float:
    """``beta_{2,k} - k(k+2)``."""
    k = fam.k if k is None else k
    return mardia_kurtosis(fam, delta_star, k) - k * (k + 2)


def malkovich_afifi(fam: GeneratorFamily, delta_star: float) -> float:
    """Squared standardized third moment along the shape direction."""
    mc = _constants(fam, 3)
    a, b, c = mc.a, mc.b, mc.c
    v = b - a * a * delta_star**2
    return (3 * (c - a * b) * delta_star + (2 * a**3 - c) * delta_star**3) ** 2 / v**3


def directional_skewness_sup(T: ThirdMomentTensor, n_starts: int = 64, seed: int = 0) -> tuple[float, np.ndarray]:
    """``max_u (E[(u^T Z)^3])^2`` over unit ``u`` for a standardized tensor.

    Multistart local optimization; used to check the closed form of
    :func:`malkovich_afifi`.
    """
    E = T.as_array()
    k = E.shape[0]

    def neg(u):
        u = u / np.linalg.norm(u)
        return -np.einsum("ijr,i,j,r->", E, u, u, u) ** 2

    rng = np.random.default_rng(seed)
    starts = [np.eye(k)[i] for i in range(k)] + list(rng.standard_normal((n_starts, k)))
    best, arg = -np.inf, None
    for u0 in starts:
        res = optimize.minimize(neg, u0, method="BFGS", options={"gtol": 1e-12})
        if -res.fun > best:
            best, arg = -res.fun, res.x / np.linalg.norm(res.x)
    return float(best), arg


# ---------------------------------------------------------------------------
# Isogai and Song


def mode_equation(fam: GeneratorFamily, delta_star: float, y: float) -> float:
    """Derivative (up to a positive factor) of the canonical density along the
    shape axis at ``y``:

    ``2 y int_{-inf}^{eta(y)} g'(r^2 + y^2) dr + eta(1) g(eta(y)^2 + y^2)``.
    """
    e1 = _eta(delta_star)
    ey = e1 * y
    edge = e1 * float(fam.density(ey * ey + y * y))
    if y == 0:
        return edge
    return 2 * y * fam.tail_derivative(ey, y * y) + edge


def _log_density_slope(fam: GeneratorFamily, delta_star: float, y: float) -> float:
    """d/dy log of the canonical density along the shape axis."""
    e1 = _eta(delta_star)
    return mode_equation(fam, delta_star, y) / fam.tail(e1 * y, y * y)


def canonical_mode(fam: GeneratorFamily, delta_star: float, n_scan: int = 64) -> float:
    """Mode ``m*_0`` of the canonical density (it lies on the shape axis)."""
    if delta_star == 0:
        return 0.0
    mc = _constants(fam, 2)
    sgn = math.copysign(1.0, delta_star)
    end = sgn * (mc.a * abs(delta_star) + 10 * math.sqrt(mc.b))
    grid = np.linspace(0.0, end, n_scan + 1)
    f0 = mode_equation(fam, delta_star, 0.0)
    prev_y, prev_f = 0.0, f0
    for y in grid[1:]:
        fy = mode_equation(fam, delta_star, float(y))
        if fy != 0 and np.sign(fy) != np.sign(f0):
            lo, hi = sorted((prev_y, float(y)))
            return find_root(lambda t: mode_equation(fam, delta_star, t), RootBracket(lo, hi))
        if fy != 0:
            prev_y, prev_f = float(y), fy
    raise BracketError(
        f"no sign change of the mode equation on [0, {end:.4g}] ({fam.label}, delta*={delta_star})",
        estimate=prev_y,
    )


@dataclass(frozen=True)
class IsogaiResult:
    S_I: float
    m_star0: float
    S_C: np.ndarray


def isogai_scalar(fam: GeneratorFamily, delta_star: float) -> tuple[float, float]:
    """``(S_I, m*_0)`` with ``S_I = (a delta* - m*_0)^2 / (b - a^2 delta*^2)``."""
    mc = _constants(fam, 2)
    m0 = canonical_mode(fam, delta_star)
    return (mc.a * delta_star - m0) ** 2 / (mc.b - mc.a**2 * delta_star**2), m0


def isogai(D: SkewElliptical, convention: Convention = "exact") -> IsogaiResult:
    """Scalar and vectorial mean-mode skewness.  ``S_C = (a - m*_0/delta*) delta``."""
    ds = D.delta_star(convention)
    S_I, m0 = isogai_scalar(D.family, ds)
    if ds == 0:
        return IsogaiResult(S_I, m0, np.zeros(D.k))
    a = D.family.moment_constants(2).a
    return IsogaiResult(S_I, m0, (a - m0 / ds) * D.delta)


def song_scalar(fam: GeneratorFamily, delta_star: float) -> float:
    """Delta-method approximation ``(b - a^2 delta*^2) h*^2`` of the variance of
    the log-density, ``h*`` the log-density slope at the canonical mean."""
    mc = _constants(fam, 2)
    y = mc.a * delta_star
    h = _log_density_slope(fam, delta_star, y)
    return (mc.b - mc.a**2 * delta_star**2) * h * h


def song_approx(D: SkewElliptical, convention: Convention = "exact") -> float:
    return song_scalar(D.family, D.delta_star(convention))


# ---------------------------------------------------------------------------
# tensor-based vectorial measures


def _tensor(D_or_T) -> np.ndarray:
    if isinstance(D_or_T, ThirdMomentTensor):
        return D_or_T.as_array()
    return standardized_third_moment(D_or_T).as_array()


def mori(D) -> np.ndarray:
    """``s_r = sum_i E[Z_i^2 Z_r]``."""
    E = _tensor(D)
    return np.einsum("iir->r", E)


def bbq(D) -> tuple[np.ndarray, float]:
    """``T = 3 s / (k(k+2))`` and ``Q* = T^T T``."""
    s = mori(D)
    k = s.size
    T = 3.0 / (k * (k + 2)) * s
    return T, float(T @ T)


def kollo(D) -> np.ndarray:
    """``b_r = sum_{i,j} E[Z_i Z_j Z_r]``."""
    return np.einsum("ijr->r", _tensor(D))


def mardia_skewness_tensor(D) -> float:
    """``sum_{i,j,r} E[Z_i Z_j Z_r]^2`` from the standardized tensor."""
    E = _tensor(D)
    return float(np.sum(E * E))


@dataclass(frozen=True)
class SrivastavaResult:
    value: float
    axis_unstable: bool
    components: np.ndarray


def srivastava_from_moments(V: np.ndarray, central: ThirdMomentTensor, gap_tol: float = 1e-8) -> SrivastavaResult:
    """Mean squared standardized third moment along principal axes of ``V``."""
    lam, G = sym_eigen(V)
    E = central.as_array()
    m3 = np.einsum("ijr,ia,ja,ra->a", E, G, G, G)
    comps = m3 / lam**1.5
    gaps = np.abs(np.diff(lam))
    unstable = bool(gaps.size and np.min(gaps) < gap_tol * abs(lam[0]))
    return SrivastavaResult(float(np.mean(comps**2)), unstable, comps)


def srivastava(D: SkewElliptical) -> SrivastavaResult:
    xi, V = mean_and_covariance(D)
    cen = central_third_moment(xi, raw_second_moment(D), raw_third_moment(D))
    return srivastava_from_moments(V, cen)


# ---------------------------------------------------------------------------
# bundled report

SKEW_FIELDS = ("mardia_skew", "malkovich_afifi", "bbq_vector", "bbq_scalar", "mori_vector", "kollo_vector", "srivastava")
KURT_FIELDS = ("mardia_kurt", "excess_kurt")
MODE_FIELDS = ("isogai_scalar", "isogai_mode", "isogai_vector", "song_approx")


@dataclass
class MeasureReport:
    """All population measures of one distribution.

    Unavailable fields are ``None`` and carry a reason in ``status``.
    """

    mardia_skew: float | None = None
    mardia_kurt: float | None = None
    excess_kurt: float | None = None
    malkovich_afifi: float | None = None
    isogai_scalar: float | None = None
    isogai_mode: float | None = None
    isogai_vector: list | None = None
    song_approx: float | None = None
    bbq_vector: list | None = None
    bbq_scalar: float | None = None
    mori_vector: list | None = None
    kollo_vector: list | None = None
    srivastava: float | None = None
    family: str = ""
    k: int = 0
    convention: str = "exact"
    delta_star: float = 0.0
    status: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "MeasureReport":
        data = json.loads(text)
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


def report_all(D: SkewElliptical, convention: Convention = "exact") -> MeasureReport:
    """Every measure of ``D``; canonical-shape measures use ``convention``."""
    fam = D.family
    ds = D.delta_star(convention)
    rep = MeasureReport(family=fam.label, k=D.k, convention=convention, delta_star=ds)
    top = fam.max_moment_order()

    def unavailable(names, reason):
        for n in names:
            rep.status[n] = reason

    if top >= 3:
        rep.mardia_skew = mardia_skewness(fam, ds, D.k)
        rep.malkovich_afifi = malkovich_afifi(fam, ds)
        Z = standardized_third_moment(D)
        T, Q = bbq(Z)
        rep.bbq_vector, rep.bbq_scalar = T.tolist(), Q
        rep.mori_vector = mori(Z).tolist()
        rep.kollo_vector = kollo(Z).tolist()
        sv = srivastava(D)
        rep.srivastava = sv.value
        if sv.axis_unstable:
            rep.flags.append("srivastava: axis-unstable (near-equal covariance eigenvalues)")
    else:
        unavailable(SKEW_FIELDS, f"{fam.existence_condition(3)} required")
    if top >= 4:
        rep.mardia_kurt = mardia_kurtosis(fam, ds, D.k)
        rep.excess_kurt = rep.mardia_kurt - D.k * (D.k + 2)
    else:
        unavailable(KURT_FIELDS, f"{fam.existence_condition(4)} required")
    if top >= 2:
        try:
            res = isogai(D, convention)
            rep.isogai_scalar, rep.isogai_mode = res.S_I, res.m_star0
            rep.isogai_vector = res.S_C.tolist()
            rep.song_approx = song_approx(D, convention)
        except DomainError as exc:
            unavailable(MODE_FIELDS, str(exc))
    else:
        unavailable(MODE_FIELDS, f"{fam.existence_condition(top + 1)} required")
    return rep
