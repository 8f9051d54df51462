"""Spherical density generators for the six skew-elliptical families.

A :class:`GeneratorFamily` owns the normalized ``(k+1)``-dimensional
generator ``g(u)``, its derivative, the law of the radial variable ``R`` and
the moment constants ``a, b, c, d`` built from ratios ``E[R^m] / E[R0^m]``
with ``R0 ~ chi_{k+1}``.

Family strings used by the command line::

    normal | t:<m> | logistic | laplace | pearson2:<t> | pearson7:<t>

The logistic kernel is ``exp(-u) / (1 + exp(-u))``.  Its textbook moment
formulas in terms of the Hurwitz-Lerch function are written for the
*unnormalized* kernel; they are off by the kernel's total mass
``pi^{(k+1)/2} eta((k+1)/2)``.  The normalized variant is what passes the
quadrature cross-check, and the disagreement of the unnormalized form is kept as a
:class:`MomentCheck` record (see :meth:`GeneratorFamily.moment_checks`).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np
from scipy import integrate, special

from .numerics import DomainError, hurwitz_lerch_psi, integrate_half_line, QuadratureSpec

log = logging.getLogger(__name__)

Kind = Literal["normal", "t", "logistic", "laplace", "pearson2", "pearson7"]
KINDS = ("normal", "t", "logistic", "laplace", "pearson2", "pearson7")

_QUAD = QuadratureSpec(abs_tol=1e-14, rel_tol=1e-12, max_subdivisions=400)
_CROSSCHECK_RTOL = 1e-6


class MomentExistenceError(ValueError):
    """A requested radial moment (or moment constant) does not exist."""

    def __init__(self, order: int, condition: str):
        super().__init__(f"moment of order {order} does not exist: {condition} required")
        self.order = order
        self.condition = condition


@dataclass(frozen=True)
class MomentConstants:
    """``a, b, c, d`` from ratios of radial moments; ``None`` past the
    requested order."""

    a: float | None
    b: float | None = None
    c: float | None = None
    d: float | None = None


@dataclass(frozen=True)
class MomentCheck:
    """One closed-form vs quadrature comparison for ``E[R^order]``."""

    order: int
    form: str
    closed_form: float
    numeric: float
    rel_diff: float
    accepted: bool
    note: str = ""


def chi_radial_moment(k: int, order: int) -> float:
    """``E[R0^order]`` for ``R0 ~ chi_{k+1}``."""
    p = k + 1
    return math.exp(0.5 * order * math.log(2.0) + special.gammaln((p + order) / 2) - special.gammaln(p / 2))


def _power_tail(x, A, B, e):
    """``int_{-inf}^{x} (A + B r^2)^{-e} dr`` for ``A, B > 0`` and ``e > 1/2``."""
    nu = 2.0 * e - 1.0
    const = math.sqrt(math.pi) * math.exp(special.gammaln(e - 0.5) - special.gammaln(e))
    A = np.asarray(A, dtype=float)
    return A ** (0.5 - e) / math.sqrt(B) * const * special.stdtr(nu, x * np.sqrt(B * nu / A))


def _compact_tail(x, A, e):
    """``int_{-inf}^{x} (A - r^2)_+^{e} dr`` for ``e > -1``; zero when ``A <= 0``."""
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    out = np.zeros(np.broadcast(x, A).shape)
    pos = np.broadcast_to(A > 0, out.shape)
    if np.any(pos):
        Ab = np.broadcast_to(A, out.shape)[pos]
        xb = np.broadcast_to(x, out.shape)[pos]
        w = np.clip(xb / np.sqrt(Ab), -1.0, 1.0)
        full = 2.0 ** (2 * e + 1) * math.exp(special.betaln(e + 1, e + 1))
        out[pos] = Ab ** (e + 0.5) * full * special.betainc(e + 1, e + 1, 0.5 * (w + 1.0))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class GeneratorFamily:
    """One of the six generator families at ambient dimension ``k``.

    ``param`` is the degrees of freedom ``m`` for ``t`` and the shape ``t``
    for the two Pearson families; it is ignored otherwise.
    """

    kind: Kind
    k: int
    param: float | None = None
    _checks: list = field(default_factory=list, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DomainError(f"unknown family {self.kind!r}; expected one of {KINDS}")
        if int(self.k) != self.k or self.k < 1:
            raise DomainError(f"dimension k must be a positive integer, got {self.k}")
        needs = {"t": "m", "pearson2": "t", "pearson7": "t"}
        if self.kind in needs:
            if self.param is None:
                raise DomainError(f"family {self.kind!r} needs a shape parameter {needs[self.kind]}")
            v = float(self.param)
            if self.kind == "t" and not v > 0:
                raise DomainError(f"t family requires m > 0, got {v}")
            if self.kind == "pearson2" and not v > -1:
                raise DomainError(f"pearson2 family requires t > -1, got {v}")
            if self.kind == "pearson7" and not v > (self.k + 1) / 2:
                raise DomainError(f"pearson7 family requires t > (k+1)/2 = {(self.k + 1) / 2}, got {v}")
        elif self.param is not None:
            object.__setattr__(self, "param", None)

    # -- construction -----------------------------------------------------

    @classmethod
    def parse(cls, spec: str, k: int) -> "GeneratorFamily":
        """Build a family from a CLI string such as ``"t:5"`` or ``"laplace"``."""
        name, _, arg = spec.strip().lower().partition(":")
        if name in ("normal", "logistic", "laplace"):
            if arg:
                raise DomainError(f"family {name!r} takes no parameter")
            return cls(name, k)
        if name in ("t", "pearson2", "pearson7"):
            if not arg:
                raise DomainError(f"family {name!r} needs a parameter, e.g. {name}:5")
            try:
                val = float(arg)
            except ValueError:
                raise DomainError(f"bad parameter {arg!r} for family {name!r}") from None
            return cls(name, k, val)
        raise DomainError(f"unknown family {spec!r}; expected normal, t:<m>, logistic, laplace, pearson2:<t>, pearson7:<t>")

    def with_dim(self, k: int) -> "GeneratorFamily":
        return GeneratorFamily(self.kind, k, self.param)

    @property
    def label(self) -> str:
        return self.kind if self.param is None else f"{self.kind}:{self.param:g}"

    @property
    def p(self) -> int:
        """Dimension of the generator, ``k + 1``."""
        return self.k + 1

    @property
    def support(self) -> float:
        """Upper end of the support of ``u`` (and of ``r``)."""
        return 1.0 if self.kind == "pearson2" else math.inf

    # -- generator --------------------------------------------------------

    def _kernel(self, u):
        u = np.asarray(u, dtype=float)
        p, v = self.p, self.param
        if self.kind == "normal":
            return np.exp(-0.5 * u)
        if self.kind == "t":
            return (1.0 + u / v) ** (-0.5 * (v + p))
        if self.kind == "logistic":
            return special.expit(-u)
        if self.kind == "laplace":
            return np.exp(-np.sqrt(u))
        if self.kind == "pearson2":
            with np.errstate(invalid="ignore", divide="ignore"):
                return np.where(u < 1.0, np.abs(1.0 - u) ** v, 0.0)
        return (1.0 + u) ** (-v)

    def _kernel_derivative(self, u):
        u = np.asarray(u, dtype=float)
        p, v = self.p, self.param
        if self.kind == "normal":
            return -0.5 * np.exp(-0.5 * u)
        if self.kind == "t":
            return -(v + p) / (2.0 * v) * (1.0 + u / v) ** (-0.5 * (v + p) - 1.0)
        if self.kind == "logistic":
            return -special.expit(u) * special.expit(-u)
        if self.kind == "laplace":
            s = np.sqrt(u)
            with np.errstate(divide="ignore"):
                return -np.exp(-s) / (2.0 * s)
        if self.kind == "pearson2":
            with np.errstate(invalid="ignore", divide="ignore"):
                return np.where(u < 1.0, -v * np.abs(1.0 - u) ** (v - 1.0), 0.0)
        return -v * (1.0 + u) ** (-v - 1.0)

    @cached_property
    def log_norm(self) -> float:
        """Log of the constant ``C`` with ``g = C * kernel``."""
        p, v = self.p, self.param
        half_log_pi = 0.5 * p * math.log(math.pi)
        if self.kind == "normal":
            return -0.5 * p * math.log(2.0 * math.pi)
        if self.kind == "t":
            return special.gammaln((v + p) / 2) - special.gammaln(v / 2) - 0.5 * p * math.log(v * math.pi)
        if self.kind == "laplace":
            return special.gammaln(p / 2) - math.log(2.0) - half_log_pi - special.gammaln(p)
        if self.kind == "pearson2":
            return special.gammaln(v + 1 + p / 2) - special.gammaln(v + 1) - half_log_pi
        if self.kind == "pearson7":
            return special.gammaln(v) - special.gammaln(v - p / 2) - half_log_pi
        # logistic: normalize numerically once
        shell = 2.0 * math.exp(half_log_pi - special.gammaln(p / 2))
        mass = shell * integrate_half_line(lambda r: r**self.k * float(self._kernel(r * r)), "upper", 0.0, _QUAD)
        return -math.log(mass)

    @property
    def norm(self) -> float:
        return math.exp(self.log_norm)

    def density(self, u):
        """Normalized generator ``g^{(k+1)}(u)``."""
        ua = np.asarray(u, dtype=float)
        if np.any(ua < 0):
            raise DomainError("generator argument u must be nonnegative")
        out = self.norm * self._kernel(ua)
        return float(out) if out.ndim == 0 else out

    def derivative(self, u):
        """Derivative of the normalized generator with respect to ``u``."""
        ua = np.asarray(u, dtype=float)
        if np.any(ua < 0):
            raise DomainError("generator argument u must be nonnegative")
        if self.kind == "laplace" and np.any(ua == 0):
            raise DomainError("laplace generator is not differentiable at u=0")
        if self.kind == "pearson2" and self.param < 1 and np.any(ua == 1):
            raise DomainError("pearson2 derivative is unbounded at u=1 for t<1")
        out = self.norm * self._kernel_derivative(ua)
        return float(out) if out.ndim == 0 else out

    # -- integrals along a line ------------------------------------------

    def tail(self, x: float, q: float) -> float:
        """``int_{-inf}^{x} g(r^2 + q) dr`` for ``q >= 0``."""
        C, p, v = self.norm, self.p, self.param
        if self.kind == "normal":
            return C * math.exp(-0.5 * q) * math.sqrt(2 * math.pi) * special.ndtr(x)
        if self.kind == "t":
            return C * float(_power_tail(x, 1.0 + q / v, 1.0 / v, 0.5 * (v + p)))
        if self.kind == "pearson7":
            return C * float(_power_tail(x, 1.0 + q, 1.0, v))
        if self.kind == "pearson2":
            return C * float(_compact_tail(x, 1.0 - q, v))
        return self._quad_tail(x, q, derivative=False)

    def tail_derivative(self, x: float, q: float) -> float:
        """``int_{-inf}^{x} g'(r^2 + q) dr``; needs ``q > 0`` for laplace."""
        C, p, v = self.norm, self.p, self.param
        if self.kind == "normal":
            return -0.5 * self.tail(x, q)
        if self.kind == "t":
            e = 0.5 * (v + p)
            return -C * e / v * float(_power_tail(x, 1.0 + q / v, 1.0 / v, e + 1.0))
        if self.kind == "pearson7":
            return -C * v * float(_power_tail(x, 1.0 + q, 1.0, v + 1.0))
        if self.kind == "pearson2":
            if not v > 0:
                raise DomainError("pearson2 derivative integral diverges for t <= 0")
            return -C * v * float(_compact_tail(x, 1.0 - q, v - 1.0))
        if self.kind == "laplace" and not q > 0:
            raise DomainError("laplace derivative integral diverges at q=0")
        return self._quad_tail(x, q, derivative=True)

    def _quad_tail(self, x: float, q: float, derivative: bool) -> float:
        kern = self._kernel_derivative if derivative else self._kernel
        f = lambda r: float(kern(r * r + q))  # noqa: E731
        # f is even in r
        upper = integrate_half_line(f, "upper", abs(x), _QUAD)
        if x <= 0:
            return self.norm * upper
        return self.norm * (self._quad_total(q, derivative) - upper)

    def _quad_total(self, q: float, derivative: bool) -> float:
        """Unnormalized ``int_R kernel(r^2 + q) dr`` (or of the derivative)."""
        if self.kind == "laplace":
            s = math.sqrt(q)
            if derivative:
                return -float(special.k0(s))
            return 2.0 * s * float(special.k1(s)) if s > 0 else 2.0
        kern = self._kernel_derivative if derivative else self._kernel
        return 2.0 * integrate_half_line(lambda r: float(kern(r * r + q)), "upper", 0.0, _QUAD)

    # -- radial law -------------------------------------------------------

    @cached_property
    def _log_shell(self) -> float:
        return math.log(2.0) + 0.5 * self.p * math.log(math.pi) - special.gammaln(self.p / 2)

    def radial_density(self, r):
        """Density of ``R``: ``2 pi^{(k+1)/2} r^k g(r^2) / Gamma((k+1)/2)``."""
        ra = np.asarray(r, dtype=float)
        with np.errstate(invalid="ignore"):
            out = np.where(ra > 0, math.exp(self._log_shell) * ra**self.k * self.norm * self._kernel(np.abs(ra) ** 2), 0.0)
        return float(out) if out.ndim == 0 else out

    def existence_condition(self, order: int) -> str | None:
        """Human-readable condition for ``E[R^order]`` to exist, or ``None``."""
        if self.kind == "t" and not self.param > order:
            return f"m>{order}"
        if self.kind == "pearson7" and not 2 * self.param > self.k + order + 1:
            return f"t>{(self.k + order + 1) / 2:g}"
        return None

    def _closed_forms(self, m: int) -> list[tuple[str, float]]:
        p, v = self.p, self.param
        g = special.gammaln
        if self.kind == "normal":
            return [("chi", chi_radial_moment(self.k, m))]
        if self.kind == "t":
            return [("closed", math.exp(0.5 * m * math.log(v) + g((p + m) / 2) + g((v - m) / 2) - g(p / 2) - g(v / 2)))]
        if self.kind == "laplace":
            return [("closed", math.exp(g(p + m) - g(p)))]
        if self.kind == "pearson2":
            return [("closed", math.exp(g(v + 1 + p / 2) + g((p + m) / 2) - g(p / 2) - g(v + 1 + (p + m) / 2)))]
        if self.kind == "pearson7":
            return [("closed", math.exp(g((p + m) / 2) + g(v - (p + m) / 2) - g(p / 2) - g(v - p / 2)))]
        raw = math.pi ** (p / 2) * math.exp(g((p + m) / 2) - g(p / 2)) * hurwitz_lerch_psi(1, -1, (p + m) / 2, 1)
        mass = math.pi ** (p / 2) * hurwitz_lerch_psi(1, -1, p / 2, 1)
        return [("lerch-unnormalized", raw), ("lerch-normalized", raw / mass)]

    def numeric_radial_moment(self, order: int) -> float:
        """``int_0^inf r^order h(r) dr`` by adaptive quadrature."""
        cond = self.existence_condition(order)
        if cond:
            raise MomentExistenceError(order, cond)
        if self.kind == "pearson2":
            # h(r) = const r^k (1+r)^t (1-r)^t; the endpoint factor is an
            # algebraic quadrature weight so t < 0 is handled exactly
            const = math.exp(self._log_shell + self.log_norm)
            val, _ = integrate.quad(lambda r: r ** (self.k + order) * (1.0 + r) ** self.param, 0.0, 1.0,
                                      weight="alg", wvar=(0.0, self.param), epsabs=1e-14, epsrel=1e-12, limit=400)
            return const * val
        f = lambda r: r**order * float(self.radial_density(r))  # noqa: E731
        return integrate_half_line(f, "upper", 0.0, _QUAD)

    @cached_property
    def _moment_table(self) -> dict:
        table: dict[int, float] = {}
        for m in range(1, 5):
            if self.existence_condition(m):
                continue
            numeric = self.numeric_radial_moment(m)
            chosen = None
            for form, value in self._closed_forms(m):
                rel = abs(value - numeric) / abs(numeric)
                ok = rel <= _CROSSCHECK_RTOL
                note = ""
                if not ok:
                    note = "closed form disagrees with quadrature; quadrature value used"
                    if form == "lerch-unnormalized":
                        note = "Lerch form matches the unnormalized kernel (ratio = kernel mass)"
                    log.info("radial moment %s order %d: %s (rel diff %.3g)", self.label, m, note, rel)
                self._checks.append(MomentCheck(m, form, value, numeric, rel, ok, note))
                if ok and chosen is None:
                    chosen = value
            table[m] = numeric if chosen is None else chosen
        return table

    def radial_moment(self, order: int) -> float:
        """``E[R^order]`` for ``order`` in 1..4, cross-checked by quadrature."""
        if order not in (1, 2, 3, 4):
            raise DomainError("radial_moment supports orders 1..4")
        cond = self.existence_condition(order)
        if cond:
            raise MomentExistenceError(order, cond)
        return self._moment_table[order]

    def moment_checks(self) -> list[MomentCheck]:
        """Closed-form/quadrature comparison records (computed on demand)."""
        self._moment_table
        return list(self._checks)

    def moment_constants(self, max_order: int = 4) -> MomentConstants:
        """``a, b, c, d`` up to ``max_order``; later ones are ``None``."""
        vals: list[float | None] = []
        root = math.sqrt(2.0 / math.pi)
        for m in range(1, 5):
            if m > max_order:
                vals.append(None)
                continue
            ratio = self.radial_moment(m) / chi_radial_moment(self.k, m)
            if self.kind == "normal":
                ratio = 1.0
            vals.append(ratio * root if m % 2 else ratio)
        return MomentConstants(*vals)

    def max_moment_order(self) -> int:
        """Largest order in 0..4 for which all lower radial moments exist."""
        for m in range(1, 5):
            if self.existence_condition(m):
                return m - 1
        return 4

    # -- sampling ---------------------------------------------------------

    def sample_radius(self, rng: np.random.Generator, size: int | None = None):
        """Draw from the radial law ``h``."""
        n = 1 if size is None else int(size)
        p, v = self.p, self.param
        if self.kind == "normal":
            r = np.sqrt(rng.chisquare(p, n))
        elif self.kind == "laplace":
            r = rng.gamma(p, 1.0, n)
        elif self.kind == "t":
            r = np.sqrt(p * rng.f(p, v, n))
        elif self.kind == "pearson2":
            r = np.sqrt(rng.beta(p / 2, v + 1.0, n))
        elif self.kind == "pearson7":
            r = np.sqrt(rng.gamma(p / 2, 1.0, n) / rng.gamma(v - p / 2, 1.0, n))
        else:
            r = self._logistic_radius(rng, n)
        return float(r[0]) if size is None else r

    def _logistic_radius(self, rng: np.random.Generator, n: int) -> np.ndarray:
        # u = r^2 has density ~ u^{p/2-1} e^{-u} / (1 + e^{-u}); thin a
        # Gamma(p/2) proposal with acceptance 1/(1+e^{-u}) >= 1/2.
        out = np.empty(n)
        filled = 0
        while filled < n:
            want = int(1.1 * 2 * (n - filled)) + 16
            u = rng.gamma(self.p / 2, 1.0, want)
            keep = u[rng.random(want) < special.expit(u)]
            take = min(keep.size, n - filled)
            out[filled:filled + take] = keep[:take]
            filled += take
        return np.sqrt(out)


# Thin functional aliases.

def generator_density(fam: GeneratorFamily, u):
    return fam.density(u)


def generator_derivative(fam: GeneratorFamily, u):
    return fam.derivative(u)


def radial_density(fam: GeneratorFamily, r):
    return fam.radial_density(r)


def radial_moment(fam: GeneratorFamily, order: int) -> float:
    return fam.radial_moment(order)


def moment_constants(fam: GeneratorFamily, max_order: int = 4) -> MomentConstants:
    return fam.moment_constants(max_order)


def sample_radius(fam: GeneratorFamily, rng: np.random.Generator, size: int | None = None):
    return fam.sample_radius(rng, size)
