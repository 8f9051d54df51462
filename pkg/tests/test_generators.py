"""Tests for the six density generator families.

Tests cover:
- generator values, support and analytic derivatives
- radial densities against named laws and unit mass
- radial moments against closed forms and quadrature
- moment constants and existence gating
- radius sampling against the radial moments
- the logistic closed-form cross-check records
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, stats

from skewelliptic.generators import (
    GeneratorFamily,
    MomentConstants,
    MomentExistenceError,
    chi_radial_moment,
    generator_density,
    generator_derivative,
    moment_constants,
    radial_density,
    radial_moment,
    sample_radius,
)
from skewelliptic.measures import malkovich_afifi, mardia_skewness
from skewelliptic.numerics import DomainError

from conftest import FAMILY_SPECS, family


class TestConstruction:
    """Parsing and parameter validation."""

    @pytest.mark.parametrize("spec,kind,param", [("normal", "normal", None), ("t:5", "t", 5.0),
                                                 ("Pearson7:4", "pearson7", 4.0), ("laplace", "laplace", None)])
    def test_parse(self, spec: str, kind: str, param) -> None:
        fam = GeneratorFamily.parse(spec, 2)
        assert (fam.kind, fam.param) == (kind, param)

    @pytest.mark.parametrize("spec", ["gauss", "t", "t:x", "normal:2", "t:-1", "pearson2:-1", "pearson7:1.5"])
    def test_bad_specs(self, spec: str) -> None:
        with pytest.raises(DomainError):
            GeneratorFamily.parse(spec, 2)

    def test_bad_dimension(self) -> None:
        with pytest.raises(DomainError):
            GeneratorFamily("normal", 0)

    def test_label_round_trip(self) -> None:
        fam = GeneratorFamily.parse("pearson2:1.5", 3)
        assert GeneratorFamily.parse(fam.label, 3) == fam


class TestGeneratorDensity:
    def test_normal_k1_at_zero(self) -> None:
        """The k=1 normal generator at u=0 is 1/(2 pi)."""
        assert generator_density(family("normal", 1), 0.0) == pytest.approx(1 / (2 * math.pi), rel=1e-15)

    def test_pearson2_outside_support(self) -> None:
        assert generator_density(family("pearson2:2", 2), 1.5) == 0.0

    def test_logistic_at_zero_is_half_the_constant(self) -> None:
        fam = family("logistic", 2)
        # unit-mass constant from an independent 3-D shell integral
        mass, _ = integrate.quad(lambda r: 4 * math.pi * r * r * math.exp(-r * r) / (1 + math.exp(-r * r)), 0, np.inf, epsabs=1e-13)
        assert generator_density(fam, 0.0) == pytest.approx(0.5 / mass, rel=1e-10)

    def test_negative_argument(self) -> None:
        with pytest.raises(DomainError):
            generator_density(family("normal", 2), -0.1)

    @pytest.mark.parametrize("spec", FAMILY_SPECS)
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_unit_mass(self, spec: str, k: int) -> None:
        """The radial density integrates to one."""
        fam = family(spec, k)
        upper = 1.0 if fam.kind == "pearson2" else np.inf
        mass, _ = integrate.quad(lambda r: radial_density(fam, r), 0, upper, epsabs=1e-12, epsrel=1e-12, limit=200)
        assert mass == pytest.approx(1.0, abs=1e-8)


class TestGeneratorDerivative:
    @given(st.floats(0.0, 30.0))
    def test_normal_is_minus_half(self, u: float) -> None:
        fam = family("normal", 2)
        assert generator_derivative(fam, u) == pytest.approx(-0.5 * generator_density(fam, u), rel=1e-14)

    @given(st.floats(0.0, 50.0))
    def test_pearson7_power_law(self, u: float) -> None:
        fam = family("pearson7:4", 2)
        assert generator_derivative(fam, u) == pytest.approx(-4 * generator_density(fam, u) / (1 + u), rel=1e-13)

    def test_laplace_at_zero(self) -> None:
        with pytest.raises(DomainError):
            generator_derivative(family("laplace", 2), 0.0)

    @pytest.mark.parametrize("spec", FAMILY_SPECS)
    def test_finite_differences(self, spec: str) -> None:
        """Analytic derivative agrees with a central difference at 20 interior points."""
        fam = family(spec, 2)
        top = 0.95 if fam.kind == "pearson2" else 8.0
        h = 1e-5
        for u in np.linspace(0.05, top, 20):
            fd = (generator_density(fam, u + h) - generator_density(fam, u - h)) / (2 * h)
            assert generator_derivative(fam, u) == pytest.approx(fd, rel=1e-6, abs=1e-12)


class TestTailIntegrals:
    @pytest.mark.parametrize("spec", FAMILY_SPECS)
    @pytest.mark.parametrize("x,q", [(-1.3, 0.2), (0.0, 0.5), (0.7, 0.05), (2.5, 0.3)])
    def test_tail_against_quadrature(self, spec: str, x: float, q: float) -> None:
        fam = family(spec, 2)
        lo, hi = -np.inf, x
        if fam.kind == "pearson2":
            # integrate over the compact support only
            edge = math.sqrt(1 - q)
            lo, hi = -edge, min(x, edge)
        ref, _ = integrate.quad(lambda r: generator_density(fam, r * r + q), lo, hi, epsabs=1e-13, limit=200)
        assert fam.tail(x, q) == pytest.approx(ref, rel=1e-7, abs=1e-12)

    @pytest.mark.parametrize("spec", ["normal", "t:12", "logistic", "laplace", "pearson2:2.5", "pearson7:7"])
    @pytest.mark.parametrize("x,q", [(-1.3, 0.2), (0.7, 0.05)])
    def test_tail_derivative_against_quadrature(self, spec: str, x: float, q: float) -> None:
        fam = family(spec, 2)
        ref, _ = integrate.quad(lambda r: generator_derivative(fam, r * r + q), -np.inf, x, epsabs=1e-13, limit=200)
        assert fam.tail_derivative(x, q) == pytest.approx(ref, rel=1e-7, abs=1e-12)


class TestRadialDensity:
    @given(st.floats(0.01, 8.0))
    def test_normal_is_chi3(self, r: float) -> None:
        assert radial_density(family("normal", 2), r) == pytest.approx(stats.chi(3).pdf(r), rel=1e-12)

    @given(st.floats(0.01, 20.0))
    def test_laplace_is_gamma3(self, r: float) -> None:
        assert radial_density(family("laplace", 2), r) == pytest.approx(stats.gamma(3).pdf(r), rel=1e-12)

    def test_pearson2_support(self) -> None:
        fam = family("pearson2:2", 2)
        assert radial_density(fam, 1.2) == 0.0
        mass, _ = integrate.quad(lambda r: radial_density(fam, r), 0, 1)
        assert mass == pytest.approx(1.0, abs=1e-10)


class TestRadialMoments:
    def test_laplace_mean(self) -> None:
        assert radial_moment(family("laplace", 2), 1) == pytest.approx(3.0, rel=1e-10)

    def test_student_second(self) -> None:
        assert radial_moment(family("t:5", 2), 2) == pytest.approx(5.0, rel=1e-10)

    def test_student_fourth_missing(self) -> None:
        with pytest.raises(MomentExistenceError, match="m>4"):
            radial_moment(family("t:3", 2), 4)

    def test_chi_moments(self) -> None:
        assert chi_radial_moment(2, 2) == pytest.approx(3.0)
        assert chi_radial_moment(2, 4) == pytest.approx(15.0)
        assert chi_radial_moment(1, 1) == pytest.approx(math.sqrt(math.pi / 2), rel=1e-15)

    @pytest.mark.parametrize("spec", FAMILY_SPECS)
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_jensen(self, spec: str, k: int) -> None:
        """E[R]^2 <= E[R^2] and E[R^2]^2 <= E[R^4]."""
        fam = family(spec, k)
        m = [radial_moment(fam, j) for j in (1, 2, 3, 4)]
        assert m[0] ** 2 <= m[1]
        assert m[1] ** 2 <= m[3]
        assert m[1] * m[3] >= m[2] ** 2 * (1 - 1e-12)

    @pytest.mark.parametrize("t", [-0.9, -0.5, 0.0])
    def test_pearson2_singular_edge(self, t: float) -> None:
        """Radial moments stay exact when the density is unbounded at r = 1."""
        fam = GeneratorFamily("pearson2", 2, t)
        fam.moment_constants()
        assert all(c.accepted and c.rel_diff < 1e-10 for c in fam.moment_checks())

    def test_order_out_of_range(self) -> None:
        with pytest.raises(DomainError):
            radial_moment(family("normal", 2), 5)


class TestMomentConstants:
    @pytest.mark.parametrize("k", [1, 2, 5])
    def test_normal(self, k: int) -> None:
        mc = moment_constants(family("normal", k))
        root = math.sqrt(2 / math.pi)
        assert (mc.a, mc.b, mc.c, mc.d) == pytest.approx((root, 1.0, root, 1.0), rel=1e-14)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_student(self, k: int) -> None:
        mc = moment_constants(family("t:5", k))
        assert mc.b == pytest.approx(5 / 3, rel=1e-10)
        assert mc.d == pytest.approx(25 / 3, rel=1e-10)

    def test_pearson7(self) -> None:
        assert moment_constants(family("pearson7:4", 2)).b == pytest.approx(1 / 3, rel=1e-10)

    def test_laplace(self) -> None:
        mc = moment_constants(family("laplace", 2))
        assert (mc.b, mc.d) == pytest.approx((4.0, 24.0), rel=1e-10)

    def test_partial_constants(self) -> None:
        mc = moment_constants(family("t:3.5", 2), max_order=3)
        assert mc.d is None and mc.c is not None

    def test_max_order(self) -> None:
        assert family("t:3.5", 2).max_moment_order() == 3
        assert family("pearson7:2", 2).max_moment_order() == 0
        assert family("logistic", 2).max_moment_order() == 4


class TestSampleRadius:
    @pytest.mark.parametrize("spec", FAMILY_SPECS)
    @pytest.mark.parametrize("k", [1, 3])
    def test_moments_within_four_se(self, spec: str, k: int) -> None:
        fam = family(spec, k)
        r = sample_radius(fam, np.random.default_rng(11), 200_000)
        for order in (1, 2):
            vals = r**order
            se = vals.std() / math.sqrt(vals.size)
            assert abs(vals.mean() - radial_moment(fam, order)) < 4 * se

    def test_laplace_mean_three(self) -> None:
        r = sample_radius(family("laplace", 2), np.random.default_rng(3), 100_000)
        assert abs(r.mean() - 3.0) < 3 * r.std() / math.sqrt(r.size)

    def test_scalar_draw(self) -> None:
        assert isinstance(sample_radius(family("logistic", 2), np.random.default_rng(0)), float)

    def test_logistic_law(self) -> None:
        """Rejection draws follow the radial cdf (Kolmogorov-Smirnov)."""
        fam = family("logistic", 2)
        r = sample_radius(fam, np.random.default_rng(5), 20_000)
        cdf = lambda x: integrate.quad(lambda t: radial_density(fam, t), 0, x)[0]  # noqa: E731
        grid = np.linspace(0.01, 6, 400)
        F = np.array([cdf(x) for x in grid])
        emp = np.searchsorted(np.sort(r), grid) / r.size
        assert np.max(np.abs(emp - F)) < 1.63 / math.sqrt(r.size)


class TestLogisticClosedForms:
    def test_normalized_form_agrees(self) -> None:
        checks = [c for c in family("logistic", 2).moment_checks() if c.form == "lerch-normalized"]
        assert len(checks) == 4
        assert all(c.accepted and c.rel_diff < 1e-6 for c in checks)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_unnormalized_form_flagged(self, k: int) -> None:
        """The kernel-mass-free form is rejected with a note, never silently."""
        checks = [c for c in family("logistic", k).moment_checks() if c.form == "lerch-unnormalized"]
        assert checks and not any(c.accepted for c in checks)
        assert all(c.note for c in checks)
        # the discrepancy ratio is the unnormalized kernel mass
        mass = math.pi ** ((k + 1) / 2) * float(__import__("mpmath").altzeta((k + 1) / 2))
        for c in checks:
            assert c.closed_form / c.numeric == pytest.approx(mass, rel=1e-8)

    def test_unnormalized_constants_give_reference_row(self) -> None:
        """Feeding the unnormalized moments into the skewness formulas gives 3.946018 and 3.074156."""
        fam = family("logistic", 2)
        raw = {c.order: c.closed_form for c in fam.moment_checks() if c.form == "lerch-unnormalized"}
        root = math.sqrt(2 / math.pi)
        vals = [raw[m] / chi_radial_moment(2, m) * (root if m % 2 else 1.0) for m in (1, 2, 3, 4)]

        class Unnormalized:
            k = 2

            def max_moment_order(self):
                return 4

            def moment_constants(self, order=4):
                return MomentConstants(*vals)

        assert mardia_skewness(Unnormalized(), 0.344) == pytest.approx(3.946018, rel=1e-6)
        assert malkovich_afifi(Unnormalized(), 0.344) == pytest.approx(3.074156, rel=1e-6)
