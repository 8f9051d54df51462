"""Acceptance criteria, one test per criterion.

Each test records a ``PASS``/``FAIL`` line in ``RESULTS`` (echoed in the
terminal summary and printed directly under ``-s``) before asserting.
"""

from __future__ import annotations

import math
import time

import numpy as np
import pytest
from scipy import integrate

from skewelliptic.distribution import SkewElliptical, canonical, pdf, sample, validate
from skewelliptic.generators import GeneratorFamily
from skewelliptic.inference import (
    TestConfig,
    b1_star,
    b2_extremes,
    calibrate_critical_values,
    directional_tests,
    empirical_measures,
    sample_mardia,
    standardize,
)
from skewelliptic.measures import (
    canonical_mode,
    mardia_kurtosis,
    mardia_skewness,
    mode_equation,
    report_all,
)
from skewelliptic.moments import mean_and_covariance, standardized_third_moment
from skewelliptic.numerics import hurwitz_lerch_psi, psd_inverse_sqrt
from skewelliptic.tables import compare_table, render_markdown

from conftest import DELTA_T11, OMEGA_T11, random_params

RESULTS: dict[int, str] = {}

SIX = ["normal", "t:5", "logistic", "laplace", "pearson2:2", "pearson7:4"]


def record(num: int, ok: bool, detail: str, seconds: float | None = None) -> None:
    took = "" if seconds is None else f" [{seconds:.2f} s]"
    line = f"criterion {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}{took}"
    RESULTS[num] = line
    print(line)
    assert ok, line


def fam(spec: str, k: int) -> GeneratorFamily:
    return GeneratorFamily.parse(spec, k)


class TestAcceptance:
    def test_01_reference_row(self) -> None:
        """Skew-normal reference row: beta_1k = 9.9624e-5 and beta_1* = beta_1k."""
        t0 = time.perf_counter()
        rep = report_all(validate([0, 0], OMEGA_T11, DELTA_T11, "normal"), "squared")
        dt = time.perf_counter() - t0
        rel = abs(rep.mardia_skew - 9.9624e-5) / 9.9624e-5
        same = abs(rep.malkovich_afifi - rep.mardia_skew) <= 1e-3 * rep.mardia_skew
        record(1, rel <= 1e-3 and same and dt < 1,
               f"beta_1k={rep.mardia_skew:.6g} (rel err {rel:.2e}), beta_1*={rep.malkovich_afifi:.6g}", dt)

    def test_02_null_rows(self) -> None:
        """With delta = 0 every skewness measure vanishes and beta_2k = (k+2)k d/b^2."""
        t0 = time.perf_counter()
        worst_skew, worst_kurt, normal_kurt = 0.0, 0.0, None
        for spec in SIX:
            rep = report_all(SkewElliptical([0, 0], OMEGA_T11, [0, 0], fam(spec, 2)))
            vals = [rep.mardia_skew, rep.malkovich_afifi, rep.isogai_scalar, rep.song_approx,
                    rep.bbq_scalar, rep.srivastava, *rep.bbq_vector, *rep.mori_vector, *rep.kollo_vector]
            worst_skew = max(worst_skew, max(abs(v) for v in vals))
            mc = fam(spec, 2).moment_constants()
            target = 4 * 2 * mc.d / mc.b**2
            worst_kurt = max(worst_kurt, abs(rep.mardia_kurt - target) / target)
            if spec == "normal":
                normal_kurt = rep.mardia_kurt
        dt = time.perf_counter() - t0
        ok = worst_skew <= 1e-12 and worst_kurt <= 1e-12 and abs(normal_kurt - 8) <= 1e-12 and dt < 1
        record(2, ok, f"max |skewness| {worst_skew:.1e}, kurtosis rel err {worst_kurt:.1e}, normal beta_2k={normal_kurt:g}", dt)

    def test_03_student_kurtosis(self) -> None:
        """Student t(5), k=2, delta=0: beta_2k = 24, and the conflicting entry 40 is flagged."""
        b2 = mardia_kurtosis(fam("t:5", 2), 0.0)
        text = render_markdown(compare_table("2-1"))
        row = next(line for line in text.splitlines() if "St(5)" in line)
        flagged = "/ 40 MISMATCH" in row
        record(3, abs(b2 - 24) <= 1e-10 and flagged, f"beta_2k={b2!r}, table entry 40 flagged MISMATCH: {flagged}")

    def test_04_mardia_inequality(self) -> None:
        """beta_2k >= beta_1k + k over 1000 random parameter draws."""
        rng = np.random.default_rng(2024)
        t0 = time.perf_counter()
        violations, worst = 0, np.inf
        kinds = ["normal", "t", "logistic", "laplace", "pearson2", "pearson7"]
        for _ in range(1000):
            k = int(rng.integers(1, 5))
            kind = kinds[int(rng.integers(len(kinds)))]
            # round family parameters so moment tables are reused across draws
            if kind == "t":
                spec = f"t:{round(rng.uniform(4.2, 30.0), 1)}"
            elif kind == "pearson2":
                spec = f"pearson2:{round(rng.uniform(-0.9, 6.0), 1)}"
            elif kind == "pearson7":
                spec = f"pearson7:{round((k + 5) / 2 + rng.uniform(0.1, 10.0), 1)}"
            else:
                spec = kind
            _, Om, de = random_params(rng, k, max_shape=0.999)
            D = SkewElliptical(np.zeros(k), Om, de, _cached(spec, k))
            ds = D.delta_star()
            gap = mardia_kurtosis(D.family, ds) - mardia_skewness(D.family, ds) - k
            worst = min(worst, gap)
            violations += gap < 0
        dt = time.perf_counter() - t0
        record(4, violations == 0 and dt < 10, f"{violations} violations, smallest margin {worst:.3g}", dt)

    def test_05_monte_carlo(self) -> None:
        """Plug-in estimates at n = 10^6 within 4 batch SE of the closed forms."""
        t0 = time.perf_counter()
        specs = ["normal", "t:12", "logistic", "laplace", "pearson2:2", "pearson7:7"]
        rng = np.random.default_rng(55)
        failures, worst = [], 0.0
        for i, spec in enumerate(specs):
            mu, Om, de = random_params(rng, 2, max_shape=0.9)
            de *= 0.9 / math.sqrt(de @ np.linalg.solve(Om, de))
            D = SkewElliptical(mu, Om, de, fam(spec, 2))
            rep = report_all(D)
            exact = np.array([rep.mardia_skew, rep.mardia_kurt, *rep.bbq_vector, *rep.mori_vector, *rep.kollo_vector])
            Y = sample(D, 1_000_000, seed=[5, i])

            def est(Y):
                e = empirical_measures(Y)
                return np.array([e.mardia_skew, e.mardia_kurt, *e.bbq_vector, *e.mori_vector, *e.kollo_vector])

            full = est(Y)
            batches = np.array([est(Y[b::20]) for b in range(20)])
            se = batches.std(axis=0, ddof=1) / math.sqrt(20)
            z = np.abs(full - exact) / se
            worst = max(worst, float(z.max()))
            if np.any(z > 4):
                failures.append(f"{spec}: z={np.round(z, 2).tolist()}")
        dt = time.perf_counter() - t0
        record(5, not failures and dt < 300,
               f"max |estimate - exact| = {worst:.2f} SE over 6 families x 8 quantities" + (f"; {failures}" if failures else ""), dt)

    def test_06_standardization(self) -> None:
        """Var(Z) = I and a permutation-symmetric standardized tensor for 100 parameter sets."""
        rng = np.random.default_rng(6)
        t0 = time.perf_counter()
        err_var, err_sym = 0.0, 0.0
        for i in range(100):
            k = int(rng.integers(1, 6))
            spec = ["normal", "t:9", "logistic", "laplace", "pearson2:1", "pearson7:9"][i % 6]
            mu, Om, de = random_params(rng, k)
            D = SkewElliptical(mu, Om, de, _cached(spec, k))
            _, V = mean_and_covariance(D)
            S = psd_inverse_sqrt(V)
            err_var = max(err_var, float(np.abs(S @ V @ S - np.eye(k)).max()))
            E = standardized_third_moment(D).as_array()
            for perm in ((1, 0, 2), (0, 2, 1), (2, 1, 0), (1, 2, 0), (2, 0, 1)):
                err_sym = max(err_sym, float(np.abs(E - E.transpose(perm)).max()))
        dt = time.perf_counter() - t0
        record(6, err_var <= 1e-10 and err_sym <= 1e-10 and dt < 10,
               f"max |Var(Z) - I| {err_var:.1e}, max asymmetry {err_sym:.1e}", dt)

    def test_07_density_normalization(self) -> None:
        """The density integrates to one for k in {1, 2}, all six families."""
        t0 = time.perf_counter()
        rng = np.random.default_rng(7)
        worst, detail = 0.0, []
        # polar rule in whitened coordinates: periodic trapezoid in the angle,
        # Gauss-Legendre in s with r = s / (1 - s) (or r = s on a compact support)
        theta = 2 * np.pi * np.arange(96) / 96
        s, w = np.polynomial.legendre.leggauss(300)
        s, w = 0.5 * (s + 1), 0.5 * w
        for spec in SIX:
            for k in (1, 2):
                mu, Om, de = random_params(rng, k)
                D = SkewElliptical(mu, Om, de, fam(spec, k))
                compact = D.family.kind == "pearson2"
                r, dr = (s, w) if compact else (s / (1 - s), w / (1 - s) ** 2)
                L = np.linalg.cholesky(Om)
                if k == 1:
                    z = np.concatenate([-r, r])[:, None]
                    mass = float(np.sum(np.concatenate([dr, dr]) * pdf(D, mu + z * L[0, 0]))) * L[0, 0]
                else:
                    R, T = np.meshgrid(r, theta, indexing="ij")
                    Z = np.column_stack([(R * np.cos(T)).ravel(), (R * np.sin(T)).ravel()])
                    f = pdf(D, mu + Z @ L.T).reshape(R.shape)
                    mass = float(np.sum((dr * r)[:, None] * f) * (2 * np.pi / theta.size)) * np.linalg.det(L)
                err = abs(mass - 1)
                worst = max(worst, err)
                detail.append(f"{spec}/k={k}:{err:.1e}")
        dt = time.perf_counter() - t0
        record(7, worst <= 1e-4 and dt < 60, f"max |mass - 1| = {worst:.1e} ({', '.join(detail)})", dt)

    def test_08_mode(self) -> None:
        """Mode equation residual <= 1e-10 and a strict local maximum of the density."""
        t0 = time.perf_counter()
        worst_res, bad = 0.0, []
        for spec in SIX:
            f = fam(spec, 2)
            for ds in np.round(np.arange(0.1, 0.95, 0.1), 1):
                m0 = canonical_mode(f, ds)
                res = abs(mode_equation(f, ds, m0))
                worst_res = max(worst_res, res)
                D = SkewElliptical([0, 0], np.eye(2), [ds, 0], f)
                peak, left, right = pdf(D, [[m0, 0], [m0 - 1e-3, 0], [m0 + 1e-3, 0]])
                if not (res <= 1e-10 and peak > left and peak > right):
                    bad.append(f"{spec}@{ds}")
        dt = time.perf_counter() - t0
        record(8, not bad and dt < 30, f"max residual {worst_res:.1e} over 6 families x 9 shapes" + (f"; failed {bad}" if bad else ""), dt)

    def test_09_affine_invariance(self) -> None:
        """Sample statistics unchanged by 20 random affine maps of a fixed n = 300 sample."""
        t0 = time.perf_counter()
        rng = np.random.default_rng(9)
        mu, Om, de = random_params(rng, 3, max_shape=0.95)
        Y = sample(SkewElliptical(mu, Om, de, fam("t:9", 3)), 300, seed=90)

        def stats(Y):
            b1, b2 = sample_mardia(Y)
            res = directional_tests(Y)
            return np.array([b1, b2, res.b1_star, res.b2_max, res.b2_min, res.b2_star_sq])

        ref = stats(Y)
        worst = 0.0
        for _ in range(20):
            A = rng.standard_normal((3, 3))
            while abs(np.linalg.det(A)) < 0.1:
                A = rng.standard_normal((3, 3))
            got = stats(Y @ A.T + rng.standard_normal(3))
            worst = max(worst, float(np.max(np.abs(got - ref) / np.abs(ref))))
        dt = time.perf_counter() - t0
        record(9, worst <= 1e-8 and dt < 60, f"max relative change {worst:.1e} over 20 maps", dt)

    def test_10_optimizer_dominance(self) -> None:
        """Optima dominate 10^4 random directions and are stationary."""
        rng = np.random.default_rng(10)
        lines, ok = [], True
        for k, spec in ((2, "normal"), (3, "laplace"), (4, "t:9")):
            t0 = time.perf_counter()
            mu, Om, de = random_params(rng, k, max_shape=0.95)
            X, _ = standardize(sample(SkewElliptical(mu, Om, de, fam(spec, k)), 300, seed=k))
            s = b1_star(X)
            hi, lo = b2_extremes(X)
            U = rng.standard_normal((10_000, k))
            U /= np.linalg.norm(U, axis=1, keepdims=True)
            Z = X @ U.T
            n = X.shape[0]
            b1, b2 = n * np.sum(Z**3, axis=0) ** 2, n * np.sum(Z**4, axis=0)
            dt = time.perf_counter() - t0
            res = max(s.residual, hi.residual, lo.residual)
            good = (s.value >= b1.max() and hi.value >= b2.max() and lo.value <= b2.min()
                    and res <= 1e-8 and dt < 30)
            ok &= good
            lines.append(f"k={k}: residual {res:.1e}, margins ({s.value - b1.max():.2e}, "
                         f"{hi.value - b2.max():.2e}, {b2.min() - lo.value:.2e}) {dt:.1f}s")
        record(10, ok, "; ".join(lines))

    def test_11_calibration(self) -> None:
        """Calibrated 5% thresholds reject 3-7% of 1000 fresh null samples."""
        t0 = time.perf_counter()
        f = fam("normal", 2)
        cal = calibrate_critical_values(f, 2, 200, 4000, 0.05, seed=1101)
        cfg = TestConfig(K=cal.K)
        rej_b1 = rej_b2 = 0
        null = SkewElliptical([0, 0], np.eye(2), [0, 0], f)
        for child in np.random.SeedSequence(1102).spawn(1000):
            res = directional_tests(sample(null, 200, seed=child), cfg)
            rej_b1 += res.b1_star > cal.K_b1
            rej_b2 += res.b2_star_sq > cal.K_b2
        dt = time.perf_counter() - t0
        r1, r2 = rej_b1 / 1000, rej_b2 / 1000
        ok = 0.03 <= r1 <= 0.07 and 0.03 <= r2 <= 0.07 and dt < 600
        record(11, ok, f"null rejection: skewness {r1:.3f}, kurtosis {r2:.3f} (K={cal.K:.4f}, 4000 calibration reps)", dt)

    def test_12_special_functions(self) -> None:
        """Dirichlet eta(1) = ln 2 and logistic radial moments checked or flagged."""
        eta1 = hurwitz_lerch_psi(1, -1, 1, 1)
        silent, agreed, flagged = [], 0, 0
        for k in (1, 2, 3):
            checks = fam("logistic", k).moment_checks()
            for order in (1, 2, 3, 4):
                rows = [c for c in checks if c.order == order]
                if not rows:
                    silent.append((k, order))
                for c in rows:
                    if c.accepted and c.rel_diff <= 1e-6:
                        agreed += 1
                    elif not c.accepted and c.note:
                        flagged += 1
                    else:
                        silent.append((k, order, c.form))
        ok = abs(eta1 - math.log(2)) <= 1e-12 and not silent
        record(12, ok, f"|eta(1) - ln 2| = {abs(eta1 - math.log(2)):.1e}; logistic moments: "
                       f"{agreed} agree to 1e-6, {flagged} documented discrepancies, {len(silent)} silent")


_FAMILY_CACHE: dict[tuple[str, int], GeneratorFamily] = {}


def _cached(spec: str, k: int) -> GeneratorFamily:
    key = (spec, k)
    if key not in _FAMILY_CACHE:
        _FAMILY_CACHE[key] = fam(spec, k)
    return _FAMILY_CACHE[key]
