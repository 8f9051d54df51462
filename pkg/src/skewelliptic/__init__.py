"""Skew-elliptical distributions and their skewness and kurtosis measures."""

from .distribution import (
    CanonicalForm,
    SkewElliptical,
    affine_transform,
    canonical,
    canonicalize,
    delta_from_lambda,
    lambda_from_delta,
    linear_form,
    pdf,
    sample,
    validate,
)
from .generators import GeneratorFamily, MomentConstants, MomentExistenceError, chi_radial_moment
from .inference import (
    Sample,
    TestConfig,
    TestResult,
    b1_star,
    b2_extremes,
    b2_star_sq,
    calibrate_critical_values,
    directional_b1,
    directional_b2,
    directional_tests,
    empirical_measures,
    sample_mardia,
    standardize,
)
from .measures import (
    MeasureReport,
    bbq,
    excess_kurtosis,
    isogai,
    kollo,
    malkovich_afifi,
    mardia_kurtosis,
    mardia_skewness,
    mori,
    report_all,
    song_approx,
    srivastava,
)
from .moments import (
    ThirdMomentTensor,
    canonical_moments,
    central_third_moment,
    mean_and_covariance,
    raw_third_moment,
    standardized_third_moment,
    tensor_lookup,
)
from .numerics import DomainError, NumericError

__version__ = "0.1.0"
