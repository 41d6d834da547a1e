"""Affine invariant weighted L2 test for multivariate normality."""

from .sample import (
    DataError,
    Sample,
    ScaledResiduals,
    SingularCovarianceError,
    inv_sqrt_sym,
    load_sample,
    standardize,
)
from .statistic import (
    StatisticConfig,
    StatisticResult,
    large_a_transform,
    mardia_kurtosis,
    mrs_skewness,
    small_a_transform,
    table1_factor,
    u_statistic,
    u_values,
    weight_integral,
)

__version__ = "0.1.0"
