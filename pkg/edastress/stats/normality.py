"""Normality tests for groups of scores."""

import dataclasses

import numpy as np
from scipy import stats

from edastress.constants import NORMALITY_ALPHA
from edastress.errors import StatisticsError

AD_SIGNIFICANCE_LEVELS = (15.0, 10.0, 5.0, 2.5, 1.0)

# Estimated-mean-and-variance case.  'size_adjusted' divides the asymptotic
# values by (1 + 4/n - 25/n^2) and is compared with the raw A^2; 'stephens'
# is fixed and compared with A^2 (1 + 0.75/n + 2.25/n^2).
_AD_ASYMPTOTIC = (0.576, 0.656, 0.787, 0.918, 1.092)
_AD_STEPHENS = (0.561, 0.631, 0.752, 0.873, 1.035)
AD_TABLES = ('size_adjusted', 'stephens')

SHAPIRO_MIN_N = 3
SHAPIRO_MAX_N = 5000
AD_MIN_N = 8


def _check_sample(sample, min_n, max_n, test):
    x = np.asarray(sample, dtype=float).ravel()
    if not np.all(np.isfinite(x)):
        raise StatisticsError("%s: sample contains non-finite values." % test)
    if not min_n <= len(x) <= max_n:
        raise StatisticsError("%s needs %d..%s observations, got %d." % (
            test, min_n, max_n, len(x)))
    if np.ptp(x) == 0:
        raise StatisticsError("%s is undefined for a constant sample." % test)
    return x


def shapiro_wilk(sample):
    """returns (W, p)"""
    x = _check_sample(sample, SHAPIRO_MIN_N, SHAPIRO_MAX_N, 'Shapiro-Wilk')
    result = stats.shapiro(x)
    return float(result.statistic), float(result.pvalue)


@dataclasses.dataclass(frozen=True)
class AndersonDarlingResult(object):
    statistic: float             # raw A^2
    compared_statistic: float    # value checked against the table
    critical_values: tuple
    table: str
    significance_levels: tuple = AD_SIGNIFICANCE_LEVELS

    def critical_at(self, level_pct):
        try:
            return self.critical_values[self.significance_levels.index(level_pct)]
        except ValueError:
            raise StatisticsError("No critical value at %g%%." % level_pct)

    def rejects_at(self, level_pct):
        return self.compared_statistic > self.critical_at(level_pct)


def anderson_darling_normal(sample, table='size_adjusted'):
    """A^2 against a normal with estimated mean and variance.

    returns AndersonDarlingResult with critical values at 15/10/5/2.5/1 %.
    """
    if table not in AD_TABLES:
        raise StatisticsError("Unknown Anderson-Darling table %r." % table)
    x = _check_sample(sample, AD_MIN_N, np.inf, 'Anderson-Darling')
    n = float(len(x))
    a2 = float(stats.anderson(x, dist='norm').statistic)
    if table == 'size_adjusted':
        factor = 1.0 + 4.0 / n - 25.0 / n ** 2
        critical = tuple(round(v / factor, 3) for v in _AD_ASYMPTOTIC)
        compared = a2
    else:
        critical = _AD_STEPHENS
        compared = a2 * (1.0 + 0.75 / n + 2.25 / n ** 2)
    return AndersonDarlingResult(a2, compared, critical, table)


@dataclasses.dataclass(frozen=True)
class NormalityReport(object):
    n: int
    shapiro_w: float
    shapiro_p: float
    ad_statistic: float        # compared against ad_critical_005
    ad_statistic_raw: float    # A^2 before any small-sample correction
    ad_critical_005: float
    ad_table: str
    normal_at_005: bool

    def to_dict(self):
        return dataclasses.asdict(self)


def normality_report(sample, ad_table='size_adjusted', alpha=NORMALITY_ALPHA):
    """Shapiro-Wilk and Anderson-Darling on one sample.

    The sample counts as normal only when neither test rejects at 5 %.
    """
    w, p = shapiro_wilk(sample)
    ad = anderson_darling_normal(sample, ad_table)
    critical = ad.critical_at(100.0 * alpha)
    return NormalityReport(
        n=int(np.size(sample)),
        shapiro_w=w,
        shapiro_p=p,
        ad_statistic=ad.compared_statistic,
        ad_statistic_raw=ad.statistic,
        ad_critical_005=critical,
        ad_table=ad_table,
        normal_at_005=bool(p >= alpha and ad.compared_statistic <= critical),
    )
