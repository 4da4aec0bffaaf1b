"""Distribution functions and the two classical two-sample tests.

Everything here is a deterministic pure function, so simulation results
are bit-reproducible given a seed. Tail probabilities are delegated to
scipy.special, which evaluates the Gaussian and Student-t integrals to
near machine precision; the test suite checks them against independent
high-precision references.

All tests are one-sided with the alternative "group 1 (treatment) is
larger".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special


class InsufficientDataError(ValueError):
    """A test was asked to run on fewer observations than it needs."""


class DegenerateVarianceError(ValueError):
    """Both groups have zero sample variance; the t statistic is undefined."""


@dataclass(frozen=True)
class SampleSummary:
    """Size, mean and corrected (n-1 denominator) standard deviation."""

    n: int
    mean: float
    sd: float

    @classmethod
    def from_values(cls, values) -> "SampleSummary":
        values = np.asarray(values, dtype=np.float64)
        n = values.size
        if n == 0:
            raise InsufficientDataError("empty sample")
        mean = float(values.mean())
        sd = float(values.std(ddof=1)) if n >= 2 else 0.0
        return cls(n=n, mean=mean, sd=sd)


@dataclass(frozen=True)
class TestResult:
    """Outcome of a single hypothesis test.

    ``df`` is present only for t-based tests; ``estimate``/``std_error``
    only when the test produces an effect estimate.
    """

    statistic: float
    p_value: float
    method: str
    df: float | None = None
    estimate: float | None = None
    std_error: float | None = None


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF, saturating to 0/1 in the far tails."""
    return float(special.ndtr(x))


def std_normal_quantile(q: float) -> float:
    """Inverse standard normal CDF for q in the open interval (0, 1)."""
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile level must be in (0, 1), got {q}")
    return float(special.ndtri(q))


def student_t_sf(t: float, df: float) -> float:
    """Upper tail probability P(T_df > t) of the Student t distribution."""
    if not df > 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    # By symmetry sf(t) = cdf(-t); evaluating the CDF at -t keeps full
    # precision in the upper tail.
    return float(special.stdtr(df, -t))


def welch_satterthwaite_df(var0: float, n0: int, var1: float, n1: int) -> float:
    """Degrees of freedom for the unequal-variance two-sample t test."""
    u0 = var0 / n0
    u1 = var1 / n1
    return (u0 + u1) ** 2 / (u0**2 / (n0 - 1) + u1**2 / (n1 - 1))


def welch_t_test(group0, group1) -> TestResult:
    """One-sided Welch t test of mean(group1) > mean(group0).

    Requires at least two observations per group and a positive sample
    variance in at least one group.
    """
    s0 = SampleSummary.from_values(group0)
    s1 = SampleSummary.from_values(group1)
    if s0.n < 2 or s1.n < 2:
        raise InsufficientDataError(
            f"welch_t_test needs >= 2 observations per group, got {s0.n} and {s1.n}"
        )
    if s0.sd == 0.0 and s1.sd == 0.0:
        raise DegenerateVarianceError("both groups have zero sample variance")
    estimate = s1.mean - s0.mean
    std_error = math.sqrt(s0.sd**2 / s0.n + s1.sd**2 / s1.n)
    statistic = estimate / std_error
    df = welch_satterthwaite_df(s0.sd**2, s0.n, s1.sd**2, s1.n)
    return TestResult(
        statistic=statistic,
        p_value=student_t_sf(statistic, df),
        method="welch-t",
        df=df,
        estimate=estimate,
        std_error=std_error,
    )


def pooled_proportion_ztest(
    successes0: int, n0: int, successes1: int, n1: int, continuity: bool = True
) -> TestResult:
    """One-sided two-sample proportion z test of p1 > p0 with a pooled
    standard error and, by default, a continuity correction of
    (1/n0 + 1/n1) / 2 on the difference.

    This is the classic corrected normal-approximation test (the form R's
    prop.test uses); the correction makes it conservative for small
    counts. Degenerate zero-standard-error cases follow the same
    conventions as :func:`wald_proportion_test`.
    """
    for successes, n, label in ((successes0, n0, "0"), (successes1, n1, "1")):
        if n < 1:
            raise InsufficientDataError(f"group {label} is empty")
        if not 0 <= successes <= n:
            raise ValueError(f"successes{label}={successes} outside 0..{n}")
    p0 = successes0 / n0
    p1 = successes1 / n1
    estimate = p1 - p0
    pooled = (successes0 + successes1) / (n0 + n1)
    std_error = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n0 + 1.0 / n1))
    shift = 0.5 * (1.0 / n0 + 1.0 / n1) if continuity else 0.0
    if std_error == 0.0:
        if estimate == 0.0:
            statistic, p_value = 0.0, 0.5
        else:
            statistic = math.copysign(math.inf, estimate)
            p_value = 0.0 if estimate > 0 else 1.0
    else:
        corrected = max(abs(estimate) - shift, 0.0)
        statistic = math.copysign(corrected, estimate) / std_error
        p_value = 1.0 - std_normal_cdf(statistic)
    return TestResult(
        statistic=statistic,
        p_value=p_value,
        method="pooled-proportion-z",
        estimate=estimate,
        std_error=std_error,
    )


def wald_proportion_test(successes0: int, n0: int, successes1: int, n1: int) -> TestResult:
    """One-sided unpooled Wald test of p1 > p0 for two binomial samples.

    Degenerate cases where the standard error vanishes (both proportions
    0 or both 1) are resolved by convention rather than raising, so that
    simulation loops stay total: p = 0.5 when the estimated difference is
    zero, else 0 or 1 according to its sign.
    """
    for successes, n, label in ((successes0, n0, "0"), (successes1, n1, "1")):
        if n < 1:
            raise InsufficientDataError(f"group {label} is empty")
        if not 0 <= successes <= n:
            raise ValueError(f"successes{label}={successes} outside 0..{n}")
    p0 = successes0 / n0
    p1 = successes1 / n1
    estimate = p1 - p0
    std_error = math.sqrt(p0 * (1.0 - p0) / n0 + p1 * (1.0 - p1) / n1)
    if std_error == 0.0:
        if estimate == 0.0:
            statistic, p_value = 0.0, 0.5
        else:
            statistic = math.copysign(math.inf, estimate)
            p_value = 0.0 if estimate > 0 else 1.0
    else:
        statistic = estimate / std_error
        p_value = 1.0 - std_normal_cdf(statistic)
    return TestResult(
        statistic=statistic,
        p_value=p_value,
        method="wald-proportion",
        estimate=estimate,
        std_error=std_error,
    )
