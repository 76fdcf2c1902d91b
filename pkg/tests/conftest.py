import pytest

from durasim import EnrollmentBeta, ExponentialModel, SubgroupArm, TrialSpec

# Two reference settings used across the suite: n=140 patients, d=88 target
# events, 1:1 allocation, exponential survival, no drop-out.
#   scenario 1: 10 pts/month (14-month accrual), medians 10 / 20 months
#   scenario 2: 3.88 pts/month (~36-month accrual), medians 5 / 10 months


def two_arm_spec(period_a: float, median_a: float, median_b: float,
                 beta: float = 1.0, n: int = 140, d: int = 88) -> TrialSpec:
    enrollment = EnrollmentBeta(period_a=period_a, beta=beta)
    return TrialSpec(n=n, d=d, arms=(
        SubgroupArm(0.5, enrollment, ExponentialModel.from_median(median_a)),
        SubgroupArm(0.5, enrollment, ExponentialModel.from_median(median_b)),
    ))


@pytest.fixture(scope="session")
def scenario1() -> TrialSpec:
    return two_arm_spec(14.0, 10.0, 20.0)


@pytest.fixture(scope="session")
def scenario2() -> TrialSpec:
    return two_arm_spec(140.0 / 3.88, 5.0, 10.0)
