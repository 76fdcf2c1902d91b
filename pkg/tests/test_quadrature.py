import math

import pytest

from durasim.errors import NumericError, ParameterError
from durasim.quadrature import integrate


def test_polynomial_exact():
    assert integrate(lambda x: x**2, 0.0, 1.0, tol=1e-12) == pytest.approx(1 / 3, abs=1e-13)


def test_exponential():
    assert integrate(math.exp, 0.0, 2.0, tol=1e-12) == pytest.approx(math.exp(2.0) - 1.0, abs=1e-11)


def test_empty_interval():
    assert integrate(lambda x: 1.0, 3.0, 3.0) == 0.0


def test_breakpoints_handle_kinks():
    f = lambda x: abs(x - 0.3)
    exact = 0.5 * (0.3**2 + 0.7**2)
    assert integrate(f, 0.0, 1.0, tol=1e-12, points=(0.3,)) == pytest.approx(exact, abs=1e-12)


def test_integrable_endpoint_singularity():
    # x^(-0.55) near 0, the worst enrollment-density profile in practice
    value = integrate(lambda x: x**-0.55, 1e-300, 1.0, tol=1e-9)
    assert value == pytest.approx(1.0 / 0.45, rel=1e-6)


def test_oscillatory_needs_subdivision():
    value = integrate(lambda x: math.sin(40.0 * x), 0.0, math.pi, tol=1e-10)
    exact = (1.0 - math.cos(40.0 * math.pi)) / 40.0
    assert value == pytest.approx(exact, abs=1e-9)


def test_budget_exhaustion_raises_with_estimate():
    with pytest.raises(NumericError) as info:
        integrate(lambda x: math.sin(500.0 * x) / (1e-6 + x * x), 0.0, 10.0,
                  tol=1e-14, max_subdivisions=3)
    assert info.value.details["achieved"] > 1e-14
    assert "value" in info.value.details


def test_rejects_bad_tolerance():
    with pytest.raises(ParameterError):
        integrate(lambda x: x, 0.0, 1.0, tol=0.0)
