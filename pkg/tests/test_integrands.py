from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rqmc.integrands import (
    IntegrandSpec,
    get_integrand,
    irwin_hall_cdf,
    irwin_hall_mean_excess,
    mc_variance,
    register_integrand,
)


def test_evaluate_examples():
    phi1 = get_integrand("phi1", 3)
    assert phi1(np.array([[0.5, 0.5, 0.5]]))[0] == 1.5
    phi3 = get_integrand("phi3", 3)
    assert phi3(np.array([[0.9, 0.9, 0.9]]))[0] == 1.0
    phi4 = get_integrand("phi4", 3)
    assert phi4(np.array([[0.5, 0.1, 0.9]]))[0] == 0.0


def test_exact_integrals():
    assert get_integrand("phi1", 3).exact_integral == 1.5
    assert get_integrand("phi3", 5).exact_integral == 0.5
    assert get_integrand("phi4", 6).exact_integral == 0.0
    assert get_integrand("phi2", 3).exact_integral == 13 / 64
    assert get_integrand("phi2", 1).exact_integral == 1 / 8
    assert get_integrand("phi2", 2).exact_integral == pytest.approx(1 / 6, abs=0)


def test_exact_variances():
    assert get_integrand("phi1", 3).exact_variance == 0.25
    assert get_integrand("phi3", 7).exact_variance == 0.25
    assert get_integrand("phi4", 6).exact_variance == 1.0
    assert get_integrand("phi2", 3).exact_variance == 343 / 4096
    assert get_integrand("linear", 1).exact_variance == 1 / 12


def test_irwin_hall_cdf_values():
    assert irwin_hall_cdf(Fraction(1, 2), 1) == Fraction(1, 2)
    assert irwin_hall_cdf(Fraction(1), 2) == Fraction(1, 2)
    assert irwin_hall_cdf(Fraction(3, 2), 3) == Fraction(1, 2)
    assert irwin_hall_cdf(Fraction(-1), 3) == 0
    assert irwin_hall_cdf(Fraction(4), 3) == 1


def test_irwin_hall_mean_excess_known():
    assert irwin_hall_mean_excess(Fraction(1, 2), 1) == Fraction(1, 8)
    assert irwin_hall_mean_excess(Fraction(1), 2) == Fraction(1, 6)
    assert irwin_hall_mean_excess(Fraction(3, 2), 3) == Fraction(13, 64)
    assert irwin_hall_mean_excess(Fraction(0), 3) == Fraction(3, 2)  # E[S]
    assert irwin_hall_mean_excess(Fraction(5), 3) == 0


@pytest.mark.parametrize("name,dim", [("phi1", 3), ("phi2", 3), ("phi3", 3), ("phi4", 6)])
def test_mc_consistency(name, dim):
    spec = get_integrand(name, dim)
    n = 10**6
    rng = np.random.Generator(np.random.Philox(key=5))
    v = spec(rng.random((n, dim)))
    se = v.std(ddof=1) / np.sqrt(n)
    assert abs(v.mean() - spec.exact_integral) < 5 * se
    assert abs(v.var(ddof=1) - spec.exact_variance) < 0.01 * max(spec.exact_variance, 1)


def test_mc_variance_cached_matches_exact():
    spec = get_integrand("phi2", 3)
    v = mc_variance(spec, n=200_000)
    assert v == mc_variance(spec, n=200_000)  # cache hit
    assert abs(v - spec.exact_variance) < 0.02 * spec.exact_variance


@settings(max_examples=50)
@given(st.integers(2, 6), st.data())
def test_pointwise_properties(dim, data):
    pts = np.array(
        data.draw(
            st.lists(
                st.lists(st.floats(0, 1, exclude_max=True), min_size=dim, max_size=dim),
                min_size=1,
                max_size=8,
            )
        )
    )
    phi2 = get_integrand("phi2", dim)
    phi3 = get_integrand("phi3", dim)
    phi4 = get_integrand("phi4", dim)
    assert np.all(phi2(pts) >= 0)
    assert set(np.unique(phi3(pts))) <= {0.0, 1.0}
    flipped = phi4(1.0 - pts)
    np.testing.assert_allclose(flipped, (-1.0) ** dim * phi4(pts), atol=1e-9)


def test_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension mismatch"):
        get_integrand("phi1", 3)(np.zeros((4, 2)))


def test_unknown_integrand_and_registration():
    with pytest.raises(KeyError, match="no reference value"):
        get_integrand("mystery", 2)
    register_integrand(IntegrandSpec("mystery", 2, lambda x: x[:, 0] * 0 + 1.0,
                                     exact_integral=1.0, exact_variance=0.0))
    spec = get_integrand("mystery", 2)
    assert spec.exact_integral == 1.0
