import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from longmem.datagen import (GenConfig, TimeSeries, ar1_filter, arfima_1_d_0, fractional_filter,
                             fractional_noise, lmsv_from_components, lmsv_series, log_squared,
                             make_rng, pochhammer_weight, pochhammer_weights)
from longmem.errors import ValidationError


def test_pochhammer_empty_product():
    assert pochhammer_weight(0.3, 0) == 1.0


def test_pochhammer_two_terms():
    assert pochhammer_weight(0.2, 2) == pytest.approx(0.12, rel=1e-15)


def test_pochhammer_matches_arbitrary_precision_product():
    mpmath.mp.dps = 50
    exact = mpmath.rf(mpmath.mpf("0.45"), 50) / mpmath.factorial(50)
    assert pochhammer_weight(0.45, 50) == pytest.approx(float(exact), rel=1e-13)
    assert pochhammer_weights(0.45, 51)[50] == pytest.approx(float(exact), rel=1e-13)


def test_pochhammer_rejects_negative_k():
    with pytest.raises(ValidationError):
        pochhammer_weight(0.3, -1)


@given(st.floats(0.01, 0.99), st.integers(1, 200))
def test_weights_positive_and_decreasing_ratio(d, k):
    c = pochhammer_weights(d, k + 1)
    assert np.all(c > 0)
    assert c[k] / c[k - 1] == pytest.approx((d + k - 1) / k)
    assert (d + k - 1) / k < 1


def test_fractional_filter_hand_convolution():
    z = fractional_filter(0.3, [1.0, 0.0, 0.0, 0.0])
    np.testing.assert_allclose(z, [1.0, 0.3, 0.195, 0.1495], rtol=1e-14)


def test_fractional_filter_is_truncated_convolution(rng):
    u = rng.standard_normal(40)
    c = pochhammer_weights(0.35, 40)
    direct = [sum(c[k] * u[t - k] for k in range(t + 1)) for t in range(40)]
    np.testing.assert_allclose(fractional_filter(0.35, u), direct, rtol=1e-12, atol=1e-14)


def test_fractional_noise_d0_is_innovations():
    z = fractional_noise(0.0, 256, seed=11)
    u = make_rng(11, 0, 0).standard_normal(256)
    np.testing.assert_array_equal(z.values, u)


def test_fractional_noise_mean_sanity():
    n = 1024
    means = np.array([fractional_noise(0.3, n, seed=s).values.mean() for s in range(100)])
    # sd of a single path is at most that of the full weight sum
    sd = np.sqrt((pochhammer_weights(0.3, n) ** 2).sum())
    assert abs(means.mean()) < 4 * sd / np.sqrt(n)


def test_arfima_phi0_equals_fractional_noise():
    cfg = GenConfig(n=512, d=0.3, phi=0.0, sigma_eps2=1.0, seed=5)
    np.testing.assert_array_equal(arfima_1_d_0(cfg).values, fractional_noise(0.3, 512, 5).values)


def test_ar1_impulse_response():
    np.testing.assert_allclose(ar1_filter(fractional_filter(0.0, [1.0, 0.0, 0.0]), 0.5),
                               [1.0, 0.5, 0.25])


def test_arfima_rejects_unit_root():
    with pytest.raises(ValidationError) as exc:
        GenConfig(n=100, d=0.2, phi=1.0)
    assert exc.value.field == "phi"


def _lag1(x):
    x = x - x.mean()
    return (x[:-1] @ x[1:]) / (x @ x)


def test_arfima_ar_term_raises_lag1_autocorrelation():
    with_ar = np.mean([_lag1(arfima_1_d_0(GenConfig(1024, 0.3, 0.4, seed=s)).values)
                       for s in range(100)])
    without = np.mean([_lag1(arfima_1_d_0(GenConfig(1024, 0.3, 0.0, seed=s)).values)
                       for s in range(100)])
    assert with_ar > 0 and with_ar > without


def test_sigma_eps2_scales_innovations():
    a = arfima_1_d_0(GenConfig(64, 0.2, 0.3, sigma_eps2=1.0, seed=1)).values
    b = arfima_1_d_0(GenConfig(64, 0.2, 0.3, sigma_eps2=4.0, seed=1)).values
    np.testing.assert_allclose(b, 2 * a, rtol=1e-12)


def test_lmsv_components():
    e = np.array([0.3, -1.2, 2.0])
    np.testing.assert_array_equal(lmsv_from_components(np.zeros(3), e), e)
    np.testing.assert_array_equal(lmsv_from_components(np.zeros(2), [1.0, -1.0], sigma=2.0),
                                  [2.0, -2.0])


def test_lmsv_is_leptokurtic():
    kurt = [stats.kurtosis(lmsv_series(GenConfig(1024, 0.2, 0.4, 0.37, seed=s)).values,
                           fisher=False) for s in range(100)]
    assert np.mean(kurt) > 3


def test_lmsv_latent_stream_independent_of_noise_stream():
    cfg = GenConfig(256, 0.3, 0.4, 0.37, seed=9, replication=4)
    x = lmsv_series(cfg).values
    z = arfima_1_d_0(cfg).values
    e = make_rng(9, 4, 1).standard_normal(256)
    np.testing.assert_allclose(x, np.exp(z / 2) * e, rtol=1e-15)


def test_student_t_noise_option():
    cfg = GenConfig(4096, 0.2, 0.0, seed=2, noise="student-t", df=5)
    x = lmsv_series(cfg).values
    assert stats.kurtosis(x) > stats.kurtosis(lmsv_series(GenConfig(4096, 0.2, 0.0, seed=2)).values)


def test_burn_in_drops_prefix():
    long = arfima_1_d_0(GenConfig(150, 0.3, 0.4, seed=3)).values
    burned = arfima_1_d_0(GenConfig(100, 0.3, 0.4, seed=3, burn_in=50)).values
    np.testing.assert_array_equal(burned, long[50:])


def test_determinism_bit_identical():
    cfg = GenConfig(1024, 0.3, 0.5, 0.37, seed=123, replication=7)
    assert lmsv_series(cfg).checksum() == lmsv_series(cfg).checksum()
    other = GenConfig(1024, 0.3, 0.5, 0.37, seed=123, replication=8)
    assert lmsv_series(cfg).checksum() != lmsv_series(other).checksum()


def test_log_squared_closed_form():
    y = log_squared(TimeSeries([1.0, np.e, -np.e]))
    np.testing.assert_allclose(y.values, [0.0, 2.0, 2.0], atol=1e-15)


def test_log_squared_names_zero_index():
    with pytest.raises(ValidationError, match="index 0"):
        log_squared(TimeSeries([0.0, 1.0]))


def test_log_squared_of_lmsv_is_finite():
    y = log_squared(lmsv_series(GenConfig(512, 0.3, 0.0, seed=4)))
    assert np.all(np.isfinite(y.values))


@pytest.mark.parametrize("kwargs, field", [
    (dict(n=1), "n"), (dict(n=10, sigma_eps2=0.0), "sigma_eps2"),
    (dict(n=10, sigma=-1.0), "sigma"), (dict(n=10, noise="cauchy"), "noise"),
])
def test_genconfig_validation(kwargs, field):
    with pytest.raises(ValidationError) as exc:
        GenConfig(**kwargs)
    assert exc.value.field == field


def test_lmsv_requires_stationary_memory():
    with pytest.raises(ValidationError):
        lmsv_series(GenConfig(64, d=0.6))


@settings(max_examples=25)
@given(st.integers(0, 2**63 - 1), st.integers(0, 1000))
def test_substreams_reproducible(seed, rep):
    a = make_rng(seed, rep, 0).standard_normal(4)
    b = make_rng(seed, rep, 0).standard_normal(4)
    np.testing.assert_array_equal(a, b)
