import numpy as np
import pytest
from scipy import stats as sps

from hyperlorentz import bootstrap_half_width_w1, ks_statistic, wasserstein1

UNIFORM = lambda x: np.clip(x, 0.0, 1.0)


def test_ks_hand_evaluated_cases():
    # {0.25, 0.75} vs U[0,1]: D+ = max(0.5-0.25, 1-0.75), D- = max(0.25, 0.25)
    assert ks_statistic([0.25, 0.75], UNIFORM) == pytest.approx(0.25, abs=1e-15)
    assert ks_statistic([0.5], UNIFORM) == pytest.approx(0.5, abs=1e-15)


def test_ks_accepts_unsorted_input():
    assert ks_statistic([0.75, 0.25], UNIFORM) == pytest.approx(0.25, abs=1e-15)


def test_ks_quantile_samples_converge():
    prev = 1.0
    for n in (10, 100, 1000, 10000):
        samples = (np.arange(1, n + 1)) / (n + 1.0)
        d = ks_statistic(samples, UNIFORM)
        assert d < prev
        prev = d
    assert prev < 1e-3


def test_ks_matches_scipy():
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = rng.exponential(1.0, 500)
        mine = ks_statistic(x, lambda v: 1.0 - np.exp(-v))
        ref = sps.kstest(x, sps.expon.cdf).statistic
        assert mine == pytest.approx(float(ref), abs=1e-12)


def test_ks_empty_raises():
    with pytest.raises(ValueError):
        ks_statistic([], UNIFORM)


def test_wasserstein_basic_cases():
    assert wasserstein1([1.0, 2.0, 3.0], [3.0, 1.0, 2.0]) == 0.0
    assert wasserstein1([0.0], [1.0]) == 1.0
    assert wasserstein1([0.0, 1.0], [1.0, 2.0]) == pytest.approx(1.0, abs=1e-15)


def test_wasserstein_matches_scipy():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a = rng.normal(0.0, 1.0, 400)
        b = rng.normal(0.3, 1.2, 400)
        assert wasserstein1(a, b) == pytest.approx(
            float(sps.wasserstein_distance(a, b)), abs=1e-12
        )


def test_wasserstein_rejects_bad_shapes():
    with pytest.raises(ValueError):
        wasserstein1([], [])
    with pytest.raises(ValueError):
        wasserstein1([1.0, 2.0], [1.0])


def test_bootstrap_half_width():
    rng = np.random.default_rng(2)
    a = rng.normal(0.0, 1.0, 2000)
    b = rng.normal(0.5, 1.0, 2000)
    hw1 = bootstrap_half_width_w1(a, b, np.random.default_rng(3))
    hw2 = bootstrap_half_width_w1(a, b, np.random.default_rng(3))
    assert hw1 == hw2  # deterministic given the stream
    assert hw1 > 0.0
    # roughly the scale of the standard error of a mean difference
    assert hw1 < 0.2
    big_a = rng.normal(0.0, 1.0, 20000)
    big_b = rng.normal(0.5, 1.0, 20000)
    assert bootstrap_half_width_w1(big_a, big_b, np.random.default_rng(4)) < hw1
