import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import ks_brute
from sfperc.rng import Phase, stream
from sfperc.stats import fit_exponent, ks_distance

samples = st.lists(st.integers(-5, 5).map(float), min_size=1, max_size=30)


def test_ks_examples():
    assert ks_distance([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == 0.0
    assert ks_distance([0.0], [1.0]) == 1.0
    with pytest.raises(ValueError):
        ks_distance([], [1.0])


def test_ks_uniform_null():
    rng = stream(31)
    stats = [ks_distance(rng.random(10_000), rng.random(10_000)) for _ in range(100)]
    assert np.mean(np.array(stats) < 0.03) >= 0.95


@settings(max_examples=200)
@given(samples, samples)
def test_ks_matches_brute_force(a, b):
    assert ks_distance(a, b) == pytest.approx(ks_brute(a, b), abs=1e-12)


def test_fit_exact_power_and_log():
    n = 2.0 ** np.arange(10, 20)
    slope, err = fit_exponent(list(zip(n, n ** (1 / 3))))
    assert abs(slope - 1 / 3) < 1e-12 and err < 1e-12
    fit = fit_exponent(list(zip(n, 7 * np.log(n))), mode="log")
    assert fit.slope == pytest.approx(7.0) and fit.r_squared == pytest.approx(1.0)


def test_fit_noisy_power():
    rng = stream(32)
    n = 2.0 ** np.arange(14, 20)
    vals = n ** (1 / 3) * (1 + 0.1 * rng.standard_normal(n.size))
    slope, _ = fit_exponent(list(zip(n, vals)))
    assert abs(slope - 1 / 3) < 0.05


def test_fit_errors():
    with pytest.raises(ValueError):
        fit_exponent([(1, 1), (2, 2)])
    with pytest.raises(ValueError):
        fit_exponent([(1, 1), (2, 0), (3, 3)])
    with pytest.raises(ValueError):
        fit_exponent([(1, 1), (2, 2), (3, 3)], mode="cubic")
    assert fit_exponent([(1, 1), (2, 0), (3, -1)], mode="log").slope < 0


def test_streams_are_reproducible_and_distinct():
    a = stream(5, 3, Phase.EXPLORE).random(4)
    assert np.array_equal(a, stream(5, 3, Phase.EXPLORE).random(4))
    others = [stream(5, 3, Phase.LIMIT), stream(5, 4, Phase.EXPLORE), stream(6, 3, Phase.EXPLORE),
              stream(5, 3, Phase.EXPLORE, block=1)]
    for g in others:
        assert not np.array_equal(a, g.random(4))
    with pytest.raises(ValueError):
        stream(-1)


def test_stream_uniformity():
    x = stream(7).random(100_000)
    assert abs(x.mean() - 0.5) < 3 * math.sqrt(1 / 12 / x.size)
