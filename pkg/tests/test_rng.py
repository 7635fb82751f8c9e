import numpy as np
from hypothesis import given, strategies as st
from scipy import stats

from maxcut_sdp.rng import box_muller, stream


@given(st.integers(0, 2**64 - 1), st.integers(0, 2**20))
def test_streams_are_reproducible(seed, index):
    assert np.array_equal(box_muller(stream(seed, index), 7), box_muller(stream(seed, index), 7))


def test_streams_differ():
    a = box_muller(stream(1, 0), 8)
    assert not np.array_equal(a, box_muller(stream(1, 1), 8))
    assert not np.array_equal(a, box_muller(stream(2, 0), 8))


def test_frozen_values():
    # first draws of stream (0, 0); changes here break every recorded experiment
    got = box_muller(stream(0, 0), 3)
    assert np.allclose(got, FROZEN_FIRST_DRAWS, rtol=0, atol=1e-15)


def test_box_muller_formula():
    u = np.random.Generator(np.random.Philox(key=(5 << 64) | 9)).random(4)
    r1, r2 = np.sqrt(-2 * np.log(1 - u[0])), np.sqrt(-2 * np.log(1 - u[1]))
    expect = [r1 * np.cos(2 * np.pi * u[2]), r2 * np.cos(2 * np.pi * u[3]),
              r1 * np.sin(2 * np.pi * u[2])]
    assert np.allclose(box_muller(stream(5, 9), 3), expect, rtol=0, atol=1e-15)


def test_box_muller_is_standard_normal():
    z = box_muller(stream(2024, 0), 200_001)
    assert z.size == 200_001 and np.all(np.isfinite(z))
    assert stats.kstest(z, "norm").pvalue > 1e-3
    assert abs(z.mean()) < 0.01 and abs(z.std() - 1) < 0.01


FROZEN_FIRST_DRAWS = [0.1165565154909856, -0.6835324004378501, 0.09819597806605489]
