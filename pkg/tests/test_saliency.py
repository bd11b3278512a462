import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from oracles import block_max
from wavecgh import quantize_saliency


def test_all_ones():
    p = quantize_saliency(np.ones((16, 16)))
    for f in (2, 4, 8):
        assert np.all(p.by_factor[f] == 1.0)


def test_single_pixel_propagates():
    s = np.zeros((16, 16))
    s[0, 0] = 1.0
    p = quantize_saliency(s)
    for f in (2, 4, 8):
        level = p.by_factor[f]
        assert level[0, 0] == 1.0
        assert np.count_nonzero(level) == 1


@pytest.mark.parametrize("pos", [(0, 0), (3, 3), (1, 2), (2, 0)])
def test_quadrant_max(pos, rng):
    s = rng.random((8, 8)) * 0.5
    s[pos] = 0.7
    assert quantize_saliency(s).by_factor[4][0, 0] == 0.7


def test_rejects_out_of_range_and_bad_shape():
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        quantize_saliency(np.full((8, 8), 1.5))
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        quantize_saliency(np.full((8, 8), -0.1))
    with pytest.raises(ValueError, match="divisible"):
        quantize_saliency(np.zeros((12, 12)))
    with pytest.raises(ValueError, match="square"):
        quantize_saliency(np.zeros((8, 16)))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([8, 16, 32]).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(0, 1))
))
def test_block_max_and_nesting(s):
    p = quantize_saliency(s)
    for f in (2, 4, 8):
        np.testing.assert_array_equal(p.by_factor[f], block_max(s, f))
    for f in (2, 4):
        coarse = p.by_factor[2 * f]
        np.testing.assert_array_equal(coarse, block_max(p.by_factor[f], 2))
    assert p.at(1) is p.full
