import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lwir import tensor as T

import oracles


def randn(rng, *shape):
    return rng.standard_normal(shape).astype(np.float32)


@given(
    g=st.sampled_from([1, 2, 4]),
    mg=st.integers(1, 2),
    ng=st.integers(1, 2),
    k=st.sampled_from([1, 2, 3, 5]),
    stride=st.integers(1, 3),
    dilation=st.integers(1, 2),
    h=st.integers(1, 6),
    w=st.integers(1, 6),
    seed=st.integers(0, 2**32 - 1),
)
def test_conv2d_matches_scalar_oracle(g, mg, ng, k, stride, dilation, h, w, seed):
    rng = np.random.default_rng(seed)
    x = randn(rng, 1, g * mg, h, w)
    wt = randn(rng, g * ng, mg, k, k)
    got = T.conv2d(x, wt, stride=stride, dilation=dilation, groups=g)
    want = oracles.conv2d(x, wt, stride, dilation, g)
    assert got.dtype == np.float32
    np.testing.assert_allclose(got, want, rtol=1e-5, atol=1e-5)


def test_conv2d_valid_padding(rng):
    x = randn(rng, 2, 3, 7, 6)
    wt = randn(rng, 4, 3, 3, 3)
    got = T.conv2d(x, wt, stride=2, padding="none")
    assert got.shape == (2, 4, 3, 2)
    np.testing.assert_allclose(got, oracles.conv2d(x, wt, 2, 1, 1, "none"), rtol=1e-5, atol=1e-5)


def test_conv2d_known_values():
    x = np.arange(9, dtype=np.float32).reshape(1, 1, 3, 3)
    w = np.ones((1, 1, 3, 3), np.float32)
    got = T.conv2d(x, w)[0, 0]
    # sums of the zero-padded 3x3 neighbourhoods
    assert got.tolist() == [[8, 15, 12], [21, 36, 27], [20, 33, 24]]


def test_conv2d_bias_and_errors(rng):
    x = randn(rng, 1, 4, 3, 3)
    w = randn(rng, 2, 4, 1, 1)
    b = np.array([1.0, -2.0], np.float32)
    np.testing.assert_allclose(T.conv2d(x, w, bias=b), T.conv2d(x, w) + b.reshape(1, 2, 1, 1), rtol=1e-6)
    with pytest.raises(T.ShapeError):
        T.conv2d(x, randn(rng, 3, 2, 1, 1), groups=2)
    with pytest.raises(T.ShapeError):
        T.conv2d(x, randn(rng, 2, 3, 1, 1))
    with pytest.raises(T.ShapeError):
        T.conv2d(x[0], w)


def test_conv_output_size():
    assert T.conv_output_size(7, 3, 2, 1, "same") == 4
    assert T.conv_output_size(7, 3, 2, 1, "none") == 3
    assert T.conv_output_size(9, 3, 1, 4, "none") == 1
    with pytest.raises(T.ShapeError):
        T.conv_output_size(2, 3, 1, 1, "none")


def test_depthwise_separable_is_two_convs(rng):
    x = randn(rng, 1, 5, 6, 6)
    dw, pw = randn(rng, 5, 1, 3, 3), randn(rng, 7, 5, 1, 1)
    got = T.depthwise_separable(x, dw, pw, stride=2, dilation=2)
    want = T.conv2d(T.conv2d(x, dw, stride=2, dilation=2, groups=5), pw)
    assert got.tobytes() == want.tobytes()


@given(c=st.integers(1, 64), data=st.data())
def test_channel_shuffle_is_transpose_permutation(c, data):
    g = data.draw(st.sampled_from([d for d in range(1, c + 1) if c % d == 0]))
    x = np.arange(c, dtype=np.float32).reshape(1, c, 1, 1)
    got = T.channel_shuffle(x, g).ravel().astype(int).tolist()
    n = c // g
    assert got == [(j % g) * n + j // g for j in range(c)]


def test_channel_shuffle_rejects_indivisible():
    with pytest.raises(T.ShapeError):
        T.channel_shuffle(np.zeros((1, 6, 1, 1), np.float32), 4)


@given(r=st.integers(1, 3), c=st.integers(1, 3), h=st.integers(1, 3), w=st.integers(1, 3), seed=st.integers(0, 999))
def test_pixel_shuffle_matches_index_formula(r, c, h, w, seed):
    x = np.random.default_rng(seed).standard_normal((1, c * r * r, h, w)).astype(np.float32)
    y = T.pixel_shuffle(x, r)
    assert np.array_equal(y, oracles.pixel_shuffle(x, r))
    assert np.array_equal(T.space_to_depth(y, r), x)


def test_pixel_shuffle_errors():
    with pytest.raises(T.ShapeError):
        T.pixel_shuffle(np.zeros((1, 3, 2, 2), np.float32), 2)
    with pytest.raises(T.ShapeError):
        T.space_to_depth(np.zeros((1, 1, 3, 2), np.float32), 2)


@given(h=st.integers(1, 7), w=st.integers(1, 7), oh=st.integers(1, 9), ow=st.integers(1, 9), seed=st.integers(0, 999))
def test_bilinear_matches_oracle(h, w, oh, ow, seed):
    x = np.random.default_rng(seed).standard_normal((1, 2, h, w)).astype(np.float32)
    got = T.bilinear_resize(x, oh, ow)
    np.testing.assert_allclose(got, oracles.bilinear_resize(x.astype(np.float64), oh, ow), rtol=1e-6, atol=1e-6)
    assert x.min() <= got.min() and got.max() <= x.max()


@given(c=st.floats(-1e6, 1e6, width=32), oh=st.integers(1, 9), ow=st.integers(1, 9))
def test_bilinear_preserves_constants_exactly(c, oh, ow):
    x = np.full((1, 1, 3, 5), c, np.float32)
    assert (T.bilinear_resize(x, oh, ow) == np.float32(c)).all()


def test_bilinear_doubling_values():
    x = np.array([[[[0.0, 1.0]]]], np.float32)
    assert T.bilinear_resize(x, 1, 4)[0, 0, 0].tolist() == [0.0, 0.25, 0.75, 1.0]


@given(
    m=st.integers(1, 3), n=st.integers(1, 3), k=st.integers(1, 4), stride=st.integers(1, 3),
    h=st.integers(1, 4), w=st.integers(1, 4), pad=st.integers(0, 1), seed=st.integers(0, 999),
)
def test_transposed_conv_matches_scatter_oracle(m, n, k, stride, h, w, pad, seed):
    rng = np.random.default_rng(seed)
    x = randn(rng, 1, m, h, w)
    wt = randn(rng, m, n, k, k)
    if (h - 1) * stride + k - 2 * pad < 1 or (w - 1) * stride + k - 2 * pad < 1:
        return
    got = T.transposed_conv2d(x, wt, stride, pad)
    assert got.shape[2:] == (T.transposed_output_size(h, k, stride, pad), T.transposed_output_size(w, k, stride, pad))
    np.testing.assert_allclose(got, oracles.transposed_conv2d(x, wt, stride, pad), rtol=1e-5, atol=1e-5)


def test_transposed_conv_output_size(rng):
    x = randn(rng, 1, 2, 3, 3)
    wt = randn(rng, 2, 1, 4, 4)
    got = T.transposed_conv2d(x, wt, 2, 1, output_size=(6, 6))
    np.testing.assert_allclose(got, oracles.transposed_conv2d(x, wt, 2, 1, (6, 6)), rtol=1e-5, atol=1e-5)


def test_elementwise_ops(rng):
    x = randn(rng, 1, 3, 2, 2)
    assert (T.relu(x) >= 0).all() and np.array_equal(T.relu(x)[x > 0], x[x > 0])
    s, b = np.array([1, 2, 3], np.float32), np.array([0, 1, -1], np.float32)
    np.testing.assert_allclose(T.bn_inference(x, s, b), x * s.reshape(1, 3, 1, 1) + b.reshape(1, 3, 1, 1))
    assert T.concat_channels([x, x[:, :1]]).shape == (1, 4, 2, 2)
    np.testing.assert_array_equal(T.add(x, x), 2 * x)
    with pytest.raises(T.ShapeError):
        T.add(x, x[:, :1])
    with pytest.raises(T.ShapeError):
        T.concat_channels([x, x[..., :1]])


def test_ops_are_deterministic(rng):
    x = randn(rng, 1, 8, 9, 9)
    w = randn(rng, 8, 4, 3, 3)
    runs = {T.conv2d(x, w, groups=2, dilation=2).tobytes() for _ in range(3)}
    assert len(runs) == 1
