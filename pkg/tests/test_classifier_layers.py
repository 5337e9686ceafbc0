"""Layer math against independent oracles: convolution, pooling, residual,
softmax, and the weight serializer."""

import numpy as np
import pytest

from scrop.classifier import (
    LeafClassifier,
    conv2d,
    conv2d_backward,
    cross_entropy,
    dense,
    dense_backward,
    glorot_uniform,
    load_model,
    maxpool2,
    maxpool2_backward,
    relu,
    relu_backward,
    residual_dense,
    residual_dense_backward,
    save_model,
    softmax,
    softmax_cross_entropy_grad,
)
from scrop.classifier.model import MAGIC


def conv_reference(f: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Direct double-sum true convolution, centered, zero-padded.

    Written against the definition, not the implementation: for each output
    position accumulate h[j, k] * f[m - j, n - k] over the kernel support.
    """
    height, width = f.shape
    kh, kw = h.shape
    a, b = kh // 2, kw // 2
    out = np.zeros((height, width))
    for m in range(height):
        for n in range(width):
            acc = 0.0
            for j in range(-a, a + 1):
                for k in range(-b, b + 1):
                    fm, fn = m - j, n - k
                    if 0 <= fm < height and 0 <= fn < width:
                        acc += h[j + a, k + b] * f[fm, fn]
            out[m, n] = acc
    return out


def as_input(f: np.ndarray) -> np.ndarray:
    return f[:, :, None]


def as_kernel(h: np.ndarray) -> np.ndarray:
    return h[:, :, None, None]


class TestConv2d:
    def test_identity_kernel_returns_input(self):
        rng = np.random.default_rng(0)
        f = rng.normal(size=(5, 5))
        out = conv2d(as_input(f), as_kernel(np.array([[1.0]])))
        np.testing.assert_array_equal(out[:, :, 0], f)

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(25):
            f = rng.normal(size=(8, 8))
            h = rng.normal(size=(3, 3))
            got = conv2d(as_input(f), as_kernel(h))[:, :, 0]
            want = conv_reference(f, h)
            np.testing.assert_allclose(got, want, atol=1e-12)

    def test_zero_input_gives_zero_output(self):
        h = np.random.default_rng(2).normal(size=(3, 3))
        out = conv2d(as_input(np.zeros((6, 6))), as_kernel(h))
        np.testing.assert_array_equal(out, np.zeros((6, 6, 1)))

    def test_linearity(self):
        rng = np.random.default_rng(3)
        f1, f2 = rng.normal(size=(6, 6)), rng.normal(size=(6, 6))
        h = rng.normal(size=(3, 3))
        lhs = conv2d(as_input(2.0 * f1 + f2), as_kernel(h))
        rhs = 2.0 * conv2d(as_input(f1), as_kernel(h)) + conv2d(as_input(f2), as_kernel(h))
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_flip_false_is_cross_correlation(self):
        rng = np.random.default_rng(4)
        f = rng.normal(size=(7, 7))
        h = rng.normal(size=(3, 3))
        flipped = conv2d(as_input(f), as_kernel(h), flip_kernel=True)
        corr_on_flipped_kernel = conv2d(
            as_input(f), as_kernel(h[::-1, ::-1]), flip_kernel=False
        )
        np.testing.assert_allclose(flipped, corr_on_flipped_kernel, atol=1e-12)

    def test_asymmetric_kernel_orientation(self):
        # A [1, 0, -1] row kernel convolved (flipped) acts like f[n+1]-f[n-1]
        f = np.arange(25, dtype=float).reshape(5, 5)
        h = np.array([[1.0, 0.0, -1.0]])
        out = conv2d(as_input(f), as_kernel(h))[:, :, 0]
        # interior columns: f[m, n+1] - f[m, n-1] = 2 on this ramp
        np.testing.assert_allclose(out[:, 1:-1], 2.0)

    def test_valid_padding_shape_and_values(self):
        rng = np.random.default_rng(5)
        f = rng.normal(size=(8, 8))
        h = rng.normal(size=(3, 3))
        out = conv2d(as_input(f), as_kernel(h), padding="valid")[:, :, 0]
        assert out.shape == (6, 6)
        # valid region equals the same-padded result's interior
        full = conv2d(as_input(f), as_kernel(h), padding="same")[:, :, 0]
        np.testing.assert_allclose(out, full[1:-1, 1:-1], atol=1e-12)

    def test_bias_added_per_output_channel(self):
        rng = np.random.default_rng(6)
        f = rng.normal(size=(4, 4, 2))
        k = rng.normal(size=(3, 3, 2, 3))
        bias = np.array([1.0, -2.0, 0.5])
        with_bias = conv2d(f, k, bias)
        without = conv2d(f, k)
        np.testing.assert_allclose(with_bias - without, np.broadcast_to(bias, (4, 4, 3)))

    def test_multichannel_sums_over_inputs(self):
        rng = np.random.default_rng(7)
        f = rng.normal(size=(6, 6, 2))
        k = rng.normal(size=(3, 3, 2, 1))
        combined = conv2d(f, k)[:, :, 0]
        split = (
            conv2d(as_input(f[:, :, 0]), k[:, :, :1, :])[:, :, 0]
            + conv2d(as_input(f[:, :, 1]), k[:, :, 1:, :])[:, :, 0]
        )
        np.testing.assert_allclose(combined, split, atol=1e-12)

    def test_even_kernel_rejected_for_same_padding(self):
        f = np.zeros((6, 6, 1))
        k = np.zeros((2, 2, 1, 1))
        with pytest.raises(ValueError):
            conv2d(f, k, padding="same")
        # valid mode has no centering requirement
        assert conv2d(f, k, padding="valid").shape == (5, 5, 1)

    def test_channel_mismatch_rejected(self):
        with pytest.raises(ValueError):
            conv2d(np.zeros((6, 6, 2)), np.zeros((3, 3, 1, 1)))

    def test_kernel_larger_than_input_rejected(self):
        with pytest.raises(ValueError):
            conv2d(np.zeros((2, 2, 1)), np.zeros((3, 3, 1, 1)), padding="valid")

    def test_unknown_padding_rejected(self):
        with pytest.raises(ValueError):
            conv2d(np.zeros((4, 4, 1)), np.zeros((3, 3, 1, 1)), padding="reflect")


class TestConvStride:
    def test_stride_subsamples_dense_result(self):
        rng = np.random.default_rng(8)
        f = rng.normal(size=(8, 8, 1))
        k = rng.normal(size=(3, 3, 1, 2))
        dense_out = conv2d(f, k, padding="valid")
        strided = conv2d(f, k, padding="valid", stride=2)
        np.testing.assert_array_equal(strided, dense_out[::2, ::2])

    def test_stride_with_same_padding(self):
        rng = np.random.default_rng(9)
        f = rng.normal(size=(8, 8, 1))
        k = rng.normal(size=(3, 3, 1, 1))
        dense_out = conv2d(f, k, padding="same")
        strided = conv2d(f, k, padding="same", stride=2)
        assert strided.shape == (4, 4, 1)
        np.testing.assert_array_equal(strided, dense_out[::2, ::2])

    def test_bad_stride_rejected(self):
        f, k = np.zeros((4, 4, 1)), np.zeros((3, 3, 1, 1))
        with pytest.raises(ValueError):
            conv2d(f, k, stride=0)
        with pytest.raises(ValueError):
            conv2d(f, k, stride=1.5)

    def test_strided_backward_matches_finite_differences(self):
        rng = np.random.default_rng(10)
        x = rng.normal(size=(5, 5, 1))
        k = rng.normal(size=(3, 3, 1, 2))
        w = rng.normal(size=(2, 2, 2))  # random linear readout of the output

        def loss(xv, kv):
            return float(np.sum(conv2d(xv, kv, padding="valid", stride=2) * w))

        grad_x, grad_k, _ = conv2d_backward(w, x, k, padding="valid", stride=2)
        eps = 1e-6
        for arr, grad in ((x, grad_x), (k, grad_k)):
            flat = arr.reshape(-1)
            for idx in range(0, flat.size, 3):
                orig = flat[idx]
                flat[idx] = orig + eps
                up = loss(x, k)
                flat[idx] = orig - eps
                down = loss(x, k)
                flat[idx] = orig
                numeric = (up - down) / (2 * eps)
                assert abs(numeric - grad.reshape(-1)[idx]) < 1e-6


class TestRelu:
    def test_negative_clamped(self):
        np.testing.assert_array_equal(relu(np.array([-3.0, -0.1])), [0.0, 0.0])

    def test_positive_unchanged(self):
        np.testing.assert_array_equal(relu(np.array([0.5, 7.0])), [0.5, 7.0])

    def test_mixed_matches_elementwise_scan(self):
        rng = np.random.default_rng(11)
        x = rng.normal(size=37)
        want = np.array([v if v > 0 else 0.0 for v in x])
        np.testing.assert_array_equal(relu(x), want)

    def test_backward_masks_at_zero(self):
        x = np.array([-1.0, 0.0, 2.0])
        g = np.array([5.0, 5.0, 5.0])
        np.testing.assert_array_equal(relu_backward(g, x), [0.0, 0.0, 5.0])


class TestMaxpool:
    def test_hand_example(self):
        x = np.array(
            [
                [1.0, 2.0, 5.0, 0.0],
                [3.0, 4.0, 1.0, 1.0],
                [0.0, 0.0, 9.0, 8.0],
                [0.0, -1.0, 7.0, 6.0],
            ]
        )[:, :, None]
        out = maxpool2(x)[:, :, 0]
        np.testing.assert_array_equal(out, [[4.0, 5.0], [0.0, 9.0]])

    def test_odd_dimensions_rejected(self):
        with pytest.raises(ValueError):
            maxpool2(np.zeros((5, 4, 1)))

    def test_backward_routes_to_the_maximum(self):
        x = np.array([[1.0, 2.0], [3.0, 0.0]])[:, :, None]
        grad = maxpool2_backward(np.array([[[10.0]]]), x)[:, :, 0]
        np.testing.assert_array_equal(grad, [[0.0, 0.0], [10.0, 0.0]])

    def test_backward_tie_goes_to_first_in_scan_order(self):
        x = np.array([[7.0, 7.0], [7.0, 7.0]])[:, :, None]
        grad = maxpool2_backward(np.array([[[4.0]]]), x)[:, :, 0]
        np.testing.assert_array_equal(grad, [[4.0, 0.0], [0.0, 0.0]])

    def test_gradient_mass_conserved(self):
        rng = np.random.default_rng(12)
        x = rng.normal(size=(6, 6, 3))
        g = rng.normal(size=(3, 3, 3))
        assert maxpool2_backward(g, x).sum() == pytest.approx(g.sum())


class TestDense:
    def test_hand_example(self):
        w = np.array([[1.0, 2.0], [0.0, -1.0]])
        b = np.array([0.5, 0.0])
        np.testing.assert_allclose(dense(np.array([3.0, 4.0]), w, b), [11.5, -4.0])

    def test_backward_matches_finite_differences(self):
        rng = np.random.default_rng(13)
        x = rng.normal(size=4)
        w = rng.normal(size=(3, 4))
        b = rng.normal(size=3)
        readout = rng.normal(size=3)

        grad_x, grad_w, grad_b = dense_backward(readout, x, w)
        eps = 1e-6
        for arr, grad in ((x, grad_x), (w, grad_w), (b, grad_b)):
            flat = arr.reshape(-1)
            for idx in range(flat.size):
                orig = flat[idx]
                flat[idx] = orig + eps
                up = float(dense(x, w, b) @ readout)
                flat[idx] = orig - eps
                down = float(dense(x, w, b) @ readout)
                flat[idx] = orig
                numeric = (up - down) / (2 * eps)
                assert abs(numeric - grad.reshape(-1)[idx]) < 1e-6


class TestResidualDense:
    def test_zero_weights_is_identity(self):
        x = np.array([3.0, -1.5, 2.25])
        zeros3 = np.zeros((3, 3))
        out = residual_dense(x, zeros3, np.zeros(3), zeros3, np.zeros(3))
        np.testing.assert_array_equal(out, x)

    def test_hand_computed_two_dim_example(self):
        # z1 = W1 x + b1 = [5.5, 1]; relu keeps both; W2 r + b2 = [5.5, 6.75]
        # H(x) = F(x) + x = [6.5, 8.75]
        x = np.array([1.0, 2.0])
        w1 = np.array([[1.0, 2.0], [0.0, 1.0]])
        b1 = np.array([0.5, -1.0])
        w2 = np.array([[1.0, 0.0], [1.0, 1.0]])
        b2 = np.array([0.0, 0.25])
        np.testing.assert_allclose(residual_dense(x, w1, b1, w2, b2), [6.5, 8.75])

    def test_negative_branch_gets_masked(self):
        x = np.array([1.0, -4.0])
        w1 = np.eye(2)
        b1 = np.zeros(2)
        w2 = np.eye(2)
        b2 = np.zeros(2)
        # z1 = [1, -4] -> relu [1, 0] -> F = [1, 0] -> H = [2, -4]
        np.testing.assert_allclose(residual_dense(x, w1, b1, w2, b2), [2.0, -4.0])

    def test_output_shape_matches_input_always(self):
        rng = np.random.default_rng(14)
        for dim, hidden in ((2, 5), (7, 3), (16, 16)):
            x = rng.normal(size=dim)
            w1 = rng.normal(size=(hidden, dim))
            w2 = rng.normal(size=(dim, hidden))
            out = residual_dense(x, w1, rng.normal(size=hidden), w2, rng.normal(size=dim))
            assert out.shape == x.shape

    def test_shape_mismatch_rejected(self):
        x = np.zeros(3)
        with pytest.raises(ValueError):
            residual_dense(x, np.zeros((4, 3)), np.zeros(4), np.zeros((2, 4)), np.zeros(2))

    def test_backward_matches_finite_differences(self):
        rng = np.random.default_rng(15)
        x = rng.normal(size=4)
        w1 = rng.normal(size=(6, 4))
        b1 = rng.normal(size=6)
        w2 = rng.normal(size=(4, 6))
        b2 = rng.normal(size=4)
        readout = rng.normal(size=4)

        dx, dw1, db1, dw2, db2 = residual_dense_backward(readout, x, w1, b1, w2)
        eps = 1e-6
        pairs = ((x, dx), (w1, dw1), (b1, db1), (w2, dw2), (b2, db2))
        for arr, grad in pairs:
            flat = arr.reshape(-1)
            for idx in range(flat.size):
                orig = flat[idx]
                flat[idx] = orig + eps
                up = float(residual_dense(x, w1, b1, w2, b2) @ readout)
                flat[idx] = orig - eps
                down = float(residual_dense(x, w1, b1, w2, b2) @ readout)
                flat[idx] = orig
                numeric = (up - down) / (2 * eps)
                assert abs(numeric - grad.reshape(-1)[idx]) < 1e-6


class TestSoftmax:
    def test_uniform_logits_give_uniform_probs(self):
        np.testing.assert_allclose(softmax(np.zeros(4)), np.full(4, 0.25))

    def test_sums_to_one(self):
        rng = np.random.default_rng(16)
        for _ in range(50):
            p = softmax(rng.normal(scale=10.0, size=6))
            assert abs(p.sum() - 1.0) < 1e-12

    def test_dominant_logit_takes_probability(self):
        p = softmax(np.array([0.0, 30.0, 0.0]))
        assert p[1] > 0.999999

    def test_shift_invariance(self):
        logits = np.array([1.0, -2.0, 0.5])
        np.testing.assert_allclose(softmax(logits), softmax(logits + 1234.5), atol=1e-12)

    def test_huge_logits_do_not_overflow(self):
        p = softmax(np.array([1e4, 1e4 - 5.0]))
        assert np.isfinite(p).all()
        assert abs(p.sum() - 1.0) < 1e-12


class TestCrossEntropy:
    def test_uniform_four_way_is_ln4(self):
        assert cross_entropy(np.full(4, 0.25), 2) == pytest.approx(np.log(4.0))

    def test_confident_correct_is_near_zero(self):
        assert cross_entropy(np.array([0.0001, 0.9999]), 1) == pytest.approx(0.0, abs=1e-3)

    def test_zero_probability_clipped_not_infinite(self):
        assert np.isfinite(cross_entropy(np.array([1.0, 0.0]), 1))

    def test_softmax_grad_is_p_minus_onehot(self):
        p = softmax(np.array([0.3, -1.2, 2.0]))
        grad = softmax_cross_entropy_grad(p, 2)
        want = p.copy()
        want[2] -= 1.0
        np.testing.assert_allclose(grad, want, atol=1e-12)


class TestGlorot:
    def test_bound_respected(self):
        rng = np.random.default_rng(17)
        w = glorot_uniform((64, 32), 32, 64, rng)
        limit = np.sqrt(6.0 / (32 + 64))
        assert np.abs(w).max() <= limit
        assert w.shape == (64, 32)

    def test_deterministic_per_rng_seed(self):
        a = glorot_uniform((8, 8), 8, 8, np.random.default_rng(3))
        b = glorot_uniform((8, 8), 8, 8, np.random.default_rng(3))
        np.testing.assert_array_equal(a, b)


class TestSerialization:
    def test_round_trip_preserves_weights_and_config(self, tmp_path):
        model = LeafClassifier(input_hw=8, conv_channels=(2, 3), fc_dims=(6, 5), seed=4)
        path = tmp_path / "weights.bin"
        save_model(model, path)
        clone = load_model(path)
        assert clone.labels == model.labels
        for name, value in model.params.items():
            np.testing.assert_array_equal(clone.params[name], value)

    def test_corrupt_magic_rejected(self, tmp_path):
        model = LeafClassifier(input_hw=8, conv_channels=(2, 2), fc_dims=(4, 4), seed=0)
        path = tmp_path / "weights.bin"
        save_model(model, path)
        raw = bytearray(path.read_bytes())
        raw[:2] = b"XX"
        path.write_bytes(bytes(raw))
        with pytest.raises(ValueError):
            load_model(path)

    def test_truncated_file_rejected(self, tmp_path):
        model = LeafClassifier(input_hw=8, conv_channels=(2, 2), fc_dims=(4, 4), seed=0)
        path = tmp_path / "weights.bin"
        save_model(model, path)
        raw = path.read_bytes()
        path.write_bytes(raw[: len(raw) - 16])
        with pytest.raises(ValueError):
            load_model(path)

    def test_magic_prefix_present(self, tmp_path):
        model = LeafClassifier(input_hw=8, conv_channels=(2, 2), fc_dims=(4, 4), seed=0)
        path = tmp_path / "weights.bin"
        save_model(model, path)
        assert path.read_bytes().startswith(MAGIC)
