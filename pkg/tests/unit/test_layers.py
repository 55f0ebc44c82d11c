import unittest

import numpy as np

from bsk.exception.exceptions import InvalidConfigError, ShapeError
from bsk.model.layers import (
    BiGRU,
    Dense,
    batchnorm_backward,
    batchnorm_forward,
    bigru_forward,
    conv2d_backward,
    conv2d_forward,
    gru_backward,
    gru_forward,
    maxpool_backward,
    maxpool_forward,
    sigmoid,
    softmax,
)


def numeric_gradient(f, x, h=1e-6):
    grad = np.zeros_like(x)
    for index in np.ndindex(x.shape):
        original = x[index]
        x[index] = original + h
        plus = f()
        x[index] = original - h
        minus = f()
        x[index] = original
        grad[index] = (plus - minus) / (2 * h)
    return grad


class TestConv2D(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(0)

    def test_delta_kernel_is_identity(self):
        x = self.rng.standard_normal((2, 5, 6))
        weight = np.zeros((2, 2, 3, 3))
        weight[0, 0, 1, 1] = weight[1, 1, 1, 1] = 1.0
        np.testing.assert_allclose(conv2d_forward(x, weight, np.zeros(2)), x)

    def test_same_padding_keeps_shape(self):
        x = self.rng.standard_normal((3, 4, 7, 5))
        for kernel in ((3, 3), (5, 5), (2, 4)):
            weight = self.rng.standard_normal((6, 4) + kernel)
            self.assertEqual(conv2d_forward(x, weight, np.zeros(6)).shape, (3, 6, 7, 5))

    def test_bias(self):
        out = conv2d_forward(np.zeros((1, 3, 3)), np.zeros((2, 1, 3, 3)), np.array([1.0, -2.0]))
        np.testing.assert_allclose(out[0], 1.0)
        np.testing.assert_allclose(out[1], -2.0)

    def test_depth_mismatch(self):
        with self.assertRaises(ShapeError):
            conv2d_forward(np.zeros((2, 4, 4)), np.zeros((1, 3, 3, 3)), np.zeros(1))

    def test_gradients(self):
        x = self.rng.standard_normal((2, 2, 4, 5))
        weight = self.rng.standard_normal((3, 2, 3, 2))
        bias = self.rng.standard_normal(3)
        upstream = self.rng.standard_normal((2, 3, 4, 5))

        def objective():
            return np.sum(conv2d_forward(x, weight, bias) * upstream)

        dx, dweight, dbias = conv2d_backward(upstream, x, weight)
        np.testing.assert_allclose(dx, numeric_gradient(objective, x), atol=1e-6)
        np.testing.assert_allclose(dweight, numeric_gradient(objective, weight), atol=1e-6)
        np.testing.assert_allclose(dbias, numeric_gradient(objective, bias), atol=1e-6)


class TestBatchNorm(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(1)

    def test_train_output_statistics(self):
        x = 3.0 + 2.0 * self.rng.standard_normal((4, 2, 5, 6))
        out, _ = batchnorm_forward(x, np.ones(2), np.zeros(2), np.zeros(2), np.ones(2))
        np.testing.assert_allclose(out.mean(axis=(0, 2, 3)), 0.0, atol=1e-10)
        np.testing.assert_allclose(out.var(axis=(0, 2, 3)), 1.0, atol=1e-3)

    def test_running_statistics_update(self):
        x = 3.0 + self.rng.standard_normal((4, 2, 5, 6))
        mean, var = np.zeros(2), np.ones(2)
        batchnorm_forward(x, np.ones(2), np.zeros(2), mean, var)
        np.testing.assert_allclose(mean, 0.1 * x.mean(axis=(0, 2, 3)))
        np.testing.assert_allclose(var, 0.9 + 0.1 * x.var(axis=(0, 2, 3)))

    def test_eval_uses_running_statistics(self):
        x = self.rng.standard_normal((1, 2, 3, 3))
        mean, var = np.array([1.0, -1.0]), np.array([4.0, 1.0])
        out, _ = batchnorm_forward(x, np.ones(2), np.zeros(2), mean.copy(), var.copy(), train=False)
        expected = (x - mean[None, :, None, None]) / np.sqrt(var + 1e-5)[None, :, None, None]
        np.testing.assert_allclose(out, expected)

    def test_gradients(self):
        x = self.rng.standard_normal((3, 2, 4, 3))
        gamma = self.rng.uniform(0.5, 1.5, 2)
        beta = self.rng.standard_normal(2)
        upstream = self.rng.standard_normal(x.shape)

        def objective():
            out, _ = batchnorm_forward(x, gamma, beta, np.zeros(2), np.ones(2))
            return np.sum(out * upstream)

        _, cache = batchnorm_forward(x, gamma, beta, np.zeros(2), np.ones(2))
        dx, dgamma, dbeta = batchnorm_backward(upstream, gamma, cache)
        np.testing.assert_allclose(dx, numeric_gradient(objective, x), atol=1e-5)
        np.testing.assert_allclose(dgamma, numeric_gradient(objective, gamma), atol=1e-5)
        np.testing.assert_allclose(dbeta, numeric_gradient(objective, beta), atol=1e-5)


class TestMaxPool(unittest.TestCase):
    def test_mel_axis(self):
        x = np.array([[[1.0, 3.0, 2.0, 8.0]]])
        out, _ = maxpool_forward(x, "mel", 2)
        np.testing.assert_array_equal(out, [[[3.0, 8.0]]])

    def test_time_axis(self):
        x = np.arange(12.0).reshape(1, 4, 3)
        out, _ = maxpool_forward(x, "time", 2)
        np.testing.assert_array_equal(out[0], [[3, 4, 5], [9, 10, 11]])

    def test_gradient_routes_to_winner(self):
        x = np.array([[[1.0, 3.0, 2.0, 8.0]]])
        _, winners = maxpool_forward(x, "mel", 2)
        dx = maxpool_backward(np.array([[[10.0, 20.0]]]), winners, "mel", 2)
        np.testing.assert_array_equal(dx, [[[0.0, 10.0, 0.0, 20.0]]])

    def test_tie_goes_to_first(self):
        _, winners = maxpool_forward(np.array([[[5.0, 5.0]]]), "mel", 2)
        dx = maxpool_backward(np.array([[[1.0]]]), winners, "mel", 2)
        np.testing.assert_array_equal(dx, [[[1.0, 0.0]]])

    def test_indivisible(self):
        with self.assertRaises(ShapeError):
            maxpool_forward(np.zeros((1, 2, 5)), "mel", 2)

    def test_bad_axis(self):
        with self.assertRaises(InvalidConfigError):
            maxpool_forward(np.zeros((1, 2, 4)), "channel", 2)


class TestGru(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(2)

    def test_zero_weights_give_zero_states(self):
        layer = BiGRU("gru", 5, 4, self.rng)
        for value in layer.params.values():
            value[...] = 0.0
        out = bigru_forward(self.rng.standard_normal((7, 5)), layer)
        self.assertEqual(out.shape, (7, 4))
        np.testing.assert_array_equal(out, 0.0)

    def test_odd_width_rejected(self):
        with self.assertRaises(InvalidConfigError):
            BiGRU("gru", 5, 3, self.rng)

    def test_backward_direction_sees_future(self):
        layer = BiGRU("gru", 2, 4, self.rng)
        x = self.rng.standard_normal((1, 6, 2))
        changed = x.copy()
        changed[0, -1] += 1.0
        a, b = layer.forward(x), layer.forward(changed)
        np.testing.assert_allclose(a[0, :-1, :2], b[0, :-1, :2])
        self.assertFalse(np.allclose(a[0, 0, 2:], b[0, 0, 2:]))

    def test_gradients(self):
        x = self.rng.standard_normal((2, 5, 3))
        wx = 0.5 * self.rng.standard_normal((3, 6))
        u = 0.5 * self.rng.standard_normal((2, 6))
        b = 0.1 * self.rng.standard_normal(6)
        upstream = self.rng.standard_normal((2, 5, 2))

        def objective():
            states, _ = gru_forward(x, wx, u, b)
            return np.sum(states * upstream)

        _, cache = gru_forward(x, wx, u, b)
        dx, dwx, du, db = gru_backward(upstream, wx, u, cache)
        np.testing.assert_allclose(dx, numeric_gradient(objective, x), atol=1e-6)
        np.testing.assert_allclose(dwx, numeric_gradient(objective, wx), atol=1e-6)
        np.testing.assert_allclose(du, numeric_gradient(objective, u), atol=1e-6)
        np.testing.assert_allclose(db, numeric_gradient(objective, b), atol=1e-6)


class TestDense(unittest.TestCase):
    def test_time_distributed_gradients(self):
        rng = np.random.default_rng(3)
        layer = Dense("fc", 4, 3, rng)
        x = rng.standard_normal((2, 5, 4))
        upstream = rng.standard_normal((2, 5, 3))

        def objective():
            return np.sum(layer.forward(x) * upstream)

        layer.forward(x)
        dx = layer.backward(upstream)
        np.testing.assert_allclose(dx, numeric_gradient(objective, x), atol=1e-6)
        np.testing.assert_allclose(
            layer.grads["weight"], numeric_gradient(objective, layer.params["weight"]), atol=1e-6
        )


class TestActivations(unittest.TestCase):
    def test_sigmoid_extremes(self):
        out = sigmoid(np.array([-1000.0, 0.0, 1000.0]))
        np.testing.assert_allclose(out, [0.0, 0.5, 1.0])
        self.assertTrue(np.all(np.isfinite(out)))

    def test_softmax_rows_sum_to_one(self):
        out = softmax(np.array([[1000.0, 1000.0], [0.0, np.log(3.0)]]))
        np.testing.assert_allclose(out, [[0.5, 0.5], [0.25, 0.75]])


if __name__ == "__main__":
    unittest.main()
