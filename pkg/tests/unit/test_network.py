import unittest

import numpy as np

from bsk.dataset.targets import TargetSet
from bsk.enum.modeenum import Mode
from bsk.exception.exceptions import InvalidConfigError, ShapeError
from bsk.model.config import ModelConfig
from bsk.model.network import (
    PROB_FLOOR,
    MtlNetwork,
    TargetBatch,
    backward,
    forward,
    loss,
    predict,
)


def random_targets(rng, batch, config, valid=None):
    targets = []
    for b in range(batch):
        sed = (rng.random((config.T, config.C_SED)) < 0.3).astype(float)
        scene = np.zeros(config.C_ASC)
        scene[b % config.C_ASC] = 1.0
        targets.append(TargetSet(sed, scene, valid))
    return TargetBatch.from_targets(targets)


def total_loss(net, x, targets, weight):
    sed_probs, asc_probs = net.forward(x, train=True)
    return loss(sed_probs, asc_probs, targets, weight).total


class TestShapes(unittest.TestCase):
    def test_tut2016_2017_layout(self):
        config = ModelConfig.from_preset("tut2016_2017", {"in_channels": 2})
        net = MtlNetwork(config)
        sed, asc = forward(net, np.zeros((1, 2, 500, 64)))
        self.assertEqual(sed.shape, (1, 500, 25))
        self.assertEqual(asc.shape, (1, 4))

    def test_tut_sed_2009_layout(self):
        config = ModelConfig.from_preset("tut_sed_2009")
        net = MtlNetwork(config)
        sed, asc = forward(net, np.zeros((1, 1, 1000, 40)))
        self.assertEqual(sed.shape, (1, 1000, 63))
        self.assertEqual(asc.shape, (1, 10))
        np.testing.assert_allclose(asc.sum(axis=1), 1.0)

    def test_single_example_is_batched(self):
        net = MtlNetwork(ModelConfig.from_preset("tiny"))
        sed, asc = forward(net, np.zeros((1, 8, 8)))
        self.assertEqual(sed.shape, (1, 8, 3))
        self.assertEqual(asc.shape, (1, 2))

    def test_wrong_input_shape(self):
        net = MtlNetwork(ModelConfig.from_preset("tiny"))
        with self.assertRaises(ShapeError):
            forward(net, np.zeros((1, 1, 9, 8)))

    def test_single_task_branches(self):
        config = ModelConfig.from_preset("tiny")
        sed, asc = forward(MtlNetwork(config, Mode.SED), np.zeros((2, 1, 8, 8)))
        self.assertIsNone(asc)
        self.assertEqual(sed.shape, (2, 8, 3))
        sed, asc = forward(MtlNetwork(config, Mode.ASC), np.zeros((2, 1, 8, 8)))
        self.assertIsNone(sed)
        self.assertEqual(asc.shape, (2, 2))

    def test_branch_parameters_shared_with_joint_network(self):
        config = ModelConfig.from_preset("tiny")
        joint = MtlNetwork(config, Mode.MTL, seed=4).parameters()
        for mode in (Mode.SED, Mode.ASC):
            single = MtlNetwork(config, mode, seed=4).parameters()
            self.assertLess(len(single), len(joint))
            for name, value in single.items():
                np.testing.assert_array_equal(value, joint[name])

    def test_same_seed_same_parameters(self):
        config = ModelConfig.from_preset("tiny")
        a, b = MtlNetwork(config, seed=1), MtlNetwork(config, seed=1)
        for (name, value), other in zip(a.parameters().items(), b.parameters().values()):
            np.testing.assert_array_equal(value, other, err_msg=name)
        c = MtlNetwork(config, seed=2)
        self.assertFalse(np.array_equal(a.parameters()["conv1.weight"], c.parameters()["conv1.weight"]))


class TestConfig(unittest.TestCase):
    def test_mel_pooling_must_divide(self):
        with self.assertRaises(InvalidConfigError):
            ModelConfig.from_preset("tiny", {"M": 12})

    def test_time_pooling_must_divide(self):
        with self.assertRaises(InvalidConfigError):
            ModelConfig.from_preset("tiny", {"T": 10})

    def test_odd_gru_width(self):
        with self.assertRaises(InvalidConfigError):
            ModelConfig.from_preset("tiny", {"Q": 5})

    def test_unknown_field(self):
        with self.assertRaises(InvalidConfigError):
            ModelConfig.from_preset("tiny", {"depth": 3})

    def test_unknown_preset(self):
        with self.assertRaises(InvalidConfigError):
            ModelConfig.from_preset("huge")

    def test_vocabulary_sizes_required(self):
        with self.assertRaises(InvalidConfigError):
            ModelConfig.from_preset("micro")
        config = ModelConfig.from_preset("micro", {"C_SED": 4, "C_ASC": 2})
        self.assertEqual((config.pooled_mels, config.pooled_frames), (1, 1))


class TestLoss(unittest.TestCase):
    def setUp(self):
        self.targets = TargetBatch(
            sed=np.zeros((2, 4, 3)),
            scene=np.eye(4)[[0, 2]],
            mask=np.ones((2, 4), dtype=bool),
        )

    def test_uniform_scene_probabilities(self):
        report = loss(None, np.full((2, 4), 0.25), self.targets, 1e-4)
        self.assertAlmostEqual(report.asc_loss, np.log(4.0))
        self.assertAlmostEqual(report.total, np.log(4.0))

    def test_floor_predictions(self):
        report = loss(np.zeros((2, 4, 3)), None, self.targets, 1e-4)
        self.assertAlmostEqual(report.sed_loss, -np.log(1.0 - PROB_FLOOR), places=12)
        self.assertAlmostEqual(report.sed_loss, 1e-7, places=12)

    def test_weighted_total(self):
        rng = np.random.default_rng(0)
        sed = rng.uniform(0.1, 0.9, (2, 4, 3))
        asc = np.full((2, 4), 0.25)
        report = loss(sed, asc, self.targets, 1e-4)
        self.assertAlmostEqual(report.total - report.sed_loss, 1e-4 * report.asc_loss, places=12)

    def test_padding_frames_ignored(self):
        mask = np.ones((2, 4), dtype=bool)
        mask[:, 2:] = False
        targets = TargetBatch(self.targets.sed, self.targets.scene, mask)
        sed = np.full((2, 4, 3), 0.5)
        sed[:, 2:] = 0.999
        report = loss(sed, None, targets, 1e-4)
        self.assertAlmostEqual(report.sed_loss, np.log(2.0))

    def test_absent_branches(self):
        report = loss(None, None, self.targets, 1e-4)
        self.assertEqual((report.sed_loss, report.asc_loss, report.total), (0.0, 0.0, 0.0))


class TestGradients(unittest.TestCase):
    """central differences against the analytic backward pass"""

    H = 1e-7
    TOLERANCE = 1e-4
    FLOOR = 1e-3
    SAMPLES = 4

    def check(self, mode, seed, weight=0.5, valid=None):
        config = ModelConfig.from_preset("tiny")
        net = MtlNetwork(config, mode, seed=seed)
        rng = np.random.default_rng(100 + seed)
        x = rng.standard_normal((2, 1, 8, 8))
        targets = random_targets(rng, 2, config, valid)
        _, grads = backward(net, x, targets, weight)
        grads = {name: g.copy() for name, g in grads.items()}

        for name, param in net.parameters().items():
            flat = param.reshape(-1)
            picks = rng.choice(flat.size, size=min(self.SAMPLES, flat.size), replace=False)
            for index in picks:
                original = flat[index]
                flat[index] = original + self.H
                plus = total_loss(net, x, targets, weight)
                flat[index] = original - self.H
                minus = total_loss(net, x, targets, weight)
                flat[index] = original
                numeric = (plus - minus) / (2 * self.H)
                analytic = grads[name].reshape(-1)[index]
                rel = abs(analytic - numeric) / max(abs(analytic) + abs(numeric), self.FLOOR)
                self.assertLessEqual(
                    rel, self.TOLERANCE, f"{name}[{index}]: {analytic} vs {numeric}"
                )

    def test_joint_network(self):
        for seed in range(5):
            with self.subTest(seed=seed):
                self.check(Mode.MTL, seed)

    def test_event_network_with_padding(self):
        self.check(Mode.SED, 0, valid=5)

    def test_scene_network(self):
        self.check(Mode.ASC, 1, weight=1e-4)

    def test_every_parameter_has_a_gradient(self):
        config = ModelConfig.from_preset("tiny")
        net = MtlNetwork(config)
        rng = np.random.default_rng(0)
        _, grads = backward(net, rng.standard_normal((2, 1, 8, 8)), random_targets(rng, 2, config), 0.5)
        params = net.parameters()
        self.assertEqual(list(grads), list(params))
        for name, grad in grads.items():
            self.assertEqual(grad.shape, params[name].shape, name)


class TestPredict(unittest.TestCase):
    def test_threshold_is_inclusive(self):
        net = MtlNetwork(ModelConfig.from_preset("tiny"))
        fc = net.sed_layers[-1]
        fc.params["weight"][...] = 0.0
        fc.params["bias"][...] = 0.0
        events, scenes = predict(net, np.zeros((2, 1, 8, 8)), sed_threshold=0.5)
        self.assertEqual(events.dtype, bool)
        self.assertTrue(np.all(events))
        self.assertEqual(scenes.shape, (2,))

    def test_scene_ties_pick_lowest_index(self):
        net = MtlNetwork(ModelConfig.from_preset("tiny"), Mode.ASC)
        fc = net.asc_dense[-1]
        fc.params["weight"][...] = 0.0
        fc.params["bias"][...] = 0.0
        events, scenes = predict(net, np.ones((3, 1, 8, 8)))
        self.assertIsNone(events)
        np.testing.assert_array_equal(scenes, [0, 0, 0])


if __name__ == "__main__":
    unittest.main()
