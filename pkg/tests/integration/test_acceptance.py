import tempfile
import unittest
from pathlib import Path

from docopt import docopt

from bsk.__main__ import __doc__ as usage
from bsk.__main__ import process_args
from bsk.config import RunConfig, get_settings
from bsk.loader import ExampleLoader, FeatureIndex
from bsk.metrics import SegmentScores, sed_scores, segmentize
from bsk.model.network import MtlNetwork
from bsk.model.training import stack_batch, train
from bsk.utils import read_json, write_json

# the micro preset's layer sizes on one-second clips
SETTINGS = {
    "model": {"T": 50, "MP": [4, 2, 2, 5, 10]},
    "training": {"epochs": 150, "batch_size": 2, "learning_rate": 0.003},
    "synth": {"duration": 1.0},
}
TARGET_F1 = 90.0


class AcceptanceCase(unittest.TestCase):
    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)
        self.config = write_json(self.out / "settings.json", SETTINGS)

    def tearDown(self):
        self.tmp.cleanup()

    def bsk(self, command, *options, out=None):
        argv = [command, f"--config={self.config}", f"--out={out or self.out}", *options]
        summary = process_args(docopt(usage, argv=argv))
        self.assertTrue(summary["ok"], summary["errors"])
        return summary["outputs"]


class TestOverfitMicroCorpus(AcceptanceCase):
    def test_joint_network_memorises_corpus(self):
        self.bsk("synth")
        self.bsk("extract")
        self.bsk("train")
        log = read_json(self.out / "training_log.json")["epochs"]
        self.assertLess(log[-1]["total"], 0.1 * log[0]["total"])

        report = self.bsk("evaluate")
        self.assertGreaterEqual(report["sed"]["f1"], TARGET_F1)
        self.assertEqual(report["asc"]["f1"], 100.0)


class TestFeatureSetConvergence(AcceptanceCase):
    def epochs_to_target(self, feature_set):
        """trains on the micro corpus and returns the first epoch whose
        event F1 over the training clips reaches TARGET_F1, or None"""
        out = self.out / feature_set
        self.bsk("synth", out=out)
        self.bsk("extract", f"--feature-set={feature_set}", out=out)
        config = RunConfig.from_settings(
            get_settings(self.config, {"paths": {"out": str(out)}, "feature_set": feature_set})
        )
        index = FeatureIndex.load(config.paths.feature_dir)
        examples = ExampleLoader(index, config.paths.feature_dir).load()
        net = MtlNetwork(
            config.model_config(index.vocabulary, index.channels), config.mode, config.seed
        )
        reached = []

        def sed_f1():
            x, _ = stack_batch(examples)
            probs, _ = net.forward(x, train=False)
            scores = SegmentScores()
            for (_, targets), row, clip_probs in zip(examples, index.clips, probs):
                valid = row.valid_frames
                ref = segmentize(targets.sed[:valid], index.frame_hop, config.granularity)
                pred = segmentize(
                    clip_probs[:valid] >= config.sed_threshold,
                    index.frame_hop,
                    config.granularity,
                )
                scores = scores + sed_scores(ref, pred)
            return scores.f1

        def stop_at_target(epoch, _):
            if sed_f1() >= TARGET_F1:
                reached.append(epoch)
                return True
            return False

        train(
            net,
            examples,
            config.optimizer,
            config.epochs,
            seed=config.seed,
            on_epoch=stop_at_target,
        )
        return reached[0] if reached else None

    def test_sincos_converges_no_slower_than_single_channel(self):
        sincos = self.epochs_to_target("MelSinCos")
        single = self.epochs_to_target("Mel1ch")
        self.assertIsNotNone(sincos)
        self.assertIsNotNone(single)
        self.assertLessEqual(sincos, single)


if __name__ == "__main__":
    unittest.main()
