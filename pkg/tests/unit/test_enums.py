import unittest

from bsk.enum.featuresetenum import FeatureSet
from bsk.enum.modeenum import Mode
from bsk.enum.operationsenum import OperationsEnum


class TestFeatureSet(unittest.TestCase):
    def test_layout_tags_are_stable(self):
        self.assertEqual(
            [(s.label, s.value) for s in FeatureSet],
            [
                ("Mel1ch", 0),
                ("Mel2ch", 1),
                ("MelPhase", 2),
                ("MelIPD", 3),
                ("MelSinCos", 4),
                ("MelGCC", 5),
                ("MelILD", 6),
            ],
        )

    def test_channel_counts(self):
        counts = {s.label: s.channel_count for s in FeatureSet}
        self.assertEqual(
            counts,
            {
                "Mel1ch": 1,
                "Mel2ch": 2,
                "MelPhase": 4,
                "MelIPD": 3,
                "MelSinCos": 4,
                "MelGCC": 3,
                "MelILD": 3,
            },
        )

    def test_from_name(self):
        self.assertIs(FeatureSet.from_name("melgcc"), FeatureSet.MEL_GCC)
        self.assertIs(FeatureSet.from_name(" MEL_SINCOS "), FeatureSet.MEL_SINCOS)
        with self.assertRaises(ValueError):
            FeatureSet.from_name("MelXYZ")

    def test_only_mel1ch_is_mono(self):
        self.assertEqual([s for s in FeatureSet if not s.binaural], [FeatureSet.MEL_1CH])

    def test_raw_tag_membership(self):
        self.assertIn(5, FeatureSet)
        self.assertNotIn(7, FeatureSet)


class TestMode(unittest.TestCase):
    def test_branches(self):
        self.assertEqual((Mode.MTL.has_sed, Mode.MTL.has_asc), (True, True))
        self.assertEqual((Mode.SED.has_sed, Mode.SED.has_asc), (True, False))
        self.assertEqual((Mode.ASC.has_sed, Mode.ASC.has_asc), (False, True))

    def test_codes(self):
        for mode in Mode:
            self.assertIs(Mode.from_code(mode.code), mode)


class TestOperations(unittest.TestCase):
    def test_command_names(self):
        for name in ("synth", "extract", "train", "evaluate"):
            self.assertIn(name, OperationsEnum)
        self.assertNotIn("predict", OperationsEnum)
        self.assertNotIn(None, OperationsEnum)


if __name__ == "__main__":
    unittest.main()
