import struct
import tempfile
import unittest
from pathlib import Path

import numpy as np

from bsk.enum.featuresetenum import FeatureSet
from bsk.exception.exceptions import FeatureFormatError
from bsk.featureio import decode_features, encode_features, read_feature_file, write_feature_file
from bsk.features import FeatureTensor


class TestFeatureFile(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(0)
        self.tensor = FeatureTensor(rng.standard_normal((3, 5, 4)), FeatureSet.MEL_GCC)

    def test_layout(self):
        payload = encode_features(self.tensor)
        self.assertEqual(payload[:4], b"BFT1")
        self.assertEqual(struct.unpack("<IIIB", payload[4:17]), (3, 5, 4, FeatureSet.MEL_GCC.value))
        self.assertEqual(len(payload), 17 + 4 * 3 * 5 * 4)
        first = struct.unpack("<f", payload[17:21])[0]
        self.assertEqual(np.float32(first), self.tensor.data[0, 0, 0])

    def test_round_trip(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = write_feature_file(Path(tmp) / "a.bft", self.tensor)
            back = read_feature_file(path)
        self.assertIs(back.layout, FeatureSet.MEL_GCC)
        np.testing.assert_array_equal(back.data, self.tensor.data)

    def test_bad_magic(self):
        payload = encode_features(self.tensor)
        with self.assertRaises(FeatureFormatError):
            decode_features(b"XXXX" + payload[4:])

    def test_unknown_tag(self):
        payload = bytearray(encode_features(self.tensor))
        payload[16] = 42
        with self.assertRaises(FeatureFormatError):
            decode_features(bytes(payload))

    def test_truncated(self):
        payload = encode_features(self.tensor)
        for cut in (10, len(payload) - 4):
            with self.subTest(cut=cut), self.assertRaises(FeatureFormatError):
                decode_features(payload[:cut])


if __name__ == "__main__":
    unittest.main()
