import unittest

import numpy as np

from bsk.dsp import (
    AudioClip,
    ComplexSpectrogram,
    MelFilterbank,
    StftConfig,
    complex_mel,
    hamming_window,
    hz_to_mel,
    mel_filterbank,
    stft,
)
from bsk.exception.exceptions import InvalidConfigError, ShapeError, TooShortError


def naive_dft(frame, fft_size):
    padded = np.zeros(fft_size)
    padded[: len(frame)] = frame
    n = np.arange(fft_size)
    return np.array(
        [
            np.sum(padded * np.exp(-2j * np.pi * k * n / fft_size))
            for k in range(fft_size // 2 + 1)
        ]
    )


class TestHammingWindow(unittest.TestCase):
    def test_length_three(self):
        np.testing.assert_allclose(hamming_window(3), [0.08, 1.0, 0.08], atol=1e-15)

    def test_symmetric(self):
        w = hamming_window(4)
        self.assertAlmostEqual(w[0], 0.08)
        self.assertAlmostEqual(w[3], 0.08)
        self.assertAlmostEqual(w[1], w[2], places=15)

    def test_sum_matches_formula(self):
        length = 1764
        direct = sum(
            0.54 - 0.46 * np.cos(2 * np.pi * i / (length - 1)) for i in range(length)
        )
        self.assertAlmostEqual(hamming_window(length).sum(), direct, delta=1e-9)

    def test_too_short(self):
        with self.assertRaises(InvalidConfigError):
            hamming_window(1)


class TestStftConfig(unittest.TestCase):
    def test_from_sample_rate(self):
        cfg = StftConfig.from_sample_rate(44100)
        self.assertEqual(cfg.window_length, 1764)
        self.assertEqual(cfg.hop_length, 882)
        self.assertEqual(cfg.fft_size, 2048)
        self.assertEqual(cfg.bin_count, 1025)

    def test_sixteen_khz(self):
        cfg = StftConfig.from_sample_rate(16000)
        self.assertEqual((cfg.window_length, cfg.hop_length, cfg.fft_size), (640, 320, 1024))
        self.assertAlmostEqual(cfg.frame_hop_seconds(16000), 0.02)

    def test_hop_must_be_half(self):
        with self.assertRaises(InvalidConfigError):
            StftConfig(64, 16, 64)

    def test_fft_shorter_than_window(self):
        with self.assertRaises(InvalidConfigError):
            StftConfig(64, 32, 32)


class TestStft(unittest.TestCase):
    def setUp(self):
        self.cfg = StftConfig(64, 32, 64)
        self.rng = np.random.default_rng(3)

    def test_frame_count(self):
        clip = AudioClip(self.rng.standard_normal(1000), 8000)
        (spec,) = stft(clip, self.cfg)
        self.assertEqual(spec.shape, (1 + (1000 - 64) // 32, 33))

    def test_zero_signal(self):
        (spec,) = stft(AudioClip(np.zeros(256), 8000), self.cfg)
        self.assertTrue(np.all(spec.bins == 0))

    def test_impulse(self):
        signal = np.zeros(256)
        signal[0] = 1.0
        (spec,) = stft(AudioClip(signal, 8000), self.cfg)
        np.testing.assert_allclose(np.abs(spec.bins[0]), hamming_window(64)[0])

    def test_sine_matches_naive_dft(self):
        sr = 8000
        t = np.arange(512) / sr
        clip = AudioClip(np.sin(2 * np.pi * 1000 * t), sr)
        (spec,) = stft(clip, self.cfg)
        window = hamming_window(64)
        for n in (0, 3, spec.shape[0] - 1):
            frame = clip.channel(0)[n * 32 : n * 32 + 64] * window
            oracle = naive_dft(frame, 64)
            np.testing.assert_allclose(spec.bins[n], oracle, rtol=1e-9, atol=1e-9)

    def test_random_signals_match_naive_dft(self):
        window = hamming_window(64)
        for seed in range(50):
            rng = np.random.default_rng(seed)
            signal = rng.standard_normal(int(rng.integers(64, 400)))
            (spec,) = stft(AudioClip(signal, 8000), self.cfg)
            oracle = np.array(
                [
                    naive_dft(signal[n * 32 : n * 32 + 64] * window, 64)
                    for n in range(spec.shape[0])
                ]
            )
            scale = np.sum(np.abs(signal))
            with self.subTest(seed=seed):
                np.testing.assert_allclose(spec.bins, oracle, rtol=1e-9, atol=1e-9 * scale)

    def test_linear(self):
        x = self.rng.standard_normal(400)
        y = self.rng.standard_normal(400)
        (sx,) = stft(AudioClip(x, 8000), self.cfg)
        (sy,) = stft(AudioClip(y, 8000), self.cfg)
        (sxy,) = stft(AudioClip(0.3 * x - 0.2 * y, 8000), self.cfg)
        np.testing.assert_allclose(sxy.bins, 0.3 * sx.bins - 0.2 * sy.bins, atol=1e-9)

    def test_parseval(self):
        x = self.rng.standard_normal(400)
        (spec,) = stft(AudioClip(x, 8000), self.cfg)
        frame = x[:64] * hamming_window(64)
        two_sided = np.fft.fft(frame, n=64)
        np.testing.assert_allclose(two_sided[:33], spec.bins[0], atol=1e-12)
        self.assertAlmostEqual(
            np.sum(np.abs(two_sided) ** 2) / (64 * np.sum(frame**2)), 1.0, places=6
        )

    def test_stereo_gives_two_spectrograms(self):
        clip = AudioClip(self.rng.standard_normal((2, 300)), 8000)
        self.assertEqual(len(stft(clip, self.cfg)), 2)

    def test_too_short(self):
        with self.assertRaises(TooShortError):
            stft(AudioClip(np.zeros(10), 8000), self.cfg)


class TestMelFilterbank(unittest.TestCase):
    def test_mel_of_700(self):
        self.assertAlmostEqual(float(hz_to_mel(700.0)), 2595 * np.log10(2), places=12)

    def test_rows_peak_at_one(self):
        bank = mel_filterbank(64, 1025, 44100)
        self.assertEqual(bank.weights.shape, (64, 1025))
        np.testing.assert_allclose(bank.weights.max(axis=1), 1.0)
        self.assertTrue(np.all(bank.weights >= 0))

    def test_centers_follow_mel_scale(self):
        bank = mel_filterbank(40, 1025, 44100)
        mels = np.linspace(0, 2595 * np.log10(1 + 22050 / 700), 42)[1:-1]
        centers = 700 * (10 ** (mels / 2595) - 1)
        np.testing.assert_allclose(bank.band_centers, centers)
        self.assertTrue(np.all(np.diff(bank.band_centers) > 0))
        overlap = (bank.weights[:-1] > 0) & (bank.weights[1:] > 0)
        self.assertTrue(np.all(overlap.any(axis=1)))

    def test_bins_inside_range_are_covered(self):
        bank = mel_filterbank(40, 1025, 44100)
        freqs = np.arange(1025) * 44100 / 2048
        inside = (freqs > 0) & (freqs < 22050)
        self.assertTrue(np.all(bank.weights[:, inside].sum(axis=0) > 0))

    def test_too_many_filters(self):
        with self.assertRaises(InvalidConfigError):
            mel_filterbank(64, 9, 8000)

    def test_bad_edges(self):
        with self.assertRaises(InvalidConfigError):
            mel_filterbank(8, 257, 16000, f_min=5000, f_max=4000)


class TestComplexMel(unittest.TestCase):
    def setUp(self):
        self.rng = np.random.default_rng(7)

    def test_zero(self):
        spec = ComplexSpectrogram(np.zeros((4, 9), dtype=complex), 16)
        bank = MelFilterbank(self.rng.random((3, 9)), np.arange(3.0))
        self.assertTrue(np.all(complex_mel(spec, bank).bins == 0))

    def test_selection(self):
        bins = self.rng.standard_normal((4, 9)) + 1j * self.rng.standard_normal((4, 9))
        weights = np.zeros((2, 9))
        weights[0, 2] = weights[1, 5] = 1.0
        out = complex_mel(ComplexSpectrogram(bins, 16), MelFilterbank(weights, np.zeros(2)))
        np.testing.assert_array_equal(out.bins, bins[:, [2, 5]])

    def test_triple_loop(self):
        bins = self.rng.standard_normal((8, 9)) + 1j * self.rng.standard_normal((8, 9))
        weights = self.rng.random((16, 9))
        out = complex_mel(ComplexSpectrogram(bins, 16), MelFilterbank(weights, np.zeros(16)))
        oracle = np.zeros((8, 16), dtype=complex)
        for n in range(8):
            for m in range(16):
                for k in range(9):
                    oracle[n, m] += bins[n, k] * weights[m, k]
        np.testing.assert_allclose(out.bins, oracle, rtol=1e-12)

    def test_random_inputs_match_triple_loop(self):
        for seed in range(50):
            rng = np.random.default_rng(seed)
            frames, bins_count, mels = (int(v) for v in rng.integers(1, 12, 3))
            bins = rng.standard_normal((frames, bins_count)) + 1j * rng.standard_normal((frames, bins_count))
            weights = rng.random((mels, bins_count))
            spec = ComplexSpectrogram(bins, 2 * (bins_count - 1))
            out = complex_mel(spec, MelFilterbank(weights, np.zeros(mels)))
            oracle = np.zeros((frames, mels), dtype=complex)
            for n in range(frames):
                for m in range(mels):
                    for k in range(bins_count):
                        oracle[n, m] += bins[n, k] * weights[m, k]
            scale = np.abs(bins).max() * weights.sum(axis=1).max()
            with self.subTest(seed=seed):
                np.testing.assert_allclose(out.bins, oracle, rtol=1e-12, atol=1e-12 * scale)

    def test_scaling_commutes(self):
        bins = self.rng.standard_normal((5, 9)) + 1j * self.rng.standard_normal((5, 9))
        bank = MelFilterbank(self.rng.random((4, 9)), np.zeros(4))
        c = 0.7 - 0.2j
        scaled = complex_mel(ComplexSpectrogram(c * bins, 16), bank).bins
        np.testing.assert_allclose(scaled, c * complex_mel(ComplexSpectrogram(bins, 16), bank).bins, rtol=1e-12)

    def test_mismatch(self):
        spec = ComplexSpectrogram(np.zeros((4, 9), dtype=complex), 16)
        with self.assertRaises(ShapeError):
            complex_mel(spec, MelFilterbank(np.ones((3, 5)), np.zeros(3)))


class TestAudioClip(unittest.TestCase):
    def test_mono_promoted(self):
        clip = AudioClip(np.zeros(10), 100)
        self.assertEqual(clip.channel_count, 1)
        self.assertAlmostEqual(clip.duration, 0.1)

    def test_three_channels_rejected(self):
        with self.assertRaises(InvalidConfigError):
            AudioClip(np.zeros((3, 10)), 100)

    def test_samples_read_only(self):
        clip = AudioClip(np.zeros((2, 10)), 100)
        with self.assertRaises(ValueError):
            clip.samples[0, 0] = 1.0


if __name__ == "__main__":
    unittest.main()
