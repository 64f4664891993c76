"""Acoustic feature tests against constructed signals and the brute-force oracle."""

import numpy as np
import pytest

from speechscreen import acoustic as ac
from speechscreen import audio as au
from speechscreen.config import load_config

from mfcc_oracle import oracle_mfcc

CFG = load_config()


def sine(freq, seconds, rate=16000, amp=0.5):
    t = np.arange(int(round(seconds * rate))) / rate
    return amp * np.sin(2 * np.pi * freq * t)


def sine_template(period: int, amp: float = 0.8) -> np.ndarray:
    """One full sine cycle; odd period keeps the sample-level peak unique."""
    t = np.arange(period)
    return amp * np.sin(2 * np.pi * t / period)


def pulse_train(gaps, template, scales=None):
    """Pulses at cumulative gap offsets; gap k separates pulses k and k+1."""
    positions = [0]
    for g in gaps:
        positions.append(positions[-1] + g)
    x = np.zeros(positions[-1] + len(template))
    for k, p in enumerate(positions):
        s = 1.0 if scales is None else scales[k]
        x[p : p + len(template)] += s * template
    return x


class TestMfccAgainstOracle:
    def test_random_signals_match(self):
        rng = np.random.default_rng(11)
        for _ in range(3):
            x = rng.uniform(-0.8, 0.8, 4000)
            frames = au.frame(au.AudioBuffer(x, 16000))
            got = ac.mfcc(frames, CFG)
            want = oracle_mfcc(x)
            assert got.shape == want.shape
            assert np.abs(got - want).max() <= 1e-6

    def test_tone_matches(self):
        x = sine(440, 0.5)
        frames = au.frame(au.AudioBuffer(x, 16000))
        got = ac.mfcc(frames, CFG)
        want = oracle_mfcc(x)
        assert np.abs(got - want).max() <= 1e-6

    def test_shape_and_energy_column(self):
        x = sine(300, 1.0)
        frames = au.frame(au.AudioBuffer(x, 16000))
        out = ac.mfcc(frames, CFG)
        assert out.shape == (124, 42)
        win = np.hamming(256)
        e0 = np.log(((x[:256] * win) ** 2).sum())
        assert out[0, 13] == pytest.approx(e0, abs=1e-9)

    def test_silence_hits_log_floor(self):
        frames = au.frame(au.AudioBuffer(np.zeros(16000), 16000), 0.016, 0.008)
        out = ac.mfcc(frames, CFG)
        assert out[0, 13] == pytest.approx(np.log(1e-10))
        # DCT of a constant log-mel vector: only coefficient 0 is nonzero
        assert out[0, 0] == pytest.approx(np.log(1e-10) * np.sqrt(26), rel=1e-9)
        assert np.abs(out[0, 1:13]).max() < 1e-9


class TestMelFilterbank:
    def test_shape_and_band_limits(self):
        bank = ac.mel_filterbank(26, 512, 16000)
        assert bank.shape == (26, 257)
        assert bank.min() >= 0.0
        assert bank[0, 0] == 0.0  # triangle rises from 0 Hz

    def test_each_filter_peaks_once(self):
        bank = ac.mel_filterbank(26, 512, 16000)
        for k in range(26):
            assert bank[k].max() > 0.0


class TestF0:
    def track(self, x, rate=16000):
        buf = au.AudioBuffer(x, rate)
        frames = au.frame(buf, CFG.window_seconds, CFG.hop_seconds)
        mask = au.detect_voiced(frames, CFG.energy_threshold, CFG.zcr_threshold)
        return ac.track_f0(frames, mask, CFG)

    @pytest.mark.parametrize("freq", [100.0, 150.0, 200.0, 220.0, 330.0])
    def test_pure_tone_within_1hz(self, freq):
        f0s, _ = self.track(sine(freq, 1.0))
        assert f0s.shape[0] > 0
        assert abs(float(f0s.mean()) - freq) <= 1.0

    def test_below_band_rejected(self):
        f0s, _ = self.track(sine(50, 1.0))
        assert f0s.shape[0] == 0

    def test_white_noise_rejected_by_voicing(self):
        rng = np.random.default_rng(3)
        f0s, _ = self.track(rng.uniform(-0.5, 0.5, 16000))
        assert f0s.shape[0] == 0

    def test_hnr_pure_tone_clamps_high(self):
        _, peaks = self.track(sine(200, 1.0))
        hnr = ac.hnr_db(peaks, CFG)
        assert float(hnr.mean()) == pytest.approx(40.0)

    def test_hnr_matches_snr(self):
        rng = np.random.default_rng(5)
        x = sine(200, 1.0, amp=0.5) + rng.normal(0.0, 0.1, 16000)
        _, peaks = self.track(np.clip(x, -1, 1))
        hnr = float(ac.hnr_db(peaks, CFG).mean())
        # harmonic power 0.125, noise power 0.01
        expected = 10 * np.log10(0.125 / 0.01)
        assert abs(hnr - expected) <= 1.5


class TestJitterShimmer:
    def test_two_percent_jitter_at_40k(self):
        # 9.9 / 10.1 ms alternating periods are exact at 40 kHz: 396 / 404
        gaps = [396, 404] * 40
        x = pulse_train(gaps, sine_template(391))
        buf = au.AudioBuffer(x, 40000)
        jitter, _ = ac.jitter_shimmer(buf, 100.0)
        assert jitter == pytest.approx(0.02, abs=1e-6)

    def test_two_percent_jitter_at_16k(self):
        gaps = [99, 101] * 80
        x = pulse_train(gaps, sine_template(97))
        buf = au.AudioBuffer(x, 16000)
        jitter, _ = ac.jitter_shimmer(buf, 16000.0 / 100.0)
        assert jitter == pytest.approx(0.02, abs=1e-6)

    def test_steady_train_has_zero_jitter(self):
        x = pulse_train([100] * 100, sine_template(97))
        buf = au.AudioBuffer(x, 16000)
        jitter, shimmer = ac.jitter_shimmer(buf, 160.0)
        assert jitter == pytest.approx(0.0, abs=1e-12)
        assert shimmer == pytest.approx(0.0, abs=1e-12)

    def test_alternating_amplitude_shimmer(self):
        n = 101
        scales = [1.0 if k % 2 == 0 else 0.9 for k in range(n)]
        x = pulse_train([100] * (n - 1), sine_template(97), scales)
        buf = au.AudioBuffer(x, 16000)
        jitter, shimmer = ac.jitter_shimmer(buf, 160.0)
        assert jitter == pytest.approx(0.0, abs=1e-12)
        # 51 pulses at 1.0 and 50 at 0.9: mean amplitude 96/101, diffs all 0.1
        assert shimmer == pytest.approx(0.1 / (96.0 / 101.0), abs=1e-9)

    def test_too_few_periods_absent(self):
        x = pulse_train([100, 100], sine_template(97))
        buf = au.AudioBuffer(x, 16000)
        jitter, shimmer = ac.jitter_shimmer(buf, 160.0)
        assert jitter is None and shimmer is None

    def test_wild_periods_filtered_out(self):
        # gaps far outside [0.7, 1.3] x T0 leave no run of 3 valid periods
        x = pulse_train([100, 300, 100, 290, 100], sine_template(97))
        buf = au.AudioBuffer(x, 16000)
        jitter, shimmer = ac.jitter_shimmer(buf, 160.0)
        assert jitter is None and shimmer is None


class TestIntensity:
    def test_unit_sine_level(self):
        # 500 Hz: 256-sample window holds exactly 8 cycles, so every frame
        # has RMS 1/sqrt(2) and the level is 20 log10(RMS / 1e-5)
        frames = au.frame(au.AudioBuffer(sine(500, 1.0, amp=1.0), 16000))
        db = ac.intensity_db(frames, CFG)
        assert float(db.mean()) == pytest.approx(96.9897, abs=0.05)

    def test_half_amplitude_six_db_down(self):
        frames = au.frame(au.AudioBuffer(sine(500, 1.0, amp=0.5), 16000))
        db = ac.intensity_db(frames, CFG)
        assert float(db.mean()) == pytest.approx(96.9897 - 6.0206, abs=0.05)

    def test_silence_floors_at_zero(self):
        frames = au.frame(au.AudioBuffer(np.zeros(16000), 16000))
        assert ac.intensity_db(frames, CFG).max() == 0.0


class TestExtractAcoustic:
    def test_field_order_and_types(self):
        out = ac.extract_acoustic(au.AudioBuffer(sine(200, 2.0), 16000), CFG)
        assert tuple(out.keys()) == ac.ACOUSTIC_FIELDS
        assert all(isinstance(v, float) for v in out.values())

    def test_pause_statistics(self):
        parts = [
            sine(200, 2.0),
            np.zeros(int(16000 * 0.5)),
            sine(200, 2.0),
            np.zeros(int(16000 * 1.5)),
            sine(200, 2.0),
            np.zeros(int(16000 * 2.5)),
            sine(200, 2.0),
        ]
        buf = au.AudioBuffer(np.concatenate(parts), 16000)
        out = ac.extract_acoustic(buf, CFG)
        assert out["pause_count_short"] == 1.0
        assert out["pause_count_medium"] == 1.0
        assert out["pause_count_long"] == 1.0
        assert out["mean_pause_s"] == pytest.approx(1.5, abs=0.032)
        assert out["total_audio_s"] == pytest.approx(12.5, abs=0.02)
        assert out["phonation_rate"] == pytest.approx(8.0 / 12.5, abs=0.01)
        assert out["absent_f0"] == 0.0
        assert abs(out["f0_mean_hz"] - 200.0) <= 1.0

    def test_silence_absent_flags(self):
        out = ac.extract_acoustic(au.AudioBuffer(np.zeros(16000 * 2), 16000), CFG)
        assert out["absent_zcr"] == 1.0
        assert out["absent_f0"] == 1.0
        assert out["absent_hnr"] == 1.0
        assert out["absent_jitter"] == 1.0
        assert out["absent_shimmer"] == 1.0
        assert out["ratio_capped"] == 1.0
        assert out["f0_mean_hz"] == 0.0
        assert out["hnr_mean_db"] == CFG.hnr_min_db
        assert out["pause_to_speech_ratio"] == CFG.pause_ratio_cap

    def test_resamples_foreign_rate(self):
        out = ac.extract_acoustic(au.AudioBuffer(sine(200, 1.0, rate=44100), 44100), CFG)
        assert abs(out["f0_mean_hz"] - 200.0) <= 1.0

    def test_deterministic(self):
        rng = np.random.default_rng(9)
        x = np.clip(sine(180, 2.0) + rng.normal(0, 0.05, 32000), -1, 1)
        a = ac.extract_acoustic(au.AudioBuffer(x, 16000), CFG)
        b = ac.extract_acoustic(au.AudioBuffer(x.copy(), 16000), CFG)
        assert a == b
