import math

import numpy as np
import pytest

from blinkforge import (
    Channel,
    Recording,
    dfa_alpha,
    extract_eda_features,
    higuchi_fd,
    hjorth,
    katz_fd,
    make_eda_spec,
    permutation_entropy,
    petrosian_fd,
    scr_count,
    spectral_entropy,
    synth_eda_session,
    tonic_phasic_split,
    window_series,
)
from blinkforge.eda_features import (
    EDA_FEATURE_NAMES,
    EdaWindow,
    default_dfa_scales,
)
from blinkforge.errors import (
    DegenerateInputError,
    InvalidChannelError,
    InvalidInputError,
)

import oracles


def eda_rec(y, fs=100.0):
    return Recording(fs, y, Channel.EDA)


class TestTonicPhasicSplit:
    def test_constant_input(self):
        rec = eda_rec(np.full(3000, 5.0))
        tonic, phasic = tonic_phasic_split(rec)
        assert np.allclose(tonic.samples, 5.0, atol=1e-6)
        assert np.allclose(phasic.samples, 0.0, atol=1e-6)

    def test_reconstruction_identity(self):
        rng = np.random.default_rng(0)
        rec = eda_rec(5 + 0.1 * rng.normal(size=2000))
        tonic, phasic = tonic_phasic_split(rec)
        from blinkforge import butterworth_lowpass
        filtered = butterworth_lowpass(rec, 1, 1.0)
        assert np.allclose(tonic.samples + phasic.samples, filtered.samples,
                           atol=1e-12)

    def test_drift_and_bumps_separate(self):
        fs = 100.0
        t = np.arange(int(300 * fs)) / fs
        drift = 0.5 * np.sin(2 * np.pi * 0.005 * t)
        bump_template = np.zeros_like(t)
        for t0 in (60.0, 150.0, 240.0):
            rel = t - t0
            m = rel >= 0
            bump_template[m] += (1 - np.exp(-rel[m] / 0.5)) * np.exp(-rel[m] / 2.0)
        rec = eda_rec(5.0 + drift + 0.5 * bump_template / bump_template.max(), fs)
        tonic, phasic = tonic_phasic_split(rec)
        # the bumps should land in the phasic component
        bt = bump_template - bump_template.mean()
        ph = phasic.samples - phasic.samples.mean()
        corr = np.dot(bt, ph) / (np.linalg.norm(bt) * np.linalg.norm(ph))
        assert corr > 0.9
        # the drift should dominate the tonic component
        dr = drift - drift.mean()
        to = tonic.samples - tonic.samples.mean()
        corr_drift = np.dot(dr, to) / (np.linalg.norm(dr) * np.linalg.norm(to))
        assert corr_drift > 0.9

    def test_wrong_channel(self):
        rec = Recording(100.0, np.ones(100), Channel.EOG)
        with pytest.raises(InvalidChannelError):
            tonic_phasic_split(rec)


class TestWindowSeries:
    def test_exact_division(self):
        rec = eda_rec(np.arange(1000.0))
        wins = window_series(rec, 1.0)
        assert len(wins) == 10
        assert all(w.samples.size == 100 for w in wins)

    def test_partial_window_dropped(self):
        rec = eda_rec(np.arange(1050.0))
        assert len(window_series(rec, 1.0)) == 10

    def test_too_short_is_empty(self):
        rec = eda_rec(np.arange(50.0))
        assert window_series(rec, 1.0) == []


class TestPetrosian:
    def test_monotonic_is_one(self):
        assert petrosian_fd(np.linspace(0, 1, 100)) == 1.0

    def test_alternating_closed_form(self):
        n = 100
        x = np.array([(-1.0) ** i for i in range(n)])
        n_delta = 98
        expected = math.log10(n) / (
            math.log10(n) + math.log10(n / (n + 0.4 * n_delta)))
        assert petrosian_fd(x) == pytest.approx(expected, abs=1e-12)

    def test_white_noise_matches_oracle(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=1000)
        assert petrosian_fd(x) == pytest.approx(
            oracles.petrosian_reference(list(x)), abs=1e-12)
        assert petrosian_fd(x) == pytest.approx(1.03, abs=0.01)


class TestHiguchi:
    def test_straight_line(self):
        assert higuchi_fd(np.linspace(0, 5, 1000), 10) == pytest.approx(1.0, abs=0.05)

    def test_white_noise(self):
        rng = np.random.default_rng(2)
        assert higuchi_fd(rng.normal(size=1000), 10) == pytest.approx(2.0, abs=0.15)

    def test_sine_between_one_and_oneish(self):
        t = np.linspace(0, 4 * np.pi, 1000)
        x = np.sin(t)
        fd = higuchi_fd(x, 10)
        assert 1.0 <= fd <= 1.3
        assert fd == pytest.approx(oracles.higuchi_reference(list(x), 10), abs=1e-9)

    def test_too_short(self):
        with pytest.raises(InvalidInputError):
            higuchi_fd(np.ones(10), 10)


class TestKatz:
    def test_straight_line(self):
        assert katz_fd(np.linspace(0, 3, 200)) == pytest.approx(1.0, abs=1e-9)

    def test_constant(self):
        assert katz_fd(np.full(50, 2.0)) == 1.0

    def test_zigzag_closed_form(self):
        # triangle wave of unit steps: |dx| = 1 each step
        n_steps = 8
        x = np.array([0, 1, 0, 1, 0, 1, 0, 1, 0], dtype=float)
        path = n_steps * math.sqrt(2.0)
        dist = max(math.sqrt(i * i + (x[i]) ** 2) for i in range(len(x)))
        expected = math.log10(n_steps) / (
            math.log10(n_steps) + math.log10(dist / path))
        assert katz_fd(x) == pytest.approx(expected, abs=1e-12)


class TestDfa:
    def test_white_noise_exponent(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=4096)
        assert dfa_alpha(x) == pytest.approx(0.5, abs=0.1)

    def test_random_walk_exponent(self):
        rng = np.random.default_rng(4)
        x = np.cumsum(rng.normal(size=4096))
        assert dfa_alpha(x) == pytest.approx(1.5, abs=0.1)

    def test_deterministic(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=1024)
        assert dfa_alpha(x) == dfa_alpha(x)

    def test_scale_validation(self):
        with pytest.raises(InvalidInputError):
            dfa_alpha(np.ones(100), scales=[4, 8])
        with pytest.raises(InvalidInputError):
            dfa_alpha(np.ones(20), scales=[4, 5, 6, 16])

    def test_default_scales_match_reference(self):
        assert default_dfa_scales(100) == oracles._default_scales(100)
        assert default_dfa_scales(4096) == oracles._default_scales(4096)


class TestHjorth:
    def test_constant_raises(self):
        with pytest.raises(DegenerateInputError):
            hjorth(np.full(50, 1.0))

    def test_ramp_raises_for_complexity(self):
        with pytest.raises(DegenerateInputError):
            hjorth(np.arange(50, dtype=float))

    def test_sine_mobility(self):
        fs, f = 100.0, 5.0
        t = np.arange(int(10 * fs)) / fs
        _, mobility, _ = hjorth(np.sin(2 * np.pi * f * t))
        assert mobility == pytest.approx(2 * np.pi * f / fs, rel=0.02)

    def test_white_noise_matches_oracle(self):
        rng = np.random.default_rng(6)
        x = rng.normal(size=500)
        mine = hjorth(x)
        ref = oracles.hjorth_reference(list(x))
        for a, b in zip(mine, ref):
            assert a == pytest.approx(b, abs=1e-12)
        assert mine[2] > 1.0


class TestSpectralEntropy:
    def test_pure_tone_near_zero(self):
        fs, n = 128.0, 1024
        t = np.arange(n) / fs
        x = np.sin(2 * np.pi * 8.0 * t)  # exactly bin-aligned
        assert spectral_entropy(x, fs) == pytest.approx(0.0, abs=0.05)

    def test_white_noise_high(self):
        rng = np.random.default_rng(7)
        assert spectral_entropy(rng.normal(size=1024), 100.0) > 0.9

    def test_two_tone_closed_form(self):
        fs, n = 128.0, 256
        t = np.arange(n) / fs
        x = np.sin(2 * np.pi * 8.0 * t) + np.sin(2 * np.pi * 24.0 * t)
        n_bins = n // 2
        assert spectral_entropy(x, fs) == pytest.approx(
            math.log2(2) / math.log2(n_bins), abs=1e-9)

    def test_all_zero(self):
        assert spectral_entropy(np.zeros(64), 100.0) == 0.0


class TestPermutationEntropy:
    def test_monotone_is_zero(self):
        assert permutation_entropy(np.arange(100.0)) == 0.0

    def test_iid_uniform_near_one(self):
        rng = np.random.default_rng(8)
        assert permutation_entropy(rng.uniform(size=10000), m=3) > 0.99

    def test_alternation_closed_form(self):
        x = np.array([0.0, 1.0] * 50)
        assert permutation_entropy(x, m=3) == pytest.approx(
            math.log2(2) / math.log2(6), abs=1e-12)


class TestInvariances:
    funcs = {
        "petrosian": lambda x: petrosian_fd(x),
        "higuchi": lambda x: higuchi_fd(x, 8),
        "katz": lambda x: katz_fd(x),
        "dfa": lambda x: dfa_alpha(x),
        "mobility": lambda x: hjorth(x)[1],
        "complexity": lambda x: hjorth(x)[2],
        "spectral": lambda x: spectral_entropy(x, 100.0),
        "permutation": lambda x: permutation_entropy(x),
    }

    def test_offset_invariance(self):
        rng = np.random.default_rng(9)
        x = rng.normal(size=256)
        for name, f in self.funcs.items():
            assert f(x + 11.5) == pytest.approx(f(x), abs=1e-6), name

    def test_scale_invariance_where_claimed(self):
        rng = np.random.default_rng(10)
        x = rng.normal(size=256)
        for name in ("mobility", "complexity", "permutation", "petrosian"):
            f = self.funcs[name]
            assert f(3.7 * x) == pytest.approx(f(x), abs=1e-9), name


class TestExtractEdaFeatures:
    def test_constant_window(self):
        win = EdaWindow(0, np.full(100, 3.0))
        feats = extract_eda_features(win, 100.0)
        assert feats.hjorth_degenerate
        assert feats["Signal Mean"] == 3.0
        assert feats["Signal Standard Deviation"] == 0.0
        assert feats["Signal Range"] == 0.0
        assert feats["Velocity Mean"] == 0.0
        assert math.isnan(feats["Hjorth Mobility"])

    def test_linear_ramp(self):
        fs = 100.0
        win = EdaWindow(0, np.linspace(0, 1, int(fs), endpoint=False))
        feats = extract_eda_features(win, fs)
        assert feats["Signal Mean"] == pytest.approx(0.5, abs=0.01)
        assert feats["Signal Range"] == pytest.approx(0.99, abs=0.02)
        assert feats["Velocity Mean"] == pytest.approx(1.0, rel=0.02)

    def test_schema_fixed_order(self):
        rng = np.random.default_rng(11)
        win = EdaWindow(0, rng.normal(size=100))
        feats = extract_eda_features(win, 100.0)
        assert tuple(feats.values) == EDA_FEATURE_NAMES
        assert len(EDA_FEATURE_NAMES) == 15

    def test_std_squared_equals_activity(self):
        rng = np.random.default_rng(12)
        win = EdaWindow(0, rng.normal(size=100))
        feats = extract_eda_features(win, 100.0)
        assert feats["Signal Standard Deviation"] ** 2 == pytest.approx(
            feats["Hjorth Activity"], abs=1e-12)
        assert feats["Velocity Standard Deviation"] ** 2 == pytest.approx(
            feats["Variance of Rate of Change"], abs=1e-12)

    def test_scr_bump_matches_full_oracle(self):
        fs = 100.0
        t = np.arange(int(fs)) / fs
        bump = (1 - np.exp(-t / 0.2)) * np.exp(-t / 0.5)
        rng = np.random.default_rng(13)
        window = 2.0 + bump + 0.01 * rng.normal(size=t.size)
        feats = extract_eda_features(EdaWindow(0, window), fs)
        ref = oracles.eda_reference(list(window), fs)
        for name in EDA_FEATURE_NAMES:
            assert feats[name] == pytest.approx(ref[name], abs=1e-9), name

    def test_random_windows_match_oracle(self):
        rng = np.random.default_rng(14)
        for trial in range(100):
            base = rng.uniform(1, 10)
            window = base + 0.1 * np.cumsum(rng.normal(size=100)) / 10 \
                + 0.02 * rng.normal(size=100)
            feats = extract_eda_features(EdaWindow(0, window), 100.0)
            ref = oracles.eda_reference(list(window), 100.0)
            for name in EDA_FEATURE_NAMES:
                assert feats[name] == pytest.approx(ref[name], abs=1e-9), name


class TestScrCount:
    def test_counts_noiseless_events(self):
        spec = make_eda_spec(seed=21, duration_s=60.0, n_scrs=5, noise_sigma=0.0)
        rec = synth_eda_session(spec)
        _, phasic = tonic_phasic_split(rec)
        assert scr_count(phasic) == 5

    def test_zero_events_quiet(self):
        spec = make_eda_spec(seed=22, duration_s=30.0, n_scrs=0,
                             noise_sigma=0.002)
        rec = synth_eda_session(spec)
        _, phasic = tonic_phasic_split(rec)
        rms = float(np.sqrt(np.mean(phasic.samples ** 2)))
        assert rms < 2 * 0.002
