import numpy as np
import pytest

from blinkforge import (
    Channel,
    Recording,
    SearchParams,
    blink_prefilter,
    detect_peaks,
    find_nearby_minimum,
    make_blink_spec,
    savitzky_golay,
    butterworth_lowpass,
    segment_peak,
    synth_blink_session,
)
from blinkforge.blink_detect import PeakCandidate
from blinkforge.errors import InvalidArgumentError, InvalidInputError

import oracles
from conftest import gaussian_pulse, triangle_pulse, segment_from_pulse


def smooth_random_rec(seed, fs=250.0, duration_s=8.0, cutoff=3.0):
    rng = np.random.default_rng(seed)
    raw = rng.normal(size=int(duration_s * fs))
    rec = Recording(fs, raw, Channel.EOG)
    return butterworth_lowpass(rec, 4, cutoff)


class TestDetectPeaks:
    def test_single_gaussian(self):
        rec = gaussian_pulse()
        cands = detect_peaks(rec)
        assert len(cands) == 1
        assert abs(cands[0].center_index - int(2.0 * rec.sample_rate_hz)) <= 1
        assert cands[0].height == pytest.approx(1.0, abs=1e-6)

    def test_constant_signal(self):
        rec = Recording(100.0, np.full(200, 1.0), Channel.EOG)
        assert detect_peaks(rec) == []

    def test_two_pulses_third_bump_excluded(self):
        fs = 100.0
        t = np.arange(int(6 * fs)) / fs
        y = (np.exp(-0.5 * ((t - 1.5) / 0.05) ** 2)
             + np.exp(-0.5 * ((t - 3.5) / 0.05) ** 2)
             + 0.05 * np.exp(-0.5 * ((t - 5.0) / 0.05) ** 2))
        cands = detect_peaks(Recording(fs, y, Channel.EOG))
        assert len(cands) == 2
        centers = sorted(c.center_index for c in cands)
        assert abs(centers[0] - 150) <= 1 and abs(centers[1] - 350) <= 1

    def test_too_short_rejected(self):
        with pytest.raises(InvalidInputError):
            detect_peaks(Recording(100.0, [0.0, 1.0], Channel.EOG))

    def test_offset_invariance(self):
        rec = smooth_random_rec(5)
        shifted = rec.replace_samples(rec.samples + 3.7)
        a = detect_peaks(rec)
        b = detect_peaks(shifted)
        assert [c.center_index for c in a] == [c.center_index for c in b]
        assert np.allclose([c.prominence for c in a],
                           [c.prominence for c in b], atol=1e-9)

    def test_count_monotone_in_prominence(self):
        rec = smooth_random_rec(6)
        counts = []
        for pmin in (0.05, 0.1, 0.3, 0.6, 1.0):
            counts.append(len(detect_peaks(
                rec, SearchParams(prominence_min=pmin))))
        assert counts == sorted(counts, reverse=True)

    def test_matches_brute_force_oracle(self):
        for seed in range(25):
            rec = smooth_random_rec(seed)
            params = SearchParams(prominence_min=0.15, width_min_s=0.04)
            mine = detect_peaks(rec, params)
            ref = oracles.brute_force_peaks(
                rec.samples, rec.sample_rate_hz, 0.15, 0.04)
            assert [c.center_index for c in mine] == [r["center"] for r in ref]
            assert [c.prominence for c in mine] == [r["prominence"] for r in ref]
            assert [c.width_s for c in mine] == [r["width_s"] for r in ref]

    def test_matches_scipy_on_smooth_signals(self):
        from scipy.signal import find_peaks

        for seed in range(10):
            rec = smooth_random_rec(seed + 100)
            params = SearchParams(prominence_min=0.2, width_min_s=0.04)
            mine = detect_peaks(rec, params)
            w = 0.04 * rec.sample_rate_hz
            idx, props = find_peaks(rec.samples, prominence=0.2,
                                    width=w, rel_height=0.5)
            assert [c.center_index for c in mine] == list(idx)
            assert np.allclose([c.prominence for c in mine],
                               props["prominences"], atol=1e-9)


class TestBlinkPrefilter:
    def make(self, width_s, height):
        return PeakCandidate(center_index=10, height=height, prominence=0.5,
                             width_s=width_s)

    def test_retains_typical_blink(self):
        assert blink_prefilter([self.make(0.25, 0.5)]) != []

    def test_removes_wide(self):
        assert blink_prefilter([self.make(0.8, 0.5)]) == []

    def test_removes_small(self):
        assert blink_prefilter([self.make(0.25, 0.04)]) == []

    def test_stable_order(self):
        cands = [self.make(0.1, 0.5), self.make(0.8, 0.5), self.make(0.2, 0.3)]
        kept = blink_prefilter(cands)
        assert kept == [cands[0], cands[2]]


class TestFindNearbyMinimum:
    def test_v_shape_right(self):
        assert find_nearby_minimum([3, 2, 1, 2, 3], 0, 1, 10) == 2

    def test_v_shape_both_directions_from_apex(self):
        x = [0, 1, 2, 3, 2, 1, 0.5, 1, 2]
        left = find_nearby_minimum(x, 3, -1, 10)
        right = find_nearby_minimum(x, 3, 1, 10)
        assert left == 0
        assert right == 6

    def test_increasing_returns_start(self):
        assert find_nearby_minimum([1, 2, 3, 4, 5], 0, 1, 10) == 0

    def test_out_of_bounds(self):
        with pytest.raises(InvalidArgumentError):
            find_nearby_minimum([1, 2, 3], 5, 1, 10)

    def test_zero_window(self):
        with pytest.raises(InvalidArgumentError):
            find_nearby_minimum([1, 2, 3], 0, 0, 10)

    def test_local_minimum_property_on_smooth_signals(self):
        mismatches = 0
        total = 0
        for seed in range(250):
            rec = smooth_random_rec(seed, fs=200.0, duration_s=5.0)
            x = rec.samples
            peaks = detect_peaks(rec, SearchParams(prominence_min=0.2))
            if not peaks:
                continue
            p = peaks[len(peaks) // 2].center_index
            stride = max(1, int(round(0.005 * rec.sample_rate_hz)))
            budget = int(round(0.5 * rec.sample_rate_hz))
            for direction in (+1, -1):
                idx = find_nearby_minimum(x, p, direction * stride, budget)
                total += 1
                if 0 < idx < x.size - 1:
                    assert x[idx - 1] >= x[idx] <= x[idx + 1]
                ref = oracles.linear_scan_minimum(x, p, direction, budget)
                if ref != idx:
                    mismatches += 1
        assert total >= 400
        assert mismatches / total < 0.05


class TestSegmentPeak:
    def test_triangle_feet(self):
        rec, apex = triangle_pulse()
        seg = segment_from_pulse(rec)
        half = int(0.15 * rec.sample_rate_hz)
        assert abs(seg.left_base_index - (apex - half)) <= 1
        assert abs(seg.right_base_index - (apex + half)) <= 1
        assert not seg.edge_truncated

    def test_pulse_at_start_truncates(self):
        fs = 100.0
        t = np.arange(int(1.0 * fs)) / fs
        y = np.exp(-0.5 * ((t - 0.08) / 0.05) ** 2)
        rec = Recording(fs, y, Channel.EOG)
        cands = detect_peaks(rec, SearchParams(width_min_s=0.01))
        assert cands
        seg = segment_peak(rec, cands[0])
        assert seg.left_base_index == 0
        assert seg.edge_truncated

    def test_asymmetric_pulse_bases(self):
        fs = 500.0
        t = np.arange(int(3 * fs)) / fs
        rise, decay = 0.06, 0.2
        y = np.zeros_like(t)
        rising = (t >= 1.0 - rise) & (t <= 1.0)
        y[rising] = 0.5 * (1 + np.cos(np.pi * (t[rising] - 1.0) / rise))
        falling = t > 1.0
        y[falling] = np.exp(-(t[falling] - 1.0) / decay)
        rec = Recording(fs, y, Channel.EOG)
        seg = segment_from_pulse(rec)
        c = seg.candidate.center_index
        assert (seg.right_base_index - c) > (c - seg.left_base_index)
        # oracle: direct scan for the minimum within 0.5 s on each side
        left_ref = oracles.linear_scan_minimum(rec.samples, c, -1, int(0.5 * fs))
        assert abs(seg.left_base_index - left_ref) <= 2

    def test_center_is_max_of_slice(self):
        for seed in range(10):
            rec = smooth_random_rec(seed + 40)
            params = SearchParams(prominence_min=0.2)
            for cand in detect_peaks(rec, params):
                seg = segment_peak(rec, cand, params)
                assert seg.slice[seg.center_offset] == seg.slice.max()
                assert seg.slice[seg.center_offset] >= seg.slice[0]
                assert seg.slice[seg.center_offset] >= seg.slice[-1]


class TestPipelineReplay:
    def test_detect_prefilter_segment_deterministic(self):
        spec = make_blink_spec(seed=9, duration_s=30.0, noise_sigma=0.01)

        def run():
            rec, _ = synth_blink_session(spec)
            filt = savitzky_golay(butterworth_lowpass(rec, 5, 10.0), 15, 3)
            params = SearchParams()
            out = []
            for cand in blink_prefilter(detect_peaks(filt, params), params):
                seg = segment_peak(filt, cand, params)
                out.append((cand.center_index, cand.prominence, cand.width_s,
                            seg.left_base_index, seg.right_base_index))
            return out

        assert run() == run()
