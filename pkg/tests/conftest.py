"""Shared fixtures and synthetic-shape helpers."""
from __future__ import annotations

import numpy as np
import pytest

from blinkforge import (
    Channel,
    Recording,
    SearchParams,
    blink_prefilter,
    butterworth_lowpass,
    detect_peaks,
    savitzky_golay,
    segment_peak,
)
from blinkforge.blink_detect import PeakCandidate, PeakSegment


def gaussian_pulse(fs=100.0, duration_s=4.0, center_s=2.0, sigma_s=0.05,
                   height=1.0, baseline=0.0):
    t = np.arange(int(duration_s * fs)) / fs
    return Recording(fs, baseline + height * np.exp(
        -0.5 * ((t - center_s) / sigma_s) ** 2), Channel.EOG)


def triangle_pulse(fs=1000.0, width_s=0.3, height=1.0, pad_s=0.5):
    """Symmetric triangle on a flat zero baseline; returns (rec, apex index)."""
    n_pad = int(pad_s * fs)
    half = int(width_s * fs / 2)
    rise = np.linspace(0.0, height, half + 1)
    fall = np.linspace(height, 0.0, half + 1)[1:]
    y = np.concatenate([np.zeros(n_pad), rise, fall, np.zeros(n_pad)])
    apex = n_pad + half
    return Recording(fs, y, Channel.EOG), apex


def blink_shaped_pulse(fs=1000.0, rise_s=0.12, fall_s=0.2, pad_s=0.3):
    """Piecewise-cubic smoothstep up then longer smoothstep down.

    Velocity extrema sit exactly at the phase midpoints: max v = 1.5/rise_s
    at rise_s/2 before the peak, min v = -1.5/fall_s at fall_s/2 after.
    """
    n_pad = int(pad_s * fs)
    tr = np.linspace(0.0, 1.0, int(rise_s * fs) + 1)
    up = 3 * tr ** 2 - 2 * tr ** 3
    tf = np.linspace(0.0, 1.0, int(fall_s * fs) + 1)[1:]
    down = 1.0 - (3 * tf ** 2 - 2 * tf ** 3)
    y = np.concatenate([np.zeros(n_pad), up, down, np.zeros(n_pad)])
    apex = n_pad + int(rise_s * fs)
    return Recording(fs, y, Channel.EOG), apex


def segment_from_pulse(rec, params=None) -> PeakSegment:
    params = params or SearchParams()
    cands = blink_prefilter(detect_peaks(rec, params), params)
    assert len(cands) == 1, f"expected a single pulse, found {len(cands)}"
    return segment_peak(rec, cands[0], params)


def random_segments(n, seed=0, fs=250.0):
    """Detected segments from noisy multi-blink sessions, for oracle sweeps."""
    from blinkforge import make_blink_spec, synth_blink_session

    segments = []
    k = 0
    while len(segments) < n:
        spec = make_blink_spec(seed=seed + 1000 * k, duration_s=20.0,
                               sample_rate_hz=fs, noise_sigma=0.004)
        rec, _ = synth_blink_session(spec)
        filt = savitzky_golay(butterworth_lowpass(rec, 5, 10.0),
                              _odd(int(0.15 * fs)), 3)
        params = SearchParams()
        for cand in blink_prefilter(detect_peaks(filt, params), params):
            seg = segment_peak(filt, cand, params)
            if not seg.edge_truncated and seg.slice.size >= 5:
                segments.append(seg)
        k += 1
    return segments[:n]


def _odd(n: int) -> int:
    return n if n % 2 == 1 else n + 1


@pytest.fixture(scope="session")
def oracle_segments():
    return random_segments(100, seed=11)
