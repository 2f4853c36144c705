"""Electrodermal-activity processing: tonic/phasic split, windowing, and the
per-window feature set (moments, fractal dimensions, DFA, Hjorth parameters,
spectral and permutation entropy).

Conventions: variances are population variances (divide by n) so that the
standard-deviation/activity identity holds exactly, and every complexity
measure is computed on the window as-is, without detrending beyond what its
own definition requires.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateInputError,
    InvalidArgumentError,
    InvalidChannelError,
    InvalidInputError,
)
from .signal_core import Channel, Recording, butterworth_lowpass, derivative

EDA_FEATURE_NAMES: tuple[str, ...] = (
    "Signal Mean",
    "Signal Standard Deviation",
    "Signal Range",
    "Velocity Mean",
    "Velocity Standard Deviation",
    "Petrosian Fractal Dimension",
    "Higuchi Fractal Dimension",
    "DFA",
    "Katz Fractal Dimension",
    "Hjorth Activity",
    "Hjorth Mobility",
    "Hjorth Complexity",
    "Variance of Rate of Change",
    "Spectral Entropy",
    "Permutation Entropy",
)

#: preprocessing low-pass cutoff for conductance signals
DEFAULT_EDA_CUTOFF_HZ = 1.0
#: cutoff separating the slow tonic level from phasic responses; low enough
#: that a first-order split keeps multi-second response decays out of tonic
DEFAULT_TONIC_CUTOFF_HZ = 0.025
#: conductance rise that counts as a skin conductance response
SCR_THRESHOLD_US = 0.01


@dataclass(frozen=True)
class EdaWindow:
    start_index: int
    samples: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.samples, dtype=float).copy()
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)


@dataclass(frozen=True)
class EdaFeatures:
    values: dict[str, float]
    hjorth_degenerate: bool = False

    def __getitem__(self, name: str) -> float:
        return self.values[name]


def tonic_phasic_split(
    rec: Recording,
    cutoff_hz: float = DEFAULT_EDA_CUTOFF_HZ,
    tonic_cutoff_hz: float = DEFAULT_TONIC_CUTOFF_HZ,
) -> tuple[Recording, Recording]:
    """Split a conductance recording into tonic and phasic components.

    The input is first low-passed at ``cutoff_hz`` (first-order) to strip
    measurement noise; the tonic component is a much slower first-order
    low-pass at ``tonic_cutoff_hz``; the phasic component is their exact
    difference, so ``tonic + phasic`` reconstructs the filtered signal.
    """
    if rec.channel is not Channel.EDA:
        raise InvalidChannelError(
            f"tonic/phasic split expects an EDA recording, got {rec.channel}"
        )
    if not (0 < tonic_cutoff_hz < cutoff_hz):
        raise InvalidArgumentError(
            "tonic_cutoff_hz must lie strictly between 0 and cutoff_hz"
        )
    filtered = butterworth_lowpass(rec, order=1, cutoff_hz=cutoff_hz)
    tonic = butterworth_lowpass(filtered, order=1, cutoff_hz=tonic_cutoff_hz)
    phasic = filtered.replace_samples(filtered.samples - tonic.samples)
    return tonic, phasic


def window_series(rec: Recording, window_s: float = 1.0) -> list[EdaWindow]:
    """Cut the recording into consecutive non-overlapping windows.

    The trailing partial window is dropped; a recording shorter than one
    window yields an empty list.
    """
    if not (window_s > 0):
        raise InvalidArgumentError("window_s must be positive")
    size = int(round(rec.sample_rate_hz * window_s))
    if size < 2:
        raise InvalidArgumentError("window too short for this sample rate")
    x = rec.samples
    return [
        EdaWindow(start_index=i, samples=x[i:i + size])
        for i in range(0, x.size - size + 1, size)
    ]


def petrosian_fd(x) -> float:
    """Petrosian fractal dimension from sign changes of the first difference."""
    arr = np.asarray(x, dtype=float)
    n = arr.size
    if n < 3:
        raise InvalidInputError("petrosian_fd requires at least 3 samples")
    d = np.diff(arr)
    n_delta = int(np.count_nonzero(d[:-1] * d[1:] < 0))
    log_n = math.log10(n)
    return log_n / (log_n + math.log10(n / (n + 0.4 * n_delta)))


def higuchi_fd(x, kmax: int = 10) -> float:
    """Higuchi fractal dimension via mean normalized curve lengths.

    For each lag ``k`` the curve length is averaged over the ``k`` possible
    offsets; the dimension is minus the slope of log L(k) against log k.
    """
    arr = np.asarray(x, dtype=float)
    n = arr.size
    if kmax < 1:
        raise InvalidArgumentError("kmax must be positive")
    if n < 2 * kmax:
        raise InvalidInputError(f"higuchi_fd needs at least {2 * kmax} samples")
    lengths = np.empty(kmax)
    for k in range(1, kmax + 1):
        total = 0.0
        for m in range(k):
            idx = np.arange(m, n, k)
            if idx.size < 2:
                continue
            dist = np.abs(np.diff(arr[idx])).sum()
            num_intervals = idx.size - 1
            total += dist * (n - 1) / (num_intervals * k) / k
        lengths[k - 1] = total / k
    if np.any(lengths <= 0):
        return 1.0
    k_axis = np.log(np.arange(1, kmax + 1))
    slope = np.polyfit(k_axis, np.log(lengths), 1)[0]
    return float(-slope)


def katz_fd(x) -> float:
    """Katz fractal dimension on a unit-step abscissa."""
    arr = np.asarray(x, dtype=float)
    if arr.size < 2:
        raise InvalidInputError("katz_fd requires at least 2 samples")
    n_steps = arr.size - 1
    path = float(np.sqrt(1.0 + np.diff(arr) ** 2).sum())
    idx = np.arange(arr.size, dtype=float)
    dist = float(np.sqrt(idx ** 2 + (arr - arr[0]) ** 2).max())
    if path == 0.0 or dist == 0.0:
        return 1.0
    log_n = math.log10(n_steps)
    denom = log_n + math.log10(dist / path)
    if denom == 0.0:
        return 1.0
    return log_n / denom


def default_dfa_scales(n: int, num: int = 10) -> list[int]:
    """Geometric ladder of box sizes from 4 up to n // 4."""
    if n < 16:
        raise InvalidInputError("signal too short for DFA scales")
    raw = np.geomspace(4, n // 4, num=num)
    return sorted({int(round(s)) for s in raw})


def dfa_alpha(x, scales: list[int] | None = None) -> float:
    """Detrended fluctuation analysis scaling exponent.

    Integrates the mean-centered series; in non-overlapping boxes of each
    scale a linear trend is removed; alpha is the slope of log RMS
    fluctuation against log scale.
    """
    arr = np.asarray(x, dtype=float)
    n = arr.size
    if scales is None:
        scales = default_dfa_scales(n)
    scales = sorted(int(s) for s in scales)
    if len(scales) < 4:
        raise InvalidInputError("DFA requires at least 4 scales")
    if any(s < 2 for s in scales):
        raise InvalidArgumentError("DFA scales must be at least 2")
    if n < 4 * max(scales):
        raise InvalidInputError(
            f"signal of length {n} too short for max scale {max(scales)}"
        )
    profile = np.cumsum(arr - arr.mean())
    flucts = np.empty(len(scales))
    for si, s in enumerate(scales):
        n_boxes = n // s
        boxes = profile[: n_boxes * s].reshape(n_boxes, s)
        t = np.arange(s, dtype=float)
        design = np.vstack([t, np.ones(s)]).T
        coef, *_ = np.linalg.lstsq(design, boxes.T, rcond=None)
        resid = boxes.T - design @ coef
        flucts[si] = np.sqrt(np.mean(resid ** 2))
    if np.any(flucts <= 0):
        return 0.0
    slope = np.polyfit(np.log(scales), np.log(flucts), 1)[0]
    return float(slope)


def hjorth(x) -> tuple[float, float, float]:
    """Hjorth activity, mobility, and complexity.

    Activity is the population variance; mobility is the RMS ratio of the
    first difference to the signal; complexity is the mobility of the first
    difference over the mobility of the signal. Zero-variance input (of the
    signal or of its first difference) leaves mobility/complexity undefined.
    """
    arr = np.asarray(x, dtype=float)
    if arr.size < 3:
        raise InvalidInputError("hjorth requires at least 3 samples")
    var0 = float(np.var(arr))
    if var0 == 0.0:
        raise DegenerateInputError("constant signal: mobility/complexity undefined")
    d1 = np.diff(arr)
    var1 = float(np.var(d1))
    mobility = math.sqrt(var1 / var0)
    if var1 == 0.0:
        raise DegenerateInputError(
            "first difference is constant: complexity undefined"
        )
    d2 = np.diff(d1)
    var2 = float(np.var(d2))
    mobility_d1 = math.sqrt(var2 / var1)
    return var0, mobility, mobility_d1 / mobility


def spectral_entropy(x, fs: float) -> float:
    """Normalized Shannon entropy of the periodogram, DC excluded.

    Returns a value in [0, 1]; an all-zero (or constant) signal maps to 0.
    """
    arr = np.asarray(x, dtype=float)
    if arr.size < 8:
        raise InvalidInputError("spectral_entropy requires at least 8 samples")
    spectrum = np.abs(np.fft.rfft(arr)) ** 2
    power = spectrum[1:]
    total = power.sum()
    if total <= 0.0:
        return 0.0
    p = power / total
    p = p[p > 0]
    entropy = float(-(p * np.log2(p)).sum())
    return entropy / math.log2(power.size)


def permutation_entropy(x, m: int = 3, tau: int = 1) -> float:
    """Normalized permutation entropy of ordinal patterns.

    Embedding vectors of length ``m`` with delay ``tau`` are ranked (ties
    broken by order of occurrence); the Shannon entropy of the pattern
    distribution is normalized by log2(m!).
    """
    arr = np.asarray(x, dtype=float)
    if m < 2:
        raise InvalidArgumentError("order m must be at least 2")
    if tau < 1:
        raise InvalidArgumentError("delay tau must be at least 1")
    n_vectors = arr.size - (m - 1) * tau
    if n_vectors < 1:
        raise InvalidInputError("sequence too short for this embedding")
    idx = np.arange(n_vectors)[:, None] + np.arange(m)[None, :] * tau
    patterns = np.argsort(arr[idx], axis=1, kind="stable")
    _, counts = np.unique(patterns, axis=0, return_counts=True)
    p = counts / n_vectors
    entropy = float(-(p * np.log2(p)).sum())
    return entropy / math.log2(math.factorial(m))


def extract_eda_features(win: EdaWindow, fs: float,
                         higuchi_kmax: int = 10) -> EdaFeatures:
    """Compute the full 15-feature set for one window.

    Constant windows produce their defined degenerate values (zero entropy,
    unit fractal dimensions, zero velocity statistics); Hjorth mobility and
    complexity are then emitted as NaN and flagged via
    ``hjorth_degenerate``.
    """
    x = np.asarray(win.samples, dtype=float)
    if x.size < max(8, 2 * higuchi_kmax):
        raise InvalidInputError(
            f"window of {x.size} samples too short for the feature set"
        )
    rec = Recording(fs, x, Channel.EDA)
    v = derivative(rec, 1).samples

    degenerate = False
    try:
        activity, mobility, complexity = hjorth(x)
    except DegenerateInputError:
        activity = float(np.var(x))
        mobility = math.nan
        complexity = math.nan
        degenerate = True

    if np.ptp(x) == 0.0:
        hfd = 1.0
        alpha = 0.0
    else:
        hfd = higuchi_fd(x, kmax=higuchi_kmax)
        alpha = dfa_alpha(x)

    values = {
        "Signal Mean": float(x.mean()),
        "Signal Standard Deviation": float(x.std()),
        "Signal Range": float(x.max() - x.min()),
        "Velocity Mean": float(v.mean()),
        "Velocity Standard Deviation": float(v.std()),
        "Petrosian Fractal Dimension": petrosian_fd(x),
        "Higuchi Fractal Dimension": hfd,
        "DFA": alpha,
        "Katz Fractal Dimension": katz_fd(x),
        "Hjorth Activity": activity,
        "Hjorth Mobility": mobility,
        "Hjorth Complexity": complexity,
        "Variance of Rate of Change": float(np.var(v)),
        "Spectral Entropy": spectral_entropy(x, fs),
        "Permutation Entropy": permutation_entropy(x),
    }
    return EdaFeatures(values=values, hjorth_degenerate=degenerate)


def scr_count(phasic: Recording, threshold_us: float = SCR_THRESHOLD_US) -> int:
    """Count skin conductance responses: local maxima of the phasic signal
    exceeding ``threshold_us``."""
    x = phasic.samples
    if x.size < 3:
        return 0
    interior = x[1:-1]
    is_max = (interior > x[:-2]) & (interior >= x[2:]) & (interior > threshold_us)
    # leftmost sample of equal-height pairs counts once
    return int(np.count_nonzero(is_max))
