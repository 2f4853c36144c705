"""Uniform time-series container, digital filters, derivatives, normalization.

All operations are pure: they never mutate their inputs and return new
``Recording`` objects, so recordings can be processed concurrently without
locking.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import signal as _sps

from .errors import InvalidArgumentError, InvalidInputError


class Channel(enum.Enum):
    EOG = "EOG"
    EDA = "EDA"


@dataclass(frozen=True)
class Recording:
    """A uniformly sampled signal.

    Parameters
    ----------
    sample_rate_hz : float
        Sampling rate, must be positive.
    samples : array-like of float
        Sample values (volts for EOG, microsiemens for EDA), length >= 2,
        all finite.
    channel : Channel
        Which modality the samples represent.
    """

    sample_rate_hz: float
    samples: np.ndarray = field(repr=False)
    channel: Channel = Channel.EOG

    def __post_init__(self):
        if not (self.sample_rate_hz > 0):
            raise InvalidArgumentError(
                f"sample_rate_hz must be positive, got {self.sample_rate_hz}"
            )
        arr = np.asarray(self.samples, dtype=float)
        if arr.ndim != 1:
            raise InvalidInputError(f"samples must be 1-D, got shape {arr.shape}")
        if arr.size < 2:
            raise InvalidInputError(f"need at least 2 samples, got {arr.size}")
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("samples contain non-finite values")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "samples", arr)
        if not isinstance(self.channel, Channel):
            object.__setattr__(self, "channel", Channel(self.channel))

    @property
    def n_samples(self) -> int:
        return int(self.samples.size)

    @property
    def duration_s(self) -> float:
        return (self.samples.size - 1) / self.sample_rate_hz

    def times(self) -> np.ndarray:
        """Sample times in seconds, starting at 0."""
        return np.arange(self.samples.size) / self.sample_rate_hz

    def replace_samples(self, samples: np.ndarray) -> "Recording":
        return Recording(self.sample_rate_hz, samples, self.channel)


def butterworth_lowpass(
    rec: Recording,
    order: int,
    cutoff_hz: float,
    zero_phase: bool = True,
) -> Recording:
    """Apply a digital Butterworth low-pass filter.

    The filter is designed in second-order sections for the recording's
    sample rate. With ``zero_phase`` (the default) it runs forward and
    backward so peak positions are not shifted; the effective magnitude
    response is then the square of the single-pass response. Edges are
    padded by odd reflection about the end values to suppress startup
    transients. Single-pass mode initializes the filter state to the
    step-response steady state of the first sample.

    Parameters
    ----------
    rec : Recording
    order : int
        Filter order, 1..8.
    cutoff_hz : float
        -3 dB cutoff; must lie strictly below the Nyquist frequency.
    zero_phase : bool
        Forward-backward application (default) versus a single causal pass.
    """
    if not (isinstance(order, (int, np.integer)) and 1 <= order <= 8):
        raise InvalidArgumentError(f"order must be an integer in 1..8, got {order!r}")
    nyquist = rec.sample_rate_hz / 2.0
    if not (0 < cutoff_hz < nyquist):
        raise InvalidArgumentError(
            f"cutoff_hz must lie in (0, {nyquist}) for fs={rec.sample_rate_hz}, "
            f"got {cutoff_hz}"
        )
    sos = _sps.butter(int(order), cutoff_hz, btype="low", fs=rec.sample_rate_hz, output="sos")
    x = rec.samples
    if zero_phase:
        y = _sps.sosfiltfilt(sos, x, padtype="odd")
    else:
        zi = _sps.sosfilt_zi(sos) * x[0]
        y, _ = _sps.sosfilt(sos, x, zi=zi)
    return rec.replace_samples(y)


def _savgol_center_weights(window: int, polyorder: int) -> np.ndarray:
    # weights evaluating the least-squares fit at the window center
    pos = np.arange(window, dtype=float)
    vand = np.vander(pos, polyorder + 1, increasing=True)
    return vand[window // 2] @ np.linalg.pinv(vand)


def _savgol_edge_value(window_vals: np.ndarray, pos: int, polyorder: int) -> float:
    # least-squares polynomial over the truncated window, evaluated at pos
    t = np.arange(window_vals.size, dtype=float)
    vand = np.vander(t, polyorder + 1, increasing=True)
    coef, *_ = np.linalg.lstsq(vand, window_vals, rcond=None)
    return float(np.polynomial.polynomial.polyval(float(pos), coef))


def savitzky_golay(rec: Recording, window_samples: int, polyorder: int) -> Recording:
    """Savitzky-Golay smoothing.

    Each output sample is the value, at the window center, of the
    least-squares polynomial of degree ``polyorder`` fitted over the sliding
    window. Near the edges the window is truncated to the available samples
    and the fit is evaluated at the output position, so polynomials of
    degree <= ``polyorder`` are reproduced everywhere.
    """
    n = rec.n_samples
    if window_samples % 2 == 0 or window_samples < 1:
        raise InvalidArgumentError(
            f"window_samples must be odd and positive, got {window_samples}"
        )
    if window_samples > n:
        raise InvalidArgumentError(
            f"window_samples={window_samples} exceeds signal length {n}"
        )
    if not (0 <= polyorder < window_samples):
        raise InvalidArgumentError(
            f"polyorder must satisfy 0 <= polyorder < window_samples, got {polyorder}"
        )
    x = rec.samples
    half = window_samples // 2
    out = np.empty(n)
    weights = _savgol_center_weights(window_samples, polyorder)
    if n >= window_samples:
        windows = np.lib.stride_tricks.sliding_window_view(x, window_samples)
        out[half : n - half] = windows @ weights
    for i in range(min(half, n)):
        out[i] = _savgol_edge_value(x[: i + half + 1], i, polyorder)
    for i in range(max(n - half, 0), n):
        lo = i - half
        out[i] = _savgol_edge_value(x[lo:], i - lo, polyorder)
    return rec.replace_samples(out)


def derivative(rec: Recording, n: int = 1) -> Recording:
    """Discrete time derivative (units: value/s for n=1, value/s^2 for n=2).

    Central differences on the interior, one-sided differences at the
    endpoints, scaled by the sample rate.
    """
    if n not in (1, 2):
        raise InvalidArgumentError(f"n must be 1 or 2, got {n}")
    x = rec.samples
    if x.size < 3:
        raise InvalidInputError("derivative requires at least 3 samples")
    fs = rec.sample_rate_hz
    if n == 1:
        y = np.gradient(x) * fs
    else:
        y = np.empty_like(x)
        y[1:-1] = (x[2:] - 2.0 * x[1:-1] + x[:-2]) * fs * fs
        y[0] = (x[2] - 2.0 * x[1] + x[0]) * fs * fs
        y[-1] = (x[-1] - 2.0 * x[-2] + x[-3]) * fs * fs
    return rec.replace_samples(y)


def minmax_normalize(values) -> np.ndarray:
    """Rescale to [0, 1] as (x - min) / (max - min); constant input -> zeros."""
    arr = np.asarray(values, dtype=float)
    if arr.size < 1:
        raise InvalidInputError("minmax_normalize requires at least 1 value")
    lo = arr.min()
    hi = arr.max()
    if hi == lo:
        return np.zeros_like(arr)
    return (arr - lo) / (hi - lo)


def analytic_butterworth_gain(freq_hz: float, cutoff_hz: float, order: int) -> float:
    """Magnitude of the ideal analog Butterworth low-pass at ``freq_hz``."""
    return 1.0 / np.sqrt(1.0 + (freq_hz / cutoff_hz) ** (2 * order))
