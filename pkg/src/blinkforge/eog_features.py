"""Per-blink feature extraction from a segmented EOG peak.

The catalog covers tent geometry (tangent-line intersection), phase
durations, slopes, signal/velocity/acceleration energies, and histogram
entropies. The closing phase spans left base to peak center, the opening
phase spans peak center to right base. In ``normalize`` mode the segment is
min-max rescaled first, which makes every emitted feature invariant to
positive scaling and constant offsets of the raw signal; ``Signal Height``
is only meaningful unnormalized and is emitted only in raw mode.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .blink_detect import PeakSegment
from .errors import DegenerateShapeError, InvalidInputError
from .signal_core import Recording, Channel, derivative, minmax_normalize

_trapz = getattr(np, "trapezoid", None) or np.trapz

#: Full feature catalog in emission order. ``Signal Height`` is skipped in
#: normalize mode; everything else is amplitude-independent there.
EOG_FEATURE_NAMES: tuple[str, ...] = (
    "Signal Height",
    "X-Axis Deviation",
    "Y-Axis Deviation",
    "Symmetry Ratio",
    "Closing Signal Range",
    "Opening Signal Range",
    "Closing Duration",
    "Closing Dynamics Ratio",
    "Blink Duration",
    "Closing Tent Duration",
    "Opening Tent Duration",
    "Closing Tent Duration by Proportion of Blink",
    "Opening Tent Duration by Proportion of Blink",
    "Blink Half-Close Duration",
    "Blink Full-Close Duration",
    "Full-Close Duration by Percentage of Blink",
    "Opening Acceleration to Peak Duration",
    "Velocity Recovery Duration",
    "Closing Tent Duration to Max Velocity",
    "Maximum Velocity to Peak Duration",
    "Slope of Closing Tent",
    "Slope of Opening Tent",
    "Slope at Closing Tent Maximum Acceleration",
    "Blink Phase Velocity Ratio",
    "Initial Blink Energy",
    "Closing Phase Energy",
    "Opening Phase Energy",
    "Closing Phase Slope Energy",
    "Closing Phase Velocity Energy",
    "Opening Phase Velocity Energy",
    "Signal Average",
    "Acceleration Standard Deviation",
    "Velocity Entropy",
    "Acceleration Entropy",
    "Signal Entropy",
    "Maximum Acceleration Velocity Ratio",
)

AMPLITUDE_INDEPENDENT_NAMES: tuple[str, ...] = tuple(
    n for n in EOG_FEATURE_NAMES if n != "Signal Height"
)

#: fraction of the segment's peak |velocity| below which the eye counts as
#: fully closed; relative so the rule survives normalization
FULL_CLOSE_VELOCITY_BAND = 0.05

#: fraction of the blink integrated for the early-energy feature
INITIAL_ENERGY_FRACTION = 0.05

ENTROPY_BINS = 10


@dataclass(frozen=True)
class TentGeometry:
    """Tangent-line triangle over a blink peak.

    The up tangent passes through the closing-phase point of maximum
    velocity with that velocity as slope; the down tangent mirrors it at the
    opening-phase velocity minimum. ``apex`` is their intersection.
    """

    up_tangent: tuple[float, float]
    down_tangent: tuple[float, float]
    apex: tuple[float, float]
    peak: tuple[float, float]


@dataclass(frozen=True)
class BlinkFeatures:
    values: dict[str, float]
    normalized: bool
    truncated: bool = False

    def __getitem__(self, name: str) -> float:
        return self.values[name]


def histogram_entropy(values, bins: int = ENTROPY_BINS) -> float:
    """Shannon entropy (bits) of the value histogram over [min, max].

    Empty bins contribute nothing; constant input has zero entropy.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        raise InvalidInputError("histogram_entropy requires at least 2 values")
    if bins < 1:
        raise InvalidInputError("bins must be positive")
    lo, hi = arr.min(), arr.max()
    if lo == hi:
        return 0.0
    counts, _ = np.histogram(arr, bins=bins, range=(lo, hi))
    p = counts[counts > 0] / arr.size
    return float(-(p * np.log2(p)).sum())


def _phase_argmax(values: np.ndarray, center: int) -> int:
    # argmax over the closing phase [0..center], ties toward the center
    seg = values[:center + 1]
    return center - int(np.argmax(seg[::-1]))


def _phase_argmin_opening(values: np.ndarray, center: int) -> int:
    # argmin over the opening phase [center..end], ties toward the center
    seg = values[center:]
    return center + int(np.argmin(seg))


def tent_geometry(seg: PeakSegment) -> TentGeometry:
    """Fit the up/down tangent lines of a blink and intersect them."""
    s = np.asarray(seg.slice, dtype=float)
    if s.size < 5:
        raise DegenerateShapeError("tent geometry needs at least 5 samples")
    c = seg.center_offset
    if not (0 < c < s.size - 1):
        raise DegenerateShapeError("peak center must be interior to the segment")
    if not (s[c] > s[0] and s[c] > s[-1]):
        raise DegenerateShapeError("peak center must rise above both bases")
    return _tent_from_arrays(s, _velocity(s, seg.sample_rate_hz), c,
                             1.0 / seg.sample_rate_hz)


def _velocity(s: np.ndarray, fs: float) -> np.ndarray:
    rec = Recording(fs, s, Channel.EOG)
    return derivative(rec, 1).samples


def _acceleration(s: np.ndarray, fs: float) -> np.ndarray:
    rec = Recording(fs, s, Channel.EOG)
    return derivative(rec, 2).samples


def _tent_from_arrays(s: np.ndarray, v: np.ndarray, c: int, dt: float) -> TentGeometry:
    i_up = _phase_argmax(v, c)
    i_down = _phase_argmin_opening(v, c)
    m_up = float(v[i_up])
    m_down = float(v[i_down])
    if not (m_up > 0 and m_down < 0):
        raise DegenerateShapeError(
            f"tangent slopes have wrong signs (up={m_up}, down={m_down})"
        )
    b_up = s[i_up] - m_up * (i_up * dt)
    b_down = s[i_down] - m_down * (i_down * dt)
    apex_t = (b_down - b_up) / (m_up - m_down)
    apex_v = m_up * apex_t + b_up
    return TentGeometry(
        up_tangent=(m_up, float(b_up)),
        down_tangent=(m_down, float(b_down)),
        apex=(float(apex_t), float(apex_v)),
        peak=(c * dt, float(s[c])),
    )


def _interp_crossing_left(s, level, start, t):
    # upward crossing of `level` nearest below `start`; segment start if none
    for i in range(start - 1, -1, -1):
        if s[i] < level:
            frac = (level - s[i]) / (s[i + 1] - s[i])
            return t[i] + min(max(frac, 0.0), 1.0) * (t[i + 1] - t[i])
    return t[0]


def _interp_crossing_right(s, level, start, t):
    # downward crossing of `level` nearest above `start`; segment end if none
    for i in range(start + 1, len(s)):
        if s[i] < level:
            frac = (s[i - 1] - level) / (s[i - 1] - s[i])
            return t[i - 1] + min(max(frac, 0.0), 1.0) * (t[i] - t[i - 1])
    return t[-1]


def _safe_ratio(num: float, den: float) -> float:
    if abs(den) < 1e-300:
        return 0.0
    return num / den


def extract_eog_features(seg: PeakSegment, normalize: bool = True) -> BlinkFeatures:
    """Compute the full blink feature catalog for one segment.

    With ``normalize`` the slice is min-max rescaled before anything else,
    giving amplitude-independent features (and omitting ``Signal Height``).
    Raises ``DegenerateShapeError`` when the segment is too malformed for
    tent geometry.
    """
    raw = np.asarray(seg.slice, dtype=float)
    if raw.size < 5:
        raise InvalidInputError("segment too short for feature extraction")
    c = seg.center_offset
    if not (0 < c < raw.size - 1):
        raise InvalidInputError("peak center must be interior to the segment")

    fs = seg.sample_rate_hz
    dt = 1.0 / fs
    s = minmax_normalize(raw) if normalize else raw
    t = np.arange(s.size) * dt
    v = _velocity(s, fs)
    a = _acceleration(s, fs)

    tent = _tent_from_arrays(s, v, c, dt)
    i_up = _phase_argmax(v, c)
    i_down = _phase_argmin_opening(v, c)
    i_amax = _phase_argmax(a, c)

    peak_t, peak_v = tent.peak
    apex_t, apex_v = tent.apex
    x_dev = abs(peak_t - apex_t)
    y_dev = abs(peak_v - apex_v)

    blink_duration = t[-1] - t[0]

    # full-close region: contiguous run around the peak where |v| stays small
    band = FULL_CLOSE_VELOCITY_BAND * np.max(np.abs(v))
    lo = c
    while lo > 0 and abs(v[lo - 1]) < band:
        lo -= 1
    hi = c
    while hi < s.size - 1 and abs(v[hi + 1]) < band:
        hi += 1
    full_close = (t[hi] - t[lo]) if abs(v[c]) < band else 0.0

    half_level = s[c] / 2.0
    half_left = _interp_crossing_left(s, half_level, c, t)
    half_right = _interp_crossing_right(s, half_level, c, t)

    recovery_level = s[i_up]
    recovery_t = _interp_crossing_right(s, recovery_level, c, t)

    # time where velocity first returns to zero after its closing maximum
    zero_t = t[c]
    for j in range(i_up + 1, s.size):
        if v[j] <= 0.0:
            if v[j - 1] > 0.0 and v[j - 1] != v[j]:
                zero_t = t[j - 1] + (v[j - 1] / (v[j - 1] - v[j])) * dt
            else:
                zero_t = t[j]
            break

    init_span = max(1, int(round(INITIAL_ENERGY_FRACTION * (s.size - 1))))

    opening_abs_v = np.abs(v[c:])
    opening_abs_a = np.abs(a[c:])

    feats: dict[str, float] = {}
    if not normalize:
        feats["Signal Height"] = float(s[c])
    feats["X-Axis Deviation"] = float(x_dev)
    feats["Y-Axis Deviation"] = float(y_dev)
    feats["Symmetry Ratio"] = float(_safe_ratio(x_dev, y_dev))
    feats["Closing Signal Range"] = float(s[:c + 1].max() - s[:c + 1].min())
    feats["Opening Signal Range"] = float(s[c:].max() - s[c:].min())
    feats["Closing Duration"] = float(t[c] - t[i_up])
    feats["Closing Dynamics Ratio"] = float(_safe_ratio(v[i_up], s[c]))
    feats["Blink Duration"] = float(blink_duration)
    feats["Closing Tent Duration"] = float(t[i_up] - t[0])
    feats["Opening Tent Duration"] = float(t[-1] - t[c])
    feats["Closing Tent Duration by Proportion of Blink"] = float(
        _safe_ratio(t[i_up] - t[0], blink_duration))
    feats["Opening Tent Duration by Proportion of Blink"] = float(
        _safe_ratio(t[-1] - t[c], blink_duration))
    feats["Blink Half-Close Duration"] = float(half_right - half_left)
    feats["Blink Full-Close Duration"] = float(full_close)
    feats["Full-Close Duration by Percentage of Blink"] = float(
        100.0 * _safe_ratio(full_close, blink_duration))
    feats["Opening Acceleration to Peak Duration"] = float(t[-1] - t[i_amax])
    feats["Velocity Recovery Duration"] = float(recovery_t - t[i_up])
    feats["Closing Tent Duration to Max Velocity"] = float(t[i_amax] - t[0])
    feats["Maximum Velocity to Peak Duration"] = float(zero_t - t[i_up])
    feats["Slope of Closing Tent"] = float(
        _safe_ratio(s[i_up] - s[0], t[i_up] - t[0]))
    feats["Slope of Opening Tent"] = float(
        _safe_ratio(s[-1] - s[i_down], t[-1] - t[i_down]))
    feats["Slope at Closing Tent Maximum Acceleration"] = float(v[i_amax])
    feats["Blink Phase Velocity Ratio"] = float(_safe_ratio(v[i_up], abs(v[i_down])))
    feats["Initial Blink Energy"] = float(_trapz(s[:init_span + 1], dx=dt))
    feats["Closing Phase Energy"] = float(_trapz(s[:c + 1], dx=dt))
    feats["Opening Phase Energy"] = float(_trapz(s[c:], dx=dt))
    feats["Closing Phase Slope Energy"] = float(_trapz(v[:i_up + 1], dx=dt))
    feats["Closing Phase Velocity Energy"] = float(_trapz(s[i_up:c + 1], dx=dt))
    feats["Opening Phase Velocity Energy"] = float(_trapz(s[c:i_down + 1], dx=dt))
    feats["Signal Average"] = float(s.mean())
    feats["Acceleration Standard Deviation"] = float(a.std())
    feats["Velocity Entropy"] = histogram_entropy(v, ENTROPY_BINS)
    feats["Acceleration Entropy"] = histogram_entropy(a, ENTROPY_BINS)
    feats["Signal Entropy"] = histogram_entropy(s, ENTROPY_BINS)
    feats["Maximum Acceleration Velocity Ratio"] = float(
        _safe_ratio(opening_abs_a.max(), opening_abs_v.max()))

    return BlinkFeatures(values=feats, normalized=normalize,
                         truncated=seg.edge_truncated)


def feature_names(normalize: bool = True) -> tuple[str, ...]:
    """The exact catalog emitted by :func:`extract_eog_features`."""
    return AMPLITUDE_INDEPENDENT_NAMES if normalize else EOG_FEATURE_NAMES
