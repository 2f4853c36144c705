"""Peak detection, blink prefiltering, and baseline segmentation for EOG.

Peaks are strict local maxima screened by prominence and by width measured
at half prominence. Baselines are found with a recursive coarse-to-fine
search that strides outward from the peak, backtracks when the signal
rises, and narrows its stride until it settles on a local minimum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, InvalidInputError, InternalError
from .signal_core import Recording

#: stride, in seconds, used by the baseline search; a few samples wide so the
#: search steps over single-sample noise wiggles
BASELINE_STRIDE_S = 0.005


@dataclass(frozen=True)
class PeakCandidate:
    center_index: int
    height: float
    prominence: float
    width_s: float


@dataclass(frozen=True)
class SearchParams:
    prominence_min: float = 0.1
    width_min_s: float = 0.04
    width_max_s: float = 0.5
    height_min: float = 0.05
    baseline_window_s: float = 0.5

    def __post_init__(self):
        for name in ("prominence_min", "width_min_s", "width_max_s",
                     "height_min", "baseline_window_s"):
            if not (getattr(self, name) > 0):
                raise InvalidArgumentError(f"{name} must be positive")
        if not (self.width_min_s < self.width_max_s):
            raise InvalidArgumentError("width_min_s must be below width_max_s")


@dataclass(frozen=True)
class PeakSegment:
    candidate: PeakCandidate
    left_base_index: int
    right_base_index: int
    slice: np.ndarray
    sample_rate_hz: float
    edge_truncated: bool = False

    def __post_init__(self):
        if not (self.left_base_index < self.candidate.center_index < self.right_base_index):
            raise InvalidArgumentError(
                "base indices must bracket the peak center: "
                f"{self.left_base_index} < {self.candidate.center_index} "
                f"< {self.right_base_index}"
            )
        arr = np.asarray(self.slice, dtype=float).copy()
        arr.flags.writeable = False
        object.__setattr__(self, "slice", arr)

    @property
    def center_offset(self) -> int:
        """Peak position within ``slice``."""
        return self.candidate.center_index - self.left_base_index


def _plateau_maxima(x: np.ndarray) -> list[int]:
    # leftmost sample of every maximal plateau that rises before and falls after
    out = []
    n = x.size
    i = 1
    while i < n - 1:
        if x[i] > x[i - 1]:
            j = i
            while j + 1 < n and x[j + 1] == x[j]:
                j += 1
            if j + 1 < n and x[j + 1] < x[j]:
                out.append(i)
                i = j + 1
                continue
            i = j + 1
            continue
        i += 1
    return out


def _prominence_and_bases(x: np.ndarray, peak: int) -> tuple[float, int, int]:
    # walk away from the peak until a strictly higher sample (or the end);
    # the base on each side is the argmin over the walked stretch
    n = x.size
    h = x[peak]
    lmin_idx = peak
    j = peak - 1
    while j >= 0 and x[j] <= h:
        if x[j] < x[lmin_idx]:
            lmin_idx = j
        j -= 1
    rmin_idx = peak
    j = peak + 1
    while j < n and x[j] <= h:
        if x[j] < x[rmin_idx]:
            rmin_idx = j
        j += 1
    prom = h - max(x[lmin_idx], x[rmin_idx])
    return prom, lmin_idx, rmin_idx


def _width_samples(x: np.ndarray, peak: int, prom: float,
                   lbase: int, rbase: int) -> float:
    # interpolated width at the half-prominence evaluation height
    h = x[peak] - 0.5 * prom
    j = peak - 1
    while j > lbase and x[j] >= h:
        j -= 1
    if x[j] >= h:
        left_ip = float(j)
    else:
        left_ip = j + (h - x[j]) / (x[j + 1] - x[j])
    j = peak + 1
    while j < rbase and x[j] >= h:
        j += 1
    if x[j] >= h:
        right_ip = float(j)
    else:
        right_ip = j - (h - x[j]) / (x[j - 1] - x[j])
    return right_ip - left_ip


def detect_peaks(rec: Recording, params: SearchParams | None = None) -> list[PeakCandidate]:
    """Find blink-candidate peaks in a (pre-filtered) recording.

    Returns every strict local maximum whose prominence reaches
    ``params.prominence_min`` and whose width at half prominence reaches
    ``params.width_min_s``, ordered by center index. Plateau peaks use the
    leftmost plateau sample as the center.
    """
    params = params or SearchParams()
    x = rec.samples
    if x.size < 3:
        raise InvalidInputError("peak detection requires at least 3 samples")
    fs = rec.sample_rate_hz
    out = []
    for peak in _plateau_maxima(x):
        prom, lbase, rbase = _prominence_and_bases(x, peak)
        if prom < params.prominence_min:
            continue
        width_s = _width_samples(x, peak, prom, lbase, rbase) / fs
        if width_s < params.width_min_s:
            continue
        out.append(PeakCandidate(
            center_index=peak,
            height=float(x[peak]),
            prominence=float(prom),
            width_s=float(width_s),
        ))
    return out


def blink_prefilter(cands: list[PeakCandidate],
                    params: SearchParams | None = None) -> list[PeakCandidate]:
    """Keep candidates satisfying the literature blink criteria.

    A candidate survives when its width does not exceed ``width_max_s`` and
    its height reaches ``height_min``. Order is preserved.
    """
    params = params or SearchParams()
    return [c for c in cands
            if c.width_s <= params.width_max_s and c.height >= params.height_min]


def _slide_to_local_minimum(x: np.ndarray, i: int, lo_bound: int,
                            hi_bound: int) -> int:
    # walk downhill one sample at a time until x[i-1] >= x[i] <= x[i+1],
    # never leaving [lo_bound, hi_bound] (the side of the origin the search
    # direction points to)
    while True:
        lo = max(lo_bound, i - 1)
        seg = x[lo:min(i + 2, hi_bound + 1)]
        j = lo + int(np.argmin(seg))
        if j == i or x[j] >= x[i]:
            return i
        i = j


def find_nearby_minimum(x, p: int, w: float, m: float) -> int:
    """Locate a local minimum near index ``p``, searching in the sign of ``w``.

    ``w`` is the initial stride in samples (negative strides search left),
    ``m`` caps how many points may be traversed. The search jumps by ``w``,
    tracking the lowest value seen; when the signal rises it backtracks one
    stride and retries with a quarter of the stride, otherwise it restarts
    from the best point with half the stride. Strides below one sample
    resolve to the bottom of the local 3-sample neighborhood.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1:
        raise InvalidInputError("find_nearby_minimum expects a 1-D sequence")
    if not (0 <= p < arr.size):
        raise InvalidArgumentError(f"index {p} out of bounds for length {arr.size}")
    if w == 0:
        raise InvalidArgumentError("window w must be non-zero")
    if w > 0:
        bounds = (int(p), arr.size - 1)
    else:
        bounds = (0, int(p))
    max_depth = 20 + int(10 * math.log2(max(2.0, abs(float(w)))))
    return _nearby_min(arr, float(p), float(w), float(m), bounds, max_depth)


def _nearby_min(x: np.ndarray, p: float, w: float, m: float,
                bounds: tuple[int, int], depth: int) -> int:
    if depth <= 0:
        raise InternalError("baseline search exceeded its recursion budget")
    n = x.size
    pi = min(max(int(round(p)), 0), n - 1)
    if abs(w) < 1.0 or m <= 0:
        return _slide_to_local_minimum(x, pi, *bounds)
    best_i, best_x = pi, x[pi]
    i = p
    while True:
        idx = int(round(i))
        if idx < 0 or idx >= n or abs(i - p) > m:
            break
        if x[idx] >= best_x and idx != pi:
            m_next = max(0.0, m - abs(i - w - p))
            return _nearby_min(x, i - w, w / 4.0, m_next, bounds, depth - 1)
        best_i, best_x = idx, x[idx]
        i += w
    return _nearby_min(x, float(best_i), w / 2.0, m - 1.0, bounds, depth - 1)


def segment_peak(rec: Recording, cand: PeakCandidate,
                 params: SearchParams | None = None,
                 stride_s: float = BASELINE_STRIDE_S) -> PeakSegment:
    """Bound a detected peak by the nearest minima on each side.

    The search extends up to ``params.baseline_window_s`` seconds in each
    direction. If it runs into a recording boundary the base index is
    clamped and the segment is flagged ``edge_truncated``.
    """
    params = params or SearchParams()
    x = rec.samples
    fs = rec.sample_rate_hz
    c = cand.center_index
    stride = max(1, int(round(stride_s * fs)))
    budget = max(1, int(round(params.baseline_window_s * fs)))
    left = find_nearby_minimum(x, c, -stride, budget)
    right = find_nearby_minimum(x, c, +stride, budget)
    left = min(left, c - 1)
    right = max(right, c + 1)
    truncated = False
    if left <= 0:
        left = 0
        truncated = True
    if right >= x.size - 1:
        right = x.size - 1
        truncated = True
    return PeakSegment(
        candidate=cand,
        left_base_index=int(left),
        right_base_index=int(right),
        slice=x[left:right + 1],
        sample_rate_hz=fs,
        edge_truncated=truncated,
    )


def detect_and_segment(rec: Recording,
                       params: SearchParams | None = None) -> list[PeakSegment]:
    """Convenience chain: detect peaks, prefilter, and segment each survivor."""
    params = params or SearchParams()
    cands = blink_prefilter(detect_peaks(rec, params), params)
    return [segment_peak(rec, c, params) for c in cands]
