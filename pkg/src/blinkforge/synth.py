"""Deterministic synthetic sessions: blink-like pulses, wire-movement
artifacts, and conductance traces with known event ground truth.

Reproducibility: every generator is a pure function of its spec. Random
draws come from a self-contained xorshift64* generator (shift triple
12/25/27, multiplier 0x2545F4914F6CDD1D, seed scrambled through splitmix64)
so identical specs produce identical samples on every platform, independent
of any global RNG state.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field, asdict

import numpy as np

from .errors import InvalidArgumentError
from .signal_core import Channel, Recording

_MASK64 = (1 << 64) - 1
_XS_MULT = 0x2545F4914F6CDD1D
_SM_GAMMA = 0x9E3779B97F4A7C15


class Xorshift64Star:
    """Minimal portable PRNG: xorshift64* with splitmix64 seed scrambling."""

    def __init__(self, seed: int):
        s = (int(seed) + _SM_GAMMA) & _MASK64
        s = ((s ^ (s >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        s = ((s ^ (s >> 27)) * 0x94D049BB133111EB) & _MASK64
        s ^= s >> 31
        self._state = s if s != 0 else _SM_GAMMA

    def next_u64(self) -> int:
        x = self._state
        x ^= (x >> 12)
        x ^= (x << 25) & _MASK64
        x ^= (x >> 27)
        self._state = x
        return (x * _XS_MULT) & _MASK64

    def uniform(self, n: int | None = None):
        """Doubles in [0, 1) from the top 53 bits."""
        if n is None:
            return (self.next_u64() >> 11) * 2.0 ** -53
        return np.array([(self.next_u64() >> 11) * 2.0 ** -53 for _ in range(n)])

    def uniform_in(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def normal(self, n: int | None = None):
        """Standard normals via Box-Muller (both variates used)."""
        count = 1 if n is None else n
        out = np.empty(count)
        i = 0
        while i < count:
            u1 = 1.0 - self.uniform()
            u2 = self.uniform()
            r = math.sqrt(-2.0 * math.log(u1))
            out[i] = r * math.cos(2.0 * math.pi * u2)
            i += 1
            if i < count:
                out[i] = r * math.sin(2.0 * math.pi * u2)
                i += 1
        return float(out[0]) if n is None else out

    def exponential(self, mean: float) -> float:
        return -mean * math.log(1.0 - self.uniform())


@dataclass(frozen=True)
class SynthEvent:
    kind: str
    time_s: float
    amplitude: float
    width_s: float
    skew: float = 0.0

    def __post_init__(self):
        if self.kind not in ("blink", "wire", "scr"):
            raise InvalidArgumentError(f"unknown event kind {self.kind!r}")
        if self.width_s <= 0:
            raise InvalidArgumentError("event width must be positive")


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    sample_rate_hz: float = 100.0
    duration_s: float = 60.0
    events: tuple[SynthEvent, ...] = ()
    noise_sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(self.events))
        for ev in self.events:
            if not (0.0 <= ev.time_s <= self.duration_s):
                raise InvalidArgumentError(
                    f"event at {ev.time_s}s outside 0..{self.duration_s}s"
                )

    def to_jsonable(self) -> dict:
        return asdict(self)

    @classmethod
    def from_jsonable(cls, obj: dict) -> "SynthSpec":
        events = tuple(SynthEvent(**e) for e in obj.get("events", ()))
        fields = {k: v for k, v in obj.items() if k != "events"}
        return cls(events=events, **fields)

    @classmethod
    def from_json(cls, text: str) -> "SynthSpec":
        return cls.from_jsonable(json.loads(text))


@dataclass(frozen=True)
class GroundTruthPeak:
    kind: str
    time_s: float
    index: int
    amplitude: float


def _plan_times(rng: Xorshift64Star, duration_s: float, rate_hz: float,
                min_gap_s: float, margin_s: float) -> list[float]:
    times = []
    t = margin_s + rng.exponential(1.0 / rate_hz)
    while t < duration_s - margin_s:
        times.append(t)
        t += max(min_gap_s, rng.exponential(1.0 / rate_hz))
    return times


def make_blink_spec(seed: int, duration_s: float, sample_rate_hz: float = 100.0,
                    rate_hz: float = 0.56, noise_sigma: float = 0.005,
                    amplitude_range=(0.4, 1.0), width_range=(0.15, 0.35),
                    skew_range=(0.2, 0.6)) -> SynthSpec:
    """Plan a blink session: skewed pulses at roughly ``rate_hz`` events/s."""
    rng = Xorshift64Star(seed)
    margin = width_range[1] * 2.0
    events = []
    for t in _plan_times(rng, duration_s, rate_hz, min_gap_s=2.0 * width_range[1],
                         margin_s=margin):
        events.append(SynthEvent(
            kind="blink",
            time_s=t,
            amplitude=rng.uniform_in(*amplitude_range),
            width_s=rng.uniform_in(*width_range),
            skew=rng.uniform_in(*skew_range),
        ))
    return SynthSpec(seed=seed, sample_rate_hz=sample_rate_hz,
                     duration_s=duration_s, events=tuple(events),
                     noise_sigma=noise_sigma)


def make_wire_spec(seed: int, duration_s: float, sample_rate_hz: float = 100.0,
                   rate_hz: float = 2.8, noise_sigma: float = 0.005,
                   amplitude_range=(0.2, 1.0), width_range=(0.1, 0.45)) -> SynthSpec:
    """Plan a wire-movement session: jagged transients that mimic blinks."""
    rng = Xorshift64Star(seed)
    margin = width_range[1] * 2.0
    events = []
    for t in _plan_times(rng, duration_s, rate_hz, min_gap_s=2.0 * width_range[1],
                         margin_s=margin):
        events.append(SynthEvent(
            kind="wire",
            time_s=t,
            amplitude=rng.uniform_in(*amplitude_range),
            width_s=rng.uniform_in(*width_range),
            skew=rng.uniform(),
        ))
    return SynthSpec(seed=seed, sample_rate_hz=sample_rate_hz,
                     duration_s=duration_s, events=tuple(events),
                     noise_sigma=noise_sigma)


def make_eda_spec(seed: int, duration_s: float, sample_rate_hz: float = 100.0,
                  n_scrs: int = 5, noise_sigma: float = 0.002,
                  amplitude_range=(0.2, 0.8)) -> SynthSpec:
    """Plan a conductance session with ``n_scrs`` response events."""
    rng = Xorshift64Star(seed)
    margin = 6.0
    usable = duration_s - 2 * margin
    if n_scrs > 0 and usable <= 0:
        raise InvalidArgumentError("duration too short for the requested events")
    events = []
    for i in range(n_scrs):
        slot = usable / max(n_scrs, 1)
        t = margin + slot * i + rng.uniform_in(0.1 * slot, 0.6 * slot)
        events.append(SynthEvent(
            kind="scr",
            time_s=t,
            amplitude=rng.uniform_in(*amplitude_range),
            width_s=4.0,
        ))
    return SynthSpec(seed=seed, sample_rate_hz=sample_rate_hz,
                     duration_s=duration_s, events=tuple(events),
                     noise_sigma=noise_sigma)


def _blink_pulse(t: np.ndarray, ev: SynthEvent) -> np.ndarray:
    # raised-cosine rise into an exponential decay; skew lengthens the tail
    rise = ev.width_s * (0.9 - 0.35 * ev.skew)
    decay = ev.width_s * (0.35 + 0.45 * ev.skew)
    out = np.zeros_like(t)
    rel = t - ev.time_s
    rising = (rel >= -rise) & (rel <= 0)
    out[rising] = 0.5 * (1.0 + np.cos(np.pi * rel[rising] / rise))
    falling = rel > 0
    out[falling] = np.exp(-rel[falling] / decay)
    return ev.amplitude * out


def _wire_burst(t: np.ndarray, ev: SynthEvent, rng: Xorshift64Star) -> np.ndarray:
    # jagged multi-bump transient: enveloped random walk plus a main lobe
    half = ev.width_s
    rel = t - ev.time_s
    inside = np.abs(rel) <= half
    idx = np.nonzero(inside)[0]
    out = np.zeros_like(t)
    if idx.size < 5:
        return out
    n = idx.size
    walk = np.cumsum(rng.normal(n))
    walk -= walk.mean()
    span = np.abs(walk).max()
    if span > 0:
        walk /= span
    envelope = 0.5 * (1.0 + np.cos(np.pi * rel[idx] / half))
    n_lobes = 2 + int(rng.uniform() * 3)
    lobes = np.zeros(n)
    for _ in range(n_lobes):
        center = rng.uniform_in(-0.6 * half, 0.6 * half)
        lobe_w = rng.uniform_in(0.1 * half, 0.35 * half)
        lobes += rng.uniform_in(0.3, 1.0) * np.exp(
            -0.5 * ((rel[idx] - center) / lobe_w) ** 2)
    shape = (0.9 * lobes / max(lobes.max(), 1e-12) + 0.8 * walk) * envelope
    peak = np.abs(shape).max()
    if peak > 0:
        shape = shape / peak
    out[idx] = ev.amplitude * shape
    return out


def _scr_bump(t: np.ndarray, ev: SynthEvent,
              rise_s: float = 0.7, decay_s: float = 3.0) -> np.ndarray:
    # exponential approach then slow decay, normalized to the event amplitude
    rel = t - ev.time_s
    active = rel >= 0
    shape = np.zeros_like(t)
    r = rel[active]
    shape[active] = (1.0 - np.exp(-r / rise_s)) * np.exp(-r / decay_s)
    peak = shape.max()
    if peak > 0:
        shape /= peak
    return ev.amplitude * shape


def _warn_on_overlap(events: tuple[SynthEvent, ...]):
    ordered = sorted(events, key=lambda e: e.time_s)
    for a, b in zip(ordered, ordered[1:]):
        if b.time_s - a.time_s < max(a.width_s, b.width_s):
            warnings.warn(
                f"events at {a.time_s:.3f}s and {b.time_s:.3f}s overlap",
                stacklevel=3,
            )


def synth_blink_session(spec: SynthSpec) -> tuple[Recording, list[GroundTruthPeak]]:
    """Render a blink session and its ground-truth peak list."""
    _warn_on_overlap(spec.events)
    fs = spec.sample_rate_hz
    n = int(round(spec.duration_s * fs))
    t = np.arange(n) / fs
    y = np.zeros(n)
    truth = []
    for ev in spec.events:
        y += _blink_pulse(t, ev)
        truth.append(GroundTruthPeak(
            kind=ev.kind, time_s=ev.time_s,
            index=int(round(ev.time_s * fs)), amplitude=ev.amplitude,
        ))
    if spec.noise_sigma > 0:
        rng = Xorshift64Star(spec.seed ^ 0xB11AC)
        y = y + spec.noise_sigma * rng.normal(n)
    return Recording(fs, y, Channel.EOG), truth


def synth_wire_session(spec: SynthSpec) -> tuple[Recording, list[GroundTruthPeak]]:
    """Render a wire-artifact session; every event is a labeled artifact."""
    _warn_on_overlap(spec.events)
    fs = spec.sample_rate_hz
    n = int(round(spec.duration_s * fs))
    t = np.arange(n) / fs
    y = np.zeros(n)
    rng = Xorshift64Star(spec.seed ^ 0x3142)
    truth = []
    for ev in spec.events:
        y += _wire_burst(t, ev, rng)
        truth.append(GroundTruthPeak(
            kind=ev.kind, time_s=ev.time_s,
            index=int(round(ev.time_s * fs)), amplitude=ev.amplitude,
        ))
    if spec.noise_sigma > 0:
        noise_rng = Xorshift64Star(spec.seed ^ 0xB11AC)
        y = y + spec.noise_sigma * noise_rng.normal(n)
    return Recording(fs, y, Channel.EOG), truth


def synth_eda_session(spec: SynthSpec,
                      tonic_level: float = 5.0,
                      drift_amplitude: float = 0.3,
                      drift_hz: float = 0.001) -> Recording:
    """Render a conductance session: slow tonic drift plus response bumps."""
    fs = spec.sample_rate_hz
    n = int(round(spec.duration_s * fs))
    t = np.arange(n) / fs
    y = tonic_level + drift_amplitude * np.sin(2.0 * np.pi * drift_hz * t)
    for ev in spec.events:
        y += _scr_bump(t, ev)
    if spec.noise_sigma > 0:
        rng = Xorshift64Star(spec.seed ^ 0xEDA)
        y = y + spec.noise_sigma * rng.normal(n)
    return Recording(fs, y, Channel.EDA)
