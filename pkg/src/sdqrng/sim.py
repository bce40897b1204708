"""Stochastic model of the detection chain: Poissonian photon arrivals on a
gated single-photon detector, adjacent-cycle cancellation from the
self-differencing readout, per-event timing jitter, and the nonparalyzable
dead time of the time tagger.

A gate avalanches with probability p = 1 - (1-dark)*exp(-mu*nu); the
differencing stage registers an avalanche only when the preceding gate was
quiet, so registered events are exactly the first gates of avalanche runs.
Runs are sampled directly (gap and run-length geometrics), which is
distribution-identical to gate-by-gate Bernoulli sampling but lets multi
gigagate acquisitions run in seconds.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from typing import Iterator, NamedTuple

import numpy as np
from scipy.special import ndtr, ndtri

from ._kernels import min_gap_filter
from .config import SimConfig

EVENT_MAGIC = b"QRNGEVT1"
_EVENT_HEADER = struct.Struct("<8sQQQ")
_BATCH = 1 << 20


class FileFormatError(ValueError):
    """Raised for unreadable event/bit file headers or truncated payloads."""


class TimeTag(NamedTuple):
    cycle_index: int
    offset: float


@dataclass(frozen=True)
class EventStream:
    """Time-tagged detection events over ``n_cycles`` simulated gates.

    ``cycles`` (uint64, strictly increasing) and ``offsets`` (seconds within
    the gate) are parallel arrays.  ``config`` is attached when the stream
    came from a simulation; streams read back from disk only know the clock.
    """

    clock_freq: float
    n_cycles: int
    cycles: np.ndarray
    offsets: np.ndarray
    config: SimConfig | None = None

    def __post_init__(self) -> None:
        if self.cycles.size != self.offsets.size:
            raise ValueError("cycles and offsets must have equal length")

    def __len__(self) -> int:
        return int(self.cycles.size)

    def tag(self, i: int) -> TimeTag:
        return TimeTag(int(self.cycles[i]), float(self.offsets[i]))

    def tags(self) -> Iterator[TimeTag]:
        for c, o in zip(self.cycles, self.offsets):
            yield TimeTag(int(c), float(o))

    @property
    def times(self) -> np.ndarray:
        """Absolute event times in seconds."""
        return self.cycles / self.clock_freq + self.offsets


def gate_detection_prob(mu: float, nu: float, dark_prob: float) -> float:
    """Per-gate avalanche probability for Poissonian light of mean photon
    number ``mu``, detector efficiency ``nu`` and dark probability
    ``dark_prob``:  p = 1 - (1 - dark) * exp(-mu*nu)."""
    if mu < 0 or nu < 0:
        raise ValueError(f"mu and nu must be >= 0, got mu={mu}, nu={nu}")
    if nu > 1:
        raise ValueError(f"nu must be <= 1, got {nu}")
    if not 0.0 <= dark_prob < 1.0:
        raise ValueError(f"dark_prob must be in [0, 1), got {dark_prob}")
    x = -np.expm1(-mu * nu)          # 1 - exp(-mu*nu), accurate for small mu*nu
    return float(x + dark_prob * (1.0 - x))


def _draw_offsets(u: np.ndarray, mean: float, sigma: float, period: float) -> np.ndarray:
    """Map uniforms to gate-truncated normal arrival offsets."""
    hi = np.nextafter(period, 0.0)
    if sigma <= 0.0:
        return np.full(u.shape, min(max(mean, 0.0), hi))
    a = ndtr((0.0 - mean) / sigma)
    b = ndtr((period - mean) / sigma)
    q = np.clip(a + u * (b - a), 1e-300, 1.0 - 1e-16)
    return np.clip(mean + sigma * ndtri(q), 0.0, hi)


def _iter_registered(config: SimConfig) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (cycle_indices uint64, offsets float64) chunks of registered
    events: avalanches whose previous gate was quiet."""
    p = gate_detection_prob(config.mu, config.nu, config.dark_prob)
    n = config.n_cycles
    rng = np.random.default_rng(config.seed)
    if n == 0 or p == 0.0:
        return
    period = config.gate_period
    q = min(p + config.afterpulse_prob, 1.0)
    if q >= 1.0:
        # one avalanche run that never ends: only its first gate registers
        first = int(rng.geometric(p)) - 1
        if first < n:
            u = rng.random(1)
            off = _draw_offsets(u, config.jitter_mean, config.jitter_sigma, period)
            yield np.array([first], dtype=np.uint64), off
        return
    # run ends e_i = e_{i-1} + gap_i + len_i with e_0 = -2; the registered
    # event of run i sits at its first gate, e_i - len_i + 1
    carry = -2
    while carry < n:
        gaps = rng.geometric(p, _BATCH)
        lens = rng.geometric(1.0 - q, _BATCH)
        u = rng.random(_BATCH)
        ends = carry + np.cumsum(gaps + lens)
        starts = ends - lens + 1
        carry = int(ends[-1])
        inside = starts < n
        if not inside.all():
            starts = starts[inside]
            u = u[: starts.size]
            carry = n  # done after this chunk
        if starts.size:
            offsets = _draw_offsets(u, config.jitter_mean, config.jitter_sigma, period)
            yield starts.astype(np.uint64), offsets


def simulate_gates(config: SimConfig) -> EventStream:
    """Simulate every gate and return the registered (differenced) events,
    before any tagger dead time."""
    chunks = list(_iter_registered(config))
    if chunks:
        cycles = np.concatenate([c for c, _ in chunks])
        offsets = np.concatenate([o for _, o in chunks])
    else:
        cycles = np.empty(0, dtype=np.uint64)
        offsets = np.empty(0, dtype=np.float64)
    return EventStream(config.clock_freq, config.n_cycles, cycles, offsets, config)


def apply_dead_time(stream: EventStream, dead_time: float) -> EventStream:
    """Nonparalyzable dead time: keep an event iff it is at least
    ``dead_time`` after the last kept event; the first event is always kept."""
    if dead_time < 0:
        raise ValueError(f"dead_time must be >= 0, got {dead_time}")
    if dead_time == 0.0 or len(stream) == 0:
        return stream
    keep, _ = min_gap_filter(stream.times, dead_time, -np.inf)
    return replace(stream, cycles=stream.cycles[keep], offsets=stream.offsets[keep])


def iter_tagged(config: SimConfig) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Chunked fused pipeline: registered events filtered by the configured
    dead time, without materializing the undecimated stream."""
    last = -np.inf
    f = config.clock_freq
    for cycles, offsets in _iter_registered(config):
        if config.dead_time > 0.0:
            times = cycles / f + offsets
            keep, last = min_gap_filter(times, config.dead_time, last)
            cycles = cycles[keep]
            offsets = offsets[keep]
        if cycles.size:
            yield cycles, offsets


def simulate_tagged(config: SimConfig) -> EventStream:
    """Registered events after the tagger dead time; equal to
    ``apply_dead_time(simulate_gates(config), config.dead_time)``."""
    chunks = list(iter_tagged(config))
    if chunks:
        cycles = np.concatenate([c for c, _ in chunks])
        offsets = np.concatenate([o for _, o in chunks])
    else:
        cycles = np.empty(0, dtype=np.uint64)
        offsets = np.empty(0, dtype=np.float64)
    return EventStream(config.clock_freq, config.n_cycles, cycles, offsets, config)


@dataclass(frozen=True)
class CycleHistogram:
    """Arrival-time histogram folded over a window of whole clock cycles."""

    bin_width: float
    n_cycles_displayed: int
    window: float
    counts: np.ndarray

    @property
    def bin_starts(self) -> np.ndarray:
        return np.arange(self.counts.size) * self.bin_width


def cycle_histogram(stream: EventStream, bin_width: float,
                    n_cycles_displayed: int = 1) -> CycleHistogram:
    """Fold absolute event times over ``n_cycles_displayed`` gate periods and
    bin them.  Bins covering the quiet inter-gate regions are reported even
    when empty."""
    if bin_width <= 0:
        raise ValueError(f"bin_width must be positive, got {bin_width}")
    if n_cycles_displayed < 1:
        raise ValueError("n_cycles_displayed must be >= 1")
    period = 1.0 / stream.clock_freq
    window = n_cycles_displayed * period
    nbins = int(np.ceil(window / bin_width))
    if len(stream) == 0:
        return CycleHistogram(bin_width, n_cycles_displayed, window,
                              np.zeros(nbins, dtype=np.int64))
    # exact fold: integer cycle modulus, offset stays inside its gate
    pos = (stream.cycles % np.uint64(n_cycles_displayed)).astype(np.float64) * period
    pos += stream.offsets
    idx = np.minimum((pos / bin_width).astype(np.int64), nbins - 1)
    counts = np.bincount(idx, minlength=nbins)
    return CycleHistogram(bin_width, n_cycles_displayed, window, counts)


def write_events(stream: EventStream, path) -> None:
    """Binary event export: 32-byte header (magic, clock Hz, n_cycles, record
    count), then little-endian (u64 cycle_index, u64 offset in ps) records."""
    n = len(stream)
    header = _EVENT_HEADER.pack(EVENT_MAGIC, int(round(stream.clock_freq)),
                                stream.n_cycles, n)
    period_ps = np.floor(1e12 / stream.clock_freq)
    records = np.empty((n, 2), dtype="<u8")
    records[:, 0] = stream.cycles
    records[:, 1] = np.minimum(np.rint(stream.offsets * 1e12), period_ps)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(records.tobytes())


def read_events(path) -> EventStream:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _EVENT_HEADER.size:
        raise FileFormatError(f"{path}: truncated event file header")
    magic, clock, n_cycles, count = _EVENT_HEADER.unpack_from(raw)
    if magic != EVENT_MAGIC:
        raise FileFormatError(f"{path}: bad magic {magic!r}")
    body = raw[_EVENT_HEADER.size:]
    if len(body) != 16 * count:
        raise FileFormatError(
            f"{path}: expected {16 * count} payload bytes, found {len(body)}")
    records = np.frombuffer(body, dtype="<u8").reshape(count, 2)
    cycles = records[:, 0].astype(np.uint64)
    period = 1.0 / clock
    offsets = np.minimum(records[:, 1].astype(np.float64) * 1e-12,
                         np.nextafter(period, 0.0))
    if count and np.any(cycles[1:] <= cycles[:-1]):
        raise FileFormatError(f"{path}: cycle indexes are not strictly increasing")
    if count and int(cycles[-1]) >= n_cycles:
        raise FileFormatError(f"{path}: cycle index beyond recorded n_cycles")
    return EventStream(float(clock), int(n_cycles), cycles, offsets)


def write_histogram_csv(hist: CycleHistogram, path) -> None:
    with open(path, "w") as fh:
        fh.write("bin_start_ps,count\n")
        for start, count in zip(hist.bin_starts, hist.counts):
            fh.write(f"{start * 1e12:.3f},{int(count)}\n")
