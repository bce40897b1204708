"""Simulation configuration for the gated-detector random number generator model."""
from __future__ import annotations

from dataclasses import dataclass, field, asdict

DEFAULT_CLOCK_HZ = 1.03e9
DEFAULT_DARK_RATE_HZ = 1.0e4
# Tagger dead time chosen so the sustained output rate saturates near 5 MHz.
DEFAULT_DEAD_TIME_S = 200e-9
# 27 ps Gaussian jitter gives an arrival-time peak FWHM of ~64 ps.
DEFAULT_JITTER_SIGMA_S = 27e-12
DEFAULT_JITTER_MEAN_S = 250e-12

_MAX_SEED = 2**64


@dataclass(frozen=True)
class SimConfig:
    """All physical and sampling parameters of one simulated acquisition.

    Exactly one of ``duration_s`` (simulated wall time) and ``cycles``
    (explicit gate count) must be given.  Every random quantity in a run is
    derived from ``seed`` alone, so (config, seed) reproduces output
    bit for bit.
    """

    clock_freq: float = DEFAULT_CLOCK_HZ
    mu: float = 0.3                      # mean photons per gate
    nu: float = 0.1                      # detector efficiency
    dark_prob: float = DEFAULT_DARK_RATE_HZ / DEFAULT_CLOCK_HZ
    jitter_sigma: float = DEFAULT_JITTER_SIGMA_S
    jitter_mean: float = DEFAULT_JITTER_MEAN_S
    dead_time: float = DEFAULT_DEAD_TIME_S
    afterpulse_prob: float = 0.0
    seed: int = 0
    duration_s: float | None = None
    cycles: int | None = None

    def __post_init__(self) -> None:
        if self.clock_freq <= 0:
            raise ValueError(f"clock_freq must be positive, got {self.clock_freq}")
        if self.mu < 0:
            raise ValueError(f"mu must be >= 0, got {self.mu}")
        if not 0.0 <= self.nu <= 1.0:
            raise ValueError(f"nu must be in [0, 1], got {self.nu}")
        if not 0.0 <= self.dark_prob < 1.0:
            raise ValueError(f"dark_prob must be in [0, 1), got {self.dark_prob}")
        if not 0.0 <= self.afterpulse_prob < 1.0:
            raise ValueError(
                f"afterpulse_prob must be in [0, 1), got {self.afterpulse_prob}")
        if self.jitter_sigma < 0:
            raise ValueError(f"jitter_sigma must be >= 0, got {self.jitter_sigma}")
        period = 1.0 / self.clock_freq
        if not 0.0 <= self.jitter_mean < period:
            raise ValueError(
                f"jitter_mean must lie inside the gate period [0, {period:g}), "
                f"got {self.jitter_mean}")
        if self.jitter_mean + 5.0 * self.jitter_sigma >= period:
            raise ValueError(
                "jitter_mean + 5*jitter_sigma must stay inside the gate period "
                f"({period:g} s)")
        if self.dead_time < 0:
            raise ValueError(f"dead_time must be >= 0, got {self.dead_time}")
        if not 0 <= self.seed < _MAX_SEED:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if (self.duration_s is None) == (self.cycles is None):
            raise ValueError("exactly one of duration_s and cycles must be set")
        if self.duration_s is not None and self.duration_s < 0:
            raise ValueError(f"duration_s must be >= 0, got {self.duration_s}")
        if self.cycles is not None and self.cycles < 0:
            raise ValueError(f"cycles must be >= 0, got {self.cycles}")

    @property
    def gate_period(self) -> float:
        return 1.0 / self.clock_freq

    @property
    def n_cycles(self) -> int:
        """Number of gates to simulate."""
        if self.cycles is not None:
            return self.cycles
        return int(round(self.duration_s * self.clock_freq))

    def to_dict(self) -> dict:
        return asdict(self)
