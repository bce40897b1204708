"""Closed-form registered-count-rate model of the self-differencing readout.

With per-gate avalanche probability p, differencing registers a count only
when the previous gate was quiet, so the rate is f*p*(1-p): zero at p=0 and
p=1 and capped at f/4 when p=1/2 (mu*nu = ln 2 for dark-free operation).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sim import gate_detection_prob

DEFAULT_MU_NU_MIN = 1e-3
DEFAULT_MU_NU_MAX = 1e2
DEFAULT_SWEEP_POINTS = 200


@dataclass(frozen=True)
class RateCurve:
    mu_nu: np.ndarray
    rate_hz: np.ndarray
    clock_freq: float
    dark_prob: float

    def __post_init__(self) -> None:
        if self.mu_nu.size != self.rate_hz.size:
            raise ValueError("mu_nu and rate_hz must have equal length")
        if self.mu_nu.size and np.any(np.diff(self.mu_nu) <= 0):
            raise ValueError("mu_nu grid must be strictly increasing")

    def __len__(self) -> int:
        return int(self.mu_nu.size)


def sd_rate(clock_freq: float, mu_nu, dark_prob: float = 0.0):
    """Registered event rate f*p*(1-p) in Hz; accepts scalar or array mu_nu."""
    if clock_freq <= 0:
        raise ValueError(f"clock_freq must be positive, got {clock_freq}")
    arr = np.asarray(mu_nu, dtype=np.float64)
    if np.any(arr < 0):
        raise ValueError("mu_nu must be >= 0")
    if not 0.0 <= dark_prob < 1.0:
        raise ValueError(f"dark_prob must be in [0, 1), got {dark_prob}")
    x = -np.expm1(-arr)
    p = x + dark_prob * (1.0 - x)
    rate = clock_freq * p * (1.0 - p)
    return float(rate) if np.isscalar(mu_nu) else rate


def dead_time_limited(rate_hz, dead_time: float):
    """Nonparalyzable throughput R/(1 + R*tau) of the tagger."""
    if dead_time < 0:
        raise ValueError(f"dead_time must be >= 0, got {dead_time}")
    r = np.asarray(rate_hz, dtype=np.float64)
    out = r / (1.0 + r * dead_time)
    return float(out) if np.isscalar(rate_hz) else out


def sweep_rate(clock_freq: float,
               mu_nu_min: float = DEFAULT_MU_NU_MIN,
               mu_nu_max: float = DEFAULT_MU_NU_MAX,
               n_points: int = DEFAULT_SWEEP_POINTS,
               dark_prob: float = 0.0,
               dead_time: float = 0.0) -> tuple[RateCurve, RateCurve]:
    """Log-spaced sweep of the model rate, plus the same curve throttled by
    the tagger dead time.  The throttled curve models the tagging bottleneck
    only, not detector saturation physics."""
    if not 0 <= mu_nu_min < mu_nu_max:
        raise ValueError(f"need 0 <= mu_nu_min < mu_nu_max, "
                         f"got [{mu_nu_min}, {mu_nu_max}]")
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    if mu_nu_min == 0.0:
        grid = np.concatenate([[0.0], np.geomspace(mu_nu_max / 10**6, mu_nu_max,
                                                   n_points - 1)])
    else:
        grid = np.geomspace(mu_nu_min, mu_nu_max, n_points)
    theory = sd_rate(clock_freq, grid, dark_prob)
    limited = dead_time_limited(theory, dead_time)
    return (RateCurve(grid, theory, clock_freq, dark_prob),
            RateCurve(grid, limited, clock_freq, dark_prob))


def find_peak(curve: RateCurve) -> tuple[float, float]:
    """Grid point of maximal rate; ties resolve to the smaller mu_nu."""
    if len(curve) == 0:
        raise ValueError("find_peak of an empty curve")
    i = int(np.argmax(curve.rate_hz))
    return float(curve.mu_nu[i]), float(curve.rate_hz[i])


def write_rate_csv(theory: RateCurve, limited: RateCurve, path) -> None:
    if len(theory) != len(limited) or not np.array_equal(theory.mu_nu, limited.mu_nu):
        raise ValueError("theory and dead-time-limited curves must share a grid")
    with open(path, "w") as fh:
        fh.write("mu_nu,theory_rate_hz,dead_time_limited_rate_hz\n")
        for x, r1, r2 in zip(theory.mu_nu, theory.rate_hz, limited.rate_hz):
            fh.write(f"{x:.9e},{r1:.6f},{r2:.6f}\n")
