"""End-to-end model of a GHz-gated self-differencing single-photon-detector
random number generator, with an in-repo statistical randomness battery."""

__version__ = "0.1.0"

from .analysis import (ByteCorrelationMatrix, ChiSquareResult, byte_correlation,
                       histogram_fwhm, histogram_zero_gap, run_report,
                       uniformity_chi_square)
from .bits import (BitStream, bit_rate, extract_bits, read_bits, split_streams,
                   write_bits)
from .config import SimConfig
from .ratemodel import RateCurve, find_peak, sd_rate, sweep_rate
from .sim import (CycleHistogram, EventStream, TimeTag, apply_dead_time,
                  cycle_histogram, gate_detection_prob, read_events,
                  simulate_gates, simulate_tagged, write_events)
from .sts import battery, battery_many, proportion_analysis

__all__ = [
    "BitStream", "ByteCorrelationMatrix", "ChiSquareResult", "CycleHistogram",
    "EventStream", "RateCurve", "SimConfig", "TimeTag",
    "apply_dead_time", "battery", "battery_many", "bit_rate",
    "byte_correlation", "cycle_histogram", "extract_bits", "find_peak",
    "gate_detection_prob", "histogram_fwhm", "histogram_zero_gap",
    "proportion_analysis", "read_bits", "read_events", "run_report",
    "sd_rate", "simulate_gates", "simulate_tagged", "split_streams",
    "sweep_rate", "uniformity_chi_square", "write_bits", "write_events",
]
