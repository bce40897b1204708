"""Statistical randomness battery (NIST SP 800-22 rev. 1a family)."""
from .battery import (BatteryParams, BatteryReport, ProportionLine, battery,
                      battery_many, confidence_interval, proportion_analysis,
                      write_results_csv, write_summary_csv, METHOD_NOTE)
from .randtests import (TestResult, aperiodic_templates, approximate_entropy,
                        binary_matrix_rank, block_frequency, cumulative_sums,
                        dft_spectral, frequency_monobit, linear_complexity,
                        longest_run_of_ones, maurer_universal,
                        non_overlapping_templates, overlapping_templates,
                        random_excursions, random_excursions_variant,
                        runs_test, serial_test)
from .special import erfc, igamc, normal_cdf

__all__ = [
    "BatteryParams", "BatteryReport", "ProportionLine", "TestResult",
    "METHOD_NOTE",
    "aperiodic_templates", "approximate_entropy", "battery", "battery_many",
    "binary_matrix_rank", "block_frequency", "confidence_interval",
    "cumulative_sums", "dft_spectral", "erfc", "frequency_monobit", "igamc",
    "linear_complexity", "longest_run_of_ones", "maurer_universal",
    "non_overlapping_templates", "normal_cdf", "overlapping_templates",
    "proportion_analysis", "random_excursions", "random_excursions_variant",
    "runs_test", "serial_test", "write_results_csv", "write_summary_csv",
]
