"""Acoustic-resonator ladder filter synthesis, simulation and MBVD extraction."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .fitting import FitOptions, FitResult, fit_mbvd, fit_report, initial_guess
from .ladder import LadderBase, LadderTopology, Orientation, Stage, optimize_c0, sweep, synthesize
from .mbvd import (
    MbvdParams,
    ResonatorSpec,
    admittance,
    extract_fs_fp_from_trace,
    k2_from_frequencies,
    mbvd_from_spec,
    q_from_params,
    resonance_frequencies,
)
from .metrics import FilterMetrics, band_edges, filter_metrics, resonator_report
from .network import Abcd, SParams2, abcd_series, abcd_shunt, abcd_to_s, cascade, one_port_s11
from .touchstone import (
    TouchstoneDocument,
    document_from_sweep,
    parse_touchstone,
    read_touchstone,
    sweep_from_document,
    write_touchstone,
)
from .traces import FrequencyGrid, FrequencySweep
