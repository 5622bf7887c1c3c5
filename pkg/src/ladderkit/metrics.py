"""Figures of merit from swept filter and resonator data."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import InputError, NoPassband
from .mbvd import MbvdParams, k2_from_frequencies, q_from_params, resonance_frequencies
from .traces import FrequencySweep

# floor for |S| before taking dB, keeps zeros interpolable
MAG_FLOOR = 1e-15


def to_db(values) -> np.ndarray:
    return 20.0 * np.log10(np.maximum(np.abs(values), MAG_FLOOR))


class BandEdges(NamedTuple):
    f_lo: float
    f_hi: float
    lo_clipped: bool
    hi_clipped: bool


def band_edges(frequencies, trace_db, level_db: float = 3.0) -> BandEdges:
    """Crossings ``level_db`` below the global peak, nearest the peak on each side.

    Crossings are linear interpolations in dB between bracketing points.  A
    side that never drops below the level returns the grid endpoint with its
    ``*_clipped`` flag set.
    """
    f = np.asarray(frequencies, dtype=float)
    db = np.asarray(trace_db, dtype=float)
    if f.shape != db.shape or f.ndim != 1:
        raise InputError("frequencies and trace must be equal-length 1-D arrays")
    if f.size < 3:
        raise NoPassband("too few points to hold an interior peak")
    peak = int(np.argmax(db))
    if peak == 0 or peak == f.size - 1:
        raise NoPassband("trace peak lies on the grid boundary")
    level = db[peak] - level_db

    def crossing(inside: int, outside: int) -> float:
        t = (level - db[inside]) / (db[outside] - db[inside])
        return float(f[inside] + t * (f[outside] - f[inside]))

    k = peak
    while k > 0 and db[k - 1] >= level:
        k -= 1
    lo_clipped = k == 0
    f_lo = float(f[0]) if lo_clipped else crossing(k, k - 1)

    k = peak
    last = f.size - 1
    while k < last and db[k + 1] >= level:
        k += 1
    hi_clipped = k == last
    f_hi = float(f[last]) if hi_clipped else crossing(k, k + 1)
    return BandEdges(f_lo, f_hi, lo_clipped, hi_clipped)


@dataclass(frozen=True)
class FilterMetrics:
    fc: float
    il_db: float
    fbw_3db: float
    f_lo: float
    f_hi: float
    rl_in_band_db: Optional[float]
    rejection_lo_db: float
    rejection_hi_db: float
    edges_clipped: bool = False

    @property
    def rejection_db(self) -> float:
        """Worse of the two out-of-band rejections."""
        return min(self.rejection_lo_db, self.rejection_hi_db)

    def to_dict(self) -> dict:
        return {
            "fc_hz": self.fc,
            "il_db": self.il_db,
            "fbw_3db": self.fbw_3db,
            "f_lo_hz": self.f_lo,
            "f_hi_hz": self.f_hi,
            "rl_db": self.rl_in_band_db,
            "rejection_db": self.rejection_db,
        }


def filter_metrics(sweep: FrequencySweep, rejection_offset: float = 0.5) -> FilterMetrics:
    """Insertion loss, 3-dB band and related numbers from an S21 (and S11) sweep.

    IL is taken at the |S21| peak; fc is the midpoint of the 3-dB band.
    Rejection is the attenuation relative to IL at ``fc * (1 -/+ rejection_offset)``,
    clipped to the sweep span.
    """
    if "S21" not in sweep:
        raise InputError("sweep has no S21 trace")
    f = sweep.frequencies
    s21 = np.abs(sweep["S21"])
    if not np.any(s21 > 0):
        raise NoPassband("|S21| is zero everywhere")
    s21_db = to_db(s21)
    edges = band_edges(f, s21_db, 3.0)
    peak = float(s21.max())
    il_db = max(0.0, -20.0 * math.log10(peak))
    fc = 0.5 * (edges.f_lo + edges.f_hi)
    fbw = (edges.f_hi - edges.f_lo) / fc

    rl = None
    if "S11" in sweep:
        in_band = (f >= edges.f_lo) & (f <= edges.f_hi)
        worst = float(np.abs(sweep["S11"][in_band]).max())
        rl = float(-to_db(worst))

    attenuation = -s21_db

    def rejection(f_target: float) -> float:
        f_target = min(max(f_target, f[0]), f[-1])
        return float(np.interp(f_target, f, attenuation)) - il_db

    return FilterMetrics(
        fc=fc,
        il_db=il_db,
        fbw_3db=fbw,
        f_lo=edges.f_lo,
        f_hi=edges.f_hi,
        rl_in_band_db=rl,
        rejection_lo_db=rejection(fc * (1.0 - rejection_offset)),
        rejection_hi_db=rejection(fc * (1.0 + rejection_offset)),
        edges_clipped=edges.lo_clipped or edges.hi_clipped,
    )


@dataclass(frozen=True)
class ResonatorReport:
    fs: float
    fp: float
    k2: float
    q: float

    @property
    def q_infinite(self) -> bool:
        return math.isinf(self.q)

    def to_dict(self) -> dict:
        return {
            "fs_hz": self.fs,
            "fp_hz": self.fp,
            "k2": self.k2,
            "k2_percent": 100.0 * self.k2,
            "q": None if self.q_infinite else self.q,
            "q_infinite": self.q_infinite,
        }


def resonator_report(p: MbvdParams) -> ResonatorReport:
    fs, fp = resonance_frequencies(p)
    return ResonatorReport(fs=fs, fp=fp, k2=k2_from_frequencies(fs, fp), q=q_from_params(p))
