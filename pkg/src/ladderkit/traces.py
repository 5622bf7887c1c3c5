"""Frequency grids and swept complex traces."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import InputError, InvalidFrequency


@dataclass(frozen=True)
class FrequencyGrid:
    """Linear grid with both endpoints included."""

    f_start: float
    f_stop: float
    n_points: int = 2001
    spacing: str = "linear"

    def __post_init__(self):
        if not (np.isfinite(self.f_start) and np.isfinite(self.f_stop)):
            raise InvalidFrequency("grid endpoints must be finite")
        if not 0 < self.f_start < self.f_stop:
            raise InvalidFrequency(f"need 0 < f_start < f_stop, got {self.f_start!r}, {self.f_stop!r}")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise InputError(f"n_points must be an integer >= 2, got {self.n_points!r}")
        if self.spacing != "linear":
            raise InputError(f"unsupported grid spacing {self.spacing!r}")

    @classmethod
    def around(cls, f_center: float, lo: float = 0.6, hi: float = 1.4, n_points: int = 2001) -> "FrequencyGrid":
        """Grid spanning ``[lo, hi] * f_center``."""
        return cls(lo * f_center, hi * f_center, n_points)

    def frequencies(self) -> np.ndarray:
        return np.linspace(self.f_start, self.f_stop, int(self.n_points))


@dataclass(frozen=True, eq=False)
class FrequencySweep:
    """Strictly increasing frequencies (Hz) plus named complex traces of equal length."""

    frequencies: np.ndarray
    traces: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        f = np.asarray(self.frequencies, dtype=float)
        if f.ndim != 1:
            raise InputError("frequencies must be one-dimensional")
        if not np.all(np.isfinite(f)):
            raise InvalidFrequency("frequencies must be finite")
        if f.size > 1 and not np.all(np.diff(f) > 0):
            raise InvalidFrequency("frequencies must be strictly increasing")
        traces = {}
        for name, values in self.traces.items():
            v = np.asarray(values, dtype=complex)
            if v.shape != f.shape:
                raise InputError(f"trace {name!r} has {v.size} points, expected {f.size}")
            traces[name] = v
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "traces", traces)

    @classmethod
    def from_unsorted(cls, frequencies, traces: Mapping[str, np.ndarray]) -> "FrequencySweep":
        """Sort points by frequency before building the sweep."""
        f = np.asarray(frequencies, dtype=float)
        order = np.argsort(f, kind="stable")
        return cls(f[order], {k: np.asarray(v)[order] for k, v in traces.items()})

    def __len__(self) -> int:
        return self.frequencies.size

    def __getitem__(self, name: str) -> np.ndarray:
        return self.traces[name]

    def __contains__(self, name: str) -> bool:
        return name in self.traces

    def window(self, f_min: float | None = None, f_max: float | None = None) -> "FrequencySweep":
        """Points with ``f_min <= f <= f_max``."""
        keep = np.ones(len(self), dtype=bool)
        if f_min is not None:
            keep &= self.frequencies >= f_min
        if f_max is not None:
            keep &= self.frequencies <= f_max
        return FrequencySweep(self.frequencies[keep], {k: v[keep] for k, v in self.traces.items()})
