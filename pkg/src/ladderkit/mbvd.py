"""Modified Butterworth-Van Dyke resonator model.

Topology: static capacitance ``c0`` in parallel with the motional branch
``rm + lm + cm``; that core sits behind series routing parasitics ``rs`` and
``ls``.  No dielectric-loss resistor is modelled in series with ``c0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, InvalidFrequency, InvalidOrdering, InvalidSpec, NoResonance
from .traces import FrequencySweep

TWO_PI = 2.0 * math.pi
# cm / c0 per unit coupling: fp^2/fs^2 - 1 = (8/pi^2) * k2
COUPLING_RATIO = 8.0 / math.pi**2


def _positive(name: str, value: float) -> None:
    if not (math.isfinite(value) and value > 0):
        raise InvalidSpec(f"{name} must be positive and finite, got {value!r}")


def _non_negative(name: str, value: float) -> None:
    if not (math.isfinite(value) and value >= 0):
        raise InvalidSpec(f"{name} must be non-negative and finite, got {value!r}")


@dataclass(frozen=True)
class MbvdParams:
    """Element values in SI units (F, ohm, H)."""

    c0: float
    rm: float
    lm: float
    cm: float
    rs: float = 0.0
    ls: float = 0.0

    def __post_init__(self):
        for name in ("c0", "lm", "cm"):
            _positive(name, getattr(self, name))
        for name in ("rm", "rs", "ls"):
            _non_negative(name, getattr(self, name))
        fs = 1.0 / (TWO_PI * math.sqrt(self.lm * self.cm))
        if not (math.isfinite(fs) and fs > 0):
            raise InvalidSpec("element values give a non-finite series resonance")

    def replace(self, **changes) -> "MbvdParams":
        values = {k: getattr(self, k) for k in ("c0", "rm", "lm", "cm", "rs", "ls")}
        values.update(changes)
        return MbvdParams(**values)


@dataclass(frozen=True)
class ResonatorSpec:
    """Designer-facing description: fs in Hz, k2 as a fraction, Q, c0 in F."""

    fs: float
    k2: float
    q: float
    c0: float
    rs: float = 0.0
    ls: float = 0.0

    def __post_init__(self):
        _positive("fs", self.fs)
        _positive("q", self.q)
        _positive("c0", self.c0)
        if not (math.isfinite(self.k2) and 0 < self.k2 < 1):
            raise InvalidSpec(f"k2 must lie in (0, 1), got {self.k2!r}")
        _non_negative("rs", self.rs)
        _non_negative("ls", self.ls)

    @property
    def fp(self) -> float:
        return self.fs * math.sqrt(1.0 + COUPLING_RATIO * self.k2)


def mbvd_from_spec(spec: ResonatorSpec) -> MbvdParams:
    if not isinstance(spec, ResonatorSpec):
        raise InvalidSpec(f"expected ResonatorSpec, got {type(spec).__name__}")
    cm = spec.c0 * COUPLING_RATIO * spec.k2
    ws = TWO_PI * spec.fs
    lm = 1.0 / (ws * ws * cm)
    rm = ws * lm / spec.q
    return MbvdParams(c0=spec.c0, rm=rm, lm=lm, cm=cm, rs=spec.rs, ls=spec.ls)


def admittance(p: MbvdParams, f):
    """Complex admittance in siemens at frequency ``f`` (Hz, scalar or array)."""
    f_arr = np.asarray(f, dtype=float)
    if not np.all(f_arr > 0):
        raise InvalidFrequency("admittance needs f > 0")
    w = TWO_PI * f_arr
    with np.errstate(divide="ignore", invalid="ignore"):
        z_motional = p.rm + 1j * (w * p.lm - 1.0 / (w * p.cm))
        y = 1j * w * p.c0 + 1.0 / z_motional
        if p.rs or p.ls:
            y = 1.0 / (p.rs + 1j * w * p.ls + 1.0 / y)
    return y if f_arr.ndim else complex(y)


def resonance_frequencies(p: MbvdParams) -> tuple[float, float]:
    """Lossless analytic (fs, fp); ``rm``, ``rs`` and ``ls`` do not enter."""
    fs = 1.0 / (TWO_PI * math.sqrt(p.lm * p.cm))
    return fs, fs * math.sqrt(1.0 + p.cm / p.c0)


def k2_from_frequencies(fs: float, fp: float) -> float:
    if not fs > 0:
        raise InvalidFrequency(f"fs must be positive, got {fs!r}")
    if fp < fs:
        raise InvalidOrdering(f"fp ({fp!r}) is below fs ({fs!r})")
    return math.pi**2 / 8.0 * (fp * fp / (fs * fs) - 1.0)


def q_from_params(p: MbvdParams) -> float:
    """Series-resonance Q, ``ws*lm/rm``; ``math.inf`` for a lossless branch."""
    if p.rm == 0:
        return math.inf
    fs, _ = resonance_frequencies(p)
    return TWO_PI * fs * p.lm / p.rm


def _parabolic_vertex(x: np.ndarray, y: np.ndarray, i: int) -> float:
    x0, x1, x2 = x[i - 1], x[i], x[i + 1]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    # vertex of the parabola through three (possibly unevenly spaced) points
    num = (x1 - x0) ** 2 * (y1 - y2) - (x1 - x2) ** 2 * (y1 - y0)
    den = (x1 - x0) * (y1 - y2) - (x1 - x2) * (y1 - y0)
    if den == 0 or not np.isfinite(num / den):
        return float(x1)
    xv = x1 - 0.5 * num / den
    return float(min(max(xv, x0), x2))


PEAK_DEGREE = 6


def _refine_extremum(x: np.ndarray, y: np.ndarray, i: int, sign: float, window: float) -> float:
    """Extremum near index ``i`` (maximum for sign +1, minimum for -1)."""
    if window <= 0:
        return _parabolic_vertex(x, y, i)
    v = sign * y
    floor = v[i] - window
    lo = i
    while lo > 0 and v[lo - 1] >= floor:
        lo -= 1
    hi = i
    while hi < x.size - 1 and v[hi + 1] >= floor:
        hi += 1
    if hi - lo < PEAK_DEGREE + 2:
        return _parabolic_vertex(x, y, i)
    P = np.polynomial.Polynomial
    span = x[hi] - x[lo]
    u = (x[lo:hi + 1] - x[i]) / span
    fit = P.fit(u, y[lo:hi + 1], PEAK_DEGREE, domain=[u[0], u[-1]])
    roots = fit.deriv().roots()
    roots = roots[np.abs(roots.imag) < 1e-9].real
    roots = roots[(roots >= u[0]) & (roots <= u[-1])]
    if roots.size == 0:
        return _parabolic_vertex(x, y, i)
    best = roots[np.argmax(sign * fit(roots))]
    return float(x[i] + best * span)


def extract_fs_fp_from_trace(sweep: FrequencySweep, trace: str = "Y", window: float = 0.0) -> tuple[float, float]:
    """Series and parallel resonance from the extrema of ``|Y|``.

    fs is the global maximum of |Y|; fp the minimum above it.  Both are
    refined with a three-point parabola on log|Y|.  A positive ``window``
    (nepers) instead fits a least-squares polynomial to every point within
    that distance of the extremum, which averages out measurement noise at
    the cost of a few ppm of shape bias.  With loss present the extrema sit
    slightly inside the lossless (fs, fp) pair.
    """
    f = sweep.frequencies
    if f.size < 5:
        raise InsufficientData(f"need at least 5 points, got {f.size}")
    mag = np.abs(sweep[trace])
    with np.errstate(divide="ignore"):
        log_mag = np.log(mag)
    if not np.all(np.isfinite(log_mag)):
        log_mag = np.log(np.maximum(mag, np.finfo(float).tiny))
    i = int(np.argmax(log_mag))
    if i == 0 or i >= f.size - 2:
        raise NoResonance("admittance magnitude has no interior maximum")
    j = i + 1 + int(np.argmin(log_mag[i + 1:]))
    if j >= f.size - 1:
        raise NoResonance("no admittance minimum above the series resonance")
    return _refine_extremum(f, log_mag, i, 1.0, window), _refine_extremum(f, log_mag, j, -1.0, window)
