"""Least-squares extraction of MBVD element values from one-port admittance."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import BadInitialPoint, DegenerateTrace, InputError
from .mbvd import TWO_PI, MbvdParams, admittance, extract_fs_fp_from_trace
from .metrics import resonator_report
from .network import one_port_y
from .traces import FrequencySweep

WEIGHT_FLOOR = 1e-6  # siemens
# normalised objective below this is treated as an exact fit
OBJECTIVE_FLOOR = 1e-26
GUESS_WINDOW = 0.2  # nepers around each |Y| extremum

CORE = ("c0", "rm", "lm", "cm")
PARASITIC = ("rs", "ls")


@dataclass(frozen=True)
class FitOptions:
    max_iterations: int = 50
    tolerance: float = 1e-9
    weighting: str = "magnitude"
    fit_parasitics: bool = False
    f_min: float | None = None
    f_max: float | None = None

    def __post_init__(self):
        if isinstance(self.max_iterations, bool) or int(self.max_iterations) != self.max_iterations \
                or self.max_iterations < 1:
            raise InputError(f"max_iterations must be an integer >= 1, got {self.max_iterations!r}")
        if not (math.isfinite(self.tolerance) and self.tolerance > 0):
            raise InputError(f"tolerance must be positive, got {self.tolerance!r}")
        if self.weighting not in ("uniform", "magnitude"):
            raise InputError(f"weighting must be 'uniform' or 'magnitude', got {self.weighting!r}")


@dataclass(frozen=True)
class FitResult:
    params: MbvdParams
    residual: float
    converged: bool
    iterations: int
    objective_history: tuple = field(default=(), repr=False)


def admittance_sweep(sweep: FrequencySweep, z0: float = 50.0) -> FrequencySweep:
    """Return a sweep carrying a ``Y`` trace, converting from ``S11`` if needed."""
    if "Y" in sweep:
        return sweep
    if "S11" in sweep:
        return FrequencySweep(sweep.frequencies, {"Y": one_port_y(sweep["S11"], z0)})
    raise InputError("sweep has neither a Y nor an S11 trace")


def initial_guess(sweep: FrequencySweep) -> MbvdParams:
    """Starting point for :func:`fit_mbvd`, read off the admittance trace.

    fs and fp are located with a noise-averaging fit over the top
    ``GUESS_WINDOW`` nepers of each extremum.  c0 comes from Im(Y)/w over
    the lowest tenth of the sweep.  Each sample is
    divided by the lossless motional contribution implied by the extracted
    (fs, fp) before taking the median, so a sweep that starts close to
    resonance does not inflate c0.
    """
    sweep = admittance_sweep(sweep)
    fs, fp = extract_fs_fp_from_trace(sweep, window=GUESS_WINDOW)
    f = sweep.frequencies
    y = sweep["Y"]
    ratio2 = (fp / fs) ** 2
    n_low = max(1, f.size // 10)
    low = slice(0, n_low)
    c_apparent = y[low].imag / (TWO_PI * f[low])
    below = f[low] < fs
    if below.any():
        x2 = (f[low][below] / fs) ** 2
        c0 = float(np.median(c_apparent[below] / (1.0 + (ratio2 - 1.0) / (1.0 - x2))))
    else:
        c0 = float(np.median(c_apparent))
    if not (math.isfinite(c0) and c0 > 0):
        raise DegenerateTrace(f"static capacitance estimate is not positive ({c0!r})")
    cm = c0 * (ratio2 - 1.0)
    lm = 1.0 / ((TWO_PI * fs) ** 2 * cm)
    g_max = float(y.real.max())
    if not (math.isfinite(g_max) and g_max > 0):
        raise DegenerateTrace("admittance has no positive real part")
    return MbvdParams(c0=c0, rm=1.0 / g_max, lm=lm, cm=cm)


class _Problem:
    def __init__(self, sweep: FrequencySweep, names: tuple[str, ...], fixed: dict, weighting: str):
        self.f = sweep.frequencies
        self.y = sweep["Y"]
        self.names = names
        self.fixed = fixed
        if weighting == "magnitude":
            self.w = 1.0 / np.maximum(np.abs(self.y), WEIGHT_FLOOR)
        else:
            self.w = np.ones_like(self.f)
        self.scale = float(np.sum(self.w * np.abs(self.y) ** 2)) or 1.0

    def params(self, x: np.ndarray) -> MbvdParams:
        values = dict(self.fixed)
        values.update(zip(self.names, np.exp(x)))
        return MbvdParams(**values)

    def model(self, x: np.ndarray) -> np.ndarray:
        values = dict(self.fixed)
        values.update(zip(self.names, np.exp(x)))
        w = TWO_PI * self.f
        z_motional = values["rm"] + 1j * (w * values["lm"] - 1.0 / (w * values["cm"]))
        y = 1j * w * values["c0"] + 1.0 / z_motional
        if values["rs"] or values["ls"]:
            y = 1.0 / (values["rs"] + 1j * w * values["ls"] + 1.0 / y)
        return y

    def __call__(self, x: np.ndarray) -> float:
        with np.errstate(all="ignore"):
            err = self.model(x) - self.y
            value = float(np.sum(self.w * (err.real**2 + err.imag**2))) / self.scale
        return value if math.isfinite(value) else math.inf


def fit_mbvd(sweep: FrequencySweep, init: MbvdParams, opts: FitOptions = FitOptions()) -> FitResult:
    """Weighted complex least squares over log-transformed element values.

    Each iteration is one Nelder-Mead run started from the best point so far;
    the fit has converged once an iteration lowers the objective by less than
    ``opts.tolerance`` (relative), or the objective reaches round-off level.
    """
    sweep = admittance_sweep(sweep).window(opts.f_min, opts.f_max)
    if len(sweep) < 5:
        raise InputError("fit window holds fewer than 5 points")

    ws = 1.0 / math.sqrt(init.lm * init.cm)
    start = {
        "c0": init.c0,
        "lm": init.lm,
        "cm": init.cm,
        "rm": init.rm if init.rm > 0 else 1e-6 * ws * init.lm,
    }
    if opts.fit_parasitics:
        names = CORE + PARASITIC
        start["rs"] = init.rs if init.rs > 0 else 0.1 * start["rm"]
        start["ls"] = init.ls if init.ls > 0 else 0.01 * init.lm
        fixed = {}
    else:
        names = CORE
        fixed = {"rs": init.rs, "ls": init.ls}
    problem = _Problem(sweep, names, fixed, opts.weighting)

    x = np.log([start[n] for n in names])
    value = problem(x)
    if not math.isfinite(value):
        raise BadInitialPoint("objective is not finite at the initial point")

    history = [value]
    converged = False
    iterations = 0
    step = 0.05
    dims = len(names)
    while iterations < opts.max_iterations:
        iterations += 1
        simplex = np.vstack([x] + [x + step * np.eye(dims)[k] for k in range(dims)])
        res = minimize(
            problem, x, method="Nelder-Mead",
            options={"initial_simplex": simplex, "xatol": 1e-13, "fatol": 1e-300,
                     "maxfev": 1500 * dims, "maxiter": 1500 * dims},
        )
        new_value = float(res.fun)
        if new_value < value:
            moved = float(np.max(np.abs(res.x - x)))
            x, decrease = res.x, (value - new_value) / value
            value = new_value
        else:
            moved, decrease = 0.0, 0.0
        history.append(value)
        if value <= OBJECTIVE_FLOOR or decrease < opts.tolerance:
            converged = True
            break
        step = float(np.clip(10.0 * moved, 1e-6, 0.05))

    params = problem.params(x)
    err = admittance(params, sweep.frequencies) - sweep["Y"]
    residual = float(np.sqrt(np.mean(np.abs(err) ** 2)))
    return FitResult(params, residual, converged, iterations, tuple(history))


def fit_report(result: FitResult) -> dict:
    """Resonator figures of merit of the fitted model plus fit diagnostics."""
    p = result.params
    report = resonator_report(p).to_dict()
    report.update(
        {
            "params": {"c0_f": p.c0, "rm_ohm": p.rm, "lm_h": p.lm, "cm_f": p.cm, "rs_ohm": p.rs, "ls_h": p.ls},
            "residual_s": result.residual,
            "converged": result.converged,
            "iterations": result.iterations,
        }
    )
    return report
