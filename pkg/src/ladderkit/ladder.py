"""Ladder filter synthesis, simulation and static-capacitance optimisation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.optimize import minimize

from .errors import InvalidOrder, InvalidSpec, NoPassband, NoResult, SingularNetwork
from .mbvd import COUPLING_RATIO, MbvdParams, ResonatorSpec, admittance, mbvd_from_spec
from .metrics import FilterMetrics, filter_metrics
from .network import IDENTITY, Abcd, abcd_to_s
from .traces import FrequencyGrid, FrequencySweep


class Orientation(str, Enum):
    SERIES = "series"
    SHUNT = "shunt"


@dataclass(frozen=True)
class Stage:
    orientation: Orientation
    resonator: MbvdParams


@dataclass(frozen=True)
class LadderTopology:
    stages: Tuple[Stage, ...]

    def __post_init__(self):
        stages = tuple(self.stages)
        if not stages:
            raise InvalidOrder("a ladder needs at least one stage")
        kinds = {s.orientation for s in stages}
        if len(stages) >= 2 and kinds != {Orientation.SERIES, Orientation.SHUNT}:
            raise InvalidOrder("ladders of order >= 2 need both series and shunt stages")
        object.__setattr__(self, "stages", stages)

    @property
    def order(self) -> int:
        return len(self.stages)

    @property
    def orientations(self) -> list[Orientation]:
        return [s.orientation for s in self.stages]


def shunt_fs_for(target_fs_series: float, k2: float) -> float:
    """Shunt series-resonance that puts the shunt fp on ``target_fs_series``."""
    return target_fs_series / math.sqrt(1.0 + COUPLING_RATIO * k2)


def synthesize(
    target_fs_series: float,
    k2: float,
    q: float,
    c0_series: float,
    c0_shunt: float,
    order: int = 3,
    rs: float = 0.0,
    ls: float = 0.0,
    first: Union[Orientation, str] = Orientation.SERIES,
) -> LadderTopology:
    """Alternating ladder whose shunt antiresonance overlaps the series resonance.

    Stages alternate starting with ``first``; all series stages share one
    resonator, as do all shunt stages.
    """
    if isinstance(order, bool) or int(order) != order or order < 2:
        raise InvalidOrder(f"order must be an integer >= 2, got {order!r}")
    first = Orientation(first)
    series = mbvd_from_spec(ResonatorSpec(target_fs_series, k2, q, c0_series, rs, ls))
    shunt = mbvd_from_spec(ResonatorSpec(shunt_fs_for(target_fs_series, k2), k2, q, c0_shunt, rs, ls))
    other = Orientation.SHUNT if first is Orientation.SERIES else Orientation.SERIES
    stages = []
    for i in range(int(order)):
        kind = first if i % 2 == 0 else other
        stages.append(Stage(kind, series if kind is Orientation.SERIES else shunt))
    return LadderTopology(tuple(stages))


def _frequencies(grid: Union[FrequencyGrid, Sequence[float], np.ndarray]) -> np.ndarray:
    if isinstance(grid, FrequencyGrid):
        return grid.frequencies()
    return np.asarray(grid, dtype=float)


def sweep(t: LadderTopology, grid: Union[FrequencyGrid, np.ndarray], z0: float = 50.0) -> FrequencySweep:
    """Two-port S-parameters of the ladder at every grid frequency."""
    f = _frequencies(grid)
    m = IDENTITY
    with np.errstate(divide="ignore", invalid="ignore"):
        for stage in t.stages:
            y = admittance(stage.resonator, f)
            if stage.orientation is Orientation.SERIES:
                z = 1.0 / y
                _require_finite(z, f, "series stage impedance")
                m = Abcd(m.a, m.a * z + m.b, m.c, m.c * z + m.d)
            else:
                _require_finite(y, f, "shunt stage admittance")
                m = Abcd(m.a + m.b * y, m.b, m.c + m.d * y, m.d)
    try:
        # every series or shunt section has unit determinant
        s = abcd_to_s(m, z0, det=1.0)
    except SingularNetwork as exc:
        freq = float(f[exc.index]) if exc.index is not None else None
        raise SingularNetwork("ladder network is singular", frequency=freq, index=exc.index) from None
    return FrequencySweep(f, {"S11": s.s11, "S21": s.s21, "S12": s.s12, "S22": s.s22})


def _require_finite(values: np.ndarray, f: np.ndarray, what: str) -> None:
    bad = ~np.isfinite(values)
    if bad.any():
        i = int(np.flatnonzero(bad)[0])
        raise SingularNetwork(f"{what} is not finite", frequency=float(f[i]), index=i)


@dataclass(frozen=True)
class LadderBase:
    """Everything :func:`synthesize` needs except the two static capacitances."""

    target_fs_series: float
    k2: float
    q: float
    order: int = 3
    rs: float = 0.0
    ls: float = 0.0
    first: Orientation = Orientation.SERIES

    def build(self, c0_series: float, c0_shunt: float) -> LadderTopology:
        return synthesize(
            self.target_fs_series, self.k2, self.q, c0_series, c0_shunt,
            self.order, self.rs, self.ls, self.first,
        )


@dataclass(frozen=True)
class C0Result:
    c0_series: float
    c0_shunt: float
    metrics: FilterMetrics
    objective: float
    coarse_best: float


# dB of objective per dB of missing rejection
REJECTION_PENALTY = 10.0


class _Objective:
    """Insertion loss, plus a penalty when out-of-band rejection is short of the floor."""

    def __init__(self, base: LadderBase, f: np.ndarray, z0: float, min_rejection_db: float | None,
                 rejection_offset: float):
        self.base = base
        self.f = f
        self.z0 = z0
        self.min_rejection_db = min_rejection_db
        self.rejection_offset = rejection_offset

    def evaluate(self, c0_series: float, c0_shunt: float) -> tuple[float, FilterMetrics | None]:
        try:
            response = sweep(self.base.build(c0_series, c0_shunt), self.f, self.z0)
            m = filter_metrics(response, self.rejection_offset)
        except (NoResult, SingularNetwork):
            return math.inf, None
        value = m.il_db
        if self.min_rejection_db is not None:
            value += REJECTION_PENALTY * max(0.0, self.min_rejection_db - m.rejection_db)
        return value, m

    def __call__(self, c0_series: float, c0_shunt: float) -> float:
        return self.evaluate(c0_series, c0_shunt)[0]


def _check_range(name: str, rng: Tuple[float, float]) -> Tuple[float, float]:
    lo, hi = (float(v) for v in rng)
    if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo <= hi):
        raise InvalidSpec(f"{name} range must satisfy 0 < min <= max, got {rng!r}")
    return lo, hi


def optimize_c0(
    base: LadderBase,
    series_range: Tuple[float, float],
    shunt_range: Tuple[float, float],
    grid: FrequencyGrid,
    z0: float = 50.0,
    coarse_points: int = 16,
    min_rejection_db: float | None = 10.0,
    rejection_offset: float = 0.5,
) -> C0Result:
    """Choose (c0_series, c0_shunt) for the lowest insertion loss.

    A logarithmic ``coarse_points`` x ``coarse_points`` scan picks the start
    for a bounded Nelder-Mead refinement in normalised log coordinates.  The
    refinement stops once the simplex is below 0.1 % of each range.  With
    ``min_rejection_db`` set, designs whose worse-side rejection falls short
    are penalised; without it the search drifts to the corner where the
    shunt arm vanishes and the ladder no longer filters.
    """
    s_lo, s_hi = _check_range("c0_series", series_range)
    p_lo, p_hi = _check_range("c0_shunt", shunt_range)
    objective = _Objective(base, _frequencies(grid), z0, min_rejection_db, rejection_offset)
    # validate the non-capacitance inputs once, so bad specs are not mistaken for "no passband"
    base.build(s_lo, p_lo)

    bounds = [(math.log(s_lo), math.log(s_hi)), (math.log(p_lo), math.log(p_hi))]
    free = [i for i, (a, b) in enumerate(bounds) if b > a]

    def to_c0(u: np.ndarray) -> tuple[float, float]:
        logs = [a + (b - a) * float(np.clip(u[i], 0.0, 1.0)) for i, (a, b) in enumerate(bounds)]
        return math.exp(logs[0]), math.exp(logs[1])

    n = max(int(coarse_points), 1)
    axes = [np.linspace(0.0, 1.0, n) if i in free else np.zeros(1) for i in range(2)]
    candidates = []
    for us in axes[0]:
        for up in axes[1]:
            c0s, c0p = to_c0(np.array([us, up]))
            candidates.append((objective(c0s, c0p), c0s, c0p, us, up))
    # ties: lowest objective, then smallest c0_series, then smallest c0_shunt
    best = min(candidates, key=lambda c: c[:3])
    if not math.isfinite(best[0]):
        raise NoPassband("no passband for any capacitance pair in range")
    coarse_best = best[0]
    incumbent = (best[0], best[1], best[2])

    if free:
        u0 = np.array([best[3], best[4]])
        step = 1.0 / max(n - 1, 1)

        def reduced(x: np.ndarray) -> float:
            u = u0.copy()
            u[free] = x
            return objective(*to_c0(u))

        x0 = u0[free]
        simplex = [x0]
        for k in range(len(free)):
            vertex = x0.copy()
            vertex[k] = x0[k] + step if x0[k] + step <= 1.0 else x0[k] - step
            simplex.append(vertex)
        res = minimize(
            reduced, x0, method="Nelder-Mead",
            bounds=[(0.0, 1.0)] * len(free),
            options={"initial_simplex": np.array(simplex), "xatol": 1e-3, "fatol": 1e-6, "maxiter": 2000},
        )
        if np.isfinite(res.fun) and res.fun < incumbent[0]:
            u = u0.copy()
            u[free] = res.x
            c0s, c0p = to_c0(u)
            incumbent = (objective(c0s, c0p), c0s, c0p)

    value, metrics = objective.evaluate(incumbent[1], incumbent[2])
    return C0Result(incumbent[1], incumbent[2], metrics, value, coarse_best)
