"""JSON design configuration for the ``synth`` and ``simulate`` commands.

Keys carry their unit in the name.  Example::

    {
      "fs_series_hz": 22e9, "k2": 0.42, "q": 50, "order": 3, "z0_ohm": 50,
      "c0_series_range_f": [1e-14, 5e-13], "c0_shunt_range_f": [1e-14, 5e-13],
      "topology": "series-first", "min_rejection_db": 10
    }

Give either ``c0_series_f`` or ``c0_series_range_f`` (likewise for shunt).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Optional, Tuple

from .errors import InputError, InvalidSpec
from .ladder import LadderBase, Orientation
from .mbvd import ResonatorSpec
from .traces import FrequencyGrid


class ConfigError(InputError):
    """A configuration field is missing or invalid; ``field`` names it."""

    def __init__(self, field: str, message: str):
        super().__init__(f"config field '{field}': {message}")
        self.field = field


TOPOLOGIES = {"series-first": Orientation.SERIES, "shunt-first": Orientation.SHUNT}
KNOWN_KEYS = {
    "fs_series_hz", "k2", "q", "order", "z0_ohm",
    "c0_series_f", "c0_shunt_f", "c0_series_range_f", "c0_shunt_range_f",
    "rs_ohm", "ls_h", "grid", "topology", "min_rejection_db", "rejection_offset", "coarse_points",
}
GRID_KEYS = {"f_start_hz", "f_stop_hz", "n_points"}


@dataclass(frozen=True)
class DesignConfig:
    fs_series: float
    k2: float
    q: float
    order: int = 3
    z0: float = 50.0
    c0_series: Optional[float] = None
    c0_shunt: Optional[float] = None
    c0_series_range: Optional[Tuple[float, float]] = None
    c0_shunt_range: Optional[Tuple[float, float]] = None
    rs: float = 0.0
    ls: float = 0.0
    grid: Optional[FrequencyGrid] = None
    topology: str = "series-first"
    min_rejection_db: Optional[float] = 10.0
    rejection_offset: float = 0.5
    coarse_points: int = 16

    @property
    def needs_optimisation(self) -> bool:
        return self.c0_series_range is not None or self.c0_shunt_range is not None

    @property
    def base(self) -> LadderBase:
        return LadderBase(self.fs_series, self.k2, self.q, self.order, self.rs, self.ls, TOPOLOGIES[self.topology])

    def frequency_grid(self, n_points: int | None = None) -> FrequencyGrid:
        grid = self.grid or FrequencyGrid.around(self.fs_series)
        if n_points is not None:
            grid = FrequencyGrid(grid.f_start, grid.f_stop, n_points)
        return grid

    def c0_ranges(self) -> tuple[tuple[float, float], tuple[float, float]]:
        series = self.c0_series_range or (self.c0_series, self.c0_series)
        shunt = self.c0_shunt_range or (self.c0_shunt, self.c0_shunt)
        return series, shunt


def _number(raw: dict, key: str, default: Any = ..., *, positive=False, non_negative=False, integer=False):
    if key not in raw:
        if default is ...:
            raise ConfigError(key, "is required")
        return default
    value = raw[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(key, f"must be a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(key, "must be finite")
    if integer and int(value) != value:
        raise ConfigError(key, f"must be an integer, got {value!r}")
    if positive and not value > 0:
        raise ConfigError(key, f"must be positive, got {value!r}")
    if non_negative and value < 0:
        raise ConfigError(key, f"must be non-negative, got {value!r}")
    return int(value) if integer else float(value)


def _range(raw: dict, key: str) -> Optional[Tuple[float, float]]:
    if key not in raw:
        return None
    value = raw[key]
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in value)):
        raise ConfigError(key, f"must be a [min, max] pair of numbers, got {value!r}")
    lo, hi = float(value[0]), float(value[1])
    if not (math.isfinite(lo) and math.isfinite(hi) and 0 < lo <= hi):
        raise ConfigError(key, f"must satisfy 0 < min <= max, got {value!r}")
    return lo, hi


def parse_config(raw: Any) -> DesignConfig:
    """Validate a decoded JSON object and build a :class:`DesignConfig`."""
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "must be a JSON object")
    unknown = sorted(set(raw) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")

    fs = _number(raw, "fs_series_hz", positive=True)
    k2 = _number(raw, "k2")
    if not 0 < k2 < 1:
        raise ConfigError("k2", f"must lie in (0, 1), got {k2!r}")
    q = _number(raw, "q", positive=True)
    order = _number(raw, "order", 3, integer=True)
    if order < 2:
        raise ConfigError("order", f"must be >= 2, got {order!r}")
    z0 = _number(raw, "z0_ohm", 50.0, positive=True)
    rs = _number(raw, "rs_ohm", 0.0, non_negative=True)
    ls = _number(raw, "ls_h", 0.0, non_negative=True)

    c0 = {}
    ranges = {}
    for side in ("series", "shunt"):
        fixed_key, range_key = f"c0_{side}_f", f"c0_{side}_range_f"
        if fixed_key in raw and range_key in raw:
            raise ConfigError(fixed_key, f"give either {fixed_key} or {range_key}, not both")
        c0[side] = _number(raw, fixed_key, None, positive=True)
        ranges[side] = _range(raw, range_key)
        if c0[side] is None and ranges[side] is None:
            raise ConfigError(fixed_key, f"one of {fixed_key} or {range_key} is required")

    topology = raw.get("topology", "series-first")
    if topology not in TOPOLOGIES:
        raise ConfigError("topology", f"must be one of {sorted(TOPOLOGIES)}, got {topology!r}")

    if "min_rejection_db" in raw and raw["min_rejection_db"] is None:
        min_rej = None
    else:
        min_rej = _number(raw, "min_rejection_db", 10.0)
    offset = _number(raw, "rejection_offset", 0.5, positive=True)
    if offset >= 1:
        raise ConfigError("rejection_offset", f"must be below 1, got {offset!r}")
    coarse = _number(raw, "coarse_points", 16, integer=True)
    if coarse < 2:
        raise ConfigError("coarse_points", f"must be >= 2, got {coarse!r}")

    grid = None
    if "grid" in raw:
        g = raw["grid"]
        if not isinstance(g, dict):
            raise ConfigError("grid", "must be an object")
        extra = sorted(set(g) - GRID_KEYS)
        if extra:
            raise ConfigError(f"grid.{extra[0]}", "unknown key")
        try:
            grid = FrequencyGrid(
                _number(g, "f_start_hz", positive=True),
                _number(g, "f_stop_hz", positive=True),
                _number(g, "n_points", 2001, integer=True),
            )
        except ConfigError as exc:
            raise ConfigError(f"grid.{exc.field}", str(exc).split(": ", 1)[1]) from None
        except InputError as exc:
            raise ConfigError("grid", str(exc)) from None

    # resonator invariants, checked with whatever capacitance is known
    probe_c0 = c0["series"] or ranges["series"][0]
    try:
        ResonatorSpec(fs, k2, q, probe_c0, rs, ls)
    except InvalidSpec as exc:
        raise ConfigError("resonator", str(exc)) from None

    return DesignConfig(
        fs_series=fs, k2=k2, q=q, order=order, z0=z0,
        c0_series=c0["series"], c0_shunt=c0["shunt"],
        c0_series_range=ranges["series"], c0_shunt_range=ranges["shunt"],
        rs=rs, ls=ls, grid=grid, topology=topology,
        min_rejection_db=min_rej, rejection_offset=offset, coarse_points=coarse,
    )


def load_config(path) -> DesignConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return parse_config(raw)
