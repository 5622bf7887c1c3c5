"""Touchstone v1.x reader and writer for one- and two-port files.

Documents hold frequencies in Hz and values as complex numbers (RI) exactly
as they appear in the file, so Y and Z entries stay normalised to ``r_ref``
until :func:`sweep_from_document` scales them.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import ArityError, InputError, OrderError, ParseError, SingularNetwork, Unsupported
from .network import one_port_s11, one_port_y
from .traces import FrequencySweep

FREQ_UNITS = {"HZ": ("Hz", 1.0), "KHZ": ("kHz", 1e3), "MHZ": ("MHz", 1e6), "GHZ": ("GHz", 1e9)}
UNIT_SCALE = {name: scale for name, scale in FREQ_UNITS.values()}
PARAMETERS = ("S", "Y", "Z")
FORMATS = ("RI", "MA", "DB")

DEFAULTS = {"freq_unit": "GHz", "parameter": "S", "format": "MA", "r_ref": 50.0}

# file column order for two-port rows: S11 S21 S12 S22
TWO_PORT_ORDER = ((0, 0), (1, 0), (0, 1), (1, 1))


@dataclass(frozen=True, eq=False)
class TouchstoneDocument:
    n_ports: int
    frequencies: np.ndarray
    data: np.ndarray
    freq_unit: str = "GHz"
    parameter: str = "S"
    format: str = "MA"
    r_ref: float = 50.0
    comments: tuple = field(default=())

    def __post_init__(self):
        if self.n_ports not in (1, 2):
            raise Unsupported(f"only 1- and 2-port documents are supported, got {self.n_ports!r}")
        if self.freq_unit not in UNIT_SCALE:
            raise InputError(f"unknown frequency unit {self.freq_unit!r}")
        if self.parameter not in PARAMETERS:
            raise InputError(f"unknown parameter type {self.parameter!r}")
        if self.format not in FORMATS:
            raise InputError(f"unknown data format {self.format!r}")
        if not (math.isfinite(self.r_ref) and self.r_ref > 0):
            raise InputError(f"reference resistance must be positive, got {self.r_ref!r}")
        f = np.asarray(self.frequencies, dtype=float)
        data = np.asarray(self.data, dtype=complex)
        n = self.n_ports
        if data.shape != (f.size, n, n):
            raise ArityError(f"data shape {data.shape} does not match {f.size} rows of a {n}-port")
        if f.size > 1 and not np.all(np.diff(f) > 0):
            raise OrderError("frequencies must be strictly increasing")
        object.__setattr__(self, "frequencies", f)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "comments", tuple(self.comments))
        object.__setattr__(self, "r_ref", float(self.r_ref))

    def __len__(self) -> int:
        return self.frequencies.size


def ports_from_path(path: str | os.PathLike) -> int:
    ext = os.path.splitext(os.fspath(path))[1].lower()
    if ext == ".s1p":
        return 1
    if ext == ".s2p":
        return 2
    raise Unsupported(f"cannot infer port count from extension {ext!r}; expected .s1p or .s2p")


def _parse_option_line(tokens: Sequence[str], lineno: int) -> dict:
    opts = dict(DEFAULTS)
    it = iter(tokens)
    for tok in it:
        key = tok.upper()
        if key in FREQ_UNITS:
            opts["freq_unit"] = FREQ_UNITS[key][0]
        elif key in PARAMETERS:
            opts["parameter"] = key
        elif key in FORMATS:
            opts["format"] = key
        elif key == "R":
            value = next(it, None)
            if value is None:
                raise ParseError("option line ends after 'R'", lineno)
            try:
                r = float(value)
            except ValueError:
                raise ParseError(f"bad reference resistance {value!r}", lineno) from None
            if not (math.isfinite(r) and r > 0):
                raise ParseError(f"reference resistance must be positive, got {value!r}", lineno)
            opts["r_ref"] = r
        else:
            raise ParseError(f"unrecognised option {tok!r}", lineno)
    return opts


def _to_complex(a: np.ndarray, b: np.ndarray, fmt: str) -> np.ndarray:
    if fmt == "RI":
        return a + 1j * b
    mag = a if fmt == "MA" else 10.0 ** (a / 20.0)
    rad = np.radians(b)
    return mag * (np.cos(rad) + 1j * np.sin(rad))


def parse_touchstone(text: str | Iterable[str], n_ports: int) -> TouchstoneDocument:
    """Parse Touchstone v1 text; ``n_ports`` normally comes from the file extension."""
    if n_ports not in (1, 2):
        raise Unsupported(f"only 1- and 2-port files are supported, got {n_ports!r}")
    lines = text.splitlines() if isinstance(text, str) else list(text)
    width = 1 + 2 * n_ports * n_ports
    comments: list[str] = []
    opts = None
    rows: list[list[float]] = []
    last_f = -math.inf
    last_line = 0

    for lineno, raw in enumerate(lines, start=1):
        last_line = lineno
        content, bang, comment = raw.partition("!")
        if bang:
            comments.append(comment.rstrip("\r\n"))
        content = content.strip()
        if not content:
            continue
        if content.startswith("["):
            raise ParseError(f"Touchstone v2 keyword {content.split()[0]!r} is not supported (v1.x only)", lineno)
        if content.startswith("#"):
            # only the first option line counts
            if opts is None:
                opts = _parse_option_line(content[1:].split(), lineno)
            continue
        if opts is None:
            raise ParseError("data before the option line ('# <unit> <param> <format> R <ohms>')", lineno)
        tokens = content.split()
        if len(tokens) != width:
            raise ArityError(f"expected {width} numbers for a {n_ports}-port row, got {len(tokens)}", lineno)
        try:
            values = [float(t) for t in tokens]
        except ValueError:
            raise ParseError(f"non-numeric value in row {content!r}", lineno) from None
        f_hz = values[0] * UNIT_SCALE[opts["freq_unit"]]
        if not f_hz > last_f:
            raise OrderError(f"frequency {tokens[0]} does not increase", lineno)
        last_f = f_hz
        values[0] = f_hz
        rows.append(values)

    if opts is None:
        raise ParseError("missing option line", last_line or None)
    if not rows:
        raise ParseError("no data rows", last_line or None)

    table = np.array(rows)
    values = _to_complex(table[:, 1::2], table[:, 2::2], opts["format"])
    data = np.empty((len(rows), n_ports, n_ports), dtype=complex)
    if n_ports == 1:
        data[:, 0, 0] = values[:, 0]
    else:
        for col, (i, j) in enumerate(TWO_PORT_ORDER):
            data[:, i, j] = values[:, col]
    return TouchstoneDocument(n_ports, table[:, 0], data, comments=tuple(comments), **opts)


def _num(x: float) -> str:
    return format(float(x), ".12g")


def _r_ref_text(r: float) -> str:
    text = repr(float(r))
    return text[:-2] if text.endswith(".0") else text


def _pair(v: complex, fmt: str) -> tuple[float, float]:
    if fmt == "RI":
        return v.real, v.imag
    mag = abs(v)
    deg = math.degrees(math.atan2(v.imag, v.real)) if mag else 0.0
    if fmt == "MA":
        return mag, deg
    return (20.0 * math.log10(mag) if mag else -math.inf), deg


def write_touchstone(doc: TouchstoneDocument) -> str:
    """Serialise with comments first, then the option line, then 12-digit rows."""
    out = [f"!{c}" for c in doc.comments]
    out.append(f"# {doc.freq_unit} {doc.parameter} {doc.format} R {_r_ref_text(doc.r_ref)}")
    scale = UNIT_SCALE[doc.freq_unit]
    order = TWO_PORT_ORDER if doc.n_ports == 2 else ((0, 0),)
    for f, m in zip(doc.frequencies, doc.data):
        fields = [_num(f / scale)]
        for i, j in order:
            a, b = _pair(complex(m[i, j]), doc.format)
            fields += [_num(a), _num(b)]
        out.append(" ".join(fields))
    return "\n".join(out) + "\n"


def read_touchstone(path: str | os.PathLike) -> TouchstoneDocument:
    n_ports = ports_from_path(path)
    with open(path, encoding="utf-8") as fh:
        return parse_touchstone(fh.read(), n_ports)


def write_touchstone_file(path: str | os.PathLike, doc: TouchstoneDocument) -> None:
    if ports_from_path(path) != doc.n_ports:
        raise InputError(f"{os.fspath(path)!r} extension does not match a {doc.n_ports}-port document")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(write_touchstone(doc))


def _two_port_to_s(doc: TouchstoneDocument) -> np.ndarray:
    eye = np.eye(2)
    if doc.parameter == "S":
        return doc.data
    # Y and Z entries are normalised to r_ref already
    if doc.parameter == "Z":
        return (doc.data - eye) @ np.linalg.inv(doc.data + eye)
    return (eye - doc.data) @ np.linalg.inv(eye + doc.data)


def sweep_from_document(doc: TouchstoneDocument) -> FrequencySweep:
    """Bridge a document to a sweep.

    One-port S files yield ``S11`` and the admittance ``Y``; one-port Y files
    yield ``Y`` in siemens.  Two-port files yield ``S11 S21 S12 S22``, with Y
    and Z data converted to S at ``r_ref``.
    """
    f = doc.frequencies
    if doc.n_ports == 1:
        values = doc.data[:, 0, 0]
        if doc.parameter == "Z":
            raise Unsupported("one-port Z-parameter files are not supported; export S or Y")
        if doc.parameter == "Y":
            return FrequencySweep(f, {"Y": values / doc.r_ref})
        traces = {"S11": values}
        try:
            traces["Y"] = one_port_y(values, doc.r_ref)
        except SingularNetwork:
            pass
        return FrequencySweep(f, traces)
    s = _two_port_to_s(doc)
    return FrequencySweep(f, {f"S{i + 1}{j + 1}": s[:, i, j] for i in range(2) for j in range(2)})


def document_from_sweep(
    sweep: FrequencySweep,
    n_ports: int | None = None,
    parameter: str = "S",
    format: str = "RI",
    freq_unit: str = "GHz",
    r_ref: float = 50.0,
    comments: Sequence[str] = (),
) -> TouchstoneDocument:
    """Inverse of :func:`sweep_from_document`."""
    if n_ports is None:
        n_ports = 2 if "S21" in sweep else 1
    f = sweep.frequencies
    if n_ports == 2:
        if parameter != "S":
            raise Unsupported("two-port documents are written as S-parameters only")
        missing = [n for n in ("S11", "S21", "S12", "S22") if n not in sweep]
        if missing:
            raise InputError(f"sweep lacks traces {missing} for a 2-port document")
        data = np.empty((f.size, 2, 2), dtype=complex)
        for i in range(2):
            for j in range(2):
                data[:, i, j] = sweep[f"S{i + 1}{j + 1}"]
    elif n_ports == 1:
        if parameter == "S":
            values = sweep["S11"] if "S11" in sweep else one_port_s11(sweep["Y"], r_ref)
        elif parameter == "Y":
            values = (sweep["Y"] if "Y" in sweep else one_port_y(sweep["S11"], r_ref)) * r_ref
        else:
            raise Unsupported("one-port Z-parameter documents are not supported")
        data = np.asarray(values, dtype=complex).reshape(-1, 1, 1)
    else:
        raise Unsupported(f"only 1- and 2-port documents are supported, got {n_ports!r}")
    return TouchstoneDocument(n_ports, f, data, freq_unit, parameter, format, r_ref, tuple(comments))
