"""Two-port ABCD algebra and conversion to scattering parameters.

Every function accepts complex scalars or numpy arrays; arrays are treated
element-wise so a whole frequency sweep is one call.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Union

import numpy as np

from .errors import InvalidElement, InvalidReference, SingularNetwork

Complex = Union[complex, np.ndarray]


@dataclass(frozen=True, eq=False)
class Abcd:
    """Transmission matrix [[a, b], [c, d]]; b in ohms, c in siemens."""

    a: Complex
    b: Complex
    c: Complex
    d: Complex

    def __matmul__(self, other: "Abcd") -> "Abcd":
        return Abcd(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def det(self) -> Complex:
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        """Stack into shape (..., 2, 2)."""
        a, b, c, d = np.broadcast_arrays(*(np.asarray(x, dtype=complex) for x in (self.a, self.b, self.c, self.d)))
        return np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)


@dataclass(frozen=True, eq=False)
class SParams2:
    s11: Complex
    s21: Complex
    s12: Complex
    s22: Complex
    z0: float


IDENTITY = Abcd(1.0 + 0j, 0j, 0j, 1.0 + 0j)


def _check_finite(value: Complex, what: str) -> None:
    if not np.all(np.isfinite(value)):
        raise InvalidElement(f"{what} must be finite, got {value!r}")


def abcd_series(z: Complex) -> Abcd:
    """Series impedance ``z`` (ohms) between the two ports."""
    _check_finite(z, "series impedance")
    one = np.ones_like(z, dtype=complex) if np.ndim(z) else 1.0 + 0j
    return Abcd(one, z + 0j, 0 * one, one)


def abcd_shunt(y: Complex) -> Abcd:
    """Shunt admittance ``y`` (siemens) to ground."""
    _check_finite(y, "shunt admittance")
    one = np.ones_like(y, dtype=complex) if np.ndim(y) else 1.0 + 0j
    return Abcd(one, 0 * one, y + 0j, one)


def cascade(stages: Iterable[Abcd]) -> Abcd:
    """Left-to-right product of ``stages``; identity for an empty list."""
    return reduce(lambda acc, m: acc @ m, stages, IDENTITY)


def _check_z0(z0: float) -> None:
    if not (np.isfinite(z0) and z0 > 0):
        raise InvalidReference(f"reference impedance must be positive, got {z0!r}")


def abcd_to_s(m: Abcd, z0: float = 50.0, det: Complex | None = None) -> SParams2:
    """S-parameters of ``m`` referenced to ``z0`` at both ports.

    ``det`` may supply a determinant known in closed form (1 for any cascade
    of series and shunt sections); forming a*d - b*c from large entries
    loses digits to cancellation.
    """
    _check_z0(z0)
    bz = m.b / z0
    cz = m.c * z0
    den = m.a + bz + cz + m.d
    zero = np.asarray(den == 0)
    if zero.any():
        index = int(np.flatnonzero(zero)[0]) if zero.ndim else None
        raise SingularNetwork("ABCD to S denominator is zero", index=index)
    return SParams2(
        s11=(m.a + bz - cz - m.d) / den,
        s21=2.0 / den,
        s12=2.0 * (m.a * m.d - m.b * m.c if det is None else det) / den,
        s22=(-m.a + bz - cz + m.d) / den,
        z0=z0,
    )


def one_port_s11(y: Complex, z0: float = 50.0) -> Complex:
    """Reflection coefficient of a one-port with admittance ``y``."""
    _check_z0(z0)
    zy = z0 * np.asarray(y)
    den = 1.0 + zy
    zero = np.asarray(den == 0)
    if zero.any():
        index = int(np.flatnonzero(zero)[0]) if zero.ndim else None
        raise SingularNetwork("one-port reflection denominator is zero", index=index)
    s11 = (1.0 - zy) / den
    return s11 if np.ndim(y) else complex(s11)


def one_port_y(s11: Complex, z0: float = 50.0) -> Complex:
    """Inverse of :func:`one_port_s11`."""
    _check_z0(z0)
    s = np.asarray(s11)
    den = z0 * (1.0 + s)
    zero = np.asarray(den == 0)
    if zero.any():
        index = int(np.flatnonzero(zero)[0]) if zero.ndim else None
        raise SingularNetwork("reflection of -1 has no finite admittance", index=index)
    y = (1.0 - s) / den
    return y if np.ndim(s11) else complex(y)
