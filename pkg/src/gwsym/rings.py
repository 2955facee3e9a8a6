"""Exact arithmetic for finite local commutative rings with residue field F2.

Two families are supported, both of size 2**n for a parameter n >= 1:

* ``z2k:n``    -- the cyclic ring Z/2^n, elements encoded as integers in
  [0, 2^n)
* ``trunc2:n`` -- the truncated polynomial ring F2[x]/(x^n), elements
  encoded as bit masks where bit i holds the coefficient of x^i

The two encodings share convenient structure: the units are exactly the
odd codes, the maximal ideal is the even codes, and reduction to the
residue field F2 is ``code & 1``.  Elements print as decimal integers
(z2k) or as bit strings with the constant term first (trunc2), e.g.
``1101`` for 1 + x + x^3.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

Z2K = "z2k"
TRUNC2 = "trunc2"

# Dense size x size operation tables stop being reasonable past this; the
# enumerative machinery (relation search, orbit search) needs them.
MAX_TABLE_N = 11

_SPEC_RE = re.compile(r"^(z2k|trunc2):([0-9]+)$")


class RingError(Exception):
    """Base class for ring-level failures."""


class SpecParseError(RingError):
    pass


class SpecMismatchError(RingError):
    pass


class NonUnitError(RingError):
    pass


class CapExceededError(RingError):
    """An enumeration or search exceeded its configured resource cap."""


@dataclass(frozen=True)
class RingSpec:
    """A finite local ring of size 2^n: Z/2^n (``z2k``) or F2[x]/(x^n)
    (``trunc2``)."""

    family: str
    n: int

    def __post_init__(self) -> None:
        if self.family not in (Z2K, TRUNC2):
            raise SpecParseError(f"unknown ring family {self.family!r}")
        if self.n < 1:
            raise SpecParseError(f"ring parameter must be >= 1, got {self.n}")

    def __str__(self) -> str:
        return f"{self.family}:{self.n}"

    @property
    def size(self) -> int:
        return 1 << self.n

    @property
    def mask(self) -> int:
        return (1 << self.n) - 1

    # -- arithmetic on canonical codes ------------------------------------

    def add(self, a: int, b: int) -> int:
        if self.family == Z2K:
            return (a + b) & self.mask
        return a ^ b

    def sub(self, a: int, b: int) -> int:
        if self.family == Z2K:
            return (a - b) & self.mask
        return a ^ b

    def neg(self, a: int) -> int:
        if self.family == Z2K:
            return (-a) & self.mask
        return a

    def mul(self, a: int, b: int) -> int:
        if self.family == Z2K:
            return (a * b) & self.mask
        acc = 0
        while a:
            if a & 1:
                acc ^= b
            a >>= 1
            b <<= 1
        return acc & self.mask

    def inv(self, a: int) -> int:
        if not self.is_unit(a):
            raise NonUnitError(f"{self.format_element(a)} is not a unit of {self}")
        if self.family == Z2K:
            return pow(a, -1, self.size)
        # a = 1 + m with m nilpotent; geometric series terminates.
        m = a ^ 1
        acc, term = 1, 1
        while True:
            term = self.mul(term, m)
            if term == 0:
                return acc
            acc ^= term

    def is_unit(self, a: int) -> bool:
        return bool(a & 1)

    def residue(self, a: int) -> int:
        """Image in the residue field F2, as 0 or 1."""
        return a & 1

    # -- enumeration -------------------------------------------------------

    def element_codes(self) -> range:
        return range(self.size)

    def unit_codes(self) -> range:
        return range(1, self.size, 2)

    def ideal_codes(self) -> range:
        return range(0, self.size, 2)

    def elements(self) -> list["RingElement"]:
        return [RingElement(self, c) for c in self.element_codes()]

    def units(self) -> list["RingElement"]:
        return [RingElement(self, c) for c in self.unit_codes()]

    def maximal_ideal(self) -> list["RingElement"]:
        return [RingElement(self, c) for c in self.ideal_codes()]

    # -- element construction and text form --------------------------------

    def element(self, value) -> "RingElement":
        if isinstance(value, RingElement):
            if value.ring != self:
                raise SpecMismatchError(f"element of {value.ring} used in {self}")
            return value
        if isinstance(value, str):
            return RingElement(self, self.parse_element(value))
        code = int(value)
        if self.family == Z2K:
            code &= self.mask
        elif not 0 <= code < self.size:
            raise SpecParseError(f"code {value} out of range for {self}")
        return RingElement(self, code)

    def zero(self) -> "RingElement":
        return RingElement(self, 0)

    def one(self) -> "RingElement":
        return RingElement(self, 1)

    def from_int(self, k: int) -> "RingElement":
        """Image of the integer k under the unique map Z -> R."""
        if self.family == Z2K:
            return RingElement(self, k & self.mask)
        return RingElement(self, k & 1)

    def format_element(self, code: int) -> str:
        if self.family == Z2K:
            return str(code)
        return "".join("1" if (code >> i) & 1 else "0" for i in range(self.n))

    def parse_element(self, text: str) -> int:
        if self.family == Z2K:
            if not text.isdigit():
                raise SpecParseError(f"bad z2k element {text!r}")
            return int(text) & self.mask
        if len(text) != self.n or any(ch not in "01" for ch in text):
            raise SpecParseError(
                f"bad trunc2 element {text!r}: want {self.n} bits, constant term first"
            )
        return sum(1 << i for i, ch in enumerate(text) if ch == "1")

    # -- canonical quotient map within a family -----------------------------

    def project_code(self, target: "RingSpec", code: int) -> int:
        if target.family != self.family or target.n > self.n:
            raise SpecMismatchError(f"no canonical projection {self} -> {target}")
        return code & target.mask


def parse_ring_spec(text: str) -> RingSpec:
    """Parse ``z2k:<n>`` or ``trunc2:<n>`` with n >= 1."""
    m = _SPEC_RE.match(text)
    if m is None:
        raise SpecParseError(f"bad ring spec {text!r}: want z2k:<n> or trunc2:<n>")
    n = int(m.group(2))
    if n < 1:
        raise SpecParseError(f"bad ring spec {text!r}: parameter must be >= 1")
    return RingSpec(m.group(1), n)


class RingElement:
    """An element of a ``RingSpec`` ring, held as its canonical code.

    Supports the usual operators; mixing elements of different rings
    raises ``SpecMismatchError``.
    """

    __slots__ = ("ring", "code")

    def __init__(self, ring: RingSpec, code: int):
        self.ring = ring
        self.code = code

    def _coerce(self, other) -> "RingElement":
        if isinstance(other, RingElement):
            if other.ring != self.ring:
                raise SpecMismatchError(
                    f"cannot combine elements of {self.ring} and {other.ring}"
                )
            return other
        if isinstance(other, int):
            return self.ring.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RingElement(self.ring, self.ring.add(self.code, other.code))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RingElement(self.ring, self.ring.sub(self.code, other.code))

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RingElement(self.ring, self.ring.sub(other.code, self.code))

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RingElement(self.ring, self.ring.mul(self.code, other.code))

    __rmul__ = __mul__

    def __neg__(self):
        return RingElement(self.ring, self.ring.neg(self.code))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inv()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inv()

    def __pow__(self, k: int):
        if k < 0:
            return self.inv() ** (-k)
        acc = self.ring.one()
        base = self
        while k:
            if k & 1:
                acc = acc * base
            base = base * base
            k >>= 1
        return acc

    def inv(self) -> "RingElement":
        return RingElement(self.ring, self.ring.inv(self.code))

    @property
    def is_unit(self) -> bool:
        return self.ring.is_unit(self.code)

    def residue(self) -> int:
        return self.ring.residue(self.code)

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.from_int(other)
        if not isinstance(other, RingElement):
            return NotImplemented
        return self.ring == other.ring and self.code == other.code

    def __hash__(self):
        return hash((self.ring, self.code))

    def __str__(self):
        return self.ring.format_element(self.code)

    def __repr__(self):
        return f"<{self} in {self.ring}>"


@dataclass(frozen=True)
class OpTables:
    """Dense numpy operation tables keyed by canonical code; the workhorse
    behind vectorized relation enumeration and orbit search."""

    spec: RingSpec
    add: np.ndarray  # size x size
    mul: np.ndarray  # size x size
    neg: np.ndarray  # size
    inv: np.ndarray  # size, -1 on non-units
    units: np.ndarray  # ascending unit codes


@lru_cache(maxsize=None)
def op_tables(spec: RingSpec) -> OpTables:
    if spec.n > MAX_TABLE_N:
        raise CapExceededError(
            f"{spec} is too large for dense op tables (n <= {MAX_TABLE_N})"
        )
    size = spec.size
    codes = np.arange(size, dtype=np.int64)
    a = codes[:, None]
    b = codes[None, :]
    if spec.family == Z2K:
        add = (a + b) & spec.mask
        mul = (a * b) & spec.mask
        neg = (-codes) & spec.mask
    else:
        add = a ^ b
        mul = np.zeros((size, size), dtype=np.int64)
        for i in range(spec.n):
            mul ^= ((a >> i) & 1) * ((b << i) & spec.mask)
        neg = codes.copy()
    inv = np.full(size, -1, dtype=np.int64)
    for u in spec.unit_codes():
        inv[u] = spec.inv(u)
    units = np.array(list(spec.unit_codes()), dtype=np.int64)
    return OpTables(spec, add.astype(np.int64), mul, neg, inv, units)
