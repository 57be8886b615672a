"""Coefficient rings: GF(p), Z/m and Q with exact canonical scalars."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Iterator, Union

MODULUS_CAP = 2**31

Raw = Union[int, Fraction]


# -----------------------------------------------------------------------------
# Errors – every error knows the CLI exit code it maps to
# -----------------------------------------------------------------------------
class PolyImageError(Exception):
    """Base class for all library errors."""

    exit_code = 5


class RingMismatch(PolyImageError):
    """Raised when operands live in different coefficient rings."""


class DimensionMismatch(PolyImageError):
    """Raised when matrix dimensions or arities disagree."""


class NotInvertible(PolyImageError):
    """Raised on division by a non-unit or inversion of a singular matrix."""


class UnsupportedRing(PolyImageError):
    """Raised when an operation needs a ring kind it does not support."""


class FieldTooSmall(PolyImageError):
    """Raised when the field has fewer elements than the dimension needs."""

    exit_code = 3


class InvalidRingSpec(PolyImageError):
    """Raised for malformed ring flags or moduli."""

    exit_code = 2


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    d = 3
    while d * d <= p:
        if p % d == 0:
            return False
        d += 2
    return True


class RingKind(str, Enum):
    PRIME_FIELD = "gf"
    MODULAR = "zmod"
    RATIONAL = "q"


@dataclass(frozen=True)
class RingSpec:
    """Descriptor of the coefficient ring in force."""

    kind: RingKind
    modulus: int | None = None

    def __post_init__(self):
        if self.kind is RingKind.RATIONAL:
            if self.modulus is not None:
                raise InvalidRingSpec("rational ring takes no modulus")
            return
        m = self.modulus
        if not isinstance(m, int) or m < 2:
            raise InvalidRingSpec(f"modulus must be an integer >= 2, got {m!r}")
        if m >= MODULUS_CAP:
            raise InvalidRingSpec(f"modulus {m} exceeds the cap 2^31")
        if self.kind is RingKind.PRIME_FIELD and not is_prime(m):
            raise InvalidRingSpec(f"gf:{m} is not a prime field")

    # -- constructors ---------------------------------------------------------
    @classmethod
    def gf(cls, p: int) -> "RingSpec":
        return cls(RingKind.PRIME_FIELD, p)

    @classmethod
    def zmod(cls, m: int) -> "RingSpec":
        return cls(RingKind.MODULAR, m)

    @classmethod
    def rational(cls) -> "RingSpec":
        return cls(RingKind.RATIONAL)

    # -- descriptors ----------------------------------------------------------
    @property
    def flag(self) -> str:
        if self.kind is RingKind.RATIONAL:
            return "q"
        return f"{self.kind.value}:{self.modulus}"

    @property
    def is_finite(self) -> bool:
        return self.kind is not RingKind.RATIONAL

    @property
    def is_field(self) -> bool:
        if self.kind is RingKind.MODULAR:
            return is_prime(self.modulus)
        return True

    @property
    def size(self) -> int | None:
        """Number of elements, None for Q."""
        return self.modulus

    @property
    def characteristic(self) -> int:
        return 0 if self.kind is RingKind.RATIONAL else self.modulus

    def __str__(self):
        return self.flag

    # -- raw arithmetic on canonical representatives --------------------------
    def canon(self, value) -> Raw:
        if self.kind is RingKind.RATIONAL:
            if isinstance(value, Fraction):
                return value
            if isinstance(value, int):
                return Fraction(value)
            raise TypeError(f"cannot place {value!r} in Q")
        if isinstance(value, Fraction):
            if value.denominator == 1:
                return value.numerator % self.modulus
            return self.divide(value.numerator % self.modulus, value.denominator % self.modulus)
        if isinstance(value, int):
            return value % self.modulus
        raise TypeError(f"cannot place {value!r} in {self.flag}")

    def add(self, a: Raw, b: Raw) -> Raw:
        return a + b if self.modulus is None else (a + b) % self.modulus

    def sub(self, a: Raw, b: Raw) -> Raw:
        return a - b if self.modulus is None else (a - b) % self.modulus

    def neg(self, a: Raw) -> Raw:
        return -a if self.modulus is None else (-a) % self.modulus

    def mul(self, a: Raw, b: Raw) -> Raw:
        return a * b if self.modulus is None else (a * b) % self.modulus

    def is_unit(self, a: Raw) -> bool:
        if self.modulus is None:
            return a != 0
        return gcd(a, self.modulus) == 1

    def inv(self, a: Raw) -> Raw:
        if not self.is_unit(a):
            raise NotInvertible(f"{self.format_value(a)} is not a unit in {self.flag}")
        if self.modulus is None:
            return 1 / a
        return pow(a, -1, self.modulus)

    def divide(self, a: Raw, b: Raw) -> Raw:
        return self.mul(a, self.inv(b))

    # -- scalars --------------------------------------------------------------
    def __call__(self, value) -> "Scalar":
        if isinstance(value, Scalar):
            if value.ring != self:
                raise RingMismatch(f"{value!r} is not an element of {self.flag}")
            return value
        return Scalar(self.canon(value), self)

    @property
    def zero(self) -> "Scalar":
        return self(0)

    @property
    def one(self) -> "Scalar":
        return self(1)

    def elements(self) -> Iterator["Scalar"]:
        if not self.is_finite:
            raise UnsupportedRing("Q has no finite element list")
        for v in range(self.modulus):
            yield Scalar(v, self)

    # -- text -----------------------------------------------------------------
    def parse_value(self, text: str) -> Raw:
        text = text.strip()
        try:
            if "/" in text:
                num, den = text.split("/", 1)
                value = Fraction(int(num), int(den))
            else:
                value = int(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidRingSpec(f"bad scalar literal {text!r}") from exc
        return self.canon(value)

    def format_value(self, a: Raw) -> str:
        if isinstance(a, Fraction):
            return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"
        return str(a)


def parse_ring(flag: str) -> RingSpec:
    """Parse `gf:<p>`, `zmod:<m>` or `q`."""
    flag = flag.strip().lower()
    if flag in ("q", "qq", "rational"):
        return RingSpec.rational()
    kind, sep, modulus = flag.partition(":")
    if not sep or kind not in ("gf", "zmod"):
        raise InvalidRingSpec(f"unknown ring flag {flag!r}; expected gf:<p>, zmod:<m> or q")
    try:
        m = int(modulus)
    except ValueError as exc:
        raise InvalidRingSpec(f"bad modulus in ring flag {flag!r}") from exc
    return RingSpec.gf(m) if kind == "gf" else RingSpec.zmod(m)


@dataclass(frozen=True)
class Scalar:
    """An element of a RingSpec, held as its canonical representative."""

    value: Raw
    ring: RingSpec

    def _coerce(self, other) -> Raw:
        if isinstance(other, Scalar):
            if other.ring != self.ring:
                raise RingMismatch(f"cannot combine {self.ring.flag} with {other.ring.flag}")
            return other.value
        if isinstance(other, int):
            return self.ring.canon(other)
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return Scalar(self.ring.add(self.value, b), self.ring)

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return Scalar(self.ring.sub(self.value, b), self.ring)

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return Scalar(self.ring.sub(b, self.value), self.ring)

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return Scalar(self.ring.mul(self.value, b), self.ring)

    __rmul__ = __mul__

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return Scalar(self.ring.divide(self.value, b), self.ring)

    def __neg__(self):
        return Scalar(self.ring.neg(self.value), self.ring)

    def inverse(self) -> "Scalar":
        return Scalar(self.ring.inv(self.value), self.ring)

    def is_zero(self) -> bool:
        return self.value == 0

    def __bool__(self):
        return self.value != 0

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.ring == other.ring and self.value == other.value
        if isinstance(other, int):
            return self.value == self.ring.canon(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.ring))

    def __str__(self):
        return self.ring.format_value(self.value)

    def __repr__(self):
        return f"Scalar({self}, {self.ring.flag})"
