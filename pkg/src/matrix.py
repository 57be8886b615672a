"""Dense exact matrices over a RingSpec."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .ring import (
    DimensionMismatch,
    FieldTooSmall,
    InvalidRingSpec,
    NotInvertible,
    PolyImageError,
    Raw,
    RingMismatch,
    RingSpec,
    Scalar,
    UnsupportedRing,
    parse_ring,
)


class MatrixFormatError(PolyImageError):
    """Raised when matrix text or JSON cannot be decoded."""

    exit_code = 2


@dataclass(frozen=True)
class Matrix:
    """n x n matrix; `rows` holds canonical raw values of `ring`."""

    n: int
    rows: tuple[tuple[Raw, ...], ...]
    ring: RingSpec

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], ring: RingSpec) -> "Matrix":
        n = len(rows)
        if n < 1 or any(len(r) != n for r in rows):
            raise DimensionMismatch(f"matrix must be square and non-empty, got {len(rows)} rows")
        canon = []
        for r in rows:
            out = []
            for v in r:
                if isinstance(v, Scalar):
                    if v.ring != ring:
                        raise RingMismatch(f"entry {v!r} is not in {ring.flag}")
                    out.append(v.value)
                else:
                    out.append(ring.canon(v))
            canon.append(tuple(out))
        return cls(n, tuple(canon), ring)

    # -- access -----------------------------------------------------------------
    def __getitem__(self, ij: tuple[int, int]) -> Scalar:
        i, j = ij
        return Scalar(self.rows[i][j], self.ring)

    def entries(self) -> Iterable[Raw]:
        for r in self.rows:
            yield from r

    def diagonal(self) -> tuple[Raw, ...]:
        return tuple(self.rows[i][i] for i in range(self.n))

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.entries())

    def is_diagonal(self) -> bool:
        return all(self.rows[i][j] == 0 for i in range(self.n) for j in range(self.n) if i != j)

    def is_scalar(self) -> bool:
        return self.is_diagonal() and len(set(self.diagonal())) == 1

    def has_zero_diagonal(self) -> bool:
        return all(v == 0 for v in self.diagonal())

    # -- arithmetic -------------------------------------------------------------
    def _check(self, other: "Matrix"):
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.ring != self.ring:
            raise RingMismatch(f"cannot combine {self.ring.flag} and {other.ring.flag} matrices")
        if other.n != self.n:
            raise DimensionMismatch(f"dimension mismatch: {self.n} vs {other.n}")

    def _entrywise(self, other: "Matrix", op) -> "Matrix":
        self._check(other)
        rows = tuple(
            tuple(op(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(self.rows, other.rows)
        )
        return Matrix(self.n, rows, self.ring)

    def __add__(self, other: "Matrix") -> "Matrix":
        return self._entrywise(other, self.ring.add)

    def __sub__(self, other: "Matrix") -> "Matrix":
        return self._entrywise(other, self.ring.sub)

    def __neg__(self) -> "Matrix":
        neg = self.ring.neg
        return Matrix(self.n, tuple(tuple(neg(a) for a in r) for r in self.rows), self.ring)

    def scale(self, c) -> "Matrix":
        c = self.ring(c).value
        mul = self.ring.mul
        return Matrix(self.n, tuple(tuple(mul(c, a) for a in r) for r in self.rows), self.ring)

    def __mul__(self, other):
        if isinstance(other, (Scalar, int)):
            return self.scale(other)
        self._check(other)
        ring, n = self.ring, self.n
        cols = list(zip(*other.rows))
        rows = []
        for r in self.rows:
            row = []
            for c in cols:
                acc = sum(a * b for a, b in zip(r, c))
                row.append(ring.canon(acc))
            rows.append(tuple(row))
        return Matrix(n, tuple(rows), ring)

    def __rmul__(self, other):
        if isinstance(other, (Scalar, int)):
            return self.scale(other)
        return NotImplemented

    __matmul__ = __mul__

    def power(self, k: int) -> "Matrix":
        result = identity(self.n, self.ring)
        base = self
        while k > 0:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def trace(self) -> Scalar:
        return trace(self)

    def __str__(self):
        return format_matrix_text(self)


# -----------------------------------------------------------------------------
# constructors
# -----------------------------------------------------------------------------
def zero(n: int, ring: RingSpec) -> Matrix:
    return Matrix(n, tuple(tuple(ring.canon(0) for _ in range(n)) for _ in range(n)), ring)


def identity(n: int, ring: RingSpec) -> Matrix:
    return diagonal([1] * n, ring)


def diagonal(values: Sequence, ring: RingSpec) -> Matrix:
    n = len(values)
    return Matrix.from_rows([[values[i] if i == j else 0 for j in range(n)] for i in range(n)], ring)


def matrix_unit(n: int, i: int, j: int, ring: RingSpec) -> Matrix:
    """E_ij with 1-based indices."""
    if not (1 <= i <= n and 1 <= j <= n):
        raise DimensionMismatch(f"E_{i}{j} is not a {n}x{n} matrix unit")
    return Matrix.from_rows([[1 if (r, c) == (i - 1, j - 1) else 0 for c in range(n)] for r in range(n)], ring)


def distinct_diagonal(n: int, ring: RingSpec) -> Matrix:
    """diag(0, 1, ..., n-1) over a field with at least n elements."""
    if not ring.is_field:
        raise UnsupportedRing(f"distinct diagonal needs a field, got {ring.flag}")
    if ring.is_finite and ring.modulus < n:
        raise FieldTooSmall(f"field too small: {ring.flag} has fewer than n={n} elements")
    return diagonal(list(range(n)), ring)


# -----------------------------------------------------------------------------
# operations
# -----------------------------------------------------------------------------
def trace(A: Matrix) -> Scalar:
    acc = A.ring.canon(0)
    for v in A.diagonal():
        acc = A.ring.add(acc, v)
    return Scalar(acc, A.ring)


def commutator(A: Matrix, B: Matrix) -> Matrix:
    return A * B - B * A


def conjugate(P: Matrix, A: Matrix, P_inv: Matrix | None = None) -> Matrix:
    """P A P^-1."""
    return P * A * (P_inv if P_inv is not None else inverse(P))


def inverse(P: Matrix) -> Matrix:
    """Gauss-Jordan inverse with first-nonzero pivoting (fields only)."""
    ring, n = P.ring, P.n
    if not ring.is_field:
        raise UnsupportedRing(f"matrix inversion needs a field, got {ring.flag}")
    aug = [list(P.rows[i]) + [ring.canon(1 if i == j else 0) for j in range(n)] for i in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            raise NotInvertible("singular matrix")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = ring.inv(aug[col][col])
        aug[col] = [ring.mul(inv, v) for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [ring.sub(a, ring.mul(f, b)) for a, b in zip(aug[r], aug[col])]
    return Matrix(n, tuple(tuple(row[n:]) for row in aug), ring)


def row_reduce(vectors: Iterable[Sequence[Raw]], ring: RingSpec) -> list[tuple[Raw, ...]]:
    """Reduced row echelon basis of the span of `vectors` (fields only)."""
    if not ring.is_field:
        raise UnsupportedRing(f"row reduction needs a field, got {ring.flag}")
    basis: list[list[Raw]] = []
    pivots: list[int] = []
    for vec in vectors:
        v = [ring.canon(x) for x in vec]
        for b, p in zip(basis, pivots):
            if v[p] != 0:
                f = v[p]
                v = [ring.sub(a, ring.mul(f, c)) for a, c in zip(v, b)]
        lead = next((k for k, x in enumerate(v) if x != 0), None)
        if lead is None:
            continue
        inv = ring.inv(v[lead])
        v = [ring.mul(inv, x) for x in v]
        for idx, b in enumerate(basis):
            if b[lead] != 0:
                f = b[lead]
                basis[idx] = [ring.sub(a, ring.mul(f, c)) for a, c in zip(b, v)]
        basis.append(v)
        pivots.append(lead)
    order = sorted(range(len(basis)), key=lambda k: pivots[k])
    return [tuple(basis[k]) for k in order]


# -----------------------------------------------------------------------------
# codecs
# -----------------------------------------------------------------------------
def format_matrix_text(A: Matrix) -> str:
    fmt = A.ring.format_value
    lines = [str(A.n)] + [" ".join(fmt(v) for v in r) for r in A.rows]
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str, ring: RingSpec) -> Matrix:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MatrixFormatError("empty matrix text")
    try:
        n = int(lines[0])
    except ValueError as exc:
        raise MatrixFormatError(f"first line must be the dimension, got {lines[0]!r}") from exc
    body = lines[1:]
    if n < 1 or len(body) != n:
        raise MatrixFormatError(f"expected {n} rows, found {len(body)}")
    try:
        rows = [[ring.parse_value(tok) for tok in ln.split()] for ln in body]
    except (InvalidRingSpec, NotInvertible) as exc:
        raise MatrixFormatError(str(exc)) from exc
    if any(len(r) != n for r in rows):
        raise MatrixFormatError(f"every row must have {n} entries")
    return Matrix(n, tuple(tuple(r) for r in rows), ring)


def _json_value(v: Raw):
    if isinstance(v, Fraction):
        return v.numerator if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v


def matrix_to_json(A: Matrix) -> dict:
    return {"n": A.n, "ring": A.ring.flag, "rows": [[_json_value(v) for v in r] for r in A.rows]}


def matrix_from_json(data: dict, ring: RingSpec | None = None) -> Matrix:
    try:
        flag_ring = parse_ring(data["ring"]) if "ring" in data else None
        ring = ring or flag_ring
        if ring is None:
            raise MatrixFormatError("matrix JSON carries no ring")
        if flag_ring is not None and flag_ring != ring:
            raise RingMismatch(f"matrix is over {flag_ring.flag}, expected {ring.flag}")
        n = int(data["n"])
        rows = [[ring.parse_value(str(v)) for v in r] for r in data["rows"]]
    except (KeyError, TypeError, ValueError, InvalidRingSpec, NotInvertible) as exc:
        raise MatrixFormatError(f"malformed matrix JSON: {exc}") from exc
    if len(rows) != n or any(len(r) != n for r in rows):
        raise MatrixFormatError(f"matrix JSON rows do not form a {n}x{n} matrix")
    return Matrix(n, tuple(tuple(r) for r in rows), ring)


def read_matrix(text: str, ring: RingSpec) -> Matrix:
    """Accept either the JSON form or the plain text form."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"bad matrix JSON: {exc}") from exc
        return matrix_from_json(data, ring)
    return parse_matrix_text(text, ring)


def dump_matrix(A: Matrix, fmt: str = "text") -> str:
    """Inverse of read_matrix for either form."""
    if fmt == "json":
        return json.dumps(matrix_to_json(A))
    if fmt == "text":
        return format_matrix_text(A)
    raise ValueError(f"unknown matrix format {fmt!r}")
