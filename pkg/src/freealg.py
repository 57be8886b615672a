"""Multilinear polynomials in the free algebra K<x1, ..., xm>.

A monomial word w1 w2 ... wm is stored as the permutation sigma with
sigma(k) = index of the variable in position k, so the coefficient keyed by
sigma multiplies x_sigma(1) x_sigma(2) ... x_sigma(m).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from itertools import permutations
from typing import Mapping, Sequence

from .matrix import Matrix, matrix_unit
from .matrix import zero as zero_matrix
from .ring import (
    DimensionMismatch,
    FieldTooSmall,
    PolyImageError,
    Raw,
    RingMismatch,
    RingSpec,
    Scalar,
    UnsupportedRing,
)

logger = logging.getLogger("polyimage.freealg")

MAX_DEGREE = 8

Words = dict[tuple[int, ...], Raw]


class NotMultilinear(PolyImageError):
    """Raised when an expression is not multilinear homogeneous."""

    exit_code = 2


class NotApplicable(PolyImageError):
    """Raised when a hypothesis of an operation does not hold."""

    exit_code = 3


class InconsistentLieForm(PolyImageError):
    """Raised when degree-3 coefficients violate b=d, c=e, a=-b-c."""


def var_name(k: int) -> str:
    return f"x{k}"


@dataclass(frozen=True, order=True)
class Permutation:
    """One-line notation of a bijection on {1..m}."""

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"{self.images} is not a permutation")

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(tuple(range(1, m + 1)))

    @property
    def m(self) -> int:
        return len(self.images)

    def __call__(self, k: int) -> int:
        return self.images[k - 1]

    def compose(self, other: "Permutation") -> "Permutation":
        """(self o other)(k) = self(other(k))."""
        return Permutation(tuple(self(other(k)) for k in range(1, other.m + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.m
        for k, v in enumerate(self.images, start=1):
            inv[v - 1] = k
        return Permutation(tuple(inv))

    @property
    def sign(self) -> int:
        seen = [False] * self.m
        sign = 1
        for start in range(self.m):
            if seen[start]:
                continue
            length = 0
            k = start
            while not seen[k]:
                seen[k] = True
                k = self.images[k] - 1
                length += 1
            if length % 2 == 0:
                sign = -sign
        return sign

    @property
    def is_even(self) -> bool:
        return self.sign == 1

    def word(self) -> str:
        return "*".join(var_name(k) for k in self.images)


def symmetric_group(m: int) -> list[Permutation]:
    return [Permutation(p) for p in permutations(range(1, m + 1))]


# -----------------------------------------------------------------------------
# free-algebra words, used by the parser and the standard polynomials
# -----------------------------------------------------------------------------
def words_add(ring: RingSpec, a: Words, b: Words, sign: int = 1) -> Words:
    out = dict(a)
    for w, c in b.items():
        c = c if sign == 1 else ring.neg(c)
        out[w] = ring.add(out[w], c) if w in out else c
    return out


def words_mul(ring: RingSpec, a: Words, b: Words) -> Words:
    out: Words = {}
    for wa, ca in a.items():
        for wb, cb in b.items():
            w = wa + wb
            c = ring.mul(ca, cb)
            out[w] = ring.add(out[w], c) if w in out else c
    return out


def words_bracket(ring: RingSpec, a: Words, b: Words) -> Words:
    return words_add(ring, words_mul(ring, a, b), words_mul(ring, b, a), sign=-1)


def words_var(ring: RingSpec, k: int) -> Words:
    return {(k,): ring.canon(1)}


class MultilinearPoly:
    """sum_sigma a_sigma x_sigma(1) ... x_sigma(m), zero coefficients pruned."""

    __slots__ = ("m", "ring", "_coeffs")

    def __init__(self, m: int, coeffs: Mapping[Permutation, Raw], ring: RingSpec):
        if not 1 <= m <= MAX_DEGREE:
            raise NotMultilinear(f"degree must be between 1 and {MAX_DEGREE}, got {m}")
        clean = {}
        for sigma, c in coeffs.items():
            if sigma.m != m:
                raise DimensionMismatch(f"permutation {sigma.images} is not in S_{m}")
            c = ring(c).value if isinstance(c, Scalar) else ring.canon(c)
            if c != 0:
                clean[sigma] = c
        self.m = m
        self.ring = ring
        self._coeffs = dict(sorted(clean.items()))

    @classmethod
    def from_words(
        cls,
        words: Words,
        ring: RingSpec,
        m: int | None = None,
        names: Mapping[int, str] | None = None,
    ) -> "MultilinearPoly":
        """Validate and convert words; every listed word must be multilinear.

        `names` overrides how variables are spelled in error messages.
        """
        if m is None:
            used = {k for w in words for k in w}
            if not used:
                raise NotMultilinear("expression contains no variables")
            m = max(used)
        names = names or {}

        def spell(k: int) -> str:
            return names.get(k, var_name(k))

        coeffs: dict[Permutation, Raw] = {}
        full = set(range(1, m + 1))
        for w, c in words.items():
            text = "*".join(spell(k) for k in w) or "1"
            if len(set(w)) != len(w):
                dup = next(k for k in w if w.count(k) > 1)
                raise NotMultilinear(f"monomial `{text}` repeats variable {spell(dup)}")
            missing = sorted(full - set(w))
            if missing:
                raise NotMultilinear(
                    f"monomial `{text}` is missing variable {spell(missing[0])}"
                )
            if len(w) != m:
                raise NotMultilinear(f"mixed degrees: monomial `{text}` is not of degree {m}")
            coeffs[Permutation(w)] = c
        return cls(m, coeffs, ring)

    @classmethod
    def zero(cls, m: int, ring: RingSpec) -> "MultilinearPoly":
        return cls(m, {}, ring)

    # -- access -----------------------------------------------------------------
    def coeff(self, sigma: Permutation | Sequence[int]) -> Scalar:
        if not isinstance(sigma, Permutation):
            sigma = Permutation(tuple(sigma))
        return Scalar(self._coeffs.get(sigma, self.ring.canon(0)), self.ring)

    def terms(self) -> list[tuple[Permutation, Scalar]]:
        return [(s, Scalar(c, self.ring)) for s, c in self._coeffs.items()]

    def words(self) -> Words:
        return {s.images: c for s, c in self._coeffs.items()}

    def is_zero(self) -> bool:
        return not self._coeffs

    def __len__(self):
        return len(self._coeffs)

    def __eq__(self, other):
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        return self.m == other.m and self.ring == other.ring and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self.m, self.ring, tuple(self._coeffs.items())))

    def __repr__(self):
        return f"MultilinearPoly({render(self)!r}, {self.ring.flag})"

    def __str__(self):
        return render(self)

    # -- arithmetic -------------------------------------------------------------
    def _check(self, other: "MultilinearPoly"):
        if other.ring != self.ring:
            raise RingMismatch(f"cannot combine {self.ring.flag} and {other.ring.flag} polynomials")
        if other.m != self.m:
            raise DimensionMismatch(f"degree mismatch: {self.m} vs {other.m}")

    def __add__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        self._check(other)
        coeffs = dict(self._coeffs)
        for s, c in other._coeffs.items():
            coeffs[s] = self.ring.add(coeffs.get(s, 0), c)
        return MultilinearPoly(self.m, coeffs, self.ring)

    def __neg__(self) -> "MultilinearPoly":
        return self.scale(-1)

    def __sub__(self, other: "MultilinearPoly") -> "MultilinearPoly":
        return self + (-other)

    def scale(self, a) -> "MultilinearPoly":
        a = self.ring(a).value
        return MultilinearPoly(
            self.m, {s: self.ring.mul(a, c) for s, c in self._coeffs.items()}, self.ring
        )

    def __call__(self, *args: Matrix) -> Matrix:
        return evaluate(self, list(args))


# -----------------------------------------------------------------------------
# rendering
# -----------------------------------------------------------------------------
def render(f: MultilinearPoly) -> str:
    """Canonical text: lexicographic permutation order, variables x1..xm."""
    if f.is_zero():
        return "0*" + Permutation.identity(f.m).word()
    parts = []
    for sigma, c in f._coeffs.items():
        negative = f.ring.modulus is None and c < 0
        mag = -c if negative else c
        lit = f.ring.format_value(mag)
        body = sigma.word() if lit == "1" else f"{lit}*{sigma.word()}"
        if not parts:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f"- {body}" if negative else f"+ {body}")
    return " ".join(parts)


# -----------------------------------------------------------------------------
# evaluation and substitution
# -----------------------------------------------------------------------------
def evaluate(f: MultilinearPoly, args: Sequence[Matrix]) -> Matrix:
    """Exact value of f on an m-tuple of square matrices."""
    if len(args) != f.m:
        raise DimensionMismatch(f"polynomial of degree {f.m} needs {f.m} arguments, got {len(args)}")
    n = args[0].n
    for A in args:
        if A.ring != f.ring:
            raise RingMismatch(f"argument over {A.ring.flag}, polynomial over {f.ring.flag}")
        if A.n != n:
            raise DimensionMismatch("arguments have different dimensions")
    total = None
    for sigma, c in f._coeffs.items():
        prod = args[sigma.images[0] - 1]
        for k in sigma.images[1:]:
            prod = prod * args[k - 1]
        term = prod.scale(c)
        total = term if total is None else total + term
    if total is None:
        return zero_matrix(n, f.ring)
    return total


def _collapse(f: MultilinearPoly, drop: int | None, keep: int | None) -> MultilinearPoly:
    ring = f.ring
    words: Words = {}
    for sigma, c in f._coeffs.items():
        if keep is not None:
            w = tuple(k for k in sigma.images if k <= keep)
        else:
            w = tuple(k if k < drop else k - 1 for k in sigma.images if k != drop)
        words[w] = ring.add(words[w], c) if w in words else c
    m = keep if keep is not None else f.m - 1
    return MultilinearPoly(m, {Permutation(w): c for w, c in words.items()}, ring)


def substitute_ones(f: MultilinearPoly, keep: int) -> MultilinearPoly:
    """f(x1, ..., x_keep, 1, ..., 1) as a degree-`keep` polynomial."""
    if not 1 <= keep <= f.m:
        raise NotApplicable(f"keep must be in 1..{f.m}, got {keep}")
    return _collapse(f, drop=None, keep=keep)


def fix_slot(f: MultilinearPoly, slot: int) -> MultilinearPoly:
    """Substitute the identity into one slot; later variables shift down."""
    if f.m < 2 or not 1 <= slot <= f.m:
        raise NotApplicable(f"cannot fix slot {slot} of a degree-{f.m} polynomial")
    return _collapse(f, drop=slot, keep=None)


def rename(f: MultilinearPoly, pi: Permutation) -> MultilinearPoly:
    """Replace every x_i by x_pi(i)."""
    if pi.m != f.m:
        raise DimensionMismatch(f"relabeling must lie in S_{f.m}")
    return MultilinearPoly(f.m, {pi.compose(s): c for s, c in f._coeffs.items()}, f.ring)


def coeff_sum(f: MultilinearPoly) -> Scalar:
    acc = f.ring.canon(0)
    for c in f._coeffs.values():
        acc = f.ring.add(acc, c)
    return Scalar(acc, f.ring)


def coeff_sum_alternating(f: MultilinearPoly) -> Scalar:
    acc = f.ring.canon(0)
    for s, c in f._coeffs.items():
        if s.is_even:
            acc = f.ring.add(acc, c)
    return Scalar(acc, f.ring)


# -----------------------------------------------------------------------------
# standard polynomials
# -----------------------------------------------------------------------------
def commutator_poly(ring: RingSpec) -> MultilinearPoly:
    """xy - yx."""
    return MultilinearPoly.from_words(words_bracket(ring, words_var(ring, 1), words_var(ring, 2)), ring)


def nested_commutator(m: int, ring: RingSpec) -> MultilinearPoly:
    """[x1, [x2, ..., [x_{m-1}, x_m]]...]."""
    if m < 2:
        raise NotApplicable("nested commutators need m >= 2")
    acc = words_var(ring, m)
    for k in range(m - 1, 0, -1):
        acc = words_bracket(ring, words_var(ring, k), acc)
    return MultilinearPoly.from_words(acc, ring, m=m)


def lie_pair(b, c, ring: RingSpec) -> MultilinearPoly:
    """b[x,[z,y]] + c[z,[x,y]] with x, y, z = x1, x2, x3."""
    x, y, z = (words_var(ring, k) for k in (1, 2, 3))
    first = MultilinearPoly.from_words(words_bracket(ring, x, words_bracket(ring, z, y)), ring, m=3)
    second = MultilinearPoly.from_words(words_bracket(ring, z, words_bracket(ring, x, y)), ring, m=3)
    return first.scale(b) + second.scale(c)


def palindrome(m: int, ring: RingSpec) -> MultilinearPoly:
    """x1 x2 ... xm - xm ... x2 x1."""
    ident = Permutation.identity(m)
    rev = Permutation(tuple(reversed(ident.images)))
    return MultilinearPoly(m, {ident: 1, rev: ring.canon(-1)}, ring)


def central_linearization(ring: RingSpec) -> MultilinearPoly:
    """[x1,y1][x2,y2] + [x1,y2][x2,y1] + [x2,y1][x1,y2] + [x2,y2][x1,y1].

    Slots: x1, x2, y1, y2 -> 1, 2, 3, 4.
    """
    x1, x2, y1, y2 = (words_var(ring, k) for k in (1, 2, 3, 4))
    br = lambda a, b: words_bracket(ring, a, b)  # noqa: E731
    total: Words = {}
    for p, q in (((x1, y1), (x2, y2)), ((x1, y2), (x2, y1)), ((x2, y1), (x1, y2)), ((x2, y2), (x1, y1))):
        total = words_add(ring, total, words_mul(ring, br(*p), br(*q)))
    return MultilinearPoly.from_words(total, ring, m=4)


# -----------------------------------------------------------------------------
# degree-3 structure
# -----------------------------------------------------------------------------
def canonical_lie_form(f: MultilinearPoly) -> tuple[Scalar, Scalar]:
    """(b, c) with f = b[x,[z,y]] + c[z,[x,y]].

    Needs degree 3, coefficient sum 0 and all three unit substitutions zero.
    """
    if f.m != 3:
        raise NotApplicable(f"Lie form needs degree 3, got {f.m}")
    if coeff_sum(f):
        raise NotApplicable("coefficient sum is nonzero")
    for slot in (1, 2, 3):
        if not fix_slot(f, slot).is_zero():
            raise NotApplicable(f"substituting 1 into slot {slot} leaves a nonzero polynomial")
    b = f.coeff((1, 3, 2))
    c = f.coeff((3, 1, 2))
    if (
        f.coeff((2, 3, 1)) != b
        or f.coeff((2, 1, 3)) != c
        or f.coeff((1, 2, 3)) != -b - c
        or lie_pair(b, c, f.ring) != f
    ):
        raise InconsistentLieForm(f"coefficients of {render(f)} do not solve the Lie system")
    return b, c


def trace_witness_tuple(n: int, ring: RingSpec) -> tuple[Matrix, Matrix, Matrix]:
    """(E11, E12, E21): a degree-3 f takes a value of trace sum_{A_3} a_sigma here."""
    return (matrix_unit(n, 1, 1, ring), matrix_unit(n, 1, 2, ring), matrix_unit(n, 2, 1, ring))


# -----------------------------------------------------------------------------
# classification
# -----------------------------------------------------------------------------
class Verdict(str, Enum):
    ZERO = "Zero"
    CENTRAL = "Central"
    TRACE_ZERO = "TraceZero"
    FULL = "Full"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ImageClass:
    verdict: Verdict
    justification: str

    def to_json(self) -> dict:
        return {"verdict": self.verdict.value, "justification": self.justification}


def classify(f: MultilinearPoly, n: int, ring: RingSpec | None = None) -> ImageClass:
    """Image of f on M_n(ring) among {0, [M_n, M_n], M_n} for degree <= 3."""
    ring = ring or f.ring
    if ring != f.ring:
        raise RingMismatch(f"polynomial over {f.ring.flag}, classification requested over {ring.flag}")
    if n < 2:
        raise NotApplicable(f"classification needs n >= 2, got {n}")
    if not ring.is_field:
        raise UnsupportedRing(f"classification is stated over fields, got {ring.flag}")
    if f.is_zero():
        return ImageClass(Verdict.ZERO, "zero polynomial")

    if f.m == 1:
        return ImageClass(Verdict.FULL, "degree 1: f = a*x with a != 0")
    if f.m == 2:
        if coeff_sum(f):
            return ImageClass(Verdict.FULL, "degree 2 with a+b != 0: f(I, Y) = (a+b)Y")
        return ImageClass(Verdict.TRACE_ZERO, "degree 2 with a+b = 0: f = a(xy-yx), Shoda")
    if f.m == 3:
        if coeff_sum(f):
            return ImageClass(Verdict.FULL, "coefficient sum s nonzero: f(M, 1, 1) = sM")
        if ring.is_finite and ring.modulus < n:
            raise FieldTooSmall(
                f"field too small: degree-3 image needs at least n={n} field elements, {ring.flag} has {ring.modulus}"
            )
        if coeff_sum_alternating(f):
            return ImageClass(
                Verdict.FULL,
                "coefficient sum zero, alternating sum nonzero: image contains sl_n "
                "and f(E11, E12, E21) has nonzero trace",
            )
        return ImageClass(
            Verdict.TRACE_ZERO, "both coefficient sums zero: image is exactly sl_n"
        )
    return ImageClass(Verdict.UNKNOWN, f"degree {f.m}: beyond the degree <= 3 classification")

