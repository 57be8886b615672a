"""Constructive decompositions packaged as self-verifying certificates."""
from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass
from typing import Sequence

from .engine import MatrixSpace, first_preimage, poly_terms, unpack_tuple
from .freealg import (
    MAX_DEGREE,
    MultilinearPoly,
    NotApplicable,
    Permutation,
    canonical_lie_form,
    coeff_sum,
    commutator_poly,
    evaluate,
    fix_slot,
    lie_pair,
    nested_commutator,
    render,
    rename,
)
from .matrix import (
    Matrix,
    MatrixFormatError,
    commutator,
    distinct_diagonal,
    identity,
    inverse,
    matrix_from_json,
    matrix_to_json,
    matrix_unit,
    row_reduce,
)
from .matrix import diagonal as diagonal_matrix
from .matrix import zero as zero_matrix
from .metrics import CERTIFICATES_EMITTED, FALLBACK_SEARCHES
from .parser import parse_poly
from .ring import (
    FieldTooSmall,
    InvalidRingSpec,
    PolyImageError,
    RingSpec,
    UnsupportedRing,
    parse_ring,
)

logger = logging.getLogger("polyimage.witness")

SEARCH_BUDGET = int(os.getenv("POLYIMAGE_SEARCH_BUDGET", str(10**7)))


class TraceNonZero(PolyImageError):
    """Raised when a target matrix must have trace zero but does not."""

    exit_code = 4


class DiagonalSumViolation(PolyImageError):
    """Raised when an upper diagonal of the target does not sum to zero."""

    def __init__(self, diagonal: int):
        super().__init__(f"entries on diagonal j={diagonal} do not sum to zero")
        self.diagonal = diagonal
        self.exit_code = 4 if diagonal == 0 else 3


class ScalarTarget(PolyImageError):
    """Raised when a nonzero scalar matrix cannot be made zero-diagonal."""

    exit_code = 3


class SearchBudgetExceeded(PolyImageError):
    """Raised when the exhaustive fallback would exceed its budget."""


class CertificateMismatch(PolyImageError):
    """Raised when a certificate does not re-evaluate to its target."""

    exit_code = 1


# -----------------------------------------------------------------------------
# certificates
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class WitnessCertificate:
    """poly(inputs) == target, checked on construction."""

    poly: MultilinearPoly
    inputs: tuple[Matrix, ...]
    target: Matrix
    provenance: str

    def __post_init__(self):
        if not check_claim(self.poly, self.inputs, self.target):
            raise CertificateMismatch(f"{self.provenance}: inputs do not evaluate to the target")

    def to_json(self) -> dict:
        return {
            "poly": render(self.poly),
            "ring": self.poly.ring.flag,
            "n": self.target.n,
            "inputs": [matrix_to_json(A) for A in self.inputs],
            "target": matrix_to_json(self.target),
            "provenance": self.provenance,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)


def check_claim(poly: MultilinearPoly, inputs: Sequence[Matrix], target: Matrix) -> bool:
    try:
        return evaluate(poly, list(inputs)) == target
    except PolyImageError:
        return False


def _certify(poly: MultilinearPoly, inputs: Sequence[Matrix], target: Matrix, provenance: str) -> WitnessCertificate:
    cert = WitnessCertificate(poly, tuple(inputs), target, provenance)
    CERTIFICATES_EMITTED.labels(provenance=provenance.split(":")[0]).inc()
    logger.debug("certificate emitted: %s", provenance)
    return cert


@dataclass(frozen=True)
class CertificateClaim:
    """A decoded certificate that has not been re-evaluated yet."""

    poly: MultilinearPoly
    inputs: tuple[Matrix, ...]
    target: Matrix
    provenance: str

    def verify(self) -> bool:
        return check_claim(self.poly, self.inputs, self.target)


def load_certificate(text: str) -> CertificateClaim:
    if not text.strip():
        raise MatrixFormatError("empty certificate")
    try:
        data = json.loads(text)
        ring = parse_ring(data["ring"])
        poly = parse_poly(data["poly"], ring)
        inputs = tuple(matrix_from_json(d, ring) for d in data["inputs"])
        target = matrix_from_json(data["target"], ring)
        provenance = str(data.get("provenance", ""))
    except (json.JSONDecodeError, KeyError, TypeError, InvalidRingSpec) as exc:
        raise MatrixFormatError(f"malformed certificate: {exc}") from exc
    return CertificateClaim(poly, inputs, target, provenance)


# -----------------------------------------------------------------------------
# field-level building blocks
# -----------------------------------------------------------------------------
def _require_field(ring: RingSpec):
    if not ring.is_field:
        raise UnsupportedRing(f"this construction needs a field, got {ring.flag}")


def _require_trace_zero(M: Matrix):
    if M.trace():
        raise TraceNonZero(f"target has trace {M.trace()}, expected 0")


def _permutation_matrix(n: int, a: int, b: int, ring: RingSpec) -> Matrix:
    rows = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    rows[a][a] = rows[b][b] = 0
    rows[a][b] = rows[b][a] = 1
    return Matrix.from_rows(rows, ring)


def _embed(P: Matrix, n: int) -> Matrix:
    """diag(1, P)."""
    rows = [[1] + [0] * (n - 1)] + [[0] + list(r) for r in P.rows]
    return Matrix.from_rows(rows, P.ring)


def _trailing(M: Matrix) -> Matrix:
    return Matrix(M.n - 1, tuple(r[1:] for r in M.rows[1:]), M.ring)


def _column(M: Matrix, v: Sequence) -> list:
    ring = M.ring
    return [ring.canon(sum(a * b for a, b in zip(row, v))) for row in M.rows]


def _non_eigen_vector(M: Matrix) -> list:
    """First e_k, then e_i + e_j, with v and Mv linearly independent."""
    ring, n = M.ring, M.n
    candidates = [[1 if k == i else 0 for k in range(n)] for i in range(n)]
    candidates += [
        [1 if k in (i, j) else 0 for k in range(n)] for i in range(n) for j in range(i + 1, n)
    ]
    for v in candidates:
        v = [ring.canon(x) for x in v]
        if len(row_reduce([v, _column(M, v)], ring)) == 2:
            return v
    raise ScalarTarget("matrix is scalar")


def _cyclic_start_basis(M: Matrix) -> Matrix:
    """Columns v, Mv, then standard vectors completing a basis."""
    ring, n = M.ring, M.n
    v = _non_eigen_vector(M)
    cols = [v, _column(M, v)]
    for k in range(n):
        if len(cols) == n:
            break
        e = [ring.canon(1 if i == k else 0) for i in range(n)]
        if len(row_reduce(cols + [e], ring)) == len(cols) + 1:
            cols.append(e)
    return Matrix.from_rows([[cols[j][i] for j in range(n)] for i in range(n)], ring)


def _zero_diagonal_step(M: Matrix) -> Matrix:
    """Conjugator P with (P M P^-1)[0,0] == 0 and a trailing block that is zero or non-scalar."""
    ring, n = M.ring, M.n
    for k in range(n):
        if M.rows[k][k] == 0:
            P = _permutation_matrix(n, 0, k, ring) if k else identity(n, ring)
            T = _trailing(P * M * P)
            if T.is_zero() or not T.is_scalar():
                return P
            break
    S = _cyclic_start_basis(M)
    S_inv = inverse(S)
    P = S_inv
    T = _trailing(S_inv * M * S)
    if T.is_scalar() and not T.is_zero():
        # only when char divides n-1; shearing with the first basis vector breaks the scalar block
        Q = identity(n, ring) + matrix_unit(n, 1, 3, ring)
        P = Q * P
    return P


def zero_diagonal_conjugate(M: Matrix) -> tuple[Matrix, Matrix]:
    """(P, P M P^-1) with the conjugate having zero diagonal."""
    _require_field(M.ring)
    _require_trace_zero(M)
    ring, n = M.ring, M.n
    if M.has_zero_diagonal():
        return identity(n, ring), M
    if M.is_scalar():
        raise ScalarTarget(
            f"nonzero scalar trace-zero matrix over {ring.flag} (characteristic divides n) has no zero-diagonal conjugate"
        )
    P = _zero_diagonal_step(M)
    N = P * M * inverse(P)
    T = _trailing(N)
    if not T.has_zero_diagonal():
        P_T, _ = zero_diagonal_conjugate(T)
        P = _embed(P_T, n) * P
        N = P * M * inverse(P)
    if not N.has_zero_diagonal():
        raise PolyImageError("zero-diagonal reduction failed")
    return P, N


def solve_diagonal_commutator(D: Matrix, C: Matrix) -> Matrix:
    """B with zero diagonal and [D, B] = C, b_ij = c_ij / (d_i - d_j)."""
    _require_field(D.ring)
    ring, n = D.ring, D.n
    d = D.diagonal()
    if not D.is_diagonal() or len(set(d)) != n:
        raise NotApplicable("D must be diagonal with pairwise-distinct entries")
    if not C.has_zero_diagonal():
        raise NotApplicable("C must have zero diagonal")
    rows = [
        [0 if i == j else ring.divide(C.rows[i][j], ring.sub(d[i], d[j])) for j in range(n)]
        for i in range(n)
    ]
    B = Matrix.from_rows(rows, ring)
    if commutator(D, B) != C:
        raise PolyImageError("diagonal commutator solve failed")
    return B


# -----------------------------------------------------------------------------
# exhaustive fallback
# -----------------------------------------------------------------------------
def exhaustive_witness(
    f: MultilinearPoly,
    M: Matrix,
    reason: str,
    budget: int | None = None,
    error: type[PolyImageError] = SearchBudgetExceeded,
) -> WitnessCertificate:
    """Smallest tuple (odometer order, slot 1 fastest) with f(tuple) = M.

    `error` is raised when the tuple space does not fit the budget.
    """
    budget = SEARCH_BUDGET if budget is None else budget
    ring = M.ring
    if not ring.is_finite:
        raise error(f"{reason}; no exhaustive search over {ring.flag}")
    space = MatrixSpace(M.n, ring.modulus)
    if space.size**f.m > budget:
        raise error(
            f"{reason}; small-field case unsupported constructively "
            f"({space.size}^{f.m} tuples exceed search budget {budget})"
        )
    FALLBACK_SEARCHES.inc()
    logger.warning("%s: falling back to exhaustive search over %d tuples", reason, space.size**f.m)
    index = first_preimage(poly_terms(f), f.m, space, space.from_matrix(M))
    if index is None:
        raise PolyImageError(f"{render(f)} does not take the value\n{M}")
    inputs = [space.to_matrix(k, ring) for k in unpack_tuple(index, f.m, space)]
    return _certify(f, inputs, M, f"exhaustive: {reason}")


# -----------------------------------------------------------------------------
# commutators
# -----------------------------------------------------------------------------
def shoda_witness(M: Matrix, budget: int | None = None) -> WitnessCertificate:
    """(A, B) with AB - BA = M for trace-zero M over a field."""
    ring, n = M.ring, M.n
    _require_field(ring)
    _require_trace_zero(M)
    f = commutator_poly(ring)
    if M.is_zero():
        Z = zero_matrix(n, ring)
        return _certify(f, (Z, Z), M, "shoda: zero target")
    if ring.is_finite and ring.modulus < n:
        return exhaustive_witness(f, M, f"field too small ({ring.flag}, n={n})", budget, FieldTooSmall)
    if M.is_scalar():
        return exhaustive_witness(f, M, "nonzero scalar target", budget)
    P, M_zd = zero_diagonal_conjugate(M)
    P_inv = inverse(P)
    D = distinct_diagonal(n, ring)
    B_zd = solve_diagonal_commutator(D, M_zd)
    A = P_inv * D * P
    B = P_inv * B_zd * P
    return _certify(f, (A, B), M, "shoda: zero-diagonal conjugate and diagonal commutator")


# -----------------------------------------------------------------------------
# degree <= 3
# -----------------------------------------------------------------------------
SWAP_XZ = Permutation((3, 2, 1))


def _lie_case(f: MultilinearPoly, M: Matrix, budget: int | None) -> WitnessCertificate:
    ring, n = M.ring, M.n
    b, c = canonical_lie_form(f)
    g, swapped = f, False
    if b.is_zero():
        # x <-> z turns c[z,[x,y]] into c[x,[z,y]]
        g, swapped = rename(f, SWAP_XZ), True
        b, c = canonical_lie_form(g)
    logger.debug("case 4: b=%s c=%s swapped=%s", b, c, swapped)
    if ring.is_finite and ring.modulus < n:
        return exhaustive_witness(f, M, f"case 4: field too small ({ring.flag}, n={n})", budget, FieldTooSmall)
    A = M.scale(b.inverse())
    if A.is_scalar() and not A.is_zero():
        return exhaustive_witness(f, M, "case 4: nonzero scalar target", budget)
    P, A_zd = zero_diagonal_conjugate(A)
    P_inv = inverse(P)
    D = distinct_diagonal(n, ring)
    C = solve_diagonal_commutator(D, A_zd)
    E = solve_diagonal_commutator(D, -C)
    # g(D, D, E) = b[D,[E,D]] + c[E,[D,D]] = b[D, C] = b * A_zd
    triple = [P_inv * X * P for X in (D, D, E)]
    if swapped:
        triple.reverse()
    return _certify(f, triple, M, "case 4: Lie form b[x,[z,y]] + c[z,[x,y]]")


def degree3_witness(f: MultilinearPoly, M: Matrix, budget: int | None = None) -> WitnessCertificate:
    """Inputs realizing a trace-zero M as a value of a nonzero f of degree <= 3."""
    ring, n = M.ring, M.n
    if f.ring != ring:
        raise UnsupportedRing(f"polynomial over {f.ring.flag}, target over {ring.flag}")
    _require_field(ring)
    if f.is_zero():
        raise NotApplicable("zero polynomial has only the value 0")
    if f.m > 3:
        raise NotApplicable(f"degree {f.m} is beyond the degree <= 3 construction")
    if n < 2:
        raise NotApplicable("n must be at least 2")
    _require_trace_zero(M)
    I = identity(n, ring)
    s = coeff_sum(f)

    if f.m == 1:
        return _certify(f, (M.scale(s.inverse()),), M, "case 1: degree 1")
    if f.m == 2:
        if s:
            return _certify(f, (I, M.scale(s.inverse())), M, "case 1: degree 2, f(I, Y) = (a+b)Y")
        a = f.coeff((1, 2))
        inner = shoda_witness(M.scale(a.inverse()), budget)
        return _certify(f, inner.inputs, M, "case 1: degree 2, a(xy - yx)")

    if s:
        logger.debug("case 2: coefficient sum %s", s)
        return _certify(f, (M.scale(s.inverse()), I, I), M, "case 2: coefficient sum nonzero")

    for slot in (1, 2, 3):
        g = fix_slot(f, slot)
        if g.is_zero():
            continue
        alpha = g.coeff((1, 2))
        logger.debug("case 3: unit in slot %d leaves %s", slot, render(g))
        A, B = shoda_witness(M.scale(alpha.inverse()), budget).inputs
        inputs = [A, B]
        inputs.insert(slot - 1, I)
        return _certify(f, inputs, M, f"case 3: unit substitution in slot {slot}")

    return _lie_case(f, M, budget)


# -----------------------------------------------------------------------------
# arbitrary unital rings
# -----------------------------------------------------------------------------
def first_failing_diagonal(A: Matrix) -> int | None:
    ring, n = A.ring, A.n
    for j in range(n):
        acc = ring.canon(0)
        for i in range(n - j):
            acc = ring.add(acc, A.rows[i][i + j])
        if acc != 0:
            return j
    return None


def check_diagonal_sums(A: Matrix) -> bool:
    """Every diagonal on or above the main one sums to zero."""
    return first_failing_diagonal(A) is None


def shift_down(n: int, ring: RingSpec) -> Matrix:
    """X = sum E_{i+1,i}."""
    return Matrix.from_rows([[1 if i == j + 1 else 0 for j in range(n)] for i in range(n)], ring)


def shift_up(n: int, ring: RingSpec) -> Matrix:
    """Z = sum E_{i,i+1}."""
    return Matrix.from_rows([[1 if j == i + 1 else 0 for j in range(n)] for i in range(n)], ring)


def grading(n: int, ring: RingSpec) -> Matrix:
    """Y = diag(0, 1, ..., n-1), reduced into the ring; [Y, X] = X."""
    return diagonal_matrix(list(range(n)), ring)


def crux_decomposition(A: Matrix) -> Matrix:
    """D = sum_{i=0}^{n-2} X^i A Z^(i+1), so that DX - XD = A."""
    ring, n = A.ring, A.n
    if n < 2:
        raise NotApplicable("n must be at least 2")
    failing = first_failing_diagonal(A)
    if failing is not None:
        raise DiagonalSumViolation(failing)
    X, Z = shift_down(n, ring), shift_up(n, ring)
    D = zero_matrix(n, ring)
    Xi = identity(n, ring)
    Zi = Z
    for _ in range(n - 1):
        D = D + Xi * A * Zi
        Xi = Xi * X
        Zi = Zi * Z
    if D * X - X * D != A:
        raise PolyImageError("crux decomposition failed")
    return D


def lie_witness(A: Matrix) -> WitnessCertificate:
    """A = f(D, X, Y) for f = [x,[z,y]] over any unital ring."""
    ring, n = A.ring, A.n
    D = crux_decomposition(A)
    f = lie_pair(1, 0, ring)
    return _certify(f, (D, shift_down(n, ring), grading(n, ring)), A, "lie: [D,[Y,X]] = [D,X]")


def nested_lie_witness(A: Matrix, m: int) -> WitnessCertificate:
    """A = [D,[Y,...,[Y,X]]...] with m-2 copies of Y."""
    if not 2 <= m <= MAX_DEGREE:
        raise NotApplicable(f"nested commutators need 2 <= m <= {MAX_DEGREE}")
    ring, n = A.ring, A.n
    D = crux_decomposition(A)
    Y, X = grading(n, ring), shift_down(n, ring)
    f = nested_commutator(m, ring)
    return _certify(f, [D] + [Y] * (m - 2) + [X], A, f"nested lie: degree {m}")


def witness_for(f: MultilinearPoly, M: Matrix, budget: int | None = None) -> WitnessCertificate:
    """Pick the construction matching the polynomial and the ring."""
    if f.ring != M.ring:
        raise UnsupportedRing(f"polynomial over {f.ring.flag}, target over {M.ring.flag}")
    ring = M.ring
    if ring.is_field and f.m <= 3:
        return degree3_witness(f, M, budget)
    if f == lie_pair(1, 0, ring):
        return lie_witness(M)
    if f.m >= 2 and f == nested_commutator(f.m, ring):
        return nested_lie_witness(M, f.m)
    raise UnsupportedRing(f"no construction for {render(f)} over {ring.flag}")
