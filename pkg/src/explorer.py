"""Exhaustive and sampled images of multilinear polynomials over small matrix rings.

Values are handled as packed integers (see engine). Every report records
its mode together with the budget and seed that produced it.
"""
from __future__ import annotations

import asyncio
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

from .engine import (
    MatrixSpace,
    image_block,
    poly_terms,
    sample_block_count,
    sample_values,
)
from .freealg import (
    MultilinearPoly,
    NotApplicable,
    central_linearization,
    coeff_sum,
    coeff_sum_alternating,
    evaluate,
    palindrome,
    render,
)
from .matrix import Matrix, matrix_to_json, matrix_unit, row_reduce
from .metrics import EXPLORE_LATENCY, TUPLES_EVALUATED
from .ring import PolyImageError, RingSpec, UnsupportedRing
from .witness import SearchBudgetExceeded

logger = logging.getLogger("polyimage.explorer")

DEFAULT_BUDGET = int(float(os.getenv("POLYIMAGE_BUDGET", "1e8")))
SPAN_SAMPLES = 256
RATIONAL_ENTRY_RANGE = 3


class InfiniteRing(PolyImageError):
    """Raised when an exhaustive operation is asked to run over Q."""


class Mode(str, Enum):
    EXHAUSTIVE = "exhaustive"
    SAMPLED = "sampled"


class Relation(str, Enum):
    """How the computed image sits relative to a reference set."""

    EQUAL = "equal"
    SUBSET = "subset"
    SUPERSET = "superset"
    INCOMPARABLE = "incomparable"


REFERENCES = ("zero", "center", "trace_zero", "full")


# -----------------------------------------------------------------------------
# reports
# -----------------------------------------------------------------------------
@dataclass
class ImageReport:
    poly: MultilinearPoly
    n: int
    ring: RingSpec
    mode: Mode
    budget: int
    seed: int
    tuples: int
    image: np.ndarray
    comparisons: dict[str, Relation] = field(default_factory=dict)

    @property
    def space(self) -> MatrixSpace:
        return MatrixSpace(self.n, self.ring.modulus)

    @property
    def size(self) -> int:
        return len(self.image)

    def matrices(self) -> list[Matrix]:
        return [self.space.to_matrix(int(v), self.ring) for v in self.image]

    def __contains__(self, A: Matrix) -> bool:
        key = self.space.from_matrix(A)
        pos = np.searchsorted(self.image, key)
        return bool(pos < len(self.image) and self.image[pos] == key)

    def matches(self) -> str | None:
        """Name of the reference set the image equals, if any."""
        return next((k for k in REFERENCES if self.comparisons.get(k) is Relation.EQUAL), None)


def _reference_sizes(space: MatrixSpace) -> dict[str, int]:
    q = space.q
    return {"zero": 1, "center": q, "trace_zero": q ** (space.dim - 1), "full": space.size}


def compare_image(image: np.ndarray, space: MatrixSpace) -> dict[str, Relation]:
    """Relations against {0}, the scalars, the trace-zero matrices and M_n."""
    masks = {
        "zero": image == 0,
        "center": space.is_scalar(image),
        "trace_zero": space.traces(image) == 0,
        "full": np.ones(len(image), dtype=bool),
    }
    sizes = _reference_sizes(space)
    out = {}
    for name in REFERENCES:
        hit = int(np.count_nonzero(masks[name]))
        inside, covers = hit == len(image), hit == sizes[name]
        if inside and covers:
            out[name] = Relation.EQUAL
        elif inside:
            out[name] = Relation.SUBSET
        elif covers:
            out[name] = Relation.SUPERSET
        else:
            out[name] = Relation.INCOMPARABLE
    return out


def image_report_json(report: ImageReport, dump_image: bool = False) -> dict:
    data = {
        "poly": render(report.poly),
        "n": report.n,
        "ring": report.ring.flag,
        "mode": report.mode.value,
        "budget": report.budget,
        "seed": report.seed,
        "tuples": report.tuples,
        "image_size": report.size,
        "comparisons": {k: v.value for k, v in report.comparisons.items()},
        "matches": report.matches(),
    }
    if dump_image:
        data["image"] = [matrix_to_json(A)["rows"] for A in report.matrices()]
    return data


# -----------------------------------------------------------------------------
# enumeration
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class _Plan:
    space: MatrixSpace
    terms: tuple
    mode: Mode
    tuples: int


def _plan(f: MultilinearPoly, n: int, ring: RingSpec, budget: int, samples: int | None) -> _Plan:
    if f.ring != ring:
        raise UnsupportedRing(f"polynomial over {f.ring.flag}, image requested over {ring.flag}")
    if not ring.is_finite:
        raise InfiniteRing(f"cannot enumerate matrices over {ring.flag}")
    if budget < 1:
        raise NotApplicable(f"budget must be at least 1, got {budget}")
    space = MatrixSpace(n, ring.modulus)
    total = space.size**f.m
    if total <= budget:
        logger.info("exhaustive: %d tuples over M_%d(%s)", total, n, ring.flag)
        return _Plan(space, poly_terms(f), Mode.EXHAUSTIVE, total)
    count = samples or budget
    logger.info("sampled: %d of %d tuples (budget %d)", count, total, budget)
    return _Plan(space, poly_terms(f), Mode.SAMPLED, count)


def _finish(f, n, ring, plan: _Plan, budget: int, seed: int, image: np.ndarray) -> ImageReport:
    TUPLES_EVALUATED.inc(plan.tuples)
    report = ImageReport(f, n, ring, plan.mode, budget, seed, plan.tuples, image)
    report.comparisons = compare_image(image, plan.space)
    logger.info("image of %s over M_%d(%s): %d matrices", render(f), n, ring.flag, report.size)
    return report


def enumerate_image(
    f: MultilinearPoly,
    n: int,
    ring: RingSpec,
    budget: int | None = None,
    seed: int = 0,
    *,
    samples: int | None = None,
    workers: int = 1,
) -> ImageReport:
    """f(M_n(ring)): exhaustive when the tuple space fits `budget`, else sampled."""
    if workers > 1:
        return asyncio.run(enumerate_image_async(f, n, ring, budget, seed, samples=samples, workers=workers))
    budget = DEFAULT_BUDGET if budget is None else budget
    plan = _plan(f, n, ring, budget, samples)
    space = plan.space
    with EXPLORE_LATENCY.time():
        if plan.mode is Mode.EXHAUSTIVE:
            image = image_block(plan.terms, f.m, n, space.q, 0, space.size ** (f.m - 1))
        else:
            image = np.zeros(0, dtype=space.dtype)
            for block in range(sample_block_count(plan.tuples)):
                image = np.union1d(image, sample_values(plan.terms, f.m, space, plan.tuples, seed, block))
    return _finish(f, n, ring, plan, budget, seed, image)


def _partition(total: int, parts: int) -> list[tuple[int, int]]:
    step = max(1, -(-total // parts))
    return [(s, min(s + step, total)) for s in range(0, total, step)]


async def enumerate_image_async(
    f: MultilinearPoly,
    n: int,
    ring: RingSpec,
    budget: int | None = None,
    seed: int = 0,
    *,
    samples: int | None = None,
    workers: int = 2,
) -> ImageReport:
    """Same report as enumerate_image, computed on a process pool."""
    budget = DEFAULT_BUDGET if budget is None else budget
    plan = _plan(f, n, ring, budget, samples)
    space = plan.space
    loop = asyncio.get_running_loop()
    started = time.perf_counter()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        if plan.mode is Mode.EXHAUSTIVE:
            outer_total = space.size ** (f.m - 1)
            jobs = [
                loop.run_in_executor(pool, image_block, plan.terms, f.m, n, space.q, s, e)
                for s, e in _partition(outer_total, workers * 4)
            ]
        else:
            jobs = [
                loop.run_in_executor(pool, sample_values, plan.terms, f.m, space, plan.tuples, seed, b)
                for b in range(sample_block_count(plan.tuples))
            ]
        parts = await asyncio.gather(*jobs)
    image = np.zeros(0, dtype=space.dtype)
    for part in parts:
        image = np.union1d(image, part)
    EXPLORE_LATENCY.observe(time.perf_counter() - started)
    logger.debug("merged %d partial images from %d workers", len(parts), workers)
    return _finish(f, n, ring, plan, budget, seed, image)


def trace_zero_set(n: int, ring: RingSpec) -> frozenset[Matrix]:
    """All q^(n^2 - 1) trace-zero matrices of M_n(ring)."""
    if not ring.is_finite:
        raise InfiniteRing(f"the trace-zero set over {ring.flag} is infinite")
    space = MatrixSpace(n, ring.modulus)
    return frozenset(space.to_matrix(int(v), ring) for v in space.trace_zero_packed())


# -----------------------------------------------------------------------------
# conjecture check
# -----------------------------------------------------------------------------
class ConjectureStatus(str, Enum):
    HOLDS_EXHAUSTIVELY = "holds-exhaustively"
    HOLDS_ON_SAMPLE = "holds-on-sample"
    FAILS = "fails"
    NOT_APPLICABLE = "not-applicable"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class ConjectureVerdict:
    status: ConjectureStatus
    detail: str
    missing: Matrix | None = None
    report: ImageReport | None = None

    def to_json(self) -> dict:
        data = {"status": self.status.value, "detail": self.detail}
        if self.missing is not None:
            data["missing"] = matrix_to_json(self.missing)
        if self.report is not None:
            data["report"] = image_report_json(self.report)
        return data


def check_conjecture(
    f: MultilinearPoly,
    n: int,
    ring: RingSpec,
    budget: int | None = None,
    seed: int = 0,
    *,
    workers: int = 1,
) -> ConjectureVerdict:
    """Does f(M_n) contain every trace-zero matrix when n >= m - 1?"""
    if f.is_zero():
        raise NotApplicable("the zero polynomial is excluded")
    if not ring.is_finite:
        raise InfiniteRing(f"cannot enumerate matrices over {ring.flag}")
    if not ring.is_field:
        raise UnsupportedRing(f"the containment question is posed over fields, got {ring.flag}")
    if n < f.m - 1:
        return ConjectureVerdict(ConjectureStatus.NOT_APPLICABLE, f"n={n} < m-1={f.m - 1}")
    report = enumerate_image(f, n, ring, budget, seed, workers=workers)
    space = report.space
    missing = np.setdiff1d(space.trace_zero_packed(), report.image)
    if not missing.size:
        if report.mode is Mode.EXHAUSTIVE:
            return ConjectureVerdict(ConjectureStatus.HOLDS_EXHAUSTIVELY, "every trace-zero matrix is a value", report=report)
        return ConjectureVerdict(ConjectureStatus.HOLDS_ON_SAMPLE, "samples hit every trace-zero matrix", report=report)
    witness = space.to_matrix(int(missing[0]), ring)
    if report.mode is Mode.EXHAUSTIVE:
        return ConjectureVerdict(
            ConjectureStatus.FAILS, f"{missing.size} trace-zero matrices are not values", witness, report
        )
    return ConjectureVerdict(
        ConjectureStatus.INCONCLUSIVE, f"{missing.size} trace-zero matrices not hit by samples", report=report
    )


# -----------------------------------------------------------------------------
# spans
# -----------------------------------------------------------------------------
@dataclass(frozen=True)
class SpanReport:
    basis: list[tuple]
    n: int
    ring: RingSpec
    mode: Mode
    contains_trace_zero: bool
    equals_center: bool

    @property
    def dimension(self) -> int:
        return len(self.basis)

    @property
    def is_full(self) -> bool:
        return self.dimension == self.n * self.n

    def to_json(self) -> dict:
        fmt = self.ring.format_value
        return {
            "n": self.n,
            "ring": self.ring.flag,
            "mode": self.mode.value,
            "dimension": self.dimension,
            "basis": [[fmt(v) for v in row] for row in self.basis],
            "contains_trace_zero": self.contains_trace_zero,
            "equals_center": self.equals_center,
            "full": self.is_full,
        }


def _trace_zero_basis(n: int, ring: RingSpec) -> list[list]:
    out = []
    for i in range(n):
        for j in range(n):
            if i != j:
                out.append([1 if k == i * n + j else 0 for k in range(n * n)])
    for i in range(n - 1):
        out.append([1 if k == i * (n + 1) else (-1 if k == n * n - 1 else 0) for k in range(n * n)])
    return [[ring.canon(v) for v in vec] for vec in out]


def _grow_basis(basis: list[tuple], vectors, ring: RingSpec, full: int) -> list[tuple]:
    for v in vectors:
        if len(basis) == full:
            break
        basis = row_reduce(basis + [v], ring)
    return basis


def _rational_values(f: MultilinearPoly, n: int, count: int, seed: int):
    rng = np.random.Generator(np.random.PCG64(seed))
    lo, hi = -RATIONAL_ENTRY_RANGE, RATIONAL_ENTRY_RANGE + 1
    for _ in range(count):
        args = [
            Matrix.from_rows(rng.integers(lo, hi, size=(n, n)).tolist(), f.ring) for _ in range(f.m)
        ]
        yield list(evaluate(f, args).entries())


def span_of_image(
    f: MultilinearPoly,
    n: int,
    ring: RingSpec,
    budget: int | None = None,
    seed: int = 0,
) -> SpanReport:
    """Row-reduced basis of the linear span of f(M_n(ring))."""
    if not ring.is_field:
        raise UnsupportedRing(f"spans are computed over fields, got {ring.flag}")
    full = n * n
    if ring.is_finite:
        report = enumerate_image(f, n, ring, budget, seed)
        space, mode = report.space, report.mode
        vectors = (space.unpack(np.array(v, dtype=space.dtype)).reshape(-1).tolist() for v in report.image)
        basis = _grow_basis([], vectors, ring, full)
    else:
        count = min(budget or SPAN_SAMPLES, SPAN_SAMPLES)
        mode = Mode.SAMPLED
        basis = _grow_basis([], _rational_values(f, n, count, seed), ring, full)
    contains = len(row_reduce(basis + _trace_zero_basis(n, ring), ring)) == len(basis)
    ident = tuple(ring.canon(1 if k % (n + 1) == 0 else 0) for k in range(full))
    equals_center = len(basis) == 1 and tuple(basis[0]) == ident
    logger.info("span of %s over M_%d(%s): dimension %d", render(f), n, ring.flag, len(basis))
    return SpanReport(basis, n, ring, mode, contains, equals_center)


def matrix_unit_chain(f: MultilinearPoly, n: int, i: int, j: int) -> tuple[Matrix, ...]:
    """Matrix units whose value is a*E_ij, a the first nonzero coefficient.

    The chain E_ii, E_ij, E_j,l1, E_l1,l2, ..., E_l,j is read along the first
    nonzero monomial, so every other monomial multiplies to zero.
    """
    m, ring = f.m, f.ring
    if f.is_zero():
        raise NotApplicable("the zero polynomial has no nonzero coefficient")
    if m < 3 or n < m - 1:
        raise NotApplicable(f"matrix unit chains need n >= m-1 >= 2, got n={n}, m={m}")
    if i == j:
        raise NotApplicable("i and j must be distinct")
    spare = [k for k in range(1, n + 1) if k not in (i, j)][: m - 3]
    path = [j] + spare + [j]
    chain = [matrix_unit(n, i, i, ring), matrix_unit(n, i, j, ring)]
    chain += [matrix_unit(n, a, b, ring) for a, b in zip(path, path[1:])]
    sigma, _ = f.terms()[0]
    slots: list[Matrix] = [None] * m  # type: ignore[list-item]
    for k, unit in enumerate(chain, start=1):
        slots[sigma(k) - 1] = unit
    return tuple(slots)


# -----------------------------------------------------------------------------
# built-in verifications
# -----------------------------------------------------------------------------
@dataclass
class CheckReport:
    name: str
    ok: bool
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": self.name, "ok": self.ok, "details": self.details}


DEMO_RINGS = (RingSpec.gf(2), RingSpec.gf(3), RingSpec.rational())


def verify_counterexample_deg4(rings: Sequence[RingSpec] = DEMO_RINGS) -> CheckReport:
    """x1x2x3x4 - x4x3x2x1 has both coefficient sums zero yet takes the value E11."""
    details, ok = {}, True
    for ring in rings:
        f = palindrome(4, ring)
        args = [matrix_unit(2, a, b, ring) for a, b in ((1, 1), (1, 2), (2, 2), (2, 1))]
        value = evaluate(f, args)
        sums = (coeff_sum(f), coeff_sum_alternating(f))
        ring_ok = not sums[0] and not sums[1] and value == matrix_unit(2, 1, 1, ring) and value.trace() == 1
        details[ring.flag] = {
            "coeff_sums": [str(s) for s in sums],
            "value": matrix_to_json(value)["rows"],
            "trace": str(value.trace()),
            "ok": ring_ok,
        }
        ok = ok and ring_ok
    return CheckReport("counterexample_deg4", ok, details)


def verify_central_linearization(
    ring: RingSpec,
    samples: int = 500,
    seed: int = 0,
    budget: int | None = None,
) -> CheckReport:
    """Every value of the linearized (xy - yx)^2 on M_2 is a scalar matrix."""
    if ring.characteristic == 2:
        raise NotApplicable("linearization of a square degenerates in characteristic 2")
    if not ring.is_field:
        raise UnsupportedRing(f"stated over fields, got {ring.flag}")
    f = central_linearization(ring)
    if ring.is_finite:
        report = enumerate_image(f, 2, ring, budget, seed, samples=samples)
        space = report.space
        ok = bool(space.is_scalar(report.image).all())
        span = _grow_basis(
            [], (space.unpack(np.array(v, dtype=space.dtype)).reshape(-1).tolist() for v in report.image), ring, 4
        )
        details = {
            "mode": report.mode.value,
            "tuples": report.tuples,
            "image_size": report.size,
            "span_dimension": len(span),
        }
    else:
        values = [Matrix.from_rows([v[:2], v[2:]], ring) for v in _rational_values(f, 2, samples, seed)]
        ok = all(A.is_scalar() for A in values)
        span = _grow_basis([], (list(A.entries()) for A in values), ring, 4)
        details = {"mode": Mode.SAMPLED.value, "tuples": samples, "span_dimension": len(span)}
    details["ring"] = ring.flag
    return CheckReport("central_linearization", ok, details)


def verify_power_map_demo(n: int, ring: RingSpec, budget: int | None = None) -> CheckReport:
    """x -> x^n takes no nonzero nilpotent value and fixes E11 and E11 + E12."""
    if not ring.is_finite:
        raise InfiniteRing(f"cannot enumerate matrices over {ring.flag}")
    if not ring.is_field:
        raise UnsupportedRing(f"stated over fields, got {ring.flag}")
    budget = DEFAULT_BUDGET if budget is None else budget
    space = MatrixSpace(n, ring.modulus)
    if space.size > budget:
        raise SearchBudgetExceeded(f"{space.size} matrices exceed budget {budget}")
    q = space.q
    mats = space.all.astype(space.dtype)
    powers = mats
    for _ in range(n - 1):
        powers = np.matmul(powers, mats) % q
    image = np.unique(space.pack(powers))
    values = space.unpack(image)
    nth = values
    for _ in range(n - 1):
        nth = np.matmul(nth, values) % q
    nilpotent = (nth == 0).all(axis=(-2, -1)) & (image != 0)
    E11 = matrix_unit(n, 1, 1, ring)
    fixed = {"E11": E11}
    if n >= 2:
        fixed["E11+E12"] = E11 + matrix_unit(n, 1, 2, ring)
    fixed_ok = {name: A.power(n) == A for name, A in fixed.items()}
    TUPLES_EVALUATED.inc(space.size)
    details = {
        "ring": ring.flag,
        "n": n,
        "image_size": len(image),
        "nonzero_nilpotents": int(np.count_nonzero(nilpotent)),
        "zero_in_image": bool(image.size and image[0] == 0),
        "fixed_points": fixed_ok,
    }
    ok = not nilpotent.any() and all(fixed_ok.values())
    return CheckReport("power_map", ok, details)


def run_demo(budget: int | None = None, seed: int = 0) -> list[CheckReport]:
    return [
        verify_counterexample_deg4(),
        verify_central_linearization(RingSpec.gf(5), samples=500, seed=seed, budget=min(budget or 10**6, 10**6)),
        verify_power_map_demo(2, RingSpec.gf(2), budget),
        verify_power_map_demo(2, RingSpec.gf(3), budget),
    ]


__all__ = [
    "ConjectureStatus",
    "ConjectureVerdict",
    "CheckReport",
    "ImageReport",
    "InfiniteRing",
    "Mode",
    "Relation",
    "SpanReport",
    "check_conjecture",
    "compare_image",
    "enumerate_image",
    "enumerate_image_async",
    "image_report_json",
    "matrix_unit_chain",
    "span_of_image",
    "trace_zero_set",
    "verify_central_linearization",
    "verify_counterexample_deg4",
    "verify_power_map_demo",
    "run_demo",
]
