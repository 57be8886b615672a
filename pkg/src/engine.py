"""Vectorised evaluation of multilinear polynomials over M_n(Z/q).

Matrices are interned as integers: entry (i, j) is the base-q digit of
weight q^(i*n + j). A tuple index t enumerates m-tuples as an odometer with
slot 1 fastest: slot k holds matrix (t // N^(k-1)) % N, N = q^(n^2).
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from .freealg import MultilinearPoly
from .matrix import Matrix
from .ring import RingSpec, UnsupportedRing

logger = logging.getLogger("polyimage.engine")

INT64_SAFE = 2**62
BATCH_VALUES = 1 << 18
SAMPLE_BLOCK = 1 << 15

Terms = tuple[tuple[tuple[int, ...], int], ...]


def poly_terms(f: MultilinearPoly) -> Terms:
    """Picklable (word, coefficient) pairs of a polynomial over a finite ring."""
    if not f.ring.is_finite:
        raise UnsupportedRing(f"vectorised evaluation needs a finite ring, got {f.ring.flag}")
    return tuple((s.images, int(c.value)) for s, c in f.terms())


@dataclass(frozen=True)
class MatrixSpace:
    """All q^(n^2) matrices of M_n(Z/q)."""

    n: int
    q: int

    @property
    def dim(self) -> int:
        return self.n * self.n

    @property
    def size(self) -> int:
        return self.q**self.dim

    @property
    def wide(self) -> bool:
        """True when int64 arithmetic could overflow."""
        return self.n * (self.q - 1) ** 2 >= INT64_SAFE or self.size >= INT64_SAFE

    @property
    def dtype(self):
        return object if self.wide else np.int64

    @cached_property
    def weights(self) -> np.ndarray:
        return np.array([self.q**k for k in range(self.dim)], dtype=self.dtype)

    def unpack(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=self.dtype)
        digits = (idx[..., None] // self.weights) % self.q
        return digits.reshape(idx.shape + (self.n, self.n))

    def pack(self, mats: np.ndarray) -> np.ndarray:
        flat = mats.reshape(mats.shape[:-2] + (self.dim,)).astype(self.dtype)
        return (flat * self.weights).sum(axis=-1)

    @cached_property
    def all(self) -> np.ndarray:
        return self.unpack(np.arange(self.size, dtype=np.int64))

    def identity(self) -> np.ndarray:
        return np.eye(self.n, dtype=self.dtype)

    # -- conversions to exact matrices -------------------------------------------
    def to_matrix(self, packed: int, ring: RingSpec) -> Matrix:
        digits = self.unpack(np.array(packed, dtype=self.dtype))
        return Matrix.from_rows([[int(v) for v in row] for row in digits], ring)

    def from_matrix(self, A: Matrix) -> int:
        total = 0
        for k, v in enumerate(A.entries()):
            total += int(v) * self.q**k
        return total

    # -- predicates on packed values -------------------------------------------
    def traces(self, packed: np.ndarray) -> np.ndarray:
        mats = self.unpack(packed)
        return np.trace(mats, axis1=-2, axis2=-1) % self.q

    def is_scalar(self, packed: np.ndarray) -> np.ndarray:
        mats = self.unpack(packed)
        diag = np.diagonal(mats, axis1=-2, axis2=-1)
        off = mats * (1 - np.eye(self.n, dtype=np.int64))
        return (diag == diag[..., :1]).all(axis=-1) & (off == 0).all(axis=(-2, -1))

    def trace_zero_packed(self) -> np.ndarray:
        idx = np.arange(self.size, dtype=np.int64)
        return idx[self.traces(idx) == 0]


def _matmul(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    return np.matmul(a, b) % q


def evaluate_batch(terms: Terms, slots: Sequence[np.ndarray], space: MatrixSpace) -> np.ndarray:
    """Values of the polynomial on a batch: slots[k] has shape (B, n, n)."""
    q = space.q
    batch = slots[0].shape[0]
    total = np.zeros((batch, space.n, space.n), dtype=space.dtype)
    for word, c in terms:
        prod = slots[word[0] - 1]
        for k in word[1:]:
            prod = _matmul(prod, slots[k - 1], q)
        total = (total + c * prod) % q
    return total


def _side_products(terms: Terms, outer: Sequence[np.ndarray], space: MatrixSpace, batch: int):
    """For each monomial, products left and right of the slot-1 variable."""
    eye = np.broadcast_to(space.identity(), (batch, space.n, space.n))
    for word, c in terms:
        p = word.index(1)
        left, right = eye, eye
        for k in word[:p]:
            left = _matmul(left, outer[k - 2], space.q)
        for k in word[p + 1 :]:
            right = _matmul(right, outer[k - 2], space.q)
        yield c, left, right


def slot1_values(terms: Terms, m: int, space: MatrixSpace, start: int, stop: int) -> np.ndarray:
    """Packed values for tuple indices [start*N, stop*N), in tuple order.

    Slots 2..m are fixed by the outer index o in [start, stop); the value is
    linear in slot 1, so all N slot-1 matrices go through one n^2 x n^2 map.
    """
    N, n, q = space.size, space.n, space.q
    outer_idx = np.arange(start, stop, dtype=np.int64)
    batch = len(outer_idx)
    outer = [space.all[(outer_idx // N ** (k - 2)) % N] for k in range(2, m + 1)]
    T = np.zeros((batch, n, n, n, n), dtype=space.dtype)
    for c, left, right in _side_products(terms, outer, space, batch):
        # vec(L X R)[(i, j)] = sum_{k, l} L[i, k] X[k, l] R[l, j]
        T = (T + c * np.einsum("bik,blj->bijkl", left, right)) % q
    T = T.reshape(batch, n * n, n * n)
    xs = space.all.reshape(N, n * n).astype(space.dtype)
    values = np.einsum("bpk,xk->bxp", T, xs) % q
    return space.pack(values.reshape(batch * N, n, n))


def outer_blocks(m: int, space: MatrixSpace) -> Iterator[tuple[int, int]]:
    outer_total = space.size ** (m - 1)
    batch = max(1, BATCH_VALUES // space.size)
    for start in range(0, outer_total, batch):
        yield start, min(start + batch, outer_total)


def image_block(terms: Terms, m: int, n: int, q: int, start: int, stop: int) -> np.ndarray:
    """Distinct packed values for outer indices [start, stop); picklable for worker pools."""
    space = MatrixSpace(n, q)
    image = np.zeros(0, dtype=space.dtype)
    for s, e in outer_blocks(m, space):
        if e <= start or s >= stop:
            continue
        image = np.union1d(image, slot1_values(terms, m, space, max(s, start), min(e, stop)))
    return image


def first_preimage(terms: Terms, m: int, space: MatrixSpace, target: int) -> int | None:
    """Smallest tuple index whose value is `target`, or None."""
    N = space.size
    for start, stop in outer_blocks(m, space):
        values = slot1_values(terms, m, space, start, stop)
        hits = np.nonzero(values == target)[0]
        if hits.size:
            return start * N + int(hits[0])
    return None


def unpack_tuple(index: int, m: int, space: MatrixSpace) -> list[int]:
    N = space.size
    return [(index // N**k) % N for k in range(m)]


def sample_values(terms: Terms, m: int, space: MatrixSpace, count: int, seed: int, block: int) -> np.ndarray:
    """Packed values of sample block `block`; stream depends only on (seed, block)."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))
    size = min(SAMPLE_BLOCK, count - block * SAMPLE_BLOCK)
    entries = rng.integers(0, space.q, size=(m, size, space.n, space.n), dtype=np.int64)
    slots = [entries[k].astype(space.dtype) for k in range(m)]
    if not terms:
        return np.zeros(1, dtype=space.dtype)
    return space.pack(evaluate_batch(terms, slots, space))


def sample_block_count(count: int) -> int:
    return -(-count // SAMPLE_BLOCK)
