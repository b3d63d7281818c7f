"""Exact linear algebra over the prime field F_p.

Matrices are numpy integer arrays whose entries are residues in [0, p).
Vectors in a space are stored as columns unless a function says otherwise.
Elimination is deterministic: the pivot of each column is the first row
(from the top of the unreduced block) with a nonzero entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numba
import numpy as np

DTYPE = np.int64


def as_fp(a, p: int) -> np.ndarray:
    """Return a fresh 2-d int array reduced mod p."""
    arr = np.array(a, dtype=DTYPE)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1) if arr.size else arr.reshape(0, 0)
    return np.mod(arr, p)


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=DTYPE)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=DTYPE)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] == 0 or b.shape[0] == 0:
        return zeros(a.shape[0], b.shape[1])
    bound = a.shape[1] * (p - 1) ** 2
    if bound < 2**53:
        # float64 products are exact below 2^53 and run through BLAS
        out = a.astype(np.float64) @ b.astype(np.float64)
        return np.mod(out, p).astype(DTYPE)
    if bound < 2**62:
        return np.mod(a @ b, p)
    return np.mod(a.astype(object) @ b.astype(object), p).astype(DTYPE)


@numba.njit(cache=True)
def _eliminate_packed(words, cols):
    """In-place reduction of bit rows packed into uint64 words (bit j of word w is column 64w+j)."""
    rows = words.shape[0]
    nw = words.shape[1]
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        w = c >> 6
        bit = np.uint64(1) << np.uint64(c & 63)
        i = r
        while i < rows and (words[i, w] & bit) == 0:
            i += 1
        if i == rows:
            continue
        if i != r:
            for k in range(nw):
                t = words[r, k]
                words[r, k] = words[i, k]
                words[i, k] = t
        for s in range(rows):
            if s != r and (words[s, w] & bit) != 0:
                for k in range(w, nw):
                    words[s, k] ^= words[r, k]
        pivots[r] = c
        r += 1
    return r, pivots[:r]


@numba.njit(cache=True)
def _eliminate(m, p):
    """In-place reduced row echelon form mod p; returns (rank, pivot columns)."""
    rows, cols = m.shape
    pivots = np.empty(min(rows, cols), dtype=np.int64)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        i = r
        while i < rows and m[i, c] == 0:
            i += 1
        if i == rows:
            continue
        if i != r:
            for k in range(cols):
                t = m[r, k]
                m[r, k] = m[i, k]
                m[i, k] = t
        lead = m[r, c]
        if lead != 1:
            inv = 1
            e = p - 2
            b = lead
            while e > 0:
                if e & 1:
                    inv = inv * b % p
                b = b * b % p
                e >>= 1
            for k in range(c, cols):
                m[r, k] = m[r, k] * inv % p
        # multiples of the pivot row, so that row updates need no division
        mult = np.empty((p, cols - c), dtype=m.dtype)
        for f in range(p):
            for k in range(c, cols):
                mult[f, k - c] = f * m[r, k] % p
        for s in range(rows):
            f = m[s, c]
            if s != r and f != 0:
                g = p - f
                for k in range(c, cols):
                    v = m[s, k] + mult[g, k - c]
                    m[s, k] = v - p if v >= p else v
        pivots[r] = c
        r += 1
    return r, pivots[:r]


def _pack(a: np.ndarray) -> np.ndarray:
    rows, cols = a.shape
    nw = max(1, (cols + 63) // 64)
    bits = np.zeros((rows, nw * 64), dtype=np.uint8)
    bits[:, :cols] = a & 1
    packed = np.packbits(bits, axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(np.uint64).reshape(rows, nw)


def _unpack(words: np.ndarray, cols: int) -> np.ndarray:
    if words.shape[0] == 0:
        return zeros(0, cols)
    bytes_ = np.ascontiguousarray(words).view(np.uint8).reshape(words.shape[0], -1)
    return np.unpackbits(bytes_, axis=1, bitorder="little")[:, :cols].astype(DTYPE)


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form; returns the nonzero rows and pivot columns.

    Over F_2 rows are bit-packed into 64-bit words; other primes use a dense
    residue array.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.size == 0:
        return zeros(0, a.shape[1] if a.ndim == 2 else 0), []
    if p == 2:
        words = _pack(np.mod(a, 2).astype(np.uint8))
        r, piv = _eliminate_packed(words, a.shape[1])
        return _unpack(words[:r], a.shape[1]), [int(c) for c in piv]
    m = np.ascontiguousarray(np.mod(a, p), dtype=DTYPE)
    r, piv = _eliminate(m, p)
    return m[:r], [int(c) for c in piv]


def rank(a: np.ndarray, p: int) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    # eliminate along the shorter side
    if a.shape[0] > a.shape[1]:
        a = a.T
    return len(rref(a, p)[1])


def kernel_basis(a: np.ndarray, p: int) -> np.ndarray:
    """Columns spanning {x : a x = 0}; there are cols - rank of them."""
    a = np.asarray(a, dtype=DTYPE)
    cols = a.shape[1]
    if a.shape[0] == 0:
        return identity(cols)
    r, piv = rref(a, p)
    pset = set(piv)
    free = np.array([c for c in range(cols) if c not in pset], dtype=np.int64)
    k = zeros(cols, len(free))
    k[free, np.arange(len(free))] = 1
    if piv and len(free):
        k[np.array(piv)[:, None], np.arange(len(free))[None, :]] = (-r[:, free]) % p
    return k


def column_basis(a: np.ndarray, p: int) -> np.ndarray:
    """A basis (as columns, in reduced form) of the column span of a."""
    a = np.asarray(a, dtype=DTYPE)
    if a.shape[1] == 0:
        return zeros(a.shape[0], 0)
    r, _ = rref(a.T, p)
    return np.ascontiguousarray(r.T)


def solve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Some x with a x = b (b may have several columns), or None."""
    a = np.asarray(a, dtype=DTYPE)
    b = np.asarray(b, dtype=DTYPE)
    if b.ndim == 1:
        b = b.reshape(-1, 1)
    n = a.shape[1]
    if a.shape[0] == 0:
        return zeros(n, b.shape[1])
    aug = np.hstack([a, b])
    r, piv = rref(aug, p)
    if any(c >= n for c in piv):
        return None
    x = zeros(n, b.shape[1])
    for i, c in enumerate(piv):
        x[c] = r[i, n:]
    return x


def in_span(basis: np.ndarray, v: np.ndarray, p: int) -> bool:
    return solve(basis, v, p) is not None


def same_span(a: np.ndarray, b: np.ndarray, p: int) -> bool:
    """Whether the column spans of a and b coincide."""
    if a.shape[0] != b.shape[0]:
        return False
    ra = rank(a, p) if a.size else 0
    rb = rank(b, p) if b.size else 0
    if ra != rb:
        return False
    if ra == 0:
        return True
    return rank(np.hstack([a, b]), p) == ra


def complement_basis(sub: np.ndarray, n: int, p: int) -> np.ndarray:
    """Standard basis vectors completing the column span of sub to F_p^n."""
    chosen = []
    if sub.size and sub.shape[1]:
        _, piv = rref(sub.T, p)
        pivset = set(piv)
    else:
        pivset = set()
    for i in range(n):
        if i not in pivset:
            chosen.append(i)
    c = zeros(n, len(chosen))
    for j, i in enumerate(chosen):
        c[i, j] = 1
    return c


def quotient_coords(sub: np.ndarray, n: int, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates on F_p^n / span(sub).

    Returns (proj, lift): proj maps F_p^n onto F_p^q killing sub, lift is a
    section sending the standard basis of F_p^q to complement vectors.
    """
    lift = complement_basis(sub, n, p)
    if sub.size and sub.shape[1]:
        full = np.hstack([column_basis(sub, p), lift])
    else:
        full = lift
    inv = solve(full, identity(n), p)
    q = lift.shape[1]
    proj = inv[full.shape[1] - q:]
    return np.ascontiguousarray(proj), lift


def intersect(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    """Column basis of span(a) ∩ span(b)."""
    n = a.shape[0]
    if a.shape[1] == 0 or b.shape[1] == 0:
        return zeros(n, 0)
    k = kernel_basis(np.hstack([a, -b % p]), p)
    return column_basis(matmul(a, k[: a.shape[1]], p), p)


@numba.njit(cache=True)
def _echelon_reduce_packed(rows, pivrow, vecs, count, insert):
    """Clear every pivot bit of each packed vector; optionally keep the survivors as rows."""
    W = vecs.shape[1]
    for i in range(vecs.shape[0]):
        for w in range(W):
            done = np.uint64(0)
            while True:
                x = vecs[i, w] & ~done
                if x == 0:
                    break
                low = x & (~x + np.uint64(1))
                t = 0
                while (low >> np.uint64(t)) != np.uint64(1):
                    t += 1
                r = pivrow[w * 64 + t]
                if r >= 0:
                    for j in range(w, W):
                        vecs[i, j] ^= rows[r, j]
                done |= low
        if insert:
            for w in range(W):
                x = vecs[i, w]
                if x != 0:
                    low = x & (~x + np.uint64(1))
                    t = 0
                    while (low >> np.uint64(t)) != np.uint64(1):
                        t += 1
                    rows[count, :] = vecs[i, :]
                    pivrow[w * 64 + t] = count
                    count += 1
                    break
    return count


@numba.njit(cache=True)
def _echelon_reduce_dense(rows, pivrow, vecs, count, insert, p, inv):
    n = vecs.shape[1]
    for i in range(vecs.shape[0]):
        first = -1
        for b in range(n):
            c = vecs[i, b] % p
            vecs[i, b] = c
            if c == 0:
                continue
            r = pivrow[b]
            if r >= 0:
                for j in range(b, n):
                    vecs[i, j] = (vecs[i, j] - c * rows[r, j]) % p
            elif first < 0:
                first = b
        if insert and first >= 0:
            s = inv[vecs[i, first]]
            for j in range(first, n):
                rows[count, j] = (vecs[i, j] * s) % p
            pivrow[first] = count
            count += 1
    return count


class Echelon:
    """A growing subspace of F_p^n with a pivot map; rows are bit-packed when p = 2.

    Every stored row has its pivot as lowest nonzero entry and vanishes on the
    pivots known when it was inserted, so a single low-to-high sweep reduces
    any vector, and the result is zero exactly when the vector lies in the span.
    """

    def __init__(self, n: int, p: int):
        self.n, self.p = n, p
        self.width = (n + 63) // 64 if p == 2 else n
        self._rows = np.zeros((16, self.width), dtype=np.uint64 if p == 2 else DTYPE)
        self._pivrow = np.full(max(self.width * 64 if p == 2 else n, 1), -1, dtype=np.int64)
        self._count = 0
        self._inv = np.array([0] + [pow(x, p - 2, p) for x in range(1, p)], dtype=DTYPE)

    @property
    def rank(self) -> int:
        return self._count

    def internal(self, vecs: np.ndarray) -> np.ndarray:
        """Copy of the columns of vecs in the internal row layout."""
        v = np.mod(np.asarray(vecs, dtype=DTYPE).T, self.p)
        if self.p == 2:
            return _pack(v.astype(np.uint8))
        return np.ascontiguousarray(v)

    def reduce(self, arr: np.ndarray, insert: bool = False) -> int:
        """Reduce internal rows in place; returns how many were inserted."""
        if arr.shape[0] == 0:
            return 0
        if insert and self._count + arr.shape[0] > self._rows.shape[0]:
            cap = max(2 * self._rows.shape[0], self._count + arr.shape[0])
            grown = np.zeros((cap, self.width), dtype=self._rows.dtype)
            grown[: self._count] = self._rows[: self._count]
            self._rows = grown
        before = self._count
        if self.p == 2:
            self._count = _echelon_reduce_packed(self._rows, self._pivrow, arr, self._count, insert)
        else:
            self._count = _echelon_reduce_dense(self._rows, self._pivrow, arr, self._count, insert, self.p, self._inv)
        return self._count - before

    def add(self, vecs: np.ndarray) -> int:
        """Adjoin the columns of vecs; returns the rank increase."""
        if vecs.shape[1] == 0 or self._count == self.n:
            return 0
        return self.reduce(self.internal(vecs), insert=True)

    def residual(self, vecs: np.ndarray) -> np.ndarray:
        arr = self.internal(vecs)
        self.reduce(arr)
        return self.external(arr)

    def external(self, arr: np.ndarray) -> np.ndarray:
        if self.p == 2:
            return np.ascontiguousarray(_unpack(arr, self.n).T)
        return np.ascontiguousarray(arr.T)

    @staticmethod
    def nonzero_rows(arr: np.ndarray) -> np.ndarray:
        return np.flatnonzero(arr.any(axis=1))

    def contains(self, v: np.ndarray) -> bool:
        return not self.residual(np.asarray(v).reshape(self.n, -1)).any()

    def basis(self) -> np.ndarray:
        return self.external(self._rows[: self._count].copy())


@dataclass(frozen=True)
class FpMatrix:
    """A matrix over F_p; entries are reduced on construction."""

    p: int
    data: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "data", as_fp(self.data, self.p))

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def rank(self) -> int:
        return rank(self.data, self.p)

    def kernel(self) -> "FpMatrix":
        return FpMatrix(self.p, kernel_basis(self.data, self.p))

    def __matmul__(self, other: "FpMatrix") -> "FpMatrix":
        return FpMatrix(self.p, matmul(self.data, other.data, self.p))


@dataclass(frozen=True)
class FpSpace:
    p: int
    labels: tuple

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise ValueError("basis labels must be distinct")

    @property
    def dim(self) -> int:
        return len(self.labels)


class ComplexError(ValueError):
    pass


@dataclass
class ChainComplex:
    """Homologically graded complex C_0 <- C_1 <- ... over F_p.

    ``diffs[i]`` is the matrix of d_i : C_i -> C_{i-1} for i >= 1, with shape
    (dims[i-1], dims[i]); diffs[0] is ignored (the zero map to 0).
    """

    p: int
    dims: list[int]
    diffs: list[np.ndarray] = field(default_factory=list)
    labels: list[Sequence] | None = None

    def __post_init__(self):
        if not self.diffs:
            self.diffs = [zeros(0, self.dims[0] if self.dims else 0)]
        for i in range(1, len(self.dims)):
            d = self.diffs[i]
            if d.shape != (self.dims[i - 1], self.dims[i]):
                raise ComplexError(f"differential d_{i} has shape {d.shape}")

    def d(self, i: int) -> np.ndarray:
        if i <= 0 or i >= len(self.dims):
            src = self.dims[i] if 0 <= i < len(self.dims) else 0
            tgt = self.dims[i - 1] if 0 <= i - 1 < len(self.dims) else 0
            return zeros(tgt, src)
        return self.diffs[i]

    def check(self) -> None:
        for i in range(2, len(self.dims)):
            comp = matmul(self.d(i - 1), self.d(i), self.p)
            if comp.any():
                raise ComplexError(f"d_{i-1} d_{i} is nonzero")

    def homology_dims(self) -> list[int]:
        return homology_dims(self)

    def euler_characteristic(self) -> int:
        return sum((-1) ** i * n for i, n in enumerate(self.dims))


def homology_dims(c: ChainComplex) -> list[int]:
    """dim H_i = dim ker d_i - rank d_{i+1}; rejects d∘d ≠ 0."""
    c.check()
    ranks = [0] + [rank(c.d(i), c.p) for i in range(1, len(c.dims))] + [0]
    return [c.dims[i] - ranks[i] - ranks[i + 1] for i in range(len(c.dims))]


__all__ = [
    "ChainComplex",
    "ComplexError",
    "FpMatrix",
    "FpSpace",
    "as_fp",
    "column_basis",
    "complement_basis",
    "homology_dims",
    "identity",
    "in_span",
    "intersect",
    "kernel_basis",
    "matmul",
    "quotient_coords",
    "rank",
    "rref",
    "same_span",
    "solve",
    "zeros",
]
