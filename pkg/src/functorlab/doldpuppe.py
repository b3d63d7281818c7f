"""Stabilization complexes from the cross-effect comonad.

With T(F)(a) = cr_{n+1}(F)(a, ..., a), the term T^i(F)(a) sits inside
F(a^{(n+1)^i}).  Copies of a in that sum are indexed by words of length i
over {0..n}; T^i(F)(a) is the image of the product, over letter positions,
of the cross-effect idempotents that kill every copy carrying a given letter
at that position.  Face j folds letter j away, and the differential is the
alternating sum of faces, so H_0 is the largest degree-n quotient.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .category import GuardError, Obj, Skeleton
from .functors import Dual, Functor
from .polynomial import p_kernel, q_image


def max_level(skel: Skeleton, n: int, a: Obj) -> int:
    """Largest i with a^{(n+1)^i} inside the skeleton (large for the zero object)."""
    size = skel.size(a)
    if size == 0:
        return 1 << 30
    i = 0
    while (n + 1) ** (i + 1) * size <= skel.K:
        i += 1
    return i


def check_guard(skel: Skeleton, n: int, i_max: int, a: Obj) -> None:
    if (n + 1) ** i_max * skel.size(a) > skel.K:
        raise GuardError(
            f"(n+1)^i_max * size = {(n + 1) ** i_max * skel.size(a)} exceeds K={skel.K} at {skel.name(a)}"
        )


def _words(n: int, i: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(n + 1), repeat=i))


class _Level:
    """F on a^{(n+1)^i}, with the copies of a indexed by words of length i."""

    def __init__(self, F: Functor, n: int, a: Obj, i: int):
        skel = F.skel
        self.F, self.n, self.a, self.i = F, n, a, i
        self.words = _words(n, i)
        self.index = {w: k for k, w in enumerate(self.words)}
        self.objs = [a] * len(self.words)
        self.total = skel.sum_objects(self.objs)

    def collapse(self, pos: int, letter: int):
        skel = self.F.skel
        maps = [skel.zero_map(self.a, self.a) if w[pos] == letter else skel.identity(self.a) for w in self.words]
        return skel.direct_sum_map(maps)

    def idempotent(self) -> np.ndarray:
        F, p = self.F, self.F.p
        m = F.dim(self.total)
        e = linalg.identity(m)
        for pos in range(self.i):
            for letter in range(self.n + 1):
                c = F.act(self.collapse(pos, letter))
                e = linalg.matmul(e, (linalg.identity(m) - c) % p, p)
        return e

    def fold(self, pos: int, lower: "_Level"):
        """a^{(n+1)^i} -> a^{(n+1)^{i-1}} summing copies that differ only at letter pos."""
        skel = self.F.skel
        maps = []
        for w in self.words:
            short = w[:pos] + w[pos + 1:]
            maps.append(skel.injection(lower.objs, lower.index[short]))
        return skel.tuple_map(maps, lower.total)


@dataclass
class DComplex:
    F: Functor
    n: int
    a: Obj
    i_max: int
    bases: list[np.ndarray]  # term_i as columns inside F(a^{(n+1)^i})
    idempotents: list[np.ndarray]
    faces: list[list[np.ndarray]]  # faces[i][j]: term_i -> term_{i-1} in term coordinates
    complex: linalg.ChainComplex = field(repr=False)

    @property
    def dims(self) -> list[int]:
        return self.complex.dims

    def homology(self) -> list[int]:
        """H_i for i < i_max; the top term has no incoming differential here."""
        return self.complex.homology_dims()[: self.i_max]

    def simplicial_identities(self) -> bool:
        p = self.F.p
        for i in range(2, self.i_max + 1):
            for b in range(i):
                for a in range(b):
                    lhs = linalg.matmul(self.faces[i - 1][a], self.faces[i][b], p)
                    rhs = linalg.matmul(self.faces[i - 1][b - 1], self.faces[i][a], p)
                    if not np.array_equal(lhs, rhs):
                        return False
        return True

    def split(self) -> bool:
        """Each term is a natural summand: the idempotent retracts onto it."""
        p = self.F.p
        for e, b in zip(self.idempotents, self.bases):
            if not np.array_equal(linalg.matmul(e, e, p), e):
                return False
            if not np.array_equal(linalg.matmul(e, b, p), b % p):
                return False
            if linalg.rank(e, p) != b.shape[1]:
                return False
        return True


def build_dcomplex(F: Functor, n: int, i_max: int, a: Obj) -> DComplex:
    """Terms T^i(F)(a) for i <= i_max with faces and the alternating-sum differential."""
    skel, p = F.skel, F.p
    if n < 0 or i_max < 0:
        raise ValueError("n and i_max must be nonnegative")
    check_guard(skel, n, i_max, a)
    levels = [_Level(F, n, a, i) for i in range(i_max + 1)]
    idems, bases, coords = [], [], []
    for lv in levels:
        e = lv.idempotent()
        b = linalg.column_basis(e, p)
        idems.append(e)
        bases.append(b)
        coords.append(_left_inverse(b, p))
    faces: list[list[np.ndarray]] = [[]]
    diffs = [linalg.zeros(0, bases[0].shape[1])]
    for i in range(1, i_max + 1):
        row = []
        total = linalg.zeros(bases[i - 1].shape[1], bases[i].shape[1])
        for j in range(i):
            img = linalg.matmul(F.act(levels[i].fold(j, levels[i - 1])), bases[i], p)
            face = linalg.matmul(coords[i - 1], img, p)
            row.append(face)
            total = (total + (-1) ** j * face) % p
        faces.append(row)
        diffs.append(total)
    cx = linalg.ChainComplex(p, [b.shape[1] for b in bases], diffs)
    return DComplex(F, n, a, i_max, bases, idems, faces, cx)


def _left_inverse(b: np.ndarray, p: int) -> np.ndarray:
    if b.shape[1] == 0:
        return linalg.zeros(0, b.shape[0])
    x = linalg.solve(np.ascontiguousarray(b.T), linalg.identity(b.shape[1]), p)
    return np.ascontiguousarray(x.T)


def h0_subspace(dc: DComplex) -> np.ndarray:
    """The image of d_1 inside F(a); H_0 is F(a) modulo it."""
    if dc.i_max < 1:
        raise GuardError("H_0 needs the first term of the complex")
    return linalg.column_basis(linalg.matmul(dc.bases[0], dc.complex.d(1), dc.F.p), dc.F.p)


@dataclass
class DualDComplex:
    F: Functor
    n: int
    a: Obj
    primal: DComplex

    @property
    def dims(self) -> list[int]:
        return self.primal.dims

    def codifferential(self, i: int) -> np.ndarray:
        """δ^i: C^i -> C^{i+1}, the transpose of d_{i+1}."""
        return np.ascontiguousarray(self.primal.complex.d(i + 1).T)

    def cohomology(self) -> list[int]:
        """H^i for i < i_max."""
        return self.primal.homology()

    def h0_subspace(self) -> np.ndarray:
        """H^0 as a subspace of F(a) = (D F(a))^*, the annihilator of the image of d_1."""
        img = h0_subspace(self.primal)
        return linalg.kernel_basis(np.ascontiguousarray(img.T), self.F.p)


def dual_dcomplex(F: Functor, n: int, i_max: int, a: Obj) -> DualDComplex:
    """Vector-space dual of the complex built on the dual functor; H^0 is p_n(F)(a)."""
    if not F.skel.self_dual:
        raise GuardError("the dual complex needs finite generators")
    return DualDComplex(F, n, a, build_dcomplex(Dual(F), n, i_max, a))


def dold_report(F: Functor, n: int, i_max: int = 2) -> dict:
    """Term and homology dims at every object, with the level actually reachable under the guard."""
    skel, p = F.skel, F.p
    rows = {}
    for a in skel.objects:
        if not any(a):
            continue
        level = min(i_max, max_level(skel, n, a))
        entry = {"i_max": level, "guard_limited": level < i_max}
        if level >= 1:
            dc = build_dcomplex(F, n, level, a)
            du = dual_dcomplex(F, n, level, a)
            entry.update(
                dims=dc.dims,
                homology=dc.homology(),
                h0_is_q=linalg.same_span(h0_subspace(dc), q_image(F, n, a), p),
                dual_dims=du.dims,
                cohomology=du.cohomology(),
                h0_dual_is_p=linalg.same_span(du.h0_subspace(), p_kernel(F, n, a), p),
                simplicial=dc.simplicial_identities() and du.primal.simplicial_identities(),
                split=dc.split(),
            )
        rows[skel.name(a)] = entry
    return {"F": F.label, "n": n, "i_max": i_max, "skeleton": skel.spec.to_json(), "objects": rows}


__all__ = [
    "DComplex",
    "DualDComplex",
    "build_dcomplex",
    "check_guard",
    "dold_report",
    "dual_dcomplex",
    "h0_subspace",
    "max_level",
]
