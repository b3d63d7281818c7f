"""Cross-effects, polynomial degree and the truncations q_d (quotient) and p_d (subfunctor).

Degree is operational: F has degree <= d when cr_{d+1}(F) vanishes on every
tuple of nonzero objects whose direct sum fits in the skeleton.  When no
such tuple exists the question cannot be asked and a GuardError is raised
instead of silently answering.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import linalg
from .category import GuardError, Obj, Skeleton
from .functors import Functor, NatTransform, QuotientFunctor, SubFunctor


def cross_effect_idempotent(F: Functor, objs) -> tuple[Obj, np.ndarray]:
    """The product of (1 - F(collapse_i)) on F(a_1 ⊕ ... ⊕ a_n)."""
    skel = F.skel
    total = skel.sum_objects(list(objs))
    n = F.dim(total)
    e = linalg.identity(n)
    for s in range(len(objs)):
        c = F.act(skel.collapse(list(objs), s))
        e = linalg.matmul(e, (linalg.identity(n) - c) % F.p, F.p)
    return total, e


def cross_effect(F: Functor, objs) -> np.ndarray:
    """Column basis of cr_n(F)(a_1, ..., a_n) inside F(a_1 ⊕ ... ⊕ a_n)."""
    _, e = cross_effect_idempotent(F, objs)
    return linalg.column_basis(e, F.p)


def cross_effect_dim(F: Functor, objs) -> int:
    _, e = cross_effect_idempotent(F, objs)
    return linalg.rank(e, F.p)


def admissible_tuples(skel: Skeleton, n: int) -> list[tuple[Obj, ...]]:
    """Multisets of n nonzero objects whose sum lies in the skeleton."""
    nonzero = [a for a in skel.objects if any(a)]
    return [t for t in itertools.combinations_with_replacement(nonzero, n) if skel.fits(list(t))]


def check_degree_guard(skel: Skeleton, d: int) -> None:
    if d >= 0 and not admissible_tuples(skel, d + 1):
        raise GuardError(
            f"no tuple of {d + 1} nonzero objects fits in the skeleton (K={skel.K}); "
            f"degree {d} cannot be tested"
        )


@dataclass
class DegreeReport:
    degree: int | None
    exceeds: bool
    guard_exceeded: bool
    witnesses: dict

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "exceeds_dmax": self.exceeds,
            "guard_exceeded": self.guard_exceeded,
            "nonvanishing": {str(k): v for k, v in self.witnesses.items()},
        }


def vanishes_in_degree(F: Functor, d: int) -> tuple[bool, dict]:
    """Whether cr_{d+1}(F) is zero on all admissible tuples (with nonzero dims)."""
    check_degree_guard(F.skel, d)
    bad = {}
    for t in admissible_tuples(F.skel, d + 1):
        k = cross_effect_dim(F, t)
        if k:
            bad[tuple(F.skel.name(a) for a in t)] = k
            break
    return not bad, bad


def poly_degree(F: Functor, d_max: int) -> DegreeReport:
    """Least d <= d_max with cr_{d+1}(F) = 0 on all admissible tuples."""
    last = {}
    for d in range(d_max + 1):
        if not admissible_tuples(F.skel, d + 1):
            return DegreeReport(None, False, True, last)
        ok, bad = vanishes_in_degree(F, d)
        if ok:
            return DegreeReport(d, False, False, {})
        last = bad
    return DegreeReport(None, True, False, last)


def _span_accumulate(vectors_iter, n: int, p: int, batch: int = 512) -> np.ndarray:
    basis = linalg.zeros(n, 0)
    buf = []
    size = 0
    for v in vectors_iter:
        if v.shape[1] == 0:
            continue
        buf.append(v)
        size += v.shape[1]
        if size >= batch:
            basis = linalg.column_basis(np.hstack([basis] + buf), p)
            buf, size = [], 0
            if basis.shape[1] == n:
                return basis
    if buf:
        basis = linalg.column_basis(np.hstack([basis] + buf), p)
    return basis


def _tuple_symmetries(skel: Skeleton, t) -> list:
    """Automorphisms of ⊕t that preserve cr(t): summand automorphisms and swaps of equal summands."""
    t = list(t)
    out = []
    for i, b in enumerate(t):
        for g in skel.automorphisms(b):
            maps = [skel.identity(c) for c in t]
            maps[i] = g
            out.append(skel.direct_sum_map(maps))
    for i in range(len(t) - 1):
        if t[i] == t[i + 1]:
            order = list(range(len(t)))
            order[i], order[i + 1] = order[i + 1], order[i]
            out.append(skel.permute_summands(t, order))
    return out


def _orbit_reps(H, mats, caps) -> list:
    """One coordinate row per orbit of the group generated by the integer maps ``mats``."""
    coords = H.coords()
    n = len(coords)
    parent = np.arange(n)

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for m in mats:
        img = H.index(coords @ m.T)
        for i, j in enumerate(img):
            ri, rj = find(i), find(int(j))
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)
    return [coords[i] for i in range(n) if find(i) == i]


def q_image(F: Functor, d: int, a: Obj) -> np.ndarray:
    """Span in F(a) of the images of cr_{d+1}(F)(b_1..b_{d+1}) under all maps ⊕b_i -> a.

    When a^{d+1} fits, the fold map alone suffices: every such map factors as
    a sum of maps b_i -> a followed by the fold, and cross-effects are natural
    for sums of maps.  Otherwise maps are taken up to the symmetries of the
    tuple, which preserve the cross-effect.
    """
    skel = F.skel
    if d < 0:
        return linalg.identity(F.dim(a))
    n = F.dim(a)
    if any(a) and skel.fits([a] * (d + 1)):
        diag = [a] * (d + 1)
        c = cross_effect(F, diag)
        return linalg.column_basis(F.apply(skel.fold(a, d + 1), c), F.p)

    def gen():
        for t in admissible_tuples(skel, d + 1):
            c = cross_effect(F, t)
            if c.shape[1] == 0:
                continue
            total = skel.sum_objects(list(t))
            H = skel.hom(total, a)
            mats = [skel.pre_matrix(g, a) for g in _tuple_symmetries(skel, t)]
            for row in _orbit_reps(H, mats, H.caps):
                yield F.apply(H.morphism(row), c)

    return _span_accumulate(gen(), n, F.p, batch=max(512, 4 * n))


def p_kernel(F: Functor, d: int, a: Obj) -> np.ndarray:
    """{x in F(a) : e_t F(f) x = 0 for all admissible t and f: a -> ⊕t}.

    As for q_image, the diagonal a -> a^{d+1} suffices when a^{d+1} fits.
    """
    skel, p = F.skel, F.p
    if d >= 0 and any(a) and skel.fits([a] * (d + 1)):
        diag = [a] * (d + 1)
        _, e = cross_effect_idempotent(F, diag)
        m = linalg.matmul(e, F.act(skel.diagonal(a, d + 1)), p)
        return linalg.kernel_basis(m, p)
    basis = linalg.identity(F.dim(a))
    for t in admissible_tuples(skel, d + 1):
        total, e = cross_effect_idempotent(F, t)
        if not e.any():
            continue
        H = skel.hom(a, total)
        mats = [skel.post_matrix(a, g) for g in _tuple_symmetries(skel, t)]
        rows = []
        count = 0
        for row in _orbit_reps(H, mats, H.caps):
            rows.append(linalg.matmul(e, F.act(H.morphism(row)), p))
            count += rows[-1].shape[0]
            if count >= 4 * max(basis.shape[1], 1) + 64:
                m = linalg.matmul(np.vstack(rows), basis, p)
                basis = linalg.matmul(basis, linalg.kernel_basis(m, p), p)
                rows, count = [], 0
                if basis.shape[1] == 0:
                    return basis
        if rows:
            m = linalg.matmul(np.vstack(rows), basis, p)
            basis = linalg.matmul(basis, linalg.kernel_basis(m, p), p)
        if basis.shape[1] == 0:
            return basis
    return linalg.column_basis(basis, p)


@dataclass
class PolyTruncation:
    F: Functor
    d: int
    functor: Functor
    map: NatTransform


def q_trunc(F: Functor, d: int) -> PolyTruncation:
    """q_d(F): the largest quotient of operational degree <= d, with F ->> q_d(F)."""
    check_degree_guard(F.skel, d)
    Q = QuotientFunctor(F, lambda a: q_image(F, d, a), f"q_{d}({F.label})")
    proj = NatTransform(F, Q, lambda a: Q.projection(a))
    return PolyTruncation(F, d, Q, proj)


def p_trunc(F: Functor, d: int) -> PolyTruncation:
    """p_d(F): the largest subfunctor of operational degree <= d, with p_d(F) -> F."""
    check_degree_guard(F.skel, d)
    P = SubFunctor(F, lambda a: p_kernel(F, d, a), f"p_{d}({F.label})")
    inc = NatTransform(P, F, lambda a: P.basis(a))
    return PolyTruncation(F, d, P, inc)


def q_tower_map(F: Functor, d: int) -> tuple[PolyTruncation, PolyTruncation, NatTransform]:
    """The surjection q_d(F) ->> q_{d-1}(F) induced by the identity of F."""
    hi, lo = q_trunc(F, d), q_trunc(F, d - 1)
    Qh, Ql = hi.functor, lo.functor

    def comp(a):
        return linalg.matmul(Ql.projection(a), Qh.lift(a), F.p)

    return hi, lo, NatTransform(Qh, Ql, comp)


def graded_piece_dims(F: Functor, d: int) -> dict:
    """dim ker(q_d F -> q_{d-1} F) at every object."""
    hi, lo, t = q_tower_map(F, d)
    return {a: hi.functor.dim(a) - linalg.rank(t.at(a), F.p) for a in F.skel.objects}


__all__ = [
    "DegreeReport",
    "PolyTruncation",
    "admissible_tuples",
    "check_degree_guard",
    "cross_effect",
    "cross_effect_dim",
    "cross_effect_idempotent",
    "graded_piece_dims",
    "p_kernel",
    "p_trunc",
    "poly_degree",
    "q_image",
    "q_trunc",
    "q_tower_map",
    "vanishes_in_degree",
]
