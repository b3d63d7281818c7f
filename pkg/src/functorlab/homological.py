"""Projective resolutions, Ext groups, comparison maps and derived truncations.

A resolution term is a direct sum of Yoneda projectives P_b = F_p[A(b,-)]
(full mode) or of their degree-d quotients q_d(P_b) (poly mode).  A map out
of such a term is fixed by the images of its generators, and by Yoneda
Hom(term, G) = ⊕ G(b_k), so the cochain complexes stay small even when the
terms themselves are large.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .category import GuardError, Obj, Skeleton
from .functors import (
    AdditiveTensor,
    Functor,
    HomLinearization,
    NatTransform,
    frobenius_norm_verschiebung,
    is_exact_at,
)
from .polynomial import p_trunc, q_trunc, vanishes_in_degree

_PROJECTIVES: "weakref.WeakKeyDictionary[Skeleton, dict]" = weakref.WeakKeyDictionary()


def projective(skel: Skeleton, b: Obj, d: int | None = None) -> Functor:
    """P_b, or q_d(P_b) when d is given; cached per skeleton."""
    cache = _PROJECTIVES.setdefault(skel, {})
    key = (b, d)
    if key not in cache:
        if d is None:
            cache[key] = HomLinearization(skel, b)
        else:
            cache[key] = q_trunc(projective(skel, b), d).functor
    return cache[key]


class ProjectiveTerm(Functor):
    """⊕_k P_{b_k} (or ⊕_k q_d(P_{b_k})), one summand per generator."""

    def __init__(self, skel: Skeleton, gens: list[Obj], d: int | None = None):
        super().__init__(skel)
        self.gens = list(gens)
        self.d = d
        self.parts = [projective(skel, b, d) for b in self.gens]
        names = ",".join(skel.name(b) for b in self.gens)
        self.label = f"P[{names}]" if d is None else f"Q{d}[{names}]"

    def offsets(self, c: Obj) -> list[int]:
        out, pos = [], 0
        for q in self.parts:
            out.append(pos)
            pos += q.dim(c)
        return out + [pos]

    def _dim(self, c):
        return sum(q.dim(c) for q in self.parts)

    def _act(self, f):
        out = linalg.zeros(self.dim(f.tgt), self.dim(f.src))
        r, c = self.offsets(f.tgt), self.offsets(f.src)
        for k, q in enumerate(self.parts):
            out[r[k]:r[k + 1], c[k]:c[k + 1]] = q.act(f)
        return out

    def apply(self, f, x):
        c = self.offsets(f.src)
        if not self.parts:
            return linalg.zeros(0, x.shape[1])
        return np.vstack([q.apply(f, x[c[k]:c[k + 1]]) for k, q in enumerate(self.parts)])

    def free_coords(self, k: int, c: Obj, y: np.ndarray) -> np.ndarray:
        """Block k of y (a vector in term(c)) written in the morphism basis of P_{b_k}(c)."""
        off = self.offsets(c)
        block = y[off[k]:off[k + 1]]
        if self.d is None:
            return block % self.p
        return linalg.matmul(self.parts[k].lift(c), block.reshape(-1, 1), self.p).ravel()

    def free_to_term(self, k: int, c: Obj) -> np.ndarray | None:
        """Projection from P_{b_k}(c) onto summand k of term(c) (None in full mode)."""
        return None if self.d is None else self.parts[k].projection(c)


def pushforward(term: ProjectiveTerm, M: Functor, images: list[np.ndarray], c: Obj) -> np.ndarray:
    """Matrix at c of the map term -> M sending generator k to images[k] ∈ M(b_k)."""
    skel, p = term.skel, term.p
    off = term.offsets(c)
    out = linalg.zeros(M.dim(c), off[-1])
    by_source: dict = {}
    for k, b in enumerate(term.gens):
        by_source.setdefault(b, []).append(k)
    for b, ks in by_source.items():
        X = np.stack([np.asarray(images[k]).ravel() for k in ks], axis=1) if ks else None
        H = skel.hom(b, c)
        cols = np.stack([M.apply(h, X) for h in H], axis=1) if H.size else None  # (dimM, |H|, len(ks))
        for j, k in enumerate(ks):
            block = cols[:, :, j] if cols is not None else linalg.zeros(M.dim(c), 0)
            lift = None if term.d is None else term.parts[k].lift(c)
            if lift is not None:
                block = linalg.matmul(block, lift, p)
            out[:, off[k]:off[k + 1]] = block
    return out


def cochain_block(term: ProjectiveTerm, c: Obj, y: np.ndarray, G: Functor) -> np.ndarray:
    """The map ⊕ G(b_k) = Hom(term, G) -> G(c), φ ↦ φ(y) for y ∈ term(c)."""
    skel, p = term.skel, term.p
    blocks = []
    for k, b in enumerate(term.gens):
        coeffs = term.free_coords(k, c, y)
        acc = linalg.zeros(G.dim(c), G.dim(b))
        H = skel.hom(b, c)
        for idx in np.flatnonzero(coeffs):
            acc = (acc + int(coeffs[idx]) * G.act(H[idx])) % p
        blocks.append(acc)
    return np.hstack(blocks) if blocks else linalg.zeros(G.dim(c), 0)


def _closure_maps(skel: Skeleton, c: Obj, limit: int = 256) -> list:
    H = skel.hom(c, c)
    if H.size <= limit:
        return list(H)
    rng = np.random.default_rng(0)
    rows = rng.integers(0, np.array(H.caps), size=(limit, H.ngens))
    return [skel.identity(c)] + [H.morphism(r) for r in rows]


def choose_generators(T: Functor, sub=None) -> list[tuple[Obj, np.ndarray]]:
    """Generators (b, v ∈ T(b)) of the subfunctor with values sub(c) (all of T when None).

    Objects are visited by size; at each one, vectors outside the span of
    the images of earlier generators are added one at a time, each followed
    by its orbit under endomorphisms of the object.
    """
    skel, p = T.skel, T.p
    gens: list[tuple[Obj, np.ndarray]] = []
    for c in skel.objects:
        S = sub(c) if sub is not None else linalg.identity(T.dim(c))
        if S.shape[1] == 0:
            continue
        target = linalg.rank(S, p)
        span = linalg.Echelon(T.dim(c), p)
        by_source: dict = {}
        for b, v in gens:
            by_source.setdefault(b, []).append(v)
        batch: list = []
        width = 0
        for b, vs in by_source.items():
            X = np.stack(vs, axis=1)
            for h in skel.hom(b, c):
                batch.append(T.apply(h, X))
                width += X.shape[1]
                if width >= 4096:
                    span.add(np.hstack(batch))
                    batch, width = [], 0
                    if span.rank == target:
                        break
            if span.rank == target:
                break
        if batch and span.rank < target:
            span.add(np.hstack(batch))
        res = span.internal(S)
        while span.rank < target:
            span.reduce(res)
            j = int(span.nonzero_rows(res)[0])
            v = S[:, j].reshape(-1, 1).copy()
            gens.append((c, v.ravel()))
            span.add(np.hstack([T.apply(g, v) for g in _closure_maps(skel, c)]))
    return gens


@dataclass
class Stage:
    term: ProjectiveTerm
    images: list[np.ndarray]  # generator images in F(b) (stage 0) or in the previous term


class Resolution:
    """P_n -> ... -> P_0 -> F, exact at every skeleton object."""

    def __init__(self, F: Functor, length: int = 3, d: int | None = None):
        if length <= 0:
            raise ValueError("resolution length must be positive")
        if d is not None:
            ok, bad = vanishes_in_degree(F, d)
            if not ok:
                raise GuardError(f"{F.label} is not of degree <= {d}: cross-effect at {bad}")
        self.F, self.d, self.skel, self.p = F, d, F.skel, F.p
        self.stages: list[Stage] = []
        self._boundaries: dict = {}
        module, sub = F, None
        for i in range(length + 1):
            gens = choose_generators(module, sub)
            term = ProjectiveTerm(self.skel, [b for b, _ in gens], d)
            self.stages.append(Stage(term, [v for _, v in gens]))
            if i < length:
                module = term
                sub = self._kernel_fn(i)

    def _kernel_fn(self, i):
        return lambda c: linalg.kernel_basis(self.boundary(i, c), self.p)

    @property
    def mode(self) -> str:
        return "full" if self.d is None else f"poly({self.d})"

    @property
    def length(self) -> int:
        return len(self.stages) - 1

    def codomain(self, i: int) -> Functor:
        return self.F if i == 0 else self.stages[i - 1].term

    def boundary(self, i: int, c: Obj) -> np.ndarray:
        """term_i(c) -> term_{i-1}(c), or the augmentation onto F(c) for i = 0."""
        key = (i, c)
        if key not in self._boundaries:
            st = self.stages[i]
            self._boundaries[key] = pushforward(st.term, self.codomain(i), st.images, c)
        return self._boundaries[key]

    def term_dims(self) -> list[dict]:
        return [{self.skel.name(c): st.term.dim(c) for c in self.skel.objects} for st in self.stages]

    def check(self) -> bool:
        """Surjective augmentation and exactness at each interior term, by rank accounting."""
        p = self.p
        for c in self.skel.objects:
            if linalg.rank(self.boundary(0, c), p) != self.F.dim(c):
                return False
            for i in range(1, self.length + 1):
                d_prev = self.boundary(i - 1, c)
                kernel = d_prev.shape[1] - linalg.rank(d_prev, p)
                if linalg.rank(self.boundary(i, c), p) != kernel:
                    return False
                if linalg.matmul(d_prev, self.boundary(i, c), p).any():
                    return False
        return True

    def coboundary(self, i: int, G: Functor) -> np.ndarray:
        """δ^i: Hom(term_i, G) -> Hom(term_{i+1}, G)."""
        src, nxt = self.stages[i].term, self.stages[i + 1]
        rows = [cochain_block(src, b, y, G) for b, y in zip(nxt.term.gens, nxt.images)]
        ncols = sum(G.dim(b) for b in src.gens)
        return np.vstack(rows) if rows else linalg.zeros(0, ncols)

    def cochain_dim(self, i: int, G: Functor) -> int:
        return sum(G.dim(b) for b in self.stages[i].term.gens)


def _cocycles(res: Resolution, G: Functor, i: int) -> tuple[np.ndarray, np.ndarray]:
    """Bases of cocycles Z^i and coboundaries B^i in Hom(term_i, G)."""
    p = res.p
    n = res.cochain_dim(i, G)
    Z = linalg.kernel_basis(res.coboundary(i, G), p) if i < res.length else linalg.identity(n)
    B = linalg.column_basis(res.coboundary(i - 1, G), p) if i > 0 else linalg.zeros(n, 0)
    return Z, B


@dataclass
class ExtTable:
    F: str
    G: str
    mode: str
    dims: list[int]
    skeleton: dict
    cocycles: list = field(default_factory=list, repr=False)

    def to_json(self) -> dict:
        return {
            "F": self.F,
            "G": self.G,
            "mode": self.mode,
            "dims": {str(i): d for i, d in enumerate(self.dims)},
            "skeleton": self.skeleton,
            "truncated": True,
        }


def ext(F: Functor, G: Functor, i_max: int = 3, d: int | None = None, res: Resolution | None = None) -> ExtTable:
    """Ext^i(F, G) for i <= i_max in the truncated category (poly(d) when d is given)."""
    if res is None:
        res = Resolution(F, i_max + 1, d)
    if res.length < i_max + 1:
        raise ValueError("resolution too short for i_max")
    dims, reps = [], []
    for i in range(i_max + 1):
        Z, B = _cocycles(res, G, i)
        dims.append(Z.shape[1] - B.shape[1])
        reps.append(_complement(B, Z, res.p))
    return ExtTable(F.label, G.label, res.mode, dims, res.skel.spec.to_json(), reps)


def _complement(B: np.ndarray, Z: np.ndarray, p: int) -> np.ndarray:
    """Columns of Z completing a basis of B to a basis of span(Z)."""
    _, piv = linalg.rref(np.hstack([B, Z]), p)
    keep = [q - B.shape[1] for q in piv if q >= B.shape[1]]
    return Z[:, keep]


def is_coboundary(res: Resolution, G: Functor, i: int, c: np.ndarray) -> bool:
    if i == 0:
        return not np.asarray(c).any()
    return linalg.in_span(res.coboundary(i - 1, G), np.asarray(c).reshape(-1, 1), res.p)


# --- chain maps and comparison --------------------------------------------------------


def lift_chain_map(src: Resolution, tgt: Resolution, upto: int, perturb: bool = False) -> list[list[np.ndarray]]:
    """φ_i: src.term_i -> tgt.term_i over id_F, as generator images.

    With ``perturb`` each lift is shifted by a kernel vector, giving a second
    chain map to test independence of the induced map.
    """
    p = src.p
    maps: list[list[np.ndarray]] = []
    for i in range(upto + 1):
        row = []
        st = src.stages[i]
        for k, b in enumerate(st.term.gens):
            if i == 0:
                rhs = np.asarray(st.images[k]).reshape(-1, 1)
            else:
                phi = pushforward(src.stages[i - 1].term, tgt.stages[i - 1].term, maps[i - 1], b)
                rhs = linalg.matmul(phi, st.images[k].reshape(-1, 1), p)
            D = tgt.boundary(i, b)
            z = linalg.solve(D, rhs, p)
            if z is None:
                raise ArithmeticError(f"cannot lift generator {k} at stage {i}")
            if perturb:
                kern = linalg.kernel_basis(D, p)
                if kern.shape[1]:
                    z = (z + kern.sum(axis=1, keepdims=True)) % p
            row.append(z.ravel())
        maps.append(row)
    return maps


def induced_cochain_map(src: Resolution, tgt: Resolution, maps, i: int, G: Functor) -> np.ndarray:
    """Hom(tgt.term_i, G) -> Hom(src.term_i, G), ψ ↦ ψ∘φ_i."""
    st, tt = src.stages[i], tgt.stages[i]
    rows = [cochain_block(tt.term, b, z, G) for b, z in zip(st.term.gens, maps[i])]
    return np.vstack(rows) if rows else linalg.zeros(0, tgt.cochain_dim(i, G))


@dataclass
class ComparisonMap:
    d: int
    dims_poly: list[int]
    dims_full: list[int]
    ranks: list[int]
    iso: list[bool]
    mono: list[bool]
    lifts_agree: bool | None
    matrices: list = field(default_factory=list, repr=False)

    @property
    def iso_upto(self) -> int:
        n = -1
        for ok in self.iso:
            if not ok:
                break
            n += 1
        return n

    @property
    def mono_at(self) -> list[int]:
        return [i for i, ok in enumerate(self.mono) if ok]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "dims_poly": self.dims_poly,
            "dims_full": self.dims_full,
            "ranks": self.ranks,
            "iso": self.iso,
            "mono": self.mono,
            "iso_upto": self.iso_upto,
            "mono_at": self.mono_at,
            "lifts_agree": self.lifts_agree,
        }


def comparison(
    F: Functor,
    G: Functor,
    d: int,
    i_max: int = 2,
    full: Resolution | None = None,
    poly: Resolution | None = None,
    check_lifts: bool = False,
) -> ComparisonMap:
    """The canonical maps Ext^i_{poly(d)}(F, G) -> Ext^i_full(F, G) for i <= i_max."""
    ok, bad = vanishes_in_degree(G, d)
    if not ok:
        raise GuardError(f"{G.label} is not of degree <= {d}: cross-effect at {bad}")
    full = full or Resolution(F, i_max + 1)
    poly = poly or Resolution(F, i_max + 1, d)
    p = F.p
    maps = lift_chain_map(full, poly, i_max)
    alt = lift_chain_map(full, poly, i_max, perturb=True) if check_lifts else None
    dims_q, dims_f, ranks, iso, mono, mats = [], [], [], [], [], []
    agree = True if check_lifts else None
    for i in range(i_max + 1):
        Zq, Bq = _cocycles(poly, G, i)
        Zf, Bf = _cocycles(full, G, i)
        phi = induced_cochain_map(full, poly, maps, i, G)
        img = linalg.matmul(phi, Zq, p)
        rb = Bf.shape[1]
        r = linalg.rank(np.hstack([img, Bf]), p) - rb
        hq, hf = Zq.shape[1] - Bq.shape[1], Zf.shape[1] - rb
        dims_q.append(hq)
        dims_f.append(hf)
        ranks.append(r)
        mono.append(r == hq)
        iso.append(r == hq == hf)
        mats.append(phi)
        if alt is not None:
            diff = (img - linalg.matmul(induced_cochain_map(full, poly, alt, i, G), Zq, p)) % p
            if linalg.rank(np.hstack([diff, Bf]), p) != rb:
                agree = False
    return ComparisonMap(d, dims_q, dims_f, ranks, iso, mono, agree, mats)


# --- derived truncations ----------------------------------------------------------------


_PD_RES: "weakref.WeakKeyDictionary[Skeleton, dict]" = weakref.WeakKeyDictionary()


def derived_pd(F: Functor, d: int, j_max: int = 1) -> dict:
    """dim R^j p_d(F)(a) = dim Ext^j_full(q_d(P_a), F) for every object a and j <= j_max."""
    skel = F.skel
    cache = _PD_RES.setdefault(skel, {})
    out = {}
    for a in skel.objects:
        key = (a, d, j_max)
        if key not in cache:
            cache[key] = Resolution(projective(skel, a, d), j_max + 1)
        out[a] = ext(projective(skel, a, d), F, j_max, res=cache[key]).dims
    return out


def derived_pd_report(F: Functor, d: int, j_max: int = 1) -> dict:
    R = derived_pd(F, d, j_max)
    P = p_trunc(F, d).functor
    skel = F.skel
    return {
        "R": {skel.name(a): dims for a, dims in R.items()},
        "p_d": {skel.name(a): P.dim(a) for a in skel.objects},
        "R0_matches_p_d": all(R[a][0] == P.dim(a) for a in skel.objects),
    }


# --- the Frobenius / norm / Verschiebung 2-extension -----------------------------------------


def yoneda_cocycle(res: Resolution, alpha: NatTransform, beta: NatTransform, gamma: NatTransform) -> np.ndarray:
    """Cocycle in Hom(term_2, G) of the 2-extension 0 -> G -α-> E1 -β-> E0 -γ-> F -> 0.

    Lifts id_F to term_0 -> E0, term_1 -> E1 and finally term_2 -> G.
    """
    p = res.p
    E0, E1 = gamma.source, beta.source
    f0 = []
    for b, x in zip(res.stages[0].term.gens, res.stages[0].images):
        f0.append(_solve_or_raise(gamma.at(b), x, p))
    f1 = []
    for b, y in zip(res.stages[1].term.gens, res.stages[1].images):
        rhs = linalg.matmul(pushforward(res.stages[0].term, E0, f0, b), y.reshape(-1, 1), p)
        f1.append(_solve_or_raise(beta.at(b), rhs, p))
    f2 = []
    for b, y in zip(res.stages[2].term.gens, res.stages[2].images):
        rhs = linalg.matmul(pushforward(res.stages[1].term, E1, f1, b), y.reshape(-1, 1), p)
        f2.append(_solve_or_raise(alpha.at(b), rhs, p))
    return np.concatenate(f2) if f2 else np.zeros(0, dtype=np.int64)


def _solve_or_raise(a, rhs, p):
    z = linalg.solve(a, np.asarray(rhs).reshape(-1, 1), p)
    if z is None:
        raise ArithmeticError("the sequence is not exact where a lift was needed")
    return z.ravel()


def _sequence_exact(skel, maps) -> bool:
    alpha, beta, gamma = maps
    p = skel.p
    for c in skel.objects:
        a, b, g = alpha.at(c), beta.at(c), gamma.at(c)
        if linalg.rank(a, p) != a.shape[1] or linalg.rank(g, p) != g.shape[0]:
            return False
        if not (is_exact_at(alpha, beta, c) and is_exact_at(beta, gamma, c)):
            return False
    return True


def excl_class_check(p: int, K: int) -> dict:
    """The class of 0 -> I -> S^p -> Γ^p -> I -> 0 on the skeleton generated by Z/p."""
    from .category import skeleton

    if K < p + 1:
        raise GuardError(f"K={K} < p+1={p + 1}: no room for the splice plus one sum")
    skel = skeleton(f"Z/{p}", K, p)
    fnv = frobenius_norm_verschiebung(skel)
    I = fnv["I"]
    seq = (fnv["frobenius"], fnv["norm"], fnv["verschiebung"])
    exact = _sequence_exact(skel, seq)
    full = Resolution(I, 3)
    cls = yoneda_cocycle(full, *seq)
    cocycle = not linalg.matmul(full.coboundary(2, I), cls.reshape(-1, 1), p).any()
    full_nonzero = not is_coboundary(full, I, 2, cls)

    low = {d: ext(I, I, 2, d=d).dims[2] for d in range(1, p)}

    poly = Resolution(I, 3, d=p)
    pcls = yoneda_cocycle(poly, *seq)
    maps = lift_chain_map(full, poly, 2)
    image = linalg.matmul(induced_cochain_map(full, poly, maps, 2, I), pcls.reshape(-1, 1), p)
    # the comparison image of the poly class must equal the full class modulo coboundaries
    in_image = is_coboundary(full, I, 2, (image.ravel() - cls) % p)

    ident = NatTransform(I, I, lambda c: linalg.identity(I.dim(c)))
    zero = NatTransform(I, I, lambda c: linalg.zeros(I.dim(c), I.dim(c)))
    split = yoneda_cocycle(full, ident, zero, ident)
    split_zero = is_coboundary(full, I, 2, split)

    return {
        "p": p,
        "K": K,
        "skeleton": skel.spec.to_json(),
        "sequence_exact": exact,
        "is_cocycle": cocycle,
        "class_nonzero_full": full_nonzero,
        "ext2_poly_below_p": {str(d): v for d, v in low.items()},
        "poly_class_nonzero": not is_coboundary(poly, I, 2, pcls),
        "class_in_image_from_poly": in_image,
        "split_class_zero": split_zero,
        "ext2_full_dim": ext(I, I, 2, res=full).dims[2],
    }


def excl_dims(p: int, Ks) -> dict:
    """dim Ext^i_full(I, I), i <= 2, on the skeletons generated by Z/p with the given K."""
    from .category import skeleton

    out = {}
    for K in Ks:
        skel = skeleton(f"Z/{p}", K, p)
        I = AdditiveTensor(skel, skel.unit())
        out[K] = ext(I, I, 2).dims
    return out


def ext_sweep(build, Ks, i_max: int = 2, d: int | None = None) -> dict:
    """Ext dims of build(K) -> (F, G) across skeleton bounds, to watch stabilization."""
    out = {}
    for K in Ks:
        F, G = build(K)
        out[K] = ext(F, G, i_max, d=d).dims
    return out


def exploratory_mod_sweep(spec, build, ts, i_max: int = 2) -> dict:
    """Ext dims on the reductions A/p^t; a finite probe only, with no claim about colimits."""
    from .category import Skeleton, reduce_mod

    out = {}
    for t in ts:
        skel = Skeleton(reduce_mod(spec, t))
        F, G = build(skel)
        out[t] = ext(F, G, i_max).dims
    return out


__all__ = [
    "ComparisonMap",
    "ExtTable",
    "ProjectiveTerm",
    "Resolution",
    "choose_generators",
    "comparison",
    "derived_pd",
    "derived_pd_report",
    "excl_class_check",
    "excl_dims",
    "exploratory_mod_sweep",
    "ext",
    "ext_sweep",
    "is_coboundary",
    "lift_chain_map",
    "projective",
    "pushforward",
    "yoneda_cocycle",
]
