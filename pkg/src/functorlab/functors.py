"""Functors from a skeleton to finite-dimensional F_p-vector spaces.

A functor knows the dimension of its value at each object and the matrix of
its action on each morphism; both are computed on demand and cached.  The
building blocks are linearizations of hom functors A(a, -), their
augmentation quotients, post-composition with symmetric, divided and
exterior powers, duals, tensor products, direct sums, and sub- and quotient
functors cut out by natural transformations.
"""

from __future__ import annotations

import itertools
from math import factorial
from typing import Callable, Iterable, Sequence

import numpy as np

from . import linalg
from .category import GuardError, Morphism, Obj, Skeleton
from .groupalg import algebra_map_matrix, monomials


class Functor:
    """Base class; subclasses implement ``_dim`` and ``_act``."""

    label = "F"
    reduced = False

    def __init__(self, skel: Skeleton):
        self.skel = skel
        self.p = skel.p
        self._dims: dict = {}
        self._acts: dict = {}
        self._cached_entries = 0

    def dim(self, a: Obj) -> int:
        a = self.skel.check(a)
        if a not in self._dims:
            self._dims[a] = self._dim(a)
        return self._dims[a]

    def act(self, f: Morphism) -> np.ndarray:
        key = f.key
        m = self._acts.get(key)
        if m is None:
            m = self._act(f)
            if m.shape != (self.dim(f.tgt), self.dim(f.src)):
                raise AssertionError(f"{self.label}: action has shape {m.shape}")
            if self._cached_entries + m.size <= 20_000_000:
                self._acts[key] = m
                self._cached_entries += m.size
        return m

    def apply(self, f: Morphism, x: np.ndarray) -> np.ndarray:
        """F(f) applied to the columns of x."""
        return linalg.matmul(self.act(f), x, self.p)

    def _dim(self, a: Obj) -> int:
        raise NotImplementedError

    def _act(self, f: Morphism) -> np.ndarray:
        raise NotImplementedError

    def dims(self) -> dict:
        return {self.skel.name(a): self.dim(a) for a in self.skel.objects}

    def __repr__(self) -> str:
        return self.label


def _hom_action(skel: Skeleton, a: Obj, f: Morphism) -> np.ndarray:
    """Slot-coordinate matrix of post-composition A(a, f.src) -> A(a, f.tgt)."""
    return skel.post_matrix(a, f)


class Constant(Functor):
    def __init__(self, skel: Skeleton, n: int = 1):
        super().__init__(skel)
        self.n = n
        self.label = "k" if n == 1 else f"k^{n}"

    def _dim(self, a):
        return self.n

    def _act(self, f):
        return linalg.identity(self.n)


class HomLinearization(Functor):
    """P_a = F_p[A(a, -)] in the basis of morphisms a -> b."""

    def __init__(self, skel: Skeleton, a: Obj):
        super().__init__(skel)
        self.a = skel.check(a)
        self.label = f"k[Hom({skel.name(a)},-)]"
        self._perms: dict = {}

    def _dim(self, b):
        return self.skel.hom(self.a, b).size

    def permutation(self, f: Morphism) -> np.ndarray:
        """Index in A(a, f.tgt) of f∘h for each h in A(a, f.src)."""
        perm = self._perms.get(f.key)
        if perm is None:
            Hs, Ht = self.skel.hom(self.a, f.src), self.skel.hom(self.a, f.tgt)
            phi = _hom_action(self.skel, self.a, f)
            perm = Ht.index(Hs.coords() @ phi.T)
            if len(self._perms) < 200_000:
                self._perms[f.key] = perm
        return perm

    def _act(self, f):
        perm = self.permutation(f)
        m = linalg.zeros(self.dim(f.tgt), self.dim(f.src))
        m[perm, np.arange(len(perm))] = 1
        return m

    def apply(self, f, x):
        # scatter rows instead of a dense permutation product
        out = linalg.zeros(self.dim(f.tgt), x.shape[1])
        np.add.at(out, self.permutation(f), x)
        return out % self.p


class ReducedLinearization(Functor):
    """The augmentation kernel of P_a, basis [h] - [0] for h != 0."""

    reduced = True

    def __init__(self, skel: Skeleton, a: Obj):
        super().__init__(skel)
        self.base = HomLinearization(skel, a)
        self.label = f"kbar[Hom({skel.name(a)},-)]"

    def _dim(self, b):
        return self.base.dim(b) - 1

    def _act(self, f):
        perm = self.base.permutation(f)
        n_src = len(perm)
        m = linalg.zeros(self.dim(f.tgt), self.dim(f.src))
        for j in range(1, n_src):
            if perm[j] != 0:
                m[perm[j] - 1, j - 1] = 1
        return m


class AdditiveTensor(Functor):
    """A(a, -) ⊗ F_p."""

    reduced = True

    def __init__(self, skel: Skeleton, a: Obj):
        super().__init__(skel)
        self.a = skel.check(a)
        self.label = f"Hom({skel.name(a)},-)"

    def _dim(self, b):
        return self.skel.hom(self.a, b).ngens

    def _act(self, f):
        return np.mod(_hom_action(self.skel, self.a, f), self.p)


class TruncatedGroupAlgebra(Functor):
    """F_p[A(a, -)] / I^{d+1} in the monomial basis (degrees 0..d)."""

    def __init__(self, skel: Skeleton, a: Obj, d: int):
        super().__init__(skel)
        self.a, self.d = skel.check(a), d
        self.degrees = list(range(d + 1))
        self.label = f"Q^{d} . Hom({skel.name(a)},-)"

    def _caps(self, b):
        return self.skel.hom(self.a, b).caps

    def _dim(self, b):
        caps = self._caps(b)
        return sum(len(monomials(caps, e)) for e in self.degrees)

    def _act(self, f):
        phi = _hom_action(self.skel, self.a, f)
        return algebra_map_matrix(phi, self._caps(f.src), self._caps(f.tgt), self.degrees, self.p)


class GradedPiece(TruncatedGroupAlgebra):
    """S^d ∘ A(a, -): the graded piece I^d / I^{d+1} of F_p[A(a, -)]."""

    def __init__(self, skel: Skeleton, a: Obj, d: int):
        super().__init__(skel, a, d)
        self.degrees = [d]
        self.reduced = d > 0
        self.label = f"S^{d} . Hom({skel.name(a)},-)"


# --- post-composition with vector-space functors ---------------------------------


def _linear_forms_product(cols: Sequence[dict], p: int) -> dict:
    acc = {(): 1}
    for form in cols:
        new: dict = {}
        for mono, c in acc.items():
            for r, v in form.items():
                key = tuple(sorted(mono + (r,)))
                new[key] = (new.get(key, 0) + c * v) % p
        acc = {k: v for k, v in new.items() if v}
    return acc


def sym_basis(n: int, d: int) -> list[tuple[int, ...]]:
    """Degree-d monomials in n variables as sorted index tuples."""
    return list(itertools.combinations_with_replacement(range(n), d))


def sym_power_matrix(a: np.ndarray, d: int, p: int) -> np.ndarray:
    """Matrix of Sym^d(a) in the monomial bases."""
    n_out, n_in = a.shape
    src, tgt = sym_basis(n_in, d), sym_basis(n_out, d)
    row = {m: i for i, m in enumerate(tgt)}
    forms = [{r: int(a[r, i]) for r in range(n_out) if a[r, i] % p} for i in range(n_in)]
    out = linalg.zeros(len(tgt), len(src))
    for j, mono in enumerate(src):
        for m, c in _linear_forms_product([forms[i] for i in mono], p).items():
            out[row[m], j] = c
    return out


def det_mod(m: np.ndarray, p: int) -> int:
    m = np.mod(np.array(m, dtype=np.int64), p)
    n = m.shape[0]
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r, c]), None)
        if piv is None:
            return 0
        if piv != c:
            m[[c, piv]] = m[[piv, c]]
            det = -det
        det = det * int(m[c, c]) % p
        inv = pow(int(m[c, c]), -1, p)
        for r in range(c + 1, n):
            if m[r, c]:
                m[r] = (m[r] - m[r, c] * inv * m[c]) % p
    return det % p


def wedge_power_matrix(a: np.ndarray, d: int, p: int) -> np.ndarray:
    n_out, n_in = a.shape
    src = list(itertools.combinations(range(n_in), d))
    tgt = list(itertools.combinations(range(n_out), d))
    out = linalg.zeros(len(tgt), len(src))
    for j, J in enumerate(src):
        for i, I in enumerate(tgt):
            out[i, j] = det_mod(a[np.ix_(I, J)], p) if d else 1
    return out


class SymmetricPower(Functor):
    def __init__(self, inner: Functor, d: int):
        super().__init__(inner.skel)
        self.inner, self.d = inner, d
        self.reduced = inner.reduced and d > 0
        self.label = f"Sym^{d}({inner.label})"

    def _dim(self, a):
        return len(sym_basis(self.inner.dim(a), self.d))

    def _act(self, f):
        return sym_power_matrix(self.inner.act(f), self.d, self.p)


class DividedPower(Functor):
    """Γ^d(F) = (Sym^d(F^∨))^∨, basis dual to the monomials of the dual space."""

    def __init__(self, inner: Functor, d: int):
        super().__init__(inner.skel)
        self.inner, self.d = inner, d
        self.reduced = inner.reduced and d > 0
        self.label = f"Gam^{d}({inner.label})"

    def _dim(self, a):
        return len(sym_basis(self.inner.dim(a), self.d))

    def _act(self, f):
        return np.ascontiguousarray(sym_power_matrix(self.inner.act(f).T, self.d, self.p).T)


class ExteriorPower(Functor):
    def __init__(self, inner: Functor, d: int):
        super().__init__(inner.skel)
        self.inner, self.d = inner, d
        self.reduced = inner.reduced and d > 0
        self.label = f"Lam^{d}({inner.label})"

    def _dim(self, a):
        n = self.inner.dim(a)
        return len(list(itertools.combinations(range(n), self.d)))

    def _act(self, f):
        return wedge_power_matrix(self.inner.act(f), self.d, self.p)


class Dual(Functor):
    """F^∨(a) = F(a)^∨ with F^∨(f) = F(f^t)^t, using the skeleton's self-duality."""

    def __init__(self, inner: Functor):
        super().__init__(inner.skel)
        if not inner.skel.self_dual:
            raise GuardError("duals need a skeleton of finite generators")
        self.inner = inner
        self.reduced = inner.reduced
        self.label = f"D({inner.label})"

    def _dim(self, a):
        return self.inner.dim(a)

    def _act(self, f):
        return np.ascontiguousarray(self.inner.act(self.skel.transpose(f)).T)


class Tensor(Functor):
    def __init__(self, left: Functor, right: Functor):
        super().__init__(left.skel)
        self.left, self.right = left, right
        self.reduced = left.reduced or right.reduced
        self.label = f"({left.label} * {right.label})"

    def _dim(self, a):
        return self.left.dim(a) * self.right.dim(a)

    def _act(self, f):
        return np.mod(np.kron(self.left.act(f), self.right.act(f)), self.p)


class DirectSum(Functor):
    def __init__(self, *parts: Functor):
        super().__init__(parts[0].skel)
        self.parts = parts
        self.reduced = all(q.reduced for q in parts)
        self.label = "(" + " + ".join(q.label for q in parts) + ")"

    def _dim(self, a):
        return sum(q.dim(a) for q in self.parts)

    def _act(self, f):
        out = linalg.zeros(self.dim(f.tgt), self.dim(f.src))
        r = c = 0
        for q in self.parts:
            m = q.act(f)
            out[r:r + m.shape[0], c:c + m.shape[1]] = m
            r += m.shape[0]
            c += m.shape[1]
        return out

    def apply(self, f, x):
        out = []
        c = 0
        for q in self.parts:
            n = q.dim(f.src)
            out.append(q.apply(f, x[c:c + n]))
            c += n
        return np.vstack(out) if out else linalg.zeros(0, x.shape[1])


def _left_inverse(b: np.ndarray, p: int) -> np.ndarray:
    """L with L b = I for a basis matrix b of full column rank."""
    if b.shape[1] == 0:
        return linalg.zeros(0, b.shape[0])
    x = linalg.solve(np.ascontiguousarray(b.T), linalg.identity(b.shape[1]), p)
    return np.ascontiguousarray(x.T)


class SubFunctor(Functor):
    """Values are subspaces of an ambient functor, given by column bases."""

    def __init__(self, ambient: Functor, basis: Callable[[Obj], np.ndarray], label: str = "sub"):
        super().__init__(ambient.skel)
        self.ambient = ambient
        self._basis_fn = basis
        self._bases: dict = {}
        self._linv: dict = {}
        self.reduced = ambient.reduced
        self.label = label

    def basis(self, a: Obj) -> np.ndarray:
        a = self.skel.check(a)
        if a not in self._bases:
            self._bases[a] = self._basis_fn(a)
        return self._bases[a]

    def coords(self, a: Obj) -> np.ndarray:
        if a not in self._linv:
            self._linv[a] = _left_inverse(self.basis(a), self.p)
        return self._linv[a]

    def _dim(self, a):
        return self.basis(a).shape[1]

    def _act(self, f):
        img = linalg.matmul(self.ambient.act(f), self.basis(f.src), self.p)
        return linalg.matmul(self.coords(f.tgt), img, self.p)

    def apply(self, f, x):
        img = self.ambient.apply(f, linalg.matmul(self.basis(f.src), x, self.p))
        return linalg.matmul(self.coords(f.tgt), img, self.p)


class QuotientFunctor(Functor):
    """Ambient functor modulo a subfunctor given by column bases."""

    def __init__(self, ambient: Functor, sub: Callable[[Obj], np.ndarray], label: str = "quot"):
        super().__init__(ambient.skel)
        self.ambient = ambient
        self._sub_fn = sub
        self._coords: dict = {}
        self.reduced = ambient.reduced
        self.label = label

    def sub_basis(self, a: Obj) -> np.ndarray:
        return self._quot(a)[2]

    def _quot(self, a):
        a = self.skel.check(a)
        if a not in self._coords:
            sub = linalg.column_basis(self._sub_fn(a), self.p)
            proj, lift = linalg.quotient_coords(sub, self.ambient.dim(a), self.p)
            self._coords[a] = (proj, lift, sub)
        return self._coords[a]

    def projection(self, a: Obj) -> np.ndarray:
        return self._quot(a)[0]

    def lift(self, a: Obj) -> np.ndarray:
        return self._quot(a)[1]

    def _dim(self, a):
        return self._quot(a)[0].shape[0]

    def _act(self, f):
        m = linalg.matmul(self.ambient.act(f), self.lift(f.src), self.p)
        return linalg.matmul(self.projection(f.tgt), m, self.p)

    def apply(self, f, x):
        img = self.ambient.apply(f, linalg.matmul(self.lift(f.src), x, self.p))
        return linalg.matmul(self.projection(f.tgt), img, self.p)


# --- natural transformations -------------------------------------------------------------


class NatTransform:
    def __init__(self, source: Functor, target: Functor, component: Callable[[Obj], np.ndarray]):
        self.source, self.target = source, target
        self._fn = component
        self._cache: dict = {}
        self.p = source.p
        self.skel = source.skel

    def at(self, a: Obj) -> np.ndarray:
        a = self.skel.check(a)
        if a not in self._cache:
            m = np.mod(np.asarray(self._fn(a), dtype=np.int64), self.p)
            if m.shape != (self.target.dim(a), self.source.dim(a)):
                raise AssertionError("component has the wrong shape")
            self._cache[a] = m
        return self._cache[a]

    def naturality_defect(self, f: Morphism) -> bool:
        lhs = linalg.matmul(self.target.act(f), self.at(f.src), self.p)
        rhs = linalg.matmul(self.at(f.tgt), self.source.act(f), self.p)
        return bool(((lhs - rhs) % self.p).any())

    def is_natural(self, morphisms: Iterable[Morphism] | None = None) -> bool:
        if morphisms is None:
            morphisms = self.skel.all_morphisms()
        return not any(self.naturality_defect(f) for f in morphisms)

    def compose(self, other: "NatTransform") -> "NatTransform":
        """self ∘ other."""
        return NatTransform(other.source, self.target,
                            lambda a: linalg.matmul(self.at(a), other.at(a), self.p))

    def is_zero(self) -> bool:
        return not any(self.at(a).any() for a in self.skel.objects)


def kernel_of(t: NatTransform, label: str | None = None) -> SubFunctor:
    return SubFunctor(t.source, lambda a: linalg.kernel_basis(t.at(a), t.p),
                      label or f"ker({t.source.label}->{t.target.label})")


def image_of(t: NatTransform, label: str | None = None) -> SubFunctor:
    return SubFunctor(t.target, lambda a: linalg.column_basis(t.at(a), t.p),
                      label or f"im({t.source.label}->{t.target.label})")


def cokernel_of(t: NatTransform, label: str | None = None) -> QuotientFunctor:
    return QuotientFunctor(t.target, lambda a: t.at(a),
                           label or f"coker({t.source.label}->{t.target.label})")


def is_exact_at(f: NatTransform, g: NatTransform, a: Obj) -> bool:
    """im f = ker g at the object a (with g∘f = 0)."""
    p = f.p
    fa, ga = f.at(a), g.at(a)
    if linalg.matmul(ga, fa, p).any():
        return False
    return linalg.rank(fa, p) == ga.shape[1] - linalg.rank(ga, p)


# --- Yoneda ---------------------------------------------------------------------------


def yoneda_transform(P: HomLinearization, G: Functor, x: np.ndarray) -> NatTransform:
    """The transformation P_a -> G with [id_a] ↦ x."""
    skel = P.skel
    x = np.asarray(x, dtype=np.int64).reshape(-1, 1)

    def comp(b):
        cols = [G.act(h) @ x for h in skel.hom(P.a, b)]
        return np.hstack(cols) % G.p if cols else linalg.zeros(G.dim(b), 0)

    return NatTransform(P, G, comp)


def yoneda_hom(P: HomLinearization, G: Functor) -> tuple[int, Callable]:
    """dim Hom(P_a, G) = dim G(a) together with the bijection x ↦ transformation."""
    return G.dim(P.a), lambda x: yoneda_transform(P, G, x)


def natural_transformations(F: Functor, G: Functor, morphisms: Iterable[Morphism] | None = None) -> list[dict]:
    """A basis of Hom(F, G) by solving the naturality equations directly.

    Unknowns are the matrices of all components; each morphism f: a -> b
    contributes G(f) η_a - η_b F(f) = 0.  Returns a list of
    {object: component matrix}.
    """
    skel, p = F.skel, F.p
    objs = skel.objects
    offs, n = {}, 0
    for a in objs:
        offs[a] = n
        n += G.dim(a) * F.dim(a)
    basis = linalg.identity(n)
    if morphisms is None:
        morphisms = skel.all_morphisms()
    batch: list[np.ndarray] = []

    def flush(basis):
        eqs = np.vstack(batch)
        k = linalg.kernel_basis(linalg.matmul(eqs, basis, p), p)
        batch.clear()
        return linalg.matmul(basis, k, p)

    rows = 0
    for f in morphisms:
        a, b = f.src, f.tgt
        ga, fa = G.dim(a), F.dim(a)
        gb, fb = G.dim(b), F.dim(b)
        if gb * fa == 0:
            continue
        Gf, Ff = G.act(f), F.act(f)
        # vec(G(f) X) = (I ⊗ G(f)) vec(X) with column-major vec
        eq = linalg.zeros(gb * fa, n)
        eq[:, offs[a]:offs[a] + ga * fa] = np.kron(np.eye(fa, dtype=np.int64), Gf)
        eq[:, offs[b]:offs[b] + gb * fb] -= np.kron(Ff.T, np.eye(gb, dtype=np.int64))
        batch.append(eq % p)
        rows += eq.shape[0]
        if rows > 4 * n + 256:
            basis = flush(basis)
            rows = 0
            if basis.shape[1] == 0:
                return []
    if batch:
        basis = flush(basis)
    out = []
    for j in range(basis.shape[1]):
        comp = {}
        for a in objs:
            ga, fa = G.dim(a), F.dim(a)
            comp[a] = basis[offs[a]:offs[a] + ga * fa, j].reshape(fa, ga).T
        out.append(comp)
    return out


# --- the Frobenius, norm and Verschiebung maps ---------------------------------------------


def frobenius_norm_verschiebung(skel: Skeleton) -> dict:
    """I -> S^p -> Γ^p -> I on a skeleton generated by Z/p, with K >= p.

    I is A(V1, -) ⊗ F_p, i.e. the identity functor of F_p-vector spaces.
    Frobenius sends e_i to x_i^p, the norm sends x^α to α! γ_α, and the
    Verschiebung sends γ_{p e_i} to e_i and kills the other basis vectors.
    """
    p = skel.p
    if len(skel.gens) != 1 or skel.gens[0].torsion != (1,) or skel.gens[0].free:
        raise GuardError("the sequence is modeled on the skeleton generated by Z/p")
    if skel.K < p:
        raise GuardError(f"K={skel.K} < p={p}: degree-p functors are not faithfully modeled")
    V1 = skel.unit()
    I = AdditiveTensor(skel, V1)
    S = SymmetricPower(I, p)
    G = DividedPower(I, p)

    def frob(a):
        n = I.dim(a)
        basis = sym_basis(n, p)
        row = {m: i for i, m in enumerate(basis)}
        m = linalg.zeros(len(basis), n)
        for i in range(n):
            m[row[(i,) * p], i] = 1
        return m

    def norm(a):
        basis = sym_basis(I.dim(a), p)
        m = linalg.zeros(len(basis), len(basis))
        for j, mono in enumerate(basis):
            c = 1
            for i in set(mono):
                c *= factorial(mono.count(i))
            m[j, j] = c % p
        return m

    def versch(a):
        n = I.dim(a)
        basis = sym_basis(n, p)
        m = linalg.zeros(n, len(basis))
        for j, mono in enumerate(basis):
            if len(set(mono)) == 1:
                m[mono[0], j] = 1
        return m

    return {
        "I": I,
        "S": S,
        "Gamma": G,
        "frobenius": NatTransform(I, S, frob),
        "norm": NatTransform(S, G, norm),
        "verschiebung": NatTransform(G, I, versch),
    }


__all__ = [
    "AdditiveTensor",
    "Constant",
    "DirectSum",
    "DividedPower",
    "Dual",
    "ExteriorPower",
    "Functor",
    "GradedPiece",
    "HomLinearization",
    "NatTransform",
    "QuotientFunctor",
    "ReducedLinearization",
    "SubFunctor",
    "SymmetricPower",
    "Tensor",
    "TruncatedGroupAlgebra",
    "cokernel_of",
    "det_mod",
    "frobenius_norm_verschiebung",
    "image_of",
    "is_exact_at",
    "kernel_of",
    "natural_transformations",
    "sym_power_matrix",
    "wedge_power_matrix",
    "yoneda_hom",
    "yoneda_transform",
]
