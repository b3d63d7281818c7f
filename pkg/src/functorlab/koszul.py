"""Truncated Koszul complexes K^n_* and the classical Koszul sequence.

Term i of K^n_*(V) is S^{n-i} ⊗ Λ^i with S^* the truncated symmetric algebra
(caps p^r, or none for free generators) and Λ^* the exterior algebra on the
generators.  The differential sends x^a ⊗ e_{j1}∧...∧e_{ji} to
sum_t (-1)^(t-1) (x^a · x_{jt}) ⊗ (the wedge without e_{jt}), dropping
products that reach a cap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from . import linalg
from .abgroups import AbGroup
from .groupalg import caps_of, monomials
from .linalg import ChainComplex


def wedge_basis(k: int, i: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(k), i))


@dataclass
class KoszulComplex:
    caps: tuple
    n: int
    p: int
    bases: list[list[tuple]] = field(default_factory=list)
    complex: ChainComplex | None = None

    @property
    def dims(self) -> list[int]:
        return self.complex.dims

    def homology(self) -> list[int]:
        return self.complex.homology_dims()


def koszul_from_caps(caps: Sequence[int | None], n: int, p: int) -> KoszulComplex:
    if n < 0:
        raise ValueError("n must be nonnegative")
    caps = tuple(caps)
    k = len(caps)
    bases = []
    for i in range(n + 1):
        bases.append([(a, w) for w in wedge_basis(k, i) for a in monomials(caps, n - i)])
    index = [{b: j for j, b in enumerate(B)} for B in bases]
    dims = [len(B) for B in bases]
    diffs = [linalg.zeros(0, dims[0])]
    for i in range(1, n + 1):
        d = linalg.zeros(dims[i - 1], dims[i])
        for col, (a, w) in enumerate(bases[i]):
            for t, j in enumerate(w):
                e = list(a)
                e[j] += 1
                if caps[j] is not None and e[j] >= caps[j]:
                    continue
                rest = w[:t] + w[t + 1:]
                row = index[i - 1][(tuple(e), rest)]
                d[row, col] = (d[row, col] + (-1) ** t) % p
        diffs.append(d)
    # trailing zero terms carry no information; keep the list length n + 1
    cx = ChainComplex(p, dims, diffs, labels=bases)
    cx.check()
    return KoszulComplex(caps, n, p, bases, cx)


def build_koszul(V: AbGroup, n: int) -> KoszulComplex:
    """K^n_*(V); free summands use uncapped monomials."""
    return koszul_from_caps(caps_of(V), n, V.p)


def homology_table(V: AbGroup, n_max: int) -> dict[tuple[int, int], int]:
    """dim H_i(n)(V) for 0 <= i <= n <= n_max."""
    table = {}
    for n in range(n_max + 1):
        for i, h in enumerate(build_koszul(V, n).homology()):
            table[(n, i)] = h
    return table


@dataclass
class VanishingReport:
    group: AbGroup
    n_max: int
    table: dict
    violations: list

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_vanishing(V: AbGroup, n_max: int) -> VanishingReport:
    """Check H_i(n)(V) = 0 whenever n > p^r i, r the torsion exponent."""
    if V.free:
        raise ValueError("the vanishing bound needs bounded torsion (no free part)")
    bound = V.p**V.exponent
    table = homology_table(V, n_max)
    bad = [(n, i) for (n, i), h in table.items() if h and n > bound * i]
    return VanishingReport(V, n_max, table, bad)


def tensor_complex(a: ChainComplex, b: ChainComplex) -> tuple[ChainComplex, list]:
    """Tensor product with d(x⊗y) = dx⊗y + (-1)^s x⊗dy, s = degree of x."""
    p = a.p
    top = len(a.dims) + len(b.dims) - 2
    bases = []
    for i in range(top + 1):
        bases.append([(s, x, i - s, y) for s in range(len(a.dims)) if 0 <= i - s < len(b.dims)
                      for x in range(a.dims[s]) for y in range(b.dims[i - s])])
    index = [{t: j for j, t in enumerate(B)} for B in bases]
    dims = [len(B) for B in bases]
    diffs = [linalg.zeros(0, dims[0])]
    for i in range(1, top + 1):
        d = linalg.zeros(dims[i - 1], dims[i])
        for col, (s, x, t, y) in enumerate(bases[i]):
            if s >= 1:
                da = a.d(s)
                for x2 in np.flatnonzero(da[:, x]):
                    row = index[i - 1][(s - 1, int(x2), t, y)]
                    d[row, col] = (d[row, col] + da[x2, x]) % p
            if t >= 1:
                db = b.d(t)
                sign = -1 if s % 2 else 1
                for y2 in np.flatnonzero(db[:, y]):
                    row = index[i - 1][(s, x, t - 1, int(y2))]
                    d[row, col] = (d[row, col] + sign * db[y2, y]) % p
        diffs.append(d)
    return ChainComplex(p, dims, diffs), bases


@dataclass
class ExponentialIso:
    source: KoszulComplex
    pieces: list
    target_dims: list[int]
    maps: list[np.ndarray]
    commutes: bool
    invertible: bool


def exponential_iso(U: AbGroup, V: AbGroup, n: int) -> ExponentialIso:
    """K^n_*(U⊕V) ≅ ⊕_{a+b=n} K^a_*(U)⊗K^b_*(V), by splitting monomials and wedges.

    Since U's generators come first, the concatenated wedge is already sorted
    and the map carries no sign.  Commutation with the differentials is checked
    on the matrices.
    """
    p = U.p
    ku = U.ngens
    big = koszul_from_caps(caps_of(U) + caps_of(V), n, p)
    pieces = []
    for a in range(n + 1):
        ka, kb = build_koszul(U, a), build_koszul(V, n - a)
        tc, tb = tensor_complex(ka.complex, kb.complex)
        pieces.append((a, ka, kb, tc, tb))
    # direct sum of the tensor complexes, degree by degree
    offsets = []
    tdims = [0] * (n + 1)
    for a, ka, kb, tc, tb in pieces:
        off = []
        for i in range(n + 1):
            off.append(tdims[i])
            if i < len(tc.dims):
                tdims[i] += tc.dims[i]
        offsets.append(off)
    lookup = []
    for (a, ka, kb, tc, tb), off in zip(pieces, offsets):
        ia = [{b: j for j, b in enumerate(B)} for B in ka.bases]
        ib = [{b: j for j, b in enumerate(B)} for B in kb.bases]
        ti = [{t: j for j, t in enumerate(B)} for B in tb]
        lookup.append((ia, ib, ti, off))
    maps = []
    for i in range(n + 1):
        m = linalg.zeros(tdims[i], big.dims[i])
        for col, (alpha, w) in enumerate(big.bases[i]):
            au, av = alpha[:ku], alpha[ku:]
            wu = tuple(j for j in w if j < ku)
            wv = tuple(j - ku for j in w if j >= ku)
            a = sum(au) + len(wu)
            ia, ib, ti, off = lookup[a]
            x = ia[len(wu)][(au, wu)]
            y = ib[len(wv)][(av, wv)]
            row = off[i] + ti[i][(len(wu), x, len(wv), y)]
            m[row, col] = 1
        maps.append(m)
    commutes = True
    for i in range(1, n + 1):
        dt = linalg.zeros(tdims[i - 1], tdims[i])
        for (a, ka, kb, tc, tb), off in zip(pieces, offsets):
            if i < len(tc.dims):
                blk = tc.d(i)
                dt[off[i - 1]:off[i - 1] + blk.shape[0], off[i]:off[i] + blk.shape[1]] = blk
        lhs = linalg.matmul(dt, maps[i], p)
        rhs = linalg.matmul(maps[i - 1], big.complex.d(i), p)
        commutes &= not ((lhs - rhs) % p).any()
    invertible = all(m.shape[0] == m.shape[1] and linalg.rank(m, p) == m.shape[0] for m in maps)
    return ExponentialIso(big, pieces, tdims, maps, commutes, invertible)


def kunneth_prediction(U: AbGroup, V: AbGroup, n: int) -> list[int]:
    """sum over a+b=n, s+t=i of dim H_s(a)(U) dim H_t(b)(V)."""
    hu = {a: build_koszul(U, a).homology() for a in range(n + 1)}
    hv = {b: build_koszul(V, b).homology() for b in range(n + 1)}
    out = [0] * (n + 1)
    for a in range(n + 1):
        for s, x in enumerate(hu[a]):
            for t, y in enumerate(hv[n - a]):
                out[s + t] += x * y
    return out


def classical_koszul(m: int, n: int, p: int) -> KoszulComplex:
    """Λ^n → Λ^{n-1}⊗S^1 → ... → S^n over W = F_p^m, full symmetric powers."""
    return koszul_from_caps((None,) * m, n, p)


def dual_complex(c: ChainComplex) -> ChainComplex:
    """The linear dual, re-indexed so that it is again a chain complex.

    Term j of the result is the dual of term top-j and the differentials are
    transposes; homology comes out reversed.
    """
    top = len(c.dims) - 1
    dims = [c.dims[top - j] for j in range(top + 1)]
    diffs = [linalg.zeros(0, dims[0])]
    for j in range(1, top + 1):
        # d'_j : term j -> term j-1 is the transpose of d_{top-j+1}
        diffs.append(np.ascontiguousarray(c.d(top - j + 1).T))
    return ChainComplex(c.p, dims, diffs)


def classical_koszul_and_dual(m: int, n: int, p: int) -> tuple[ChainComplex, ChainComplex]:
    """The classical sequence and its dual Γ^n → Γ^{n-1}⊗Λ^1 → ... → Λ^n.

    Γ^j(W) is taken as the dual of S^j(W^∨); with W identified with its dual
    through the standard basis, the dual sequence is the transposed complex.
    """
    k = classical_koszul(m, n, p).complex
    return k, dual_complex(k)


def wedge_dim(k: int, i: int) -> int:
    return comb(k, i)


__all__ = [
    "ExponentialIso",
    "KoszulComplex",
    "VanishingReport",
    "build_koszul",
    "classical_koszul",
    "classical_koszul_and_dual",
    "dual_complex",
    "exponential_iso",
    "homology_table",
    "koszul_from_caps",
    "kunneth_prediction",
    "tensor_complex",
    "verify_vanishing",
    "wedge_basis",
    "wedge_dim",
]
