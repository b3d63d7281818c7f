"""Finitely generated abelian groups Z^f + Z/p^r1 + ... and their homomorphisms.

Generators are ordered with the free ones first and the torsion ones by
increasing exponent.  A cyclic factor is described by its exponent, with
``None`` standing for an infinite cyclic factor.

>>> V = parse_group("Z + Z/8", p=2)
>>> quotient_mod(V, 2)[0]
AbGroup(p=2, free=0, torsion=(2, 2))
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import linalg


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % q for q in range(2, math.isqrt(n) + 1))


def _p_exponent(n: int, p: int) -> int | None:
    """e with n == p**e, or None."""
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e if n == 1 else None


def cyclic_hom_order(a: int | None, b: int | None) -> int | None:
    """Exponent of Hom(Z/p^a, Z/p^b); None means the group is Z."""
    if a is None and b is None:
        return None
    if a is None:
        return b
    if b is None:
        return 0
    return min(a, b)


def cyclic_hom_unit(a: int | None, b: int | None, p: int) -> int:
    """The integer image of the source generator under a generating hom."""
    if a is None or b is None:
        return 1
    return p ** max(b - a, 0)


@dataclass(frozen=True)
class AbGroup:
    """Z^free + sum of Z/p^r over ``torsion`` (sorted, all r >= 1)."""

    p: int
    free: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.free < 0 or any(r < 1 for r in self.torsion):
            raise ValueError("free rank must be >= 0 and exponents >= 1")
        object.__setattr__(self, "torsion", tuple(sorted(self.torsion)))

    @property
    def factors(self) -> tuple[int | None, ...]:
        return (None,) * self.free + self.torsion

    @property
    def ngens(self) -> int:
        return self.free + len(self.torsion)

    @property
    def is_finite(self) -> bool:
        return self.free == 0

    @property
    def order(self) -> int:
        if not self.is_finite:
            raise ValueError("infinite group")
        return self.p ** sum(self.torsion)

    @property
    def exponent(self) -> int:
        """r_k, the torsion exponent (0 when there is no torsion)."""
        return self.torsion[-1] if self.torsion else 0

    def orders(self) -> list[int]:
        return [self.p**r for r in self.torsion]

    def elements(self) -> np.ndarray:
        """All elements as coordinate rows, lexicographic in generator order."""
        if not self.is_finite:
            raise ValueError("cannot enumerate an infinite group")
        if not self.torsion:
            return np.zeros((1, 0), dtype=np.int64)
        grids = np.meshgrid(*[np.arange(n) for n in self.orders()], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)

    def index_of(self, coords: np.ndarray) -> np.ndarray:
        """Positions in ``elements()`` of coordinate rows (reduced first)."""
        coords = np.atleast_2d(coords)
        idx = np.zeros(coords.shape[0], dtype=np.int64)
        for n, col in zip(self.orders(), coords.T):
            idx = idx * n + np.mod(col, n)
        return idx

    def direct_sum(self, other: "AbGroup") -> "AbGroup":
        _same_prime(self, other)
        return AbGroup(self.p, self.free + other.free, self.torsion + other.torsion)

    def __str__(self) -> str:
        return format_group(self)


def _same_prime(*groups: AbGroup) -> None:
    if len({g.p for g in groups}) > 1:
        raise ValueError("groups over different primes")


_TERM = re.compile(r"^Z(?:\^(\d+))?$|^Z/(\d+)(?:\^(\d+))?$")


def parse_group(text: str, p: int | None = None) -> AbGroup:
    """Parse "Z^f + Z/p^r + ..." (whitespace-insensitive; "0" is trivial).

    Torsion may be written as Z/8 or Z/2^3.  Torsion prime to p, or mixed
    primes, is rejected.
    """
    s = re.sub(r"\s+", "", text)
    if s in ("", "0"):
        if p is None:
            raise ValueError("the trivial group needs an explicit prime")
        return AbGroup(p)
    free = 0
    tors: list[tuple[int, int]] = []
    for term in s.split("+"):
        m = _TERM.match(term)
        if not m:
            raise ValueError(f"cannot parse group term {term!r}")
        if m.group(2) is None:
            free += int(m.group(1) or 1)
            continue
        base = int(m.group(2))
        power = int(m.group(3) or 1)
        tors.append((base, power))
    primes = set()
    exps = []
    for base, power in tors:
        if base < 2:
            raise ValueError("Z/1 is not allowed; omit trivial summands")
        if _is_prime(base):
            primes.add(base)
            exps.append((base, power))
        else:
            q = next(q for q in range(2, base + 1) if base % q == 0)
            e = _p_exponent(base, q)
            if e is None:
                raise ValueError(f"Z/{base} is not p-primary")
            primes.add(q)
            exps.append((q, e * power))
    if p is not None:
        primes.add(p)
    if len(primes) > 1:
        raise ValueError(f"torsion at several primes {sorted(primes)} in {text!r}")
    if not primes:
        raise ValueError("free group needs an explicit prime")
    (q,) = primes
    return AbGroup(q, free, tuple(e for _, e in exps))


def format_group(V: AbGroup) -> str:
    parts = []
    if V.free == 1:
        parts.append("Z")
    elif V.free > 1:
        parts.append(f"Z^{V.free}")
    parts += [f"Z/{V.p ** r}" for r in V.torsion]
    return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class AbHom:
    """A homomorphism given by an integer matrix in generator coordinates.

    Entry (i, j) is the coefficient of target generator i in the image of
    source generator j; entries are kept reduced modulo target orders.
    """

    source: AbGroup
    target: AbGroup
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.int64).reshape(self.target.ngens, self.source.ngens)
        for i, b in enumerate(self.target.factors):
            if b is not None:
                m[i] %= self.source.p**b
        object.__setattr__(self, "matrix", m)
        if not self.well_defined():
            raise ValueError("matrix does not define a homomorphism")

    def well_defined(self) -> bool:
        p = self.source.p
        for i, b in enumerate(self.target.factors):
            for j, a in enumerate(self.source.factors):
                x = int(self.matrix[i, j])
                if a is None:
                    continue
                if b is None:
                    if x != 0:
                        return False
                elif x % p ** max(b - a, 0):
                    return False
        return True

    def __matmul__(self, other: "AbHom") -> "AbHom":
        if other.target != self.source:
            raise ValueError("composition of non-composable homs")
        return AbHom(other.source, self.target, self.matrix @ other.matrix)

    def apply(self, coords: np.ndarray) -> np.ndarray:
        """Images of coordinate rows (of a finite source)."""
        out = np.atleast_2d(coords) @ self.matrix.T
        for i, b in enumerate(self.target.factors):
            if b is not None:
                out[:, i] %= self.source.p**b
        return out

    @classmethod
    def identity(cls, V: AbGroup) -> "AbHom":
        return cls(V, V, np.eye(V.ngens, dtype=np.int64))


def quotient_mod(V: AbGroup, i: int) -> tuple[AbGroup, AbHom]:
    """V/p^i together with the canonical projection V -> V/p^i."""
    if i < 0:
        raise ValueError("i must be nonnegative")
    keep = []
    exps = []
    for j, r in enumerate(V.factors):
        e = i if r is None else min(r, i)
        if e > 0:
            keep.append(j)
            exps.append(e)
    Q = AbGroup(V.p, 0, tuple(exps))
    # exps may be unsorted when free factors become Z/p^i; order them
    order = sorted(range(len(keep)), key=lambda t: exps[t])
    m = np.zeros((len(keep), V.ngens), dtype=np.int64)
    for row, t in enumerate(order):
        m[row, keep[t]] = 1
    return Q, AbHom(V, Q, m)


def hom_group(V: AbGroup, W: AbGroup) -> tuple[AbGroup, list[AbHom]]:
    """Hom_Z(V, W) with one generating hom per cyclic summand.

    The generators are listed in the returned group's generator order.
    """
    _same_prime(V, W)
    p = V.p
    summands = []
    for i, b in enumerate(W.factors):
        for j, a in enumerate(V.factors):
            e = cyclic_hom_order(a, b)
            if e == 0:
                continue
            summands.append((e, i, j, cyclic_hom_unit(a, b, p)))
    summands.sort(key=lambda s: (s[0] is not None, s[0] or 0))
    free = sum(1 for s in summands if s[0] is None)
    H = AbGroup(p, free, tuple(s[0] for s in summands if s[0] is not None))
    gens = []
    for _, i, j, u in summands:
        m = np.zeros((W.ngens, V.ngens), dtype=np.int64)
        m[i, j] = u
        gens.append(AbHom(V, W, m))
    return H, gens


def hom_count(V: AbGroup, W: AbGroup) -> int:
    H, _ = hom_group(V, W)
    return H.order


def ext1_zp_dim(V: AbGroup) -> int:
    """dim Ext^1_Z(V, Z/p) = number of cyclic torsion summands."""
    return len(V.torsion)


def ext1_map_from_quotient(V: AbGroup, m: int) -> tuple[int, int, np.ndarray]:
    """The map Ext^1(V/p^m, Z/p) -> Ext^1(V, Z/p) induced by projection.

    V is resolved by Z^k -> Z^n (one relation per torsion generator) and
    V/p^m by the diagonal Z^n -> Z^n.  The projection lifts to these
    resolutions with the identity in degree zero; applying Hom(-, Z/p) to
    the degree-one component gives the map between cokernels.  Returns
    (dim source, dim target, matrix between chosen cokernel bases).
    """
    p = V.p
    n = V.ngens
    tors = [j for j, r in enumerate(V.factors) if r is not None]
    k = len(tors)
    eq = [m if r is None else min(r, m) for r in V.factors]
    rel_v = np.zeros((n, k), dtype=np.int64)
    lift = np.zeros((n, k), dtype=np.int64)
    for t, j in enumerate(tors):
        r = V.factors[j]
        rel_v[j, t] = p**r
        lift[j, t] = p ** (r - eq[j])
    rel_q = np.diag([p**e for e in eq]).astype(np.int64).reshape(n, n)
    # Ext^1(X, Z/p) = coker of the transposed relation matrix mod p
    proj_q, sec_q = linalg.quotient_coords(linalg.column_basis(rel_q.T % p, p), n, p)
    proj_v, _ = linalg.quotient_coords(linalg.column_basis(rel_v.T % p, p), k, p)
    mat = linalg.matmul(proj_v, linalg.matmul(lift.T % p, sec_q, p), p)
    return sec_q.shape[1], proj_v.shape[0], mat


@dataclass(frozen=True)
class Stationarity:
    """Outcome of testing the maps Ext^1(V/p^m, Z/p) -> Ext^1(V, Z/p)."""

    index: int | None
    stabilizes_at: int
    dims: tuple[int, ...]
    iso: tuple[bool, ...]

    @property
    def stationary(self) -> bool:
        return self.index is not None


def stationarity(V: AbGroup, cap: int | None = None) -> Stationarity:
    """Test the colimit maps for m = 0..cap (default r_k + f + 2).

    ``index`` is the least n with an isomorphism for every tested m >= n,
    or None when the last tested map is not an isomorphism (this happens
    exactly when V has a free part).  ``stabilizes_at`` is the least n from
    which the maps no longer change.
    """
    if cap is None:
        cap = V.exponent + V.free + 2
    dims, isos, mats = [], [], []
    for m in range(cap + 1):
        ds, dt, mat = ext1_map_from_quotient(V, m)
        dims.append(ds)
        mats.append((ds, dt, mat.tobytes()))
        isos.append(ds == dt and linalg.rank(mat, V.p) == dt)
    index = None
    if isos[-1]:
        index = cap
        while index > 0 and isos[index - 1]:
            index -= 1
    stab = cap
    while stab > 0 and mats[stab - 1] == mats[cap]:
        stab -= 1
    return Stationarity(index, stab, tuple(dims), tuple(isos))


def stationarity_index(V: AbGroup) -> int | None:
    """Least n with Ext^1(V/p^m, Z/p) ≅ Ext^1(V, Z/p) canonically for m >= n.

    None for groups with a free summand, which are never stationary.
    """
    return stationarity(V).index


def finite_family_stationary(groups: Iterable[AbGroup]) -> bool:
    """Stationarity of Ext^1(-, Z/p) on the direct sum of a finite family."""
    groups = list(groups)
    total = groups[0]
    for g in groups[1:]:
        total = total.direct_sum(g)
    return stationarity(total).stationary


__all__ = [
    "AbGroup",
    "AbHom",
    "Stationarity",
    "cyclic_hom_order",
    "cyclic_hom_unit",
    "ext1_map_from_quotient",
    "ext1_zp_dim",
    "finite_family_stationary",
    "format_group",
    "hom_count",
    "hom_group",
    "parse_group",
    "quotient_mod",
    "stationarity",
    "stationarity_index",
]
