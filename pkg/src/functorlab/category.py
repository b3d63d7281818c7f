"""Finite skeletal truncations of an additive category of abelian groups.

Objects are multiplicity vectors over a list of generator groups, bounded by
K.  An object expands to a list of cyclic factors (generator by generator,
copy by copy), and a morphism is stored as a matrix of coefficients: the
entry for source factor Z/p^a and target factor Z/p^b is the multiple of the
generating hom, an integer modulo p^e with e = min(a, b, t) where t is the
optional mod-p^t reduction.  Coefficients are exactly coordinates in the
hom group A(a, b), which is itself a finite abelian group.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

import numpy as np

from .abgroups import AbGroup, cyclic_hom_order, cyclic_hom_unit, hom_group, parse_group, format_group

Obj = tuple[int, ...]


class GuardError(ValueError):
    """A requested construction does not fit in the truncated skeleton."""


@dataclass(frozen=True)
class SkeletonSpec:
    p: int
    generators: tuple[AbGroup, ...]
    K: int
    mod: int | None = None

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if any(g.p != self.p for g in self.generators):
            raise ValueError("all generators must share the prime p")
        if self.mod is not None and self.mod < 1:
            raise ValueError("mod reduction needs t >= 1")
        if self.mod is None and any(g.free for g in self.generators):
            raise ValueError("free generators give infinite hom sets; set a mod reduction")

    @classmethod
    def from_json(cls, data: dict) -> "SkeletonSpec":
        p = int(data["p"])
        gens = tuple(parse_group(g, p) for g in data["generators"])
        return cls(p, gens, int(data["K"]), data.get("mod"))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "generators": [format_group(g) for g in self.generators],
            "K": self.K,
            "mod": self.mod,
        }


def reduce_mod(spec: SkeletonSpec, t: int) -> SkeletonSpec:
    """The same generators with hom groups divided by p^t (combined with any earlier reduction)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    t = t if spec.mod is None else min(t, spec.mod)
    return SkeletonSpec(spec.p, spec.generators, spec.K, t)


@dataclass(frozen=True)
class Morphism:
    src: Obj
    tgt: Obj
    coeffs: np.ndarray = field(compare=False)

    @cached_property
    def key(self) -> tuple:
        return (self.src, self.tgt, self.coeffs.tobytes())

    def __eq__(self, other):
        return isinstance(other, Morphism) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


class HomSet:
    """The finite group A(a, b) with coordinates = morphism coefficients."""

    def __init__(self, skel: "Skeleton", a: Obj, b: Obj):
        self.skel, self.a, self.b = skel, a, b
        fa, fb = skel.factors(a), skel.factors(b)
        self.slots = []  # (target factor, source factor, exponent)
        for i, y in enumerate(fb):
            for j, x in enumerate(fa):
                e = skel.entry_order(x, y)
                if e > 0:
                    self.slots.append((i, j, e))
        self.caps = tuple(skel.p**e for _, _, e in self.slots)
        self.size = int(np.prod(self.caps, dtype=object)) if self.caps else 1
        self._coords = None
        self._list = None

    @property
    def ngens(self) -> int:
        return len(self.slots)

    def group(self) -> AbGroup:
        return AbGroup(self.skel.p, 0, tuple(e for _, _, e in self.slots))

    def coords(self) -> np.ndarray:
        """All elements as coordinate rows (mixed radix, first slot slowest); read-only."""
        if self._coords is None:
            if not self.caps:
                c = np.zeros((1, 0), dtype=np.int64)
            else:
                grids = np.meshgrid(*[np.arange(c) for c in self.caps], indexing="ij")
                c = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
            c.flags.writeable = False
            self._coords = c
        return self._coords

    def index(self, coords: np.ndarray) -> np.ndarray:
        coords = np.atleast_2d(coords)
        idx = np.zeros(coords.shape[0], dtype=np.int64)
        for c, col in zip(self.caps, coords.T):
            idx = idx * c + np.mod(col, c)
        return idx

    def morphism(self, vec: Sequence[int]) -> Morphism:
        m = np.zeros((len(self.skel.factors(self.b)), len(self.skel.factors(self.a))), dtype=np.int64)
        for (i, j, _), v in zip(self.slots, vec):
            m[i, j] = v
        return self.skel._make(self.a, self.b, m)

    def vector(self, f: Morphism) -> np.ndarray:
        return np.array([f.coeffs[i, j] for i, j, _ in self.slots], dtype=np.int64)

    def __iter__(self):
        if self._list is not None:
            return iter(self._list)
        if self.size <= 1 << 16:
            self._list = [self.morphism(row) for row in self.coords()]
            return iter(self._list)
        return (self.morphism(row) for row in self.coords())

    def __getitem__(self, idx: int) -> Morphism:
        if self._list is not None:
            return self._list[idx]
        return self.morphism(self.coords()[idx])

    def __len__(self) -> int:
        return self.size


class Skeleton:
    """Objects, hom sets and composition of a truncated additive category."""

    def __init__(self, spec: SkeletonSpec):
        self.spec = spec
        self.p = spec.p
        self.K = spec.K
        self.gens = spec.generators
        self._homs: dict = {}
        self._post: dict = {}

    # --- objects -----------------------------------------------------------

    @cached_property
    def objects(self) -> list[Obj]:
        objs = list(itertools.product(range(self.K + 1), repeat=len(self.gens)))
        return sorted(objs, key=lambda o: (sum(o), o))

    @property
    def zero(self) -> Obj:
        return (0,) * len(self.gens)

    def contains(self, a: Obj) -> bool:
        return len(a) == len(self.gens) and all(0 <= m <= self.K for m in a)

    def check(self, a: Obj) -> Obj:
        if not self.contains(a):
            raise GuardError(f"object {a} lies outside the skeleton (K={self.K})")
        return tuple(a)

    def size(self, a: Obj) -> int:
        return sum(a)

    def unit(self, g: int = 0, m: int = 1) -> Obj:
        o = [0] * len(self.gens)
        o[g] = m
        return tuple(o)

    def name(self, a: Obj) -> str:
        if len(self.gens) == 1:
            return f"V{a[0]}"
        return "V(" + ",".join(str(m) for m in a) + ")"

    def parse_object(self, text: str) -> Obj:
        text = text.strip()
        if text.startswith("V(") and text.endswith(")"):
            a = tuple(int(x) for x in text[2:-1].split(","))
        elif text.startswith("V"):
            a = (int(text[1:]),) if len(self.gens) == 1 else None
            if a is None:
                raise ValueError("use V(m1,...,mk) with several generators")
        else:
            raise ValueError(f"cannot parse object {text!r}")
        return self.check(a)

    @lru_cache(maxsize=None)
    def factors(self, a: Obj) -> tuple:
        """Cyclic exponents of the expanded object (None for Z)."""
        out = []
        for g, m in zip(self.gens, a):
            out.extend(list(g.factors) * m)
        return tuple(out)

    @lru_cache(maxsize=None)
    def blocks(self, a: Obj) -> tuple:
        """For each generator, the factor ranges of its copies in a."""
        out = []
        pos = 0
        for g, m in zip(self.gens, a):
            rngs = []
            for _ in range(m):
                rngs.append(range(pos, pos + g.ngens))
                pos += g.ngens
            out.append(tuple(rngs))
        return tuple(out)

    def group(self, a: Obj) -> AbGroup:
        fs = self.factors(a)
        return AbGroup(self.p, sum(1 for x in fs if x is None), tuple(x for x in fs if x is not None))

    # --- hom sets ------------------------------------------------------------

    def entry_order(self, x, y) -> int:
        e = cyclic_hom_order(x, y)
        if e is None:
            e = self.spec.mod
        elif self.spec.mod is not None:
            e = min(e, self.spec.mod)
        return e

    def entry_unit(self, x, y) -> int:
        return cyclic_hom_unit(x, y, self.p)

    def hom(self, a: Obj, b: Obj) -> HomSet:
        key = (a, b)
        if key not in self._homs:
            self._homs[key] = HomSet(self, self.check(a), self.check(b))
        return self._homs[key]

    def hom_count(self, a: Obj, b: Obj) -> int:
        return self.hom(a, b).size

    def _make(self, a: Obj, b: Obj, coeffs: np.ndarray) -> Morphism:
        fa, fb = self.factors(a), self.factors(b)
        c = np.array(coeffs, dtype=np.int64).reshape(len(fb), len(fa))
        for i, y in enumerate(fb):
            for j, x in enumerate(fa):
                e = self.entry_order(x, y)
                c[i, j] = c[i, j] % (self.p**e) if e > 0 else 0
        return Morphism(a, b, c)

    def morphism(self, a: Obj, b: Obj, coeffs) -> Morphism:
        return self._make(self.check(a), self.check(b), coeffs)

    def values(self, f: Morphism) -> np.ndarray:
        """Integer matrix of actual images (coefficient times generating unit)."""
        fa, fb = self.factors(f.src), self.factors(f.tgt)
        u = np.array([[self.entry_unit(x, y) for x in fa] for y in fb], dtype=np.int64).reshape(len(fb), len(fa))
        return f.coeffs * u

    def compose(self, g: Morphism, f: Morphism) -> Morphism:
        """g ∘ f."""
        if f.tgt != g.src:
            raise ValueError("morphisms are not composable")
        fa, fc = self.factors(f.src), self.factors(g.tgt)
        v = self.values(g) @ self.values(f)
        c = np.zeros_like(v)
        for i, y in enumerate(fc):
            for j, x in enumerate(fa):
                e = self.entry_order(x, y)
                if e > 0:
                    u = self.entry_unit(x, y)
                    c[i, j] = (v[i, j] // u) % (self.p**e)
        return Morphism(f.src, g.tgt, c)

    def add(self, f: Morphism, g: Morphism) -> Morphism:
        return self._make(f.src, f.tgt, f.coeffs + g.coeffs)

    def identity(self, a: Obj) -> Morphism:
        n = len(self.factors(a))
        return self._make(a, a, np.eye(n, dtype=np.int64))

    def zero_map(self, a: Obj, b: Obj) -> Morphism:
        return self._make(a, b, np.zeros((len(self.factors(b)), len(self.factors(a))), dtype=np.int64))

    def post_matrix(self, a: Obj, f: Morphism) -> np.ndarray:
        """Integer matrix of h ↦ f∘h from A(a, f.src) to A(a, f.tgt) in slot coordinates."""
        key = (a, f.key)
        cached = self._post.get(key)
        if cached is not None:
            return cached
        src, tgt = self.hom(a, f.src), self.hom(a, f.tgt)
        fa = self.factors(a)
        fb, fc = self.factors(f.src), self.factors(f.tgt)
        vf = self.values(f)
        m = np.zeros((tgt.ngens, src.ngens), dtype=np.int64)
        col_of = {(i, j): n for n, (i, j, _) in enumerate(src.slots)}
        for r, (k, j, e) in enumerate(tgt.slots):
            uk = self.entry_unit(fa[j], fc[k])
            for i in range(len(fb)):
                n = col_of.get((i, j))
                if n is None:
                    continue
                val = int(vf[k, i]) * self.entry_unit(fa[j], fb[i])
                m[r, n] = (val // uk) % (self.p**e)
        if len(self._post) < 200_000:
            self._post[key] = m
        return m

    def pre_matrix(self, g: Morphism, c: Obj) -> np.ndarray:
        """Integer matrix of h ↦ h∘g from A(g.tgt, c) to A(g.src, c) in slot coordinates."""
        src, tgt = self.hom(g.tgt, c), self.hom(g.src, c)
        m = np.zeros((tgt.ngens, src.ngens), dtype=np.int64)
        for s in range(src.ngens):
            e = np.zeros(src.ngens, dtype=np.int64)
            e[s] = 1
            m[:, s] = tgt.vector(self.compose(src.morphism(e), g))
        return m

    def is_iso(self, f: Morphism) -> bool:
        """Invertibility, tested on the reduction mod p (Nakayama)."""
        if f.src != f.tgt:
            return False
        from .linalg import rank

        v = self.values(f) % self.p
        return rank(v, self.p) == v.shape[0]

    @lru_cache(maxsize=None)
    def automorphisms(self, a: Obj) -> tuple:
        return tuple(f for f in self.hom(a, a) if self.is_iso(f))

    # --- direct sums -----------------------------------------------------------

    def sum_objects(self, objs: Sequence[Obj]) -> Obj:
        total = tuple(sum(ms) for ms in zip(*objs)) if objs else self.zero
        if not self.contains(total):
            raise GuardError(f"direct sum {total} exceeds the skeleton bound K={self.K}")
        return total

    def fits(self, objs: Sequence[Obj]) -> bool:
        total = tuple(sum(ms) for ms in zip(*objs)) if objs else self.zero
        return self.contains(total)

    def _placement(self, objs: Sequence[Obj]) -> list[list[int]]:
        """Factor positions in the sum object of each summand's factors."""
        total = self.sum_objects(objs)
        tb = self.blocks(total)
        place = [[] for _ in objs]
        for g in range(len(self.gens)):
            copy = 0
            for s, o in enumerate(objs):
                for _ in range(o[g]):
                    place[s].extend(tb[g][copy])
                    copy += 1
        return place

    def injection(self, objs: Sequence[Obj], s: int) -> Morphism:
        total = self.sum_objects(objs)
        place = self._placement(objs)
        m = np.zeros((len(self.factors(total)), len(self.factors(objs[s]))), dtype=np.int64)
        for j, pos in enumerate(place[s]):
            m[pos, j] = 1
        return self._make(objs[s], total, m)

    def projection(self, objs: Sequence[Obj], s: int) -> Morphism:
        total = self.sum_objects(objs)
        place = self._placement(objs)
        m = np.zeros((len(self.factors(objs[s])), len(self.factors(total))), dtype=np.int64)
        for j, pos in enumerate(place[s]):
            m[j, pos] = 1
        return self._make(total, objs[s], m)

    def collapse(self, objs: Sequence[Obj], s: int) -> Morphism:
        """Endomorphism of the sum that kills summand s and fixes the others."""
        total = self.sum_objects(objs)
        place = self._placement(objs)
        n = len(self.factors(total))
        m = np.eye(n, dtype=np.int64)
        for pos in place[s]:
            m[pos, pos] = 0
        return self._make(total, total, m)

    def fold(self, a: Obj, n: int) -> Morphism:
        """The sum map a^{⊕n} -> a."""
        objs = [a] * n
        total = self.sum_objects(objs)
        place = self._placement(objs)
        m = np.zeros((len(self.factors(a)), len(self.factors(total))), dtype=np.int64)
        for s in range(n):
            for j, pos in enumerate(place[s]):
                m[j, pos] = 1
        return self._make(total, a, m)

    def diagonal(self, a: Obj, n: int) -> Morphism:
        """The map a -> a^{⊕n} with every component the identity."""
        return self.tuple_map_into([self.identity(a)] * n)

    def tuple_map_into(self, maps: Sequence[Morphism]) -> Morphism:
        """The map src -> ⊕ tgt_i with components maps[i]."""
        objs = [f.tgt for f in maps]
        total = self.sum_objects(objs)
        place = self._placement(objs)
        src = maps[0].src
        m = np.zeros((len(self.factors(total)), len(self.factors(src))), dtype=np.int64)
        for f, pl in zip(maps, place):
            for i, pos in enumerate(pl):
                m[pos, :] = f.coeffs[i, :]
        return self._make(src, total, m)

    def permute_summands(self, objs: Sequence[Obj], order: Sequence[int]) -> Morphism:
        """Endomorphism of ⊕objs moving summand s to slot order[s]; needs objs[s] == objs[order[s]]."""
        total = self.sum_objects(objs)
        return self.tuple_map([self.injection(objs, order[s]) for s in range(len(objs))], total)

    def tuple_map(self, maps: Sequence[Morphism], target: Obj) -> Morphism:
        """The map ⊕ src_i -> target restricting to maps[i] on summand i."""
        objs = [f.src for f in maps]
        total = self.sum_objects(objs)
        place = self._placement(objs)
        m = np.zeros((len(self.factors(target)), len(self.factors(total))), dtype=np.int64)
        for f, pl in zip(maps, place):
            for j, pos in enumerate(pl):
                m[:, pos] = f.coeffs[:, j]
        return self._make(total, target, m)

    def direct_sum_map(self, maps: Sequence[Morphism]) -> Morphism:
        """f_1 ⊕ ... ⊕ f_n between the sums of sources and of targets."""
        srcs = [f.src for f in maps]
        tgts = [f.tgt for f in maps]
        S, T = self.sum_objects(srcs), self.sum_objects(tgts)
        ps, pt = self._placement(srcs), self._placement(tgts)
        m = np.zeros((len(self.factors(T)), len(self.factors(S))), dtype=np.int64)
        for f, a, b in zip(maps, ps, pt):
            for i, bi in enumerate(b):
                for j, aj in enumerate(a):
                    m[bi, aj] = f.coeffs[i, j]
        return self._make(S, T, m)

    # --- duality -----------------------------------------------------------------

    @property
    def self_dual(self) -> bool:
        return all(g.is_finite for g in self.gens)

    def transpose(self, f: Morphism) -> Morphism:
        """The Pontryagin dual of f (coefficients transposed); needs finite generators."""
        if not self.self_dual:
            raise GuardError("duality needs finite generators")
        return self._make(f.tgt, f.src, f.coeffs.T)

    # --- enumeration helpers ---------------------------------------------------------

    def all_morphisms(self, limit: int | None = None) -> Iterable[Morphism]:
        for a in self.objects:
            for b in self.objects:
                H = self.hom(a, b)
                if limit is not None and H.size > limit:
                    continue
                yield from H

    def sample_morphisms(self, rng: np.random.Generator, count: int, a: Obj | None = None, b: Obj | None = None) -> list[Morphism]:
        out = []
        for _ in range(count):
            s = a if a is not None else self.objects[rng.integers(len(self.objects))]
            t = b if b is not None else self.objects[rng.integers(len(self.objects))]
            H = self.hom(s, t)
            vec = [int(rng.integers(c)) for c in H.caps]
            out.append(H.morphism(vec))
        return out

    def describe(self) -> dict:
        d = self.spec.to_json()
        d["objects"] = [self.name(o) for o in self.objects]
        return d


def build_skeleton(spec: SkeletonSpec | dict) -> Skeleton:
    if isinstance(spec, dict):
        spec = SkeletonSpec.from_json(spec)
    return Skeleton(spec)


def skeleton(generators: str | Sequence[str], K: int, p: int | None = None, mod: int | None = None) -> Skeleton:
    """Convenience constructor: skeleton("Z/2", 3)."""
    if isinstance(generators, str):
        generators = [generators]
    gens = tuple(parse_group(g, p) for g in generators)
    return Skeleton(SkeletonSpec(gens[0].p, gens, K, mod))


__all__ = [
    "GuardError",
    "HomSet",
    "Morphism",
    "Obj",
    "Skeleton",
    "SkeletonSpec",
    "build_skeleton",
    "reduce_mod",
    "skeleton",
]
