"""The group algebra F_p[V] of a finite p-group V and its augmentation filtration.

Two independent descriptions are provided.  The first works in the basis of
group elements: powers I^d of the augmentation ideal are computed by
elimination and Pol_d(V, F_p) is obtained as their annihilator or, separately,
through iterated finite differences.  The second is the truncated polynomial
model F_p[x_1..x_k]/(x_j^{p^{r_j}}), where x_j = [g_j] - [0]; it gives bases of
Q^d = F_p[V]/I^{d+1} and of the graded pieces S^d = I^d/I^{d+1} by monomials,
and it is what the functor layer uses.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from . import linalg
from .abgroups import AbGroup, AbHom, quotient_mod


def _require_finite(V: AbGroup) -> None:
    if not V.is_finite:
        raise ValueError("the group algebra needs a finite group")


def translation_matrix(V: AbGroup, g: np.ndarray) -> np.ndarray:
    """Matrix of multiplication by [g] in the element basis."""
    elems = V.elements()
    tgt = V.index_of(elems + np.asarray(g))
    n = len(elems)
    m = linalg.zeros(n, n)
    m[tgt, np.arange(n)] = 1
    return m


def generator_differences(V: AbGroup) -> list[np.ndarray]:
    """Matrices of multiplication by [g_j] - [0] for each generator g_j."""
    _require_finite(V)
    n = V.order
    mats = []
    for j in range(V.ngens):
        g = np.zeros(V.ngens, dtype=np.int64)
        g[j] = 1
        mats.append((translation_matrix(V, g) - np.eye(n, dtype=np.int64)) % V.p)
    return mats


def augmentation_powers(V: AbGroup, dmax: int) -> list[np.ndarray]:
    """Column bases of I^0, ..., I^dmax inside F_p[V].

    I^d is spanned by I^{d-1}·([g_j] - [0]) over generators g_j, since I is the
    ideal generated by those differences.
    """
    _require_finite(V)
    p = V.p
    levels = [linalg.identity(V.order)]
    diffs = generator_differences(V)
    for _ in range(dmax):
        prev = levels[-1]
        if prev.shape[1] == 0 or not diffs:
            levels.append(linalg.zeros(V.order, 0))
            continue
        span = np.hstack([linalg.matmul(x, prev, p) for x in diffs])
        levels.append(linalg.column_basis(span, p))
    return levels


def augmentation_power(V: AbGroup, d: int) -> np.ndarray:
    return augmentation_powers(V, d)[d]


def s_graded_dims(V: AbGroup, dmax: int) -> list[int]:
    """dim I^d/I^{d+1} for d = 0..dmax, by elimination."""
    levels = augmentation_powers(V, dmax + 1)
    return [levels[d].shape[1] - levels[d + 1].shape[1] for d in range(dmax + 1)]


def s_graded_dim(V: AbGroup, d: int) -> int:
    return s_graded_dims(V, d)[d]


def caps_of(V: AbGroup) -> tuple[int | None, ...]:
    """Nilpotency caps p^r of the monomial generators (None when free)."""
    return tuple(None if r is None else V.p**r for r in V.factors)


def monomials(caps: Sequence[int | None], d: int) -> list[tuple[int, ...]]:
    """Exponent vectors e with e_j < caps_j and sum d, in lexicographic order."""
    k = len(caps)
    if k == 0:
        return [()] if d == 0 else []
    out = []

    def rec(j, left, acc):
        if j == k - 1:
            cap = caps[j]
            if cap is None or left < cap:
                out.append(tuple(acc + [left]))
            return
        cap = caps[j]
        top = left if cap is None else min(left, cap - 1)
        for e in range(top, -1, -1):
            rec(j + 1, left - e, acc + [e])

    rec(0, d, [])
    return out


def monomial_count(V: AbGroup, d: int) -> int:
    return len(monomials(caps_of(V), d))


def truncated_poly_dim(caps: Sequence[int | None], d: int) -> int:
    """Monomial count via the generating function prod (1 - t^c)/(1 - t)."""
    coeffs = [1] + [0] * d
    for cap in caps:
        new = [0] * (d + 1)
        for i, c in enumerate(coeffs):
            if not c:
                continue
            top = d - i if cap is None else min(d - i, cap - 1)
            for e in range(top + 1):
                new[i + e] += c
        coeffs = new
    return coeffs[d]


class SMonomialModel:
    """Monomial basis of the truncated symmetric algebra in one degree."""

    def __init__(self, caps: Sequence[int | None], d: int, p: int):
        self.caps = tuple(caps)
        self.d = d
        self.p = p
        self.basis = monomials(self.caps, d)
        self.index = {m: i for i, m in enumerate(self.basis)}

    @classmethod
    def of_group(cls, V: AbGroup, d: int) -> "SMonomialModel":
        return cls(caps_of(V), d, V.p)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def multiply(self, a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...] | None:
        """Exponent sum of two monomials, or None once a cap is reached."""
        c = tuple(x + y for x, y in zip(a, b))
        for e, cap in zip(c, self.caps):
            if cap is not None and e >= cap:
                return None
        return c


def monomial_element(V: AbGroup, alpha: Sequence[int]) -> np.ndarray:
    """The vector of prod_j ([g_j] - [0])^alpha_j in the element basis."""
    p = V.p
    v = linalg.zeros(V.order, 1)
    v[0, 0] = 1
    for x, e in zip(generator_differences(V), alpha):
        for _ in range(e):
            v = linalg.matmul(x, v, p)
    return v


def passi_check(V: AbGroup, d: int) -> bool:
    """Monomials of degree d map to a basis of I^d/I^{d+1}.

    The map sends x_j to the class of [g_j] - [0] and is multiplicative by
    construction; this checks that the images lie in I^d and are independent
    modulo I^{d+1} and that their number equals dim I^d/I^{d+1}.
    """
    p = V.p
    levels = augmentation_powers(V, d + 1)
    mons = monomials(caps_of(V), d)
    if not mons:
        return levels[d].shape[1] == levels[d + 1].shape[1]
    imgs = np.hstack([monomial_element(V, a) for a in mons])
    if linalg.rank(np.hstack([levels[d], imgs]), p) != levels[d].shape[1]:
        return False
    below = levels[d + 1]
    r = linalg.rank(np.hstack([below, imgs]), p) - below.shape[1]
    return r == len(mons) == levels[d].shape[1] - below.shape[1]


def pol_space(V: AbGroup, d: int) -> np.ndarray:
    """Pol_d(V, F_p) as columns of value vectors: the annihilator of I^{d+1}."""
    top = augmentation_power(V, d + 1)
    if top.shape[1] == 0:
        return linalg.identity(V.order)
    return linalg.kernel_basis(top.T, V.p)


def pol_space_by_differences(V: AbGroup, d: int) -> np.ndarray:
    """Pol_d(V, F_p) as the functions all of whose (d+1)-fold differences vanish.

    Built recursively: f is in Pol_d iff f(- + h) - f lies in Pol_{d-1} for every
    element h, with Pol_{-1} = 0.
    """
    _require_finite(V)
    p, n = V.p, V.order
    elems = V.elements()
    shifts = [translation_matrix(V, h).T for h in elems]
    current = linalg.zeros(n, 0)
    for _ in range(d + 1):
        proj, _ = linalg.quotient_coords(current, n, p)
        if proj.shape[0] == 0:
            return linalg.identity(n)
        eqs = np.vstack([linalg.matmul(proj, (s - np.eye(n, dtype=np.int64)) % p, p) for s in shifts])
        current = linalg.kernel_basis(eqs, p)
    return current


def pullback(f_values: np.ndarray, proj: AbHom) -> np.ndarray:
    """Precompose functions on proj.target (columns) with proj."""
    src = proj.source
    idx = proj.target.index_of(proj.apply(src.elements()))
    return f_values[idx]


def pol_stationarity_check(V: AbGroup, d: int, i: int) -> bool:
    """Whether Pol_d(V/p^i) pulled back along V -> V/p^i equals Pol_d(V)."""
    Q, proj = quotient_mod(V, i)
    pulled = pullback(pol_space(Q, d), proj)
    return linalg.same_span(pulled, pol_space(V, d), V.p)


# --- truncated polynomial algebra maps -------------------------------------


def _poly_mul(a: dict, b: dict, caps, dmax: int, p: int) -> dict:
    out: dict = {}
    for ea, ca in a.items():
        da = sum(ea)
        for eb, cb in b.items():
            if da + sum(eb) > dmax:
                continue
            e = tuple(x + y for x, y in zip(ea, eb))
            if any(c is not None and x >= c for x, c in zip(e, caps)):
                continue
            out[e] = (out.get(e, 0) + ca * cb) % p
    return {e: c for e, c in out.items() if c}


@lru_cache(maxsize=None)
def _binom_series(m: int, j: int, k: int, caps: tuple, dmax: int, p: int) -> tuple:
    """(1 + y_j)^m truncated, as a tuple of (exponent, coefficient) pairs."""
    cap = caps[j]
    top = dmax if cap is None else min(dmax, cap - 1)
    items = []
    for e in range(top + 1):
        c = comb(m, e) % p
        if c:
            exp = [0] * k
            exp[j] = e
            items.append((tuple(exp), c))
    return tuple(items)


def algebra_map_images(
    phi: np.ndarray, tgt_caps: Sequence[int | None], dmax: int, p: int
) -> list[dict]:
    """Images of x_i = [g_i] - 1 under the algebra map induced by a group hom.

    ``phi`` has entry (j, i) equal to the coefficient of target generator j in
    the image of source generator i.  Terms above degree dmax are dropped.
    """
    caps = tuple(tgt_caps)
    k = len(caps)
    imgs = []
    for i in range(phi.shape[1]):
        acc = {(0,) * k: 1}
        for j in range(k):
            m = int(phi[j, i])
            if caps[j] is not None:
                m %= caps[j]
            if m == 0:
                continue
            acc = _poly_mul(acc, dict(_binom_series(m, j, k, caps, dmax, p)), caps, dmax, p)
        acc[(0,) * k] = (acc.get((0,) * k, 0) - 1) % p
        imgs.append({e: c for e, c in acc.items() if c})
    return imgs


def algebra_map_matrix(
    phi: np.ndarray,
    src_caps: Sequence[int | None],
    tgt_caps: Sequence[int | None],
    degrees: Sequence[int],
    p: int,
) -> np.ndarray:
    """Matrix of the induced map on monomials whose degree lies in ``degrees``.

    Rows and columns follow ``monomials`` degree by degree.  Components of an
    image in other degrees are discarded, so ``degrees = range(d + 1)`` gives
    Q^d and ``degrees = [d]`` gives S^d.
    """
    degrees = list(degrees)
    dmax = max(degrees) if degrees else 0
    src = [m for d in degrees for m in monomials(src_caps, d)]
    tgt = [m for d in degrees for m in monomials(tgt_caps, d)]
    row = {m: i for i, m in enumerate(tgt)}
    out = linalg.zeros(len(tgt), len(src))
    if not src or not tgt:
        return out
    imgs = algebra_map_images(phi, tgt_caps, dmax, p)
    k = len(tgt_caps)
    powers: dict = {}
    for col, alpha in enumerate(src):
        poly = {(0,) * k: 1}
        for i, e in enumerate(alpha):
            if e == 0:
                continue
            key = (i, e)
            if key not in powers:
                acc = {(0,) * k: 1}
                for _ in range(e):
                    acc = _poly_mul(acc, imgs[i], tgt_caps, dmax, p)
                powers[key] = acc
            poly = _poly_mul(poly, powers[key], tgt_caps, dmax, p)
        for exp, c in poly.items():
            r = row.get(exp)
            if r is not None:
                out[r, col] = c
    return out


__all__ = [
    "SMonomialModel",
    "algebra_map_images",
    "algebra_map_matrix",
    "augmentation_power",
    "augmentation_powers",
    "caps_of",
    "generator_differences",
    "monomial_count",
    "monomial_element",
    "monomials",
    "passi_check",
    "pol_space",
    "pol_space_by_differences",
    "pol_stationarity_check",
    "pullback",
    "s_graded_dim",
    "s_graded_dims",
    "translation_matrix",
    "truncated_poly_dim",
]
