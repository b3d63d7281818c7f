from math import comb

import numpy as np
import pytest

from functorlab import linalg
from functorlab.category import skeleton
from functorlab.expr import parse_functor
from functorlab.functors import (
    AdditiveTensor,
    Dual,
    GradedPiece,
    HomLinearization,
    NatTransform,
    TruncatedGroupAlgebra,
    cokernel_of,
    frobenius_norm_verschiebung,
    image_of,
    is_exact_at,
    kernel_of,
    natural_transformations,
    yoneda_hom,
)
from functorlab.groupalg import s_graded_dims

EXPRS = [
    "k",
    "Hom(V1,-)",
    "k[Hom(V1,-)]",
    "kbar[Hom(V1,-)]",
    "Sym^2(Hom(V1,-))",
    "Gam^2(Hom(V1,-))",
    "Lam^2(Hom(V1,-))",
    "Hom(V1,-) * Hom(V1,-)",
    "k + Hom(V1,-)",
    "D(Sym^2(Hom(V1,-)))",
    "S^2 . Hom(V1,-)",
    "Q^2 . Hom(V1,-)",
]


@pytest.fixture(scope="module")
def z2():
    return skeleton("Z/2", 3)


@pytest.fixture(scope="module")
def z4():
    return skeleton("Z/4", 2)


@pytest.mark.parametrize("text", EXPRS)
def test_functoriality_on_sampled_pairs(z2, text):
    F = parse_functor(z2, text)
    rng = np.random.default_rng(len(text))
    objs = z2.objects
    for _ in range(25):
        a, b, c = (objs[i] for i in rng.integers(0, len(objs), 3))
        f = z2.sample_morphisms(rng, 1, a, b)[0]
        g = z2.sample_morphisms(rng, 1, b, c)[0]
        assert np.array_equal(F.act(z2.compose(g, f)), linalg.matmul(F.act(g), F.act(f), 2))
    for a in objs:
        assert np.array_equal(F.act(z2.identity(a)), linalg.identity(F.dim(a)))


@pytest.mark.parametrize("text", ["Hom(V1,-)", "Sym^2(Hom(V1,-))", "k[Hom(V1,-)]", "Q^1 . Hom(V1,-)"])
def test_apply_agrees_with_act(z4, text):
    F = parse_functor(z4, text)
    rng = np.random.default_rng(0)
    for f in z4.sample_morphisms(rng, 10):
        x = rng.integers(0, 2, size=(F.dim(f.src), 3))
        assert np.array_equal(F.apply(f, x), linalg.matmul(F.act(f), x, 2))


def test_dimension_formulas(z2):
    I = AdditiveTensor(z2, z2.unit())
    for n, a in enumerate(z2.objects):
        assert parse_functor(z2, "Sym^2(Hom(V1,-))").dim(a) == comb(n + 1, 2)
        assert parse_functor(z2, "Gam^3(Hom(V1,-))").dim(a) == comb(n + 2, 3)
        assert parse_functor(z2, "Lam^2(Hom(V1,-))").dim(a) == comb(n, 2)
        assert parse_functor(z2, "Hom(V1,-) * Hom(V1,-) + k").dim(a) == n * n + 1
        assert I.dim(a) == n


def test_group_algebra_quotients_match_filtration(z4):
    a = z4.parse_object("V1")
    for b in z4.objects:
        grp = z4.hom(a, b).group()
        dims = s_graded_dims(grp, 3)
        for d in range(4):
            assert TruncatedGroupAlgebra(z4, a, d).dim(b) == sum(dims[: d + 1])
            assert GradedPiece(z4, a, d).dim(b) == dims[d]


def test_double_dual_is_the_functor(z4):
    F = parse_functor(z4, "Sym^2(Hom(V1,-)) + Hom(V2,-)")
    DD = Dual(Dual(F))
    rng = np.random.default_rng(5)
    for f in z4.sample_morphisms(rng, 15):
        assert np.array_equal(DD.act(f), F.act(f))


def test_yoneda_bijection(z2):
    a = z2.parse_object("V2")
    P = HomLinearization(z2, a)
    G = parse_functor(z2, "Sym^2(Hom(V1,-))")
    dim, make = yoneda_hom(P, G)
    assert dim == G.dim(a) == len(natural_transformations(P, G))
    rng = np.random.default_rng(0)
    t = make(rng.integers(0, 2, size=dim))
    assert t.is_natural()


@pytest.mark.parametrize(
    "f,g,want",
    [
        ("Hom(V1,-)", "Hom(V1,-)", 1),
        ("Hom(V1,-)", "Sym^2(Hom(V1,-))", 1),  # Frobenius
        ("Sym^2(Hom(V1,-))", "Hom(V1,-)", 0),
        ("Gam^2(Hom(V1,-))", "Hom(V1,-)", 1),  # Verschiebung
        ("Sym^2(Hom(V1,-))", "Gam^2(Hom(V1,-))", 1),  # norm
        ("k + Hom(V1,-)", "k + Hom(V1,-)", 2),
    ],
)
def test_hom_dims_frozen(z2, f, g, want):
    assert len(natural_transformations(parse_functor(z2, f), parse_functor(z2, g))) == want


def test_kernel_image_cokernel(z2):
    fnv = frobenius_norm_verschiebung(z2)
    norm = fnv["norm"]
    K, Im, C = kernel_of(norm), image_of(norm), cokernel_of(norm)
    for a in z2.objects:
        S = fnv["S"].dim(a)
        assert K.dim(a) + Im.dim(a) == S
        assert C.dim(a) == fnv["Gamma"].dim(a) - Im.dim(a)


def test_frobenius_norm_verschiebung_sequence(z2):
    fnv = frobenius_norm_verschiebung(z2)
    fr, nm, vs = fnv["frobenius"], fnv["norm"], fnv["verschiebung"]
    for t in (fr, nm, vs):
        assert t.is_natural()
    assert nm.compose(fr).is_zero() and vs.compose(nm).is_zero()
    for a in z2.objects:
        assert is_exact_at(fr, nm, a) and is_exact_at(nm, vs, a)
        assert linalg.rank(fr.at(a), 2) == fnv["I"].dim(a)
        assert linalg.rank(vs.at(a), 2) == fnv["I"].dim(a)


def test_bad_component_shape(z2):
    I = AdditiveTensor(z2, z2.unit())
    t = NatTransform(I, I, lambda a: linalg.zeros(1, 1))
    with pytest.raises(AssertionError):
        t.at(z2.parse_object("V2"))
