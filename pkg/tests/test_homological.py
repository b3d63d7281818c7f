import numpy as np
import pytest

from functorlab import linalg
from functorlab.category import GuardError, skeleton
from functorlab.expr import parse_functor
from functorlab.functors import Dual, HomLinearization, NatTransform, natural_transformations
from functorlab.homological import (
    Resolution,
    comparison,
    derived_pd,
    derived_pd_report,
    excl_class_check,
    excl_dims,
    ext,
    ext_sweep,
    exploratory_mod_sweep,
    is_coboundary,
    projective,
)


@pytest.fixture(scope="module")
def z2():
    return skeleton("Z/2", 3)


@pytest.fixture(scope="module")
def res_I(z2):
    return Resolution(parse_functor(z2, "Hom(V1,-)"), 3)


def test_resolution_is_exact(res_I):
    assert res_I.check()
    assert res_I.mode == "full"


def test_length_must_be_positive(z2):
    with pytest.raises(ValueError):
        Resolution(parse_functor(z2, "k"), 0)


def test_poly_mode_needs_low_degree(z2):
    with pytest.raises(GuardError):
        Resolution(parse_functor(z2, "Sym^2(Hom(V1,-))"), 2, d=1)


def test_poly_resolution_terms_have_low_degree(z2):
    from functorlab.polynomial import vanishes_in_degree

    res = Resolution(parse_functor(z2, "Hom(V1,-)"), 2, d=1)
    assert res.check()
    for st in res.stages:
        assert vanishes_in_degree(st.term, 1)[0]


@pytest.mark.parametrize("a", ["V1", "V2"])
@pytest.mark.parametrize("g", ["Sym^2(Hom(V1,-))", "k + Hom(V1,-)", "Lam^2(Hom(V1,-))"])
def test_projectives_have_no_higher_ext(z2, a, g):
    obj = z2.parse_object(a)
    P = HomLinearization(z2, obj)
    G = parse_functor(z2, g)
    dims = ext(P, G, 2).dims
    assert dims == [G.dim(obj), 0, 0]


def test_constant_functor_is_projective_at_zero():
    S = skeleton("Z/2", 2)
    k = parse_functor(S, "k")
    res = Resolution(k, 1)
    assert res.term_dims()[1] == {"V0": 0, "V1": 0, "V2": 0}


@pytest.mark.parametrize(
    "f,g",
    [("Hom(V1,-)", "Sym^2(Hom(V1,-))"), ("Gam^2(Hom(V1,-))", "Hom(V1,-)"), ("k + Hom(V1,-)", "Hom(V1,-) * Hom(V1,-)"),
     ("Lam^2(Hom(V1,-))", "Hom(V1,-) * Hom(V1,-)")],
)
def test_degree_zero_equals_naturality_solutions(z2, f, g):
    F, G = parse_functor(z2, f), parse_functor(z2, g)
    assert ext(F, G, 1).dims[0] == len(natural_transformations(F, G))


def test_ext_of_identity_frozen(z2, res_I):
    I = parse_functor(z2, "Hom(V1,-)")
    assert ext(I, I, 2, res=res_I).dims == [1, 0, 1]
    assert ext(I, I, 2, d=1).dims == [1, 0, 0]
    assert ext(I, I, 2, d=2).dims == [1, 0, 1]
    assert excl_dims(2, [2]) == {2: [1, 0, 1]}


@pytest.mark.parametrize("g", ["Hom(V1,-)", "Gam^2(Hom(V1,-))", "Lam^2(Hom(V1,-))", "Sym^2(Hom(V1,-))"])
def test_duality_swaps_arguments(z2, g):
    I = parse_functor(z2, "Hom(V1,-)")
    G = parse_functor(z2, g)
    assert ext(G, I, 1).dims == ext(Dual(I), Dual(G), 1).dims


def test_comparison_with_two_lifts(z2):
    I = parse_functor(z2, "Hom(V1,-)")
    cm = comparison(I, I, 1, 2, check_lifts=True)
    assert cm.iso[:2] == [True, True] and cm.mono[2]
    assert cm.dims_poly == [1, 0, 0] and cm.dims_full == [1, 0, 1]
    assert cm.lifts_agree
    assert cm.iso_upto == 1 and cm.mono_at == [0, 1, 2]


def test_comparison_rejects_high_degree_targets(z2):
    I = parse_functor(z2, "Hom(V1,-)")
    with pytest.raises(GuardError):
        comparison(I, parse_functor(z2, "Sym^2(Hom(V1,-))"), 1, 1)


def test_derived_pd_of_the_group_algebra(z2):
    rep = derived_pd_report(parse_functor(z2, "k[Hom(V1,-)]"), 1, 1)
    assert rep["R0_matches_p_d"]
    assert rep["R"] == {"V0": [1, 0], "V1": [1, 0], "V2": [1, 0], "V3": [1, 0]}


def test_derived_pd_on_a_degree_two_functor(z2):
    R = derived_pd(parse_functor(z2, "Lam^2(Hom(V1,-))"), 2, 1)
    assert all(v[1] == 0 for v in R.values())


def test_excl_class(z2):
    rep = excl_class_check(2, 3)
    assert rep["sequence_exact"] and rep["is_cocycle"]
    assert rep["class_nonzero_full"] and rep["poly_class_nonzero"]
    assert rep["ext2_poly_below_p"] == {"1": 0}
    assert rep["class_in_image_from_poly"] and rep["split_class_zero"]
    with pytest.raises(GuardError):
        excl_class_check(2, 2)


def test_zero_cochain_is_a_coboundary(res_I, z2):
    I = parse_functor(z2, "Hom(V1,-)")
    n = res_I.cochain_dim(1, I)
    assert is_coboundary(res_I, I, 1, np.zeros(n, dtype=np.int64))


def test_sweeps():
    out = ext_sweep(lambda K: (parse_functor(skeleton("Z/2", K), "Hom(V1,-)"),) * 2, [1, 2], 1)
    assert out == {1: [1, 0], 2: [1, 0]}
    S = skeleton("Z/4", 1)
    probe = exploratory_mod_sweep(S.spec, lambda s: (parse_functor(s, "Hom(V1,-)"),) * 2, [1, 2], 1)
    assert probe[1][0] == 1 and probe[2][0] == 1


def test_projective_helper_caches(z2):
    a = z2.parse_object("V2")
    assert projective(z2, a) is projective(z2, a)
    assert projective(z2, a, 1).dim(a) == 1 + 4  # F_2 plus the four hom coordinates
