import pytest

from functorlab import linalg
from functorlab.category import GuardError, skeleton
from functorlab.doldpuppe import (
    build_dcomplex,
    check_guard,
    dold_report,
    dual_dcomplex,
    h0_subspace,
    max_level,
)
from functorlab.expr import parse_functor
from functorlab.polynomial import p_kernel, q_image


@pytest.fixture(scope="module")
def z2():
    return skeleton("Z/2", 4)


def test_levels_and_guard(z2):
    V1, V2 = z2.unit(), z2.parse_object("V2")
    assert max_level(z2, 1, V1) == 2
    assert max_level(z2, 1, V2) == 1
    assert max_level(z2, 2, V1) == 1
    check_guard(z2, 1, 2, V1)
    with pytest.raises(GuardError):
        check_guard(z2, 2, 2, V1)
    with pytest.raises(GuardError):
        build_dcomplex(parse_functor(z2, "Hom(V1,-)"), 1, 2, V2)


@pytest.mark.parametrize("text", ["kbar[Hom(V1,-)]", "Sym^2(Hom(V1,-))", "Lam^2(Hom(V1,-))", "k[Hom(V1,-)]"])
def test_h0_is_the_polynomial_quotient(z2, text):
    F = parse_functor(z2, text)
    V1 = z2.unit()
    dc = build_dcomplex(F, 1, 2, V1)
    assert dc.simplicial_identities() and dc.split()
    assert linalg.same_span(h0_subspace(dc), q_image(F, 1, V1), 2)
    du = dual_dcomplex(F, 1, 2, V1)
    assert linalg.same_span(du.h0_subspace(), p_kernel(F, 1, V1), 2)


def test_degree_one_functors_have_trivial_higher_terms(z2):
    F = parse_functor(z2, "k + Hom(V1,-)")
    dc = build_dcomplex(F, 1, 2, z2.unit())
    assert dc.dims[1:] == [0, 0]


def test_reduced_group_algebra_terms_frozen(z2):
    dc = build_dcomplex(parse_functor(z2, "kbar[Hom(V1,-)]"), 1, 2, z2.unit())
    assert dc.dims == [1, 1, 7]
    assert dc.homology() == [1, 1]


def test_report_marks_guard_limited_objects(z2):
    rep = dold_report(parse_functor(z2, "Sym^2(Hom(V1,-))"), 2, 2)
    v1 = rep["objects"]["V1"]
    assert v1["guard_limited"] and v1["i_max"] == 1
    assert v1["h0_is_q"] and v1["h0_dual_is_p"]
    assert rep["objects"]["V3"]["i_max"] == 0
