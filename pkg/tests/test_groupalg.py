import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from functorlab import linalg
from functorlab.abgroups import parse_group
from functorlab.groupalg import (
    SMonomialModel,
    algebra_map_matrix,
    caps_of,
    monomial_count,
    monomials,
    passi_check,
    pol_space,
    pol_space_by_differences,
    pol_stationarity_check,
    s_graded_dims,
    truncated_poly_dim,
)

GROUPS = ["Z/2", "Z/4", "Z/8", "Z/3", "Z/9", "Z/2+Z/4", "Z/4+Z/4", "Z/3+Z/9", "Z/2+Z/2+Z/2"]


@pytest.mark.parametrize("text", GROUPS)
def test_filtration_dims_match_monomials(text):
    V = parse_group(text)
    top = sum(c - 1 for c in caps_of(V)) + 2
    dims = s_graded_dims(V, top)
    assert dims == [monomial_count(V, d) for d in range(top + 1)]
    assert sum(dims) == V.order


@pytest.mark.parametrize("text", GROUPS)
def test_passi_map_is_a_basis(text):
    V = parse_group(text)
    for d in range(5):
        assert passi_check(V, d)


@pytest.mark.parametrize("text", ["Z/2", "Z/4", "Z/3", "Z/2+Z/4", "Z/9"])
def test_pol_space_agrees_with_iterated_differences(text):
    V = parse_group(text)
    for d in range(4):
        assert linalg.same_span(pol_space(V, d), pol_space_by_differences(V, d), V.p)


def test_pol_stationarity_frozen_cases():
    V = parse_group("Z/2+Z/8")
    assert pol_stationarity_check(V, 3, 2)
    # Pol_2 on Z/8 sees more than V/2: quadratic x^2 mod 2 is not a function of x mod 2
    assert not pol_stationarity_check(parse_group("Z/8"), 2, 1)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.sampled_from([2, 3, 4, 8, None]), min_size=1, max_size=3), st.integers(0, 9))
def test_generating_function_counts_monomials(caps, d):
    assert truncated_poly_dim(caps, d) == len(monomials(caps, d))


def test_monomial_model_multiplication_respects_caps():
    m = SMonomialModel((4, 2), 2, 2)
    assert m.dim == 2
    assert m.multiply((1, 0), (1, 1)) == (2, 1)
    assert m.multiply((0, 1), (0, 1)) is None


def _hom_matrix(rng, src, tgt):
    return rng.integers(0, 8, size=(len(tgt), len(src)))


@pytest.mark.parametrize("seed", range(5))
def test_algebra_maps_compose(seed):
    # Q^d is a functor: the matrix of a composite is the product of matrices
    rng = np.random.default_rng(seed)
    a, b, c = (4, 2), (8,), (4, 4)
    phi = _hom_matrix(rng, a, b) * np.array([[2, 4]])  # respect orders Z/4+Z/2 -> Z/8
    psi = _hom_matrix(rng, b, c)
    degs = range(4)
    m_phi = algebra_map_matrix(phi, a, b, degs, 2)
    m_psi = algebra_map_matrix(psi, b, c, degs, 2)
    m_comp = algebra_map_matrix(psi @ phi, a, c, degs, 2)
    assert np.array_equal(linalg.matmul(m_psi, m_phi, 2), m_comp)


@pytest.mark.parametrize("n", range(11))
def test_convolution_on_direct_sums(n):
    U, V = parse_group("Z/4"), parse_group("Z/2+Z/8")
    su, sv = s_graded_dims(U, 10), s_graded_dims(V, 10)
    total = s_graded_dims(parse_group("Z/4+Z/2+Z/8"), 10)
    assert total[n] == sum(su[i] * sv[n - i] for i in range(n + 1))
