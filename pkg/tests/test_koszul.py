from math import comb

import pytest

from functorlab.abgroups import parse_group
from functorlab.groupalg import monomial_count
from functorlab.koszul import (
    build_koszul,
    classical_koszul,
    classical_koszul_and_dual,
    exponential_iso,
    homology_table,
    kunneth_prediction,
    verify_vanishing,
    wedge_dim,
)

TORSION = ["Z/2", "Z/4", "Z/3", "Z/9", "Z/2+Z/4", "Z/4+Z/4", "Z/3+Z/9"]


@pytest.mark.parametrize("text", TORSION)
def test_term_dims_and_euler_characteristic(text):
    V = parse_group(text)
    k = V.ngens
    for n in range(7):
        K = build_koszul(V, n)
        want = [monomial_count(V, n - i) * comb(k, i) for i in range(n + 1)]
        assert K.dims == want
        h = K.homology()
        assert sum((-1) ** i * x for i, x in enumerate(h)) == K.complex.euler_characteristic()


@pytest.mark.parametrize("text", TORSION)
def test_vanishing_above_the_bound(text):
    rep = verify_vanishing(parse_group(text), 10)
    assert rep.ok, rep.violations


@pytest.mark.parametrize("q", [2, 4, 8, 3, 9])
def test_cyclic_homology_frozen(q):
    # for Z/q the only classes are H_0(0) and H_1(q), each one-dimensional
    table = homology_table(parse_group(f"Z/{q}"), q + 2)
    nonzero = {key: v for key, v in table.items() if v}
    assert nonzero == {(0, 0): 1, (q, 1): 1}


def test_free_group_rejected_by_vanishing_check():
    with pytest.raises(ValueError):
        verify_vanishing(parse_group("Z", 2), 3)


@pytest.mark.parametrize("u,v", [("Z/2", "Z/4"), ("Z/3", "Z/3"), ("Z/2+Z/2", "Z/8")])
def test_exponential_isomorphism(u, v):
    U, V = parse_group(u), parse_group(v)
    for n in range(6):
        iso = exponential_iso(U, V, n)
        assert iso.commutes and iso.invertible
        assert iso.source.homology() == kunneth_prediction(U, V, n)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("m", [1, 2, 3, 4])
def test_classical_sequence_and_dual_are_exact(p, m):
    for n in range(1, 5):
        k, dk = classical_koszul_and_dual(m, n, p)
        assert not any(k.homology_dims())
        assert not any(dk.homology_dims())
        assert k.dims == list(reversed(dk.dims))


def test_classical_degree_zero_is_the_ground_field():
    assert classical_koszul(3, 0, 2).homology() == [1]


def test_wedge_dims():
    assert [wedge_dim(4, i) for i in range(5)] == [1, 4, 6, 4, 1]
