import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from functorlab import linalg
from functorlab.linalg import ChainComplex, ComplexError, Echelon


def _all_vectors(n, p):
    return np.array(list(itertools.product(range(p), repeat=n)), dtype=np.int64).T


def brute_rank(a, p):
    """log_p of the number of distinct vectors in the column span."""
    if a.shape[1] == 0:
        return 0
    span = {tuple(col) for col in ((a @ _all_vectors(a.shape[1], p)) % p).T}
    r = 0
    while p**r < len(span):
        r += 1
    assert p**r == len(span)
    return r


def brute_kernel_size(a, p):
    xs = _all_vectors(a.shape[1], p)
    return int(np.sum(~((a @ xs) % p).any(axis=0)))


matrices = st.tuples(st.sampled_from([2, 3, 5]), st.integers(1, 4), st.integers(1, 5), st.integers(0, 2**32 - 1)).map(
    lambda t: (t[0], np.random.default_rng(t[3]).integers(0, t[0], size=(t[1], t[2])))
)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_rank_matches_span_enumeration(pm):
    p, a = pm
    assert linalg.rank(a, p) == brute_rank(a, p)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_kernel_basis_spans_the_kernel(pm):
    p, a = pm
    k = linalg.kernel_basis(a, p)
    assert not linalg.matmul(a, k, p).any()
    assert linalg.rank(k, p) == k.shape[1]
    assert p ** k.shape[1] == brute_kernel_size(a, p)


@settings(max_examples=40, deadline=None)
@given(matrices)
def test_rref_is_reduced_and_row_equivalent(pm):
    p, a = pm
    r, piv = linalg.rref(a, p)
    assert len(piv) == linalg.rank(a, p)
    for i, c in enumerate(piv):
        assert r[i, c] == 1
        assert np.count_nonzero(r[:, c]) == 1
    assert linalg.same_span(r.T, a.T, p)


@settings(max_examples=40, deadline=None)
@given(matrices, st.integers(0, 2**32 - 1))
def test_solve_returns_a_solution_when_one_exists(pm, seed):
    p, a = pm
    x = np.random.default_rng(seed).integers(0, p, size=(a.shape[1], 2))
    b = linalg.matmul(a, x, p)
    y = linalg.solve(a, b, p)
    assert y is not None
    assert np.array_equal(linalg.matmul(a, y, p), b)


def test_solve_reports_inconsistent_systems():
    a = np.array([[1, 0], [1, 0]])
    assert linalg.solve(a, np.array([[0], [1]]), 2) is None


@pytest.mark.parametrize("p", [2, 3, 7])
def test_matmul_paths_agree_with_exact_integers(p):
    rng = np.random.default_rng(p)
    a = rng.integers(0, p, size=(5, 300))
    b = rng.integers(0, p, size=(300, 4))
    exact = (a.astype(object) @ b.astype(object)) % p
    assert np.array_equal(linalg.matmul(a, b, p), exact.astype(np.int64))


def test_matmul_large_prime_uses_exact_arithmetic():
    p = 2**31 - 1
    a = np.full((2, 3), p - 1)
    b = np.full((3, 1), p - 1)
    assert linalg.matmul(a, b, p)[0, 0] == (3 * (p - 1) ** 2) % p


@pytest.mark.parametrize("p,n", [(2, 70), (2, 9), (3, 12), (5, 6)])
def test_echelon_tracks_rank_and_membership(p, n):
    rng = np.random.default_rng(n)
    ech = Echelon(n, p)
    seen = np.zeros((n, 0), dtype=np.int64)
    for _ in range(8):
        batch = rng.integers(0, p, size=(n, 3))
        batch[:, 2] = (batch[:, 0] + 2 * batch[:, 1]) % p
        gained = ech.add(batch)
        seen = np.hstack([seen, batch])
        assert ech.rank == linalg.rank(seen, p)
        assert gained <= 2
        assert linalg.same_span(ech.basis(), seen, p)
    v = rng.integers(0, p, size=n)
    assert ech.contains(v) == linalg.in_span(seen, v.reshape(-1, 1), p)


def test_complement_and_quotient_coords():
    p = 3
    sub = np.array([[1, 0], [2, 1], [0, 1], [0, 0]])
    comp = linalg.complement_basis(sub, 4, p)
    assert comp.shape[1] == 2
    assert linalg.rank(np.hstack([sub, comp]), p) == 4
    proj, lift = linalg.quotient_coords(sub, 4, p)
    assert not linalg.matmul(proj, sub, p).any()
    assert np.array_equal(linalg.matmul(proj, lift, p), linalg.identity(2))


def test_intersection_dimension():
    p = 2
    a = np.array([[1, 0], [0, 1], [0, 0]])
    b = np.array([[1, 0], [1, 0], [0, 1]])
    assert linalg.intersect(a, b, p).shape[1] == 1


def test_chain_complex_rejects_nonzero_square():
    c = ChainComplex(2, [1, 1, 1], [linalg.zeros(0, 1), np.array([[1]]), np.array([[1]])])
    with pytest.raises(ComplexError):
        c.homology_dims()


def test_chain_complex_homology_of_a_simplex_boundary():
    # boundary of a triangle over F_2: 3 vertices, 3 edges
    d1 = np.array([[1, 0, 1], [1, 1, 0], [0, 1, 1]])
    c = ChainComplex(2, [3, 3], [linalg.zeros(0, 3), d1])
    assert c.homology_dims() == [1, 1]
    assert c.euler_characteristic() == 0


def test_shape_mismatch_is_rejected():
    with pytest.raises(ComplexError):
        ChainComplex(2, [2, 2], [linalg.zeros(0, 2), linalg.zeros(3, 2)])
