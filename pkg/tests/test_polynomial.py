import numpy as np
import pytest

from functorlab import linalg
from functorlab.category import GuardError, skeleton
from functorlab.expr import parse_functor
from functorlab.functors import GradedPiece, HomLinearization
from functorlab.polynomial import (
    _span_accumulate,
    admissible_tuples,
    cross_effect,
    cross_effect_dim,
    cross_effect_idempotent,
    graded_piece_dims,
    p_kernel,
    p_trunc,
    poly_degree,
    q_image,
    q_trunc,
    vanishes_in_degree,
)


def q_brute(F, d, a):
    """Span of F(f)(cr_{d+1}) over every admissible tuple and every map out of its sum."""
    S = F.skel

    def gen():
        for t in admissible_tuples(S, d + 1):
            c = cross_effect(F, t)
            tot = S.sum_objects(list(t))
            for f in S.hom(tot, a):
                yield linalg.matmul(F.act(f), c, F.p)

    return _span_accumulate(gen(), F.dim(a), F.p)


def p_brute(F, d, a):
    """Vectors killed by every map into a sum followed by the top cross-effect projector."""
    S = F.skel
    rows = []
    for t in admissible_tuples(S, d + 1):
        tot, e = cross_effect_idempotent(F, t)
        for f in S.hom(a, tot):
            rows.append(linalg.matmul(e, F.act(f), F.p))
    return linalg.kernel_basis(np.vstack(rows), F.p)


CASES = [("Z/2", 3), ("Z/4", 2), ("Z/3", 2), ("Z/2+Z/4", 1)]
FUNCTORS = ["k[Hom(V1,-)]", "Lam^2(Hom(V1,-))", "Sym^2(Hom(V1,-))", "Gam^2(Hom(V1,-))"]


@pytest.mark.parametrize("gens,K", CASES)
@pytest.mark.parametrize("text", FUNCTORS)
def test_truncations_match_their_definitions(gens, K, text):
    S = skeleton(gens.split("+"), K) if "+" in gens else skeleton(gens, K)
    F = parse_functor(S, text.replace("V1", S.name(S.unit())))
    for d in range(3):
        if not admissible_tuples(S, d + 1):
            continue
        for a in S.objects:
            if F.dim(a) > 200:
                continue
            assert linalg.same_span(q_image(F, d, a), q_brute(F, d, a), F.p)
            assert linalg.same_span(p_kernel(F, d, a), p_brute(F, d, a), F.p)


@pytest.mark.parametrize(
    "text,degree",
    [("k", 0), ("Hom(V1,-)", 1), ("Sym^2(Hom(V1,-))", 2), ("Lam^2(Hom(V1,-))", 2), ("Gam^2(Hom(V1,-))", 2),
     ("Hom(V1,-) * Hom(V1,-)", 2), ("Q^1 . Hom(V1,-)", 1), ("S^2 . Hom(V1,-)", 2), ("k + Hom(V2,-)", 1)],
)
def test_degrees_frozen(text, degree):
    S = skeleton("Z/2", 3)
    rep = poly_degree(parse_functor(S, text), 2)
    assert rep.degree == degree
    assert not rep.guard_exceeded


def test_group_algebra_exceeds_every_testable_degree():
    S = skeleton("Z/2", 3)
    rep = poly_degree(parse_functor(S, "kbar[Hom(V1,-)]"), 2)
    assert rep.degree is None and rep.exceeds
    rep = poly_degree(parse_functor(S, "kbar[Hom(V1,-)]"), 5)
    assert rep.guard_exceeded


def test_cross_effects_of_additive_functors_vanish():
    S = skeleton("Z/2", 3)
    I = parse_functor(S, "Hom(V1,-)")
    V1 = S.unit()
    assert cross_effect_dim(I, (V1,)) == 1
    assert cross_effect_dim(I, (V1, V1)) == 0
    assert cross_effect_dim(parse_functor(S, "Sym^2(Hom(V1,-))"), (V1, V1)) == 1


def test_guard_is_reported():
    S = skeleton("Z/2", 2)
    F = parse_functor(S, "Sym^2(Hom(V1,-))")
    with pytest.raises(GuardError):
        vanishes_in_degree(F, 2)
    with pytest.raises(GuardError):
        q_trunc(F, 2)
    with pytest.raises(GuardError):
        p_trunc(F, 2)


def test_truncations_are_idempotent_on_low_degree_functors():
    S = skeleton("Z/2", 3)
    F = parse_functor(S, "Sym^2(Hom(V1,-)) + Hom(V1,-)")
    Q, P = q_trunc(F, 2).functor, p_trunc(F, 2).functor
    for a in S.objects:
        assert Q.dim(a) == F.dim(a) == P.dim(a)
    q1 = q_trunc(F, 1).functor
    ok, _ = vanishes_in_degree(q1, 1)
    assert ok


@pytest.mark.parametrize("gens,K,dmax", [("Z/2", 3, 2), ("Z/4", 2, 1)])
def test_graded_pieces_of_projectives(gens, K, dmax):
    S = skeleton(gens, K)
    for a in S.objects[1:]:
        P = HomLinearization(S, a)
        for d in range(dmax + 1):
            want = {b: GradedPiece(S, a, d).dim(b) for b in S.objects}
            assert graded_piece_dims(P, d) == want
