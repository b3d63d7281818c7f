import numpy as np
import pytest

from functorlab.abgroups import hom_count
from functorlab.category import GuardError, SkeletonSpec, build_skeleton, reduce_mod, skeleton
from functorlab.functors import HomLinearization


@pytest.fixture(scope="module")
def z2():
    return skeleton("Z/2", 3)


@pytest.fixture(scope="module")
def mixed():
    return skeleton(["Z/2", "Z/4"], 1)


def test_object_lists(z2, mixed):
    assert [z2.name(a) for a in z2.objects] == ["V0", "V1", "V2", "V3"]
    assert len(mixed.objects) == 4  # multiplicities bounded by K=1 per generator
    assert z2.parse_object("V2") == z2.objects[2]


def test_spec_round_trip(mixed):
    spec = mixed.spec
    assert SkeletonSpec.from_json(spec.to_json()) == spec
    assert build_skeleton(spec.to_json()).objects == mixed.objects


def test_spec_validation():
    with pytest.raises(ValueError):
        skeleton("Z/2", 0)
    with pytest.raises(ValueError):
        skeleton("Z", 2, p=2)  # free generators need a mod reduction
    assert reduce_mod(skeleton("Z/8", 1).spec, 1).mod == 1


@pytest.mark.parametrize("which", ["z2", "mixed"])
def test_hom_sets_have_the_group_order(which, request):
    S = request.getfixturevalue(which)
    for a in S.objects:
        for b in S.objects:
            assert S.hom_count(a, b) == hom_count(S.group(a), S.group(b))


def test_composition_is_associative_and_unital(mixed):
    rng = np.random.default_rng(1)
    objs = mixed.objects
    for _ in range(30):
        a, b, c, d = (objs[i] for i in rng.integers(0, len(objs), 4))
        f = mixed.sample_morphisms(rng, 1, a, b)[0]
        g = mixed.sample_morphisms(rng, 1, b, c)[0]
        h = mixed.sample_morphisms(rng, 1, c, d)[0]
        assert mixed.compose(h, mixed.compose(g, f)) == mixed.compose(mixed.compose(h, g), f)
        assert mixed.compose(mixed.identity(b), f) == f
        assert mixed.compose(f, mixed.identity(a)) == f


def test_composition_matches_maps_of_elements(mixed):
    # P_a(f) permutes basis vectors; composing first must give the same permutation
    rng = np.random.default_rng(2)
    a = mixed.objects[-1]
    P = HomLinearization(mixed, a)
    for _ in range(20):
        b, c = (mixed.objects[i] for i in rng.integers(0, len(mixed.objects), 2))
        f = mixed.sample_morphisms(rng, 1, a, b)[0]
        g = mixed.sample_morphisms(rng, 1, b, c)[0]
        assert np.array_equal(P.act(mixed.compose(g, f)), (P.act(g) @ P.act(f)) % 2)


def test_sum_structure(z2):
    V1 = z2.unit()
    objs = [V1, V1, V1]
    total = z2.sum_objects(objs)
    assert z2.name(total) == "V3"
    fold = z2.fold(V1, 3)
    diag = z2.diagonal(V1, 3)
    for s in range(3):
        inj = z2.injection(objs, s)
        assert z2.compose(fold, inj) == z2.identity(V1)
        assert z2.compose(z2.projection(objs, s), diag) == z2.identity(V1)
        assert z2.compose(z2.projection(objs, s), inj) == z2.identity(V1)
    with pytest.raises(GuardError):
        z2.sum_objects([V1] * 4)
    assert not z2.fits([V1] * 4)


def test_automorphisms_of_v2(z2):
    assert len(z2.automorphisms(z2.parse_object("V2"))) == 6  # GL_2(F_2)


def test_transpose_is_an_anti_involution(mixed):
    rng = np.random.default_rng(3)
    for _ in range(10):
        a, b, c = (mixed.objects[i] for i in rng.integers(0, len(mixed.objects), 3))
        f = mixed.sample_morphisms(rng, 1, a, b)[0]
        g = mixed.sample_morphisms(rng, 1, b, c)[0]
        assert mixed.transpose(mixed.transpose(f)) == f
        assert mixed.transpose(mixed.compose(g, f)) == mixed.compose(mixed.transpose(f), mixed.transpose(g))
