import pytest

from functorlab.category import skeleton
from functorlab.expr import ExprError, parse_functor, tokenize
from functorlab.functors import AdditiveTensor, DirectSum, Dual, SymmetricPower, Tensor


@pytest.fixture(scope="module")
def S():
    return skeleton(["Z/2", "Z/4"], 1)


def test_tokenize():
    assert tokenize("Sym^2(Hom(V1,-))") == ["Sym", "^", "2", "(", "Hom", "(", "V", "1", ",", "-", ")", ")"]


def test_precedence(S):
    F = parse_functor(S, "k + Hom(V(1,0),-) * Hom(V(0,1),-)")
    assert isinstance(F, DirectSum)
    assert isinstance(F.parts[1], Tensor)
    a = S.parse_object("V(1,1)")
    # 1 + |Hom(Z/2, Z/2+Z/4) ⊗ F_2| * |Hom(Z/4, Z/2+Z/4) ⊗ F_2| = 1 + 2 * 2
    assert F.dim(a) == 5


def test_nested_constructions(S):
    F = parse_functor(S, "D(Sym^2(Hom(V(1,0),-)))")
    assert isinstance(F, Dual) and isinstance(F.inner, SymmetricPower)
    assert isinstance(parse_functor(S, "(Hom(V(0,1),-))"), AdditiveTensor)


@pytest.mark.parametrize(
    "bad",
    ["", "Hom(V1,-", "Sym(Hom(V1,-))", "kbar", "Hom(V1,-) +", "Foo", "Hom(V9,-)", "S^2 Hom(V1,-)", "k k"],
)
def test_errors(S, bad):
    with pytest.raises((ExprError, ValueError)):
        parse_functor(S, bad)
