"""Root system and Weyl group machinery, checked against hand-enumerable cases."""

import pytest

from qcseries.exactalg import VarRegistry
from qcseries.roots import CartanMatrix, Root, RootSystem


A2 = RootSystem(CartanMatrix.type_A(2))
A3 = RootSystem(CartanMatrix.type_A(3))

AL1 = Root((1, 0))
AL2 = Root((0, 1))
THETA = Root((1, 1))


def test_a2_inventory():
    assert set(A2.positive_roots) == {AL1, AL2, THETA}
    assert len(A2.roots) == 6
    assert len(A2.weyl_elements) == 6


def test_a3_inventory():
    assert A3.n_positive == 6
    assert len(A3.weyl_elements) == 24


def test_other_types_inventory():
    B2 = RootSystem(CartanMatrix.type_B(2))
    assert B2.n_positive == 4
    assert len(B2.weyl_elements) == 8
    G2 = RootSystem(CartanMatrix.type_G2())
    assert G2.n_positive == 6
    assert len(G2.weyl_elements) == 12


def test_pairing_table_a2():
    assert A2.pairing(AL1, AL1) == 2
    assert A2.pairing(AL2, AL1) == -1
    assert A2.pairing(THETA, AL1) == 1
    assert A2.pairing(THETA, THETA) == 2
    assert A2.coroot_coords(THETA) == (1, 1)


def test_pairing_table_b2():
    B2 = RootSystem(CartanMatrix.type_B(2))
    a1, a2 = B2.simple_roots
    assert B2.pairing(a1, a2) == -2
    assert B2.pairing(a2, a1) == -1
    long_root = Root((1, 2))
    assert long_root in B2.positive_roots
    assert B2.coroot_coords(long_root) == (1, 1)


def test_simple_reflection_action():
    s1 = A2.simple_reflections[0]
    assert s1.act(AL1) == -AL1
    assert s1.act(AL2) == THETA
    assert s1.act(THETA) == AL2


def test_highest_root_reflection():
    s_theta = A2.reflection(THETA)
    assert s_theta.act(AL1) == -AL2
    assert s_theta.act(AL2) == -AL1
    s1, s2 = A2.simple_reflections
    assert s_theta == s1 * s2 * s1
    assert s_theta == s2 * s1 * s2


def test_inversion_sets():
    s1, s2 = A2.simple_reflections
    assert s1.inversion_set() == frozenset({AL1})
    w0 = s1 * s2 * s1
    assert w0.inversion_set() == frozenset({AL1, AL2, THETA})
    assert (s1 * s2).inversion_set() == frozenset({AL2, THETA})


@pytest.mark.parametrize("system", [A2, A3], ids=["A2", "A3"])
def test_length_and_reduced_words(system):
    for w in system.weyl_elements:
        word = w.reduced_word()
        assert len(word) == w.length() == len(w.inversion_set())
        rebuilt = system.identity
        for letter in word:
            rebuilt = rebuilt * system.simple_reflections[letter - 1]
        assert rebuilt == w


def test_group_axioms_a2():
    for w in A2.weyl_elements:
        assert w * w.inverse() == A2.identity
        assert (w.inverse()).inverse() == w
    s1, s2 = A2.simple_reflections
    assert s1 * s1 == A2.identity
    assert (s1 * s2) * s1 == s1 * (s2 * s1)


def test_euler_class_sign():
    reg = A2.alpha_registry()
    e_id = A2.euler_class(reg, A2.identity)
    for w in A2.weyl_elements:
        assert A2.euler_class(reg, w) == e_id.scale((-1) ** w.length())


def test_act_on_ratfunc():
    reg = A2.alpha_registry()
    s1 = A2.simple_reflections[0]
    f = reg.one().as_ratfunc() / reg.var("alpha_1").as_ratfunc()
    assert A2.act_on_ratfunc(s1, f) == -f
    g = reg.var("alpha_2").as_ratfunc()
    assert A2.act_on_ratfunc(s1, g) == (
        reg.var("alpha_1") + reg.var("alpha_2")
    ).as_ratfunc()


def test_lambda_chart_part1():
    lam = VarRegistry(["lambda_0", "lambda_1", "lambda_2", "h"])
    chart = A2.lambda_chart(lam, "part1")
    assert chart["alpha_1"] == lam.var("lambda_0") - lam.var("lambda_1")
    assert chart["alpha_2"] == lam.var("lambda_1") - lam.var("lambda_2")
    chart3 = A2.lambda_chart(lam, "part3")
    assert chart3["alpha_1"] == lam.var("lambda_1") - lam.var("lambda_0")


def test_lambda_chart_rejects_non_type_a():
    B2 = RootSystem(CartanMatrix.type_B(2))
    lam = VarRegistry(["lambda_0", "lambda_1", "lambda_2"])
    with pytest.raises(ValueError):
        B2.lambda_chart(lam, "part1")
    with pytest.raises(ValueError):
        A2.lambda_chart(lam, "sideways")


@pytest.mark.parametrize("system", [A2, A3], ids=["A2", "A3"])
def test_weyl_permutation_matches_chart(system):
    n = system.rank + 1
    lam = VarRegistry([f"lambda_{i}" for i in range(n)])
    chart = system.lambda_chart(lam, "part1")
    reg = system.alpha_registry(extra=[])
    for w in system.weyl_elements:
        pi = system.weyl_permutation(w)
        assert sorted(pi) == list(range(n))
        imaged = system.euler_class(reg, w).substitute(chart, target=lam).as_poly()
        expected = lam.one()
        for p in range(n):
            for q in range(p + 1, n):
                expected = expected * (
                    lam.var(f"lambda_{pi[p]}") - lam.var(f"lambda_{pi[q]}")
                )
        assert imaged == expected


def test_cartan_validation():
    with pytest.raises(ValueError):
        CartanMatrix(((2, -1),))
    with pytest.raises(ValueError):
        CartanMatrix(((1,),))
    with pytest.raises(ValueError):
        CartanMatrix(((2, 1), (1, 2)))
    with pytest.raises(ValueError):
        CartanMatrix(((2, 0), (-1, 2)))
    with pytest.raises(ValueError):
        A2.root_index(Root((5, 5)))
