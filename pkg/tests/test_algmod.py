import gc
import weakref

import pytest as pytest
from sympy import QQ

from coring_cdga.algmod import (adjunction_iso, algebra_generators, canonical_iso, check_inverse, check_linmap,
                                check_module, cyclic_group_algebra, free_right_module, hom_right_A,
                                identity_map, kernel_subspace, linmap, make_algebra, make_module, matrix_algebra,
                                rationals, regular_bimodule, submodule, tensor_chain, tensor_over_A,
                                tensor_power_over_A, upper_triangular)
from coring_cdga.errors import MissingAction, NotAssociative, NotSubmodule, NotUnital, ShapeError
from coring_cdga.exactla import unit_vec


@pytest.fixture(scope="session")
def m2():
    return matrix_algebra(2)


@pytest.fixture(scope="session")
def m2_bimodule(m2):
    return regular_bimodule(m2)


def test_make_algebra_rationals():
    algebra = make_algebra(1, [1], [[[1]]], name="Q")
    assert algebra.dim == 1
    assert algebra.mul({0: QQ(2)}, {0: QQ(3)}) == {0: QQ(6)}


def test_matrix_algebra_products(m2):
    index = {label: i for i, label in enumerate(m2.labels)}
    assert m2.mul_basis(index["E12"], index["E21"]) == unit_vec(index["E11"])
    assert m2.mul_basis(index["E21"], index["E21"]) == {}
    assert m2.unit == {index["E11"]: 1, index["E22"]: 1}


def test_make_algebra_from_matrix_table(m2):
    mul = [[[m2.table[i][j].get(k, 0) for k in range(4)] for j in range(4)] for i in range(4)]
    algebra = make_algebra(4, [1, 0, 0, 1], mul, name="M2")
    assert algebra.dim == 4


def test_make_algebra_not_unital():
    with pytest.raises(NotUnital) as error:
        make_algebra(1, [0], [[[1]]])
    assert error.value.witness == 0


def test_make_algebra_not_associative():
    # e0 is the unit; e1 e1 = e1, e1 e2 = e2, e2 e1 = 0 and e2 e2 = e1
    # so (e2 e1) e2 = 0 while e2 (e1 e2) = e1
    mul = [
        [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[0, 1, 0], [0, 1, 0], [0, 0, 1]],
        [[0, 0, 1], [0, 0, 0], [0, 1, 0]],
    ]
    with pytest.raises(NotAssociative):
        make_algebra(3, [1, 0, 0], mul)


def test_make_algebra_shape():
    with pytest.raises(ShapeError):
        make_algebra(2, [1, 0], [[[1, 0]]])


def test_generators(m2):
    gens = algebra_generators(m2)
    labels = sorted(m2.label(next(iter(g))) for g in gens)
    assert labels == ["E12", "E21"]
    assert len(algebra_generators(rationals())) == 0


@pytest.mark.parametrize("algebra", [rationals(), matrix_algebra(2), cyclic_group_algebra(3), upper_triangular(2)])
def test_standard_algebras_are_modules_over_themselves(algebra):
    assert check_module(regular_bimodule(algebra)).passed


def test_make_module_rejects_non_unital(m2):
    zero_action = [[[0, 0] for _ in range(4)] for _ in range(2)]
    with pytest.raises(NotUnital):
        make_module(2, algebra=m2, right=zero_action)


def test_tensor_with_algebra_is_identity(m2, m2_bimodule):
    space, projection = tensor_over_A(m2_bimodule, m2_bimodule)
    assert space.rank == m2.dim
    # a (x) b ~ ab (x) 1
    index = {label: i for i, label in enumerate(m2.labels)}
    a, b = index["E12"], index["E21"]
    lhs = space.project_word((a, b))
    rhs = {}
    for k, val in m2.unit.items():
        for w, x in space.project_word((index["E11"], k)).items():
            rhs[w] = rhs.get(w, 0) + val * x
    assert lhs == {k: v for k, v in rhs.items() if v}


def test_tensor_of_free_module(m2):
    free = free_right_module(m2, 2)
    space, _ = tensor_over_A(free, regular_bimodule(m2))
    assert space.rank == free.rank


def test_tensor_of_zero_module(m2, m2_bimodule):
    zero = make_module(0, algebra=m2, right=[], check=False)
    space, _ = tensor_over_A(zero, m2_bimodule)
    assert space.rank == 0


def test_tensor_needs_actions(m2):
    plain = make_module(2, name="plain")
    with pytest.raises(MissingAction):
        tensor_over_A(plain, regular_bimodule(m2))


def test_tensor_power_small_cases(m2_bimodule, m2):
    space, projection = tensor_power_over_A(m2_bimodule, 0)
    assert space.rank == m2.dim
    assert projection.columns[0] == m2.unit
    space, projection = tensor_power_over_A(m2_bimodule, 1)
    assert space.rank == m2_bimodule.rank
    assert all(projection.columns[i] == unit_vec(i) for i in range(space.rank))


def test_tensor_cache_releases_unused_spaces(m2):
    left, right = free_right_module(m2, 1), regular_bimodule(m2)
    space = tensor_chain([left, right])
    again = tensor_chain([left, right])
    same = again is space
    released = weakref.ref(space)
    del space, again
    gc.collect()
    assert same
    assert released() is None


def test_single_pass_matches_nested(m2_bimodule):
    nested = tensor_chain([m2_bimodule] * 3)
    single = tensor_chain([m2_bimodule] * 3, single_pass=True)
    assert nested.rank == single.rank == 4
    forward = canonical_iso(nested, single)
    backward = canonical_iso(single, nested)
    assert check_inverse(forward, backward).passed
    for word in [(0, 1, 2), (3, 3, 1), (1, 2, 0)]:
        assert forward(nested.project_word(word)) == single.project_word(word)


def test_tensor_actions_are_bimodule(m2_bimodule):
    space = tensor_chain([m2_bimodule, m2_bimodule])
    assert check_module(space).passed


def test_hom_examples(m2, m2_bimodule):
    hom = hom_right_A(m2_bimodule, m2_bimodule)
    assert hom.rank == 4
    free = free_right_module(m2, 2)
    assert hom_right_A(regular_bimodule(m2), free).rank == free.rank
    zero = make_module(0, algebra=m2, right=[], check=False)
    assert hom_right_A(zero, m2_bimodule).rank == 0


def test_hom_evaluation_at_one(m2, m2_bimodule):
    hom = hom_right_A(m2_bimodule, m2_bimodule)
    # the map x -> E21 x
    index = {label: i for i, label in enumerate(m2.labels)}
    columns = [m2.mul(unit_vec(index["E21"]), unit_vec(i)) for i in range(4)]
    assert hom.contains(columns)
    coords = hom.coordinates(columns)
    assert hom.evaluate(coords, m2.unit) == unit_vec(index["E21"])
    assert check_module(hom).passed


def test_linmap_linearity(m2, m2_bimodule):
    f = identity_map(m2_bimodule)
    assert check_linmap(f).passed
    index = {label: i for i, label in enumerate(m2.labels)}
    # left multiplication by E12 is right linear but not left linear
    g = linmap(m2_bimodule, m2_bimodule, [m2.mul(unit_vec(index["E12"]), unit_vec(i)) for i in range(4)],
               linearity=["rightA", "leftA"])
    report = check_linmap(g)
    assert report.check("rightA").passed
    assert not report.check("leftA").passed


def test_submodule(m2, m2_bimodule):
    index = {label: i for i, label in enumerate(m2.labels)}
    # trace-zero rows: the kernel of the counit-like functional E11 + E22 is not a right ideal
    rows = [{index["E11"]: 1, index["E22"]: 1}]
    with pytest.raises(NotSubmodule):
        submodule(m2_bimodule, kernel_subspace(4, rows))
    # the first column E11, E21 is a left ideal
    left_ideal = kernel_subspace(4, [{index["E12"]: 1}, {index["E22"]: 1}])
    space = make_module(4, algebra=m2, left=m2_bimodule.left, check=False)
    module, inclusion = submodule(space, left_ideal)
    assert module.rank == 2
    assert check_module(module).passed


@pytest.mark.parametrize("make_m, make_l", [
    (lambda A: regular_bimodule(A), lambda A: regular_bimodule(A)),
    (lambda A: free_right_module(A, 2), lambda A: regular_bimodule(A)),
])
def test_adjunction_round_trip(make_m, make_l, m2):
    M, L, N = make_m(m2), make_l(m2), regular_bimodule(m2)
    phi, psi = adjunction_iso(M, L, N)
    assert check_inverse(phi, psi).passed


def test_adjunction_over_cyclic_group():
    algebra = cyclic_group_algebra(2)
    A = regular_bimodule(algebra)
    phi, psi = adjunction_iso(A, A, A)
    assert phi.source.rank == phi.target.rank == 2
    assert check_inverse(phi, psi).passed


if __name__ == '__main__':
    pytest.main(["test_algmod.py"])
