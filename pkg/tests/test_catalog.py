from itertools import product

import pytest as pytest

from coring_cdga.algmod import cyclic_group_algebra, matrix_algebra
from coring_cdga.catalog import (catalog_entwining, catalog_matrix, catalog_order, catalog_sweedler, check_relation,
                                 entwining_coring, graded_entwining, make_entwining, matrix_row_comodule,
                                 order_formulas, sweedler_formulas)
from coring_cdga.coring import check_coring
from coring_cdga.equiv import lift_to_coring, t_based
from coring_cdga.errors import BowTieFailed, NotReflexive, NotTransitive, ShapeError
from coring_cdga.exactla import QQ

CHAIN = ["a", "b", "c"]
CHAIN_ORDER = [(s, s) for s in CHAIN] + [("a", "b"), ("b", "c"), ("a", "c")]


@pytest.fixture(scope="session")
def m2():
    return catalog_matrix(2)


@pytest.fixture(scope="session")
def z2():
    return cyclic_group_algebra(2)


def test_matrix_coring(m2):
    assert check_coring(m2.coring).passed
    assert m2.coring.C.labels == ("E11", "E12", "E21", "E22")
    assert m2.base_point == {3: 1}


def test_matrix_curvature(m2):
    t = t_based(m2, max_degree=2)
    S = [1, 2]
    report = order_formulas(t, S, list(product(S, S)), 2)
    assert report.passed, report.to_text()
    # gamma = -E21 (x) E12
    labels = m2.coring.C.labels
    expected = {(labels.index("E21"), labels.index("E12")): -1}
    assert m2.coring.CC.project(lift_to_coring(t, 2, t.cdga.gamma)) == m2.coring.CC.project(expected)


def test_chain_order():
    b = catalog_order(CHAIN, CHAIN_ORDER)
    assert b.coring.rank == 6
    t = t_based(b, max_degree=2)
    report = order_formulas(t, CHAIN, CHAIN_ORDER, "a")
    assert report.passed, report.to_text()
    # nothing lies below the minimum, so the curvature vanishes
    assert not t.cdga.gamma


def test_matrix_coring_of_size_three():
    m3 = catalog_matrix(3)
    assert m3.coring.rank == 9
    assert check_coring(m3.coring).passed
    t = t_based(m3, max_degree=2)
    assert t.report.passed, t.report.to_text()
    S = [1, 2, 3]
    report = order_formulas(t, S, list(product(S, S)), 3)
    assert report.passed, report.to_text()


@pytest.mark.parametrize("e", [1, 2, 3])
def test_chain_of_integers(e):
    S = [1, 2, 3]
    Q = [(s, t) for s in S for t in S if s <= t]
    b = catalog_order(S, Q, e=e)
    assert b.coring.rank == 6
    report = order_formulas(t_based(b, max_degree=2), S, Q, e)
    assert report.passed, report.to_text()


def test_order_over_group_algebra(z2):
    b = catalog_order(CHAIN, CHAIN_ORDER, A=z2, e="b")
    assert b.coring.rank == 12
    report = order_formulas(t_based(b, max_degree=2), CHAIN, CHAIN_ORDER, "b")
    assert report.passed, report.to_text()


def test_relation_checks():
    with pytest.raises(NotReflexive):
        check_relation(CHAIN, [("a", "a"), ("b", "b")])
    with pytest.raises(NotTransitive):
        check_relation(CHAIN, [(s, s) for s in CHAIN] + [("a", "b"), ("b", "c")])
    with pytest.raises(ShapeError):
        check_relation(CHAIN, [(s, s) for s in CHAIN] + [("a", "z")])
    with pytest.raises(ShapeError):
        catalog_order(CHAIN, CHAIN_ORDER, e="z")


def test_sweedler(z2):
    coring, result = catalog_sweedler(z2, max_degree=3)
    assert coring.rank == 4
    report = sweedler_formulas(result)
    assert report.passed, report.to_text()


@pytest.mark.parametrize("x", [None, "E12(x)E21"])
def test_sweedler_over_matrices(x):
    A = matrix_algebra(2)
    labels = A.labels
    x_vec = None if x is None else {labels.index("E12") * A.dim + labels.index("E21"): QQ(1)}
    coring, result = catalog_sweedler(A, x=x_vec, max_degree=2)
    assert coring.rank == 16
    assert result.report.passed, result.report.to_text()
    report = sweedler_formulas(result)
    assert report.passed, report.to_text()


def test_graded_entwining(z2):
    data = catalog_entwining(graded_entwining(z2, [0, 1], order=2), max_degree=2)
    assert data.report.passed, data.report.to_text()
    assert [term.rank for term in data.complex.terms] == [4, 8, 16]


def test_broken_entwining(z2):
    ent = graded_entwining(z2, [0, 1], order=2)
    psi = [[{i: 2 * val for i, val in row[0].items()}, row[1]] for row in ent.psi]
    broken = make_entwining(z2, ent.coalgebra, psi, name="broken")
    with pytest.raises(BowTieFailed) as error:
        entwining_coring(broken)
    assert error.value.witness["cell"] == 1


def test_row_comodule_needs_matching_size(m2):
    with pytest.raises(ShapeError):
        matrix_row_comodule(m2.coring, 3)


if __name__ == '__main__':
    pytest.main(["test_catalog.py"])
