import pytest as pytest

from coring_cdga.algmod import free_right_module, rationals
from coring_cdga.catalog import catalog_comatrix, catalog_matrix, comatrix_matrix_iso, full_endomorphisms
from coring_cdga.comatrix import (check_comatrix_description, comatrix_coring, comatrix_degree_dimension,
                                  comatrix_dual_divergence, comatrix_space, phi_map, pregalois_theta)
from coring_cdga.errors import BNotClosed, DomainMismatch, ShapeError
from coring_cdga.exactla import add_into


@pytest.fixture(scope="session")
def data():
    return catalog_comatrix(n=2, max_degree=2)


@pytest.fixture(scope="session")
def cm(data):
    return data.comatrix


def test_comatrix_coring(cm):
    assert cm.report.passed, cm.report.to_text()
    assert cm.coring.rank == 4
    assert cm.S.rank == 4


def test_dual_basis_maps_to_identity(cm):
    total = {}
    for (p, chi), coef in cm.PPstar.lift(cm.dual_basis).items():
        add_into(total, cm.theta(p, chi), coef)
    assert total == cm.identity


def test_cdga_and_connection(data):
    assert data.report.passed, data.report.to_text()
    assert data.cdga.V.rank == 3


def test_degree_dimensions(cm, data):
    assert comatrix_degree_dimension(cm, 0) == 1
    assert comatrix_degree_dimension(cm, 1) == data.cdga.dim(1) == 3
    assert comatrix_degree_dimension(cm, 2) == data.cdga.dim(2) == 9


def test_description(data):
    report = check_comatrix_description(data)
    assert report.passed, report.to_text()
    assert report.check("curvature").passed


def test_comatrix_shapes(cm):
    assert comatrix_space(cm, 1).rank == cm.C.rank
    with pytest.raises(ShapeError):
        comatrix_space(cm, 0)
    with pytest.raises(ShapeError):
        phi_map(cm, 1, 2)


def test_matrix_iso():
    A = rationals()
    cm = comatrix_coring(A, free_right_module(A, 2))
    _, report = comatrix_matrix_iso(cm, catalog_matrix(2, A).coring)
    assert report.passed, report.to_text()


def test_full_endomorphisms_collapse_the_coring():
    # P* (x)_B P is A itself when B = End(P)
    A = rationals()
    cm = comatrix_coring(A, free_right_module(A, 2), full_endomorphisms(A, 2))
    assert cm.report.passed, cm.report.to_text()
    assert cm.coring.rank == 1
    assert cm.B.dim == 4


def test_subalgebra_without_identity():
    A = rationals()
    with pytest.raises(BNotClosed):
        comatrix_coring(A, free_right_module(A, 2), [[{0: 1}, {}]])


def test_module_over_other_algebra():
    with pytest.raises(DomainMismatch):
        comatrix_coring(rationals(), free_right_module(rationals(), 2))


def test_pregalois_of_own_connection(data):
    result = pregalois_theta(data.cdga, data.connection, source=data)
    assert result.report.passed, result.report.to_text()
    assert result.morphism.target is data.cdga


def test_dual_divergence(data):
    divergence = comatrix_dual_divergence(data)
    assert divergence.report.passed, divergence.report.to_text()


if __name__ == '__main__':
    pytest.main(["test_comatrix.py"])
