import pytest as pytest
from sympy import QQ

from coring_cdga.algmod import matrix_algebra, rationals
from coring_cdga.catalog import catalog_matrix
from coring_cdga.coring import (base_point_from_section, based, check_coring, check_coring_morphism,
                                compose_coring_morphisms, find_base_points, identity_coring_morphism, is_base_point,
                                is_grouplike, make_coring, section_from_base_point, split_at, tensor_two,
                                trivial_coring)
from coring_cdga.errors import NoBasePoint, NotBased, ShapeError
from coring_cdga.exactla import unit_vec


@pytest.fixture(scope="session")
def m2_based():
    return catalog_matrix(2)


@pytest.fixture(scope="session")
def m2_coring(m2_based):
    return m2_based.coring


def index_of(coring, label):
    return coring.C.labels.index(label)


def test_matrix_coring_axioms(m2_coring):
    report = check_coring(m2_coring)
    assert report.passed, report.to_text()
    assert m2_coring.rank == 4


def test_matrix_comultiplication(m2_coring):
    e = {label: unit_vec(index_of(m2_coring, label)) for label in ("E11", "E12", "E21", "E22")}
    expected = tensor_two(m2_coring, e["E21"], e["E12"])
    for i, val in tensor_two(m2_coring, e["E22"], e["E22"]).items():
        expected[i] = expected.get(i, QQ(0)) + val
    assert m2_coring.comul(e["E22"]) == expected
    assert m2_coring.eps(e["E12"]) == {}
    assert m2_coring.eps(e["E11"]) == {0: QQ(1)}


def test_base_point_is_last_diagonal_unit(m2_based, m2_coring):
    assert m2_based.base_point == unit_vec(index_of(m2_coring, "E22"))
    points = find_base_points(m2_coring)
    assert points.found
    assert is_base_point(m2_coring, points.require())
    assert points.require() == unit_vec(index_of(m2_coring, "E11"))
    assert points.dimension == 3


def test_no_base_point_when_counit_vanishes(m2_coring):
    broken = make_coring(m2_coring.algebra, m2_coring.C, m2_coring.delta_lift, [{}] * 4, name="broken")
    points = find_base_points(broken)
    assert not points.found
    with pytest.raises(NoBasePoint):
        points.require()


def test_broken_counit_is_reported(m2_coring):
    broken = make_coring(m2_coring.algebra, m2_coring.C, m2_coring.delta_lift, [{}] * 4, name="broken")
    report = check_coring(broken)
    assert not report.passed
    assert not report.check("counitality.left").passed
    assert report.check("counitality.left").witness["basis"] == 0


def test_make_coring_shape(m2_coring):
    with pytest.raises(ShapeError):
        make_coring(m2_coring.algebra, m2_coring.C, m2_coring.delta_lift[:2], m2_coring.counit)


def test_grouplike_detection(m2_coring):
    assert not is_grouplike(m2_coring, unit_vec(index_of(m2_coring, "E22")))
    trivial = trivial_coring(rationals())
    assert is_grouplike(trivial, {0: QQ(1)})


def test_trivial_coring_over_matrices():
    report = check_coring(trivial_coring(matrix_algebra(2)))
    assert report.passed, report.to_text()


def test_based_rejects_non_base_point(m2_coring):
    with pytest.raises(NotBased) as error:
        based(m2_coring, unit_vec(index_of(m2_coring, "E12")))
    assert error.value.witness == {}


def test_splitting(m2_based):
    splitting = split_at(m2_based)
    assert splitting.report.passed, splitting.report.to_text()
    assert splitting.cplus.rank == 3
    x = m2_based.base_point
    assert splitting.pi_left(x) == {}
    assert splitting.pi_right(x) == {}
    assert split_at(m2_based) is splitting


def test_section_round_trip(m2_based, m2_coring):
    section = section_from_base_point(m2_based)
    assert base_point_from_section(m2_coring, section) == m2_based.base_point


def test_identity_morphism(m2_coring):
    identity = identity_coring_morphism(m2_coring)
    assert check_coring_morphism(identity).passed
    composed = compose_coring_morphisms(identity, identity)
    assert tuple(composed.f1.columns) == tuple(identity.f1.columns)
    assert check_coring_morphism(composed).passed


if __name__ == '__main__':
    pytest.main(["test_coring.py"])
