import pytest as pytest

from coring_cdga.catalog import catalog_matrix
from coring_cdga.cdga import (cdga_equal, check_cdga_degreewise, check_cdga_morphism, check_generators,
                              compose_cdga_morphisms, identity_cdga_morphism, make_cdga, morphisms_equal)
from coring_cdga.equiv import base_point_change, t_based, t_flat
from coring_cdga.errors import CurvatureMismatch, LeibnizIncompatible, ShapeError, WindowTooNarrow
from coring_cdga.exactla import unit_vec


@pytest.fixture(scope="session")
def matrix_cdga():
    return t_based(catalog_matrix(2), max_degree=3).cdga


@pytest.fixture(scope="session")
def flat_cdga():
    return t_flat(catalog_matrix(2).coring, max_degree=3, check_oracle=False).cdga


def test_generator_checks(matrix_cdga):
    report = check_generators(matrix_cdga)
    assert report.passed, report.to_text()


def test_degreewise_checks(matrix_cdga):
    report = check_cdga_degreewise(matrix_cdga)
    assert report.passed, report.to_text()
    assert report.check("d_squared.degree1").passed
    assert report.check("bianchi").passed


def test_dimensions(matrix_cdga):
    assert matrix_cdga.dim(0) == 1
    assert matrix_cdga.dim(1) == 3
    assert matrix_cdga.dim(2) == 9


def test_window(matrix_cdga):
    with pytest.raises(WindowTooNarrow):
        matrix_cdga.space(matrix_cdga.reach + 1)


def test_curvature_is_nonzero(matrix_cdga):
    assert matrix_cdga.gamma


def test_derivation_on_scalars_must_vanish(matrix_cdga):
    with pytest.raises(LeibnizIncompatible) as error:
        make_cdga(matrix_cdga.algebra, matrix_cdga.V, [{0: 1}], matrix_cdga.d1_lift, matrix_cdga.gamma_lift)
    assert error.value.witness == [0, 0]


def test_doubled_curvature_is_rejected(matrix_cdga):
    doubled = {word: 2 * val for word, val in matrix_cdga.gamma_lift.items()}
    with pytest.raises(CurvatureMismatch) as error:
        make_cdga(matrix_cdga.algebra, matrix_cdga.V, matrix_cdga.d0, matrix_cdga.d1_lift, doubled)
    assert error.value.witness["degree"] == 1


def test_max_degree_too_small(matrix_cdga):
    with pytest.raises(ShapeError):
        make_cdga(matrix_cdga.algebra, matrix_cdga.V, matrix_cdga.d0, matrix_cdga.d1_lift, matrix_cdga.gamma_lift,
                  max_degree=1)


def test_equal_to_itself(matrix_cdga):
    assert cdga_equal(matrix_cdga, matrix_cdga).passed


def test_rebuilt_cdga_is_equal(matrix_cdga):
    m = matrix_cdga
    rebuilt = make_cdga(m.algebra, m.V, m.d0, m.d1_lift, m.gamma_lift, max_degree=3)
    assert cdga_equal(rebuilt, matrix_cdga).passed


def test_identity_morphism(matrix_cdga):
    identity = identity_cdga_morphism(matrix_cdga)
    assert check_cdga_morphism(identity).passed
    composed = compose_cdga_morphisms(identity, identity)
    assert morphisms_equal(composed, identity)


def test_base_point_change_is_a_morphism():
    c = catalog_matrix(2).coring
    e11, e22 = unit_vec(c.C.labels.index("E11")), unit_vec(c.C.labels.index("E22"))
    f, source, target = base_point_change(c, e22, e11, max_degree=3)
    report = check_cdga_morphism(f)
    assert report.passed, report.to_text()
    assert f.omega == {c.C.labels.index("E22"): 1, c.C.labels.index("E11"): -1}
    composed = compose_cdga_morphisms(identity_cdga_morphism(target.cdga), f)
    assert morphisms_equal(composed, f)


def test_flat_cdga_over_any_point(flat_cdga):
    assert flat_cdga.d0 == ({},)
    assert not flat_cdga.gamma
    assert check_generators(flat_cdga).passed


if __name__ == '__main__':
    pytest.main(["test_cdga.py"])
