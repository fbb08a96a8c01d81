import pytest as pytest

from coring_cdga.catalog import catalog_matrix, matrix_row_comodule
from coring_cdga.comod import connection_from_complex, single_term_complex
from coring_cdga.equiv import t_based
from coring_cdga.errors import DomainMismatch, ShapeError, WindowTooNarrow
from coring_cdga.exactla import unit_vec
from coring_cdga.modules import (check_curved_bimodule, check_curved_module, endomorphism_dga, hom_complex,
                                 induced_tensor_module, induced_xi_module, make_curved_module,
                                 regular_bimodule_cdga, shift, zero_module)


@pytest.fixture(scope="session")
def m2():
    return catalog_matrix(2)


@pytest.fixture(scope="session")
def m2_t(m2):
    return t_based(m2, max_degree=2)


@pytest.fixture(scope="session")
def regular(m2_t):
    return regular_bimodule_cdga(m2_t.cdga)


@pytest.fixture(scope="session")
def row_connection(m2, m2_t):
    row = single_term_complex(matrix_row_comodule(m2.coring, 2))
    return connection_from_complex(row, target=m2_t)


def test_regular_bimodule(regular):
    report = check_curved_bimodule(regular)
    assert report.passed, report.to_text()
    assert [regular.rank(n) for n in regular.degrees] == [1, 3, 9]


def test_shifted_module(row_connection):
    module = row_connection.module
    shifted = shift(module, 1)
    assert (shifted.lo, shifted.hi) == (-1, 1)
    assert shifted.dm(-1, unit_vec(0)) == {i: -val for i, val in module.dm(0, unit_vec(0)).items()}
    report = check_curved_module(shifted)
    assert report.passed, report.to_text()


def test_zero_module(m2_t):
    zero = zero_module(m2_t.cdga, 0, 2)
    assert check_curved_module(zero).passed
    assert zero.dm(2, {}) == {}


def test_window_is_enforced(regular):
    with pytest.raises(WindowTooNarrow):
        regular.space(regular.hi + 1)
    with pytest.raises(WindowTooNarrow):
        regular.dm(regular.hi, unit_vec(0))


def test_make_curved_module_shapes(m2_t, regular):
    with pytest.raises(ShapeError):
        make_curved_module(m2_t.cdga, 0, [], [], [])
    with pytest.raises(ShapeError):
        make_curved_module(m2_t.cdga, 0, regular.spaces, regular.v_action[:1], regular.d)


def test_connection_module(row_connection):
    assert row_connection.report.passed, row_connection.report.to_text()
    module = row_connection.module
    assert [module.rank(n) for n in module.degrees] == [2, 6, 18]
    assert module.generator(0, 1) == {1: 1}


def test_endomorphisms_of_row_comodule(row_connection):
    complex_, report = endomorphism_dga(row_connection.module, degrees=(0,))
    assert report.passed, report.to_text()
    assert report.check("identity_closed").passed
    # the row comodule is simple with scalar endomorphisms
    assert complex_.cohomology[0] == 1


def test_hom_complex_squares_to_zero(row_connection):
    complex_ = hom_complex(row_connection.module, shift(row_connection.module, 1))
    assert complex_.report.passed, complex_.report.to_text()
    assert complex_.spaces[-1].dim == 4


def test_induced_tensor_module(row_connection, regular):
    module = row_connection.module
    induced = induced_tensor_module(module, regular)
    assert [induced.rank(n) for n in induced.degrees] == [module.rank(n) for n in module.degrees]
    report = check_curved_module(induced)
    assert report.passed, report.to_text()


def test_induced_xi_module(row_connection, regular):
    xi = induced_xi_module(regular, row_connection.module, lo=0, hi=1)
    assert [xi.rank(n) for n in xi.degrees] == [2, 6]
    report = check_curved_module(xi)
    assert report.passed, report.to_text()


def test_induced_modules_need_matching_cdgas(row_connection, m2):
    other = regular_bimodule_cdga(t_based(m2, max_degree=2, check=False).cdga)
    with pytest.raises(DomainMismatch):
        induced_tensor_module(row_connection.module, other)


if __name__ == '__main__':
    pytest.main(["test_modules.py"])
