import random

import pytest as pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coring_cdga.algmod import identity_map
from coring_cdga.catalog import catalog_matrix, matrix_row_comodule
from coring_cdga.comod import (DG_TENSOR_NOTE, add_morphisms, check_comodule, check_complex, check_dg_category,
                               comodule_map_morphism, complex_from_connection, cone, connection_from_complex,
                               dg_compose, dg_differential, identity_morphism, is_closed, is_cohesive, make_comodule,
                               make_complex, module_map_from_comodule_map, morphisms_equal, random_morphism,
                               regular_comodule, single_term_complex)
from coring_cdga.errors import NotBased, NotComodule, NotComplex, NotDegreeZero, ShapeError
from coring_cdga.exactla import unit_vec


@pytest.fixture(scope="session")
def m2():
    return catalog_matrix(2)


@pytest.fixture(scope="session")
def row(m2):
    return matrix_row_comodule(m2.coring, 2)


@pytest.fixture(scope="session")
def two_term(m2, row):
    return make_complex(m2.coring, 0, [row, row], [[unit_vec(0), unit_vec(1)]], name="row -> row")


def test_regular_comodule(m2):
    report = check_comodule(regular_comodule(m2.coring))
    assert report.passed, report.to_text()


def test_row_comodule(row):
    assert row.rank == 2
    assert check_comodule(row).passed


def test_doubled_coaction_is_rejected(m2, row):
    doubled = [{word: 2 * val for word, val in row.coact_words(unit_vec(i)).items()} for i in range(2)]
    with pytest.raises(NotComodule):
        make_comodule(m2.coring, row.M, doubled)


def test_coaction_count(m2, row):
    with pytest.raises(ShapeError):
        make_comodule(m2.coring, row.M, [{}])


def test_two_term_complex(two_term):
    report = check_complex(two_term)
    assert report.passed, report.to_text()
    assert two_term.d(0, unit_vec(1)) == unit_vec(1)
    assert two_term.d(1, unit_vec(0)) == {}


def test_non_complex_is_rejected(m2, row):
    with pytest.raises(NotComplex):
        make_complex(m2.coring, 0, [row, row, row], [[unit_vec(0), unit_vec(1)], [unit_vec(0), unit_vec(1)]])


def test_identity_is_closed(two_term):
    identity = identity_morphism(two_term)
    assert is_closed(identity)
    assert morphisms_equal(dg_compose(identity, identity), identity)


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10 ** 6), degree=st.integers(min_value=-1, max_value=1))
def test_dg_differential_squares_to_zero(two_term, seed, degree):
    phi = random_morphism(two_term, two_term, degree, random.Random(seed))
    assert dg_differential(dg_differential(phi)).is_zero()


@settings(max_examples=5, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10 ** 6))
def test_composition_with_identity(two_term, seed):
    phi = random_morphism(two_term, two_term, 0, random.Random(seed))
    identity = identity_morphism(two_term)
    assert morphisms_equal(dg_compose(identity, phi), phi)
    assert morphisms_equal(dg_compose(phi, identity), phi)


def test_cone_of_identity(row):
    single = single_term_complex(row)
    result = cone(identity_morphism(single))
    assert result.report.passed, result.report.to_text()
    assert (result.complex.lo, result.complex.hi) == (-1, 0)
    assert result.complex.rank(-1) == 2


def test_dg_category_laws(two_term):
    report = check_dg_category(two_term, samples=6, seed=3)
    assert report.passed, report.to_text()
    assert report.check("sample5.leibniz").passed
    assert DG_TENSOR_NOTE in report.notes


@settings(max_examples=100, deadline=None)
@given(seed=st.integers(min_value=0, max_value=10 ** 6), degrees=st.tuples(*[st.integers(-1, 1)] * 3))
def test_composition_is_associative_and_leibniz(two_term, seed, degrees):
    rng = random.Random(seed)
    phi, psi, chi = (random_morphism(two_term, two_term, s, rng) for s in degrees)
    assert morphisms_equal(dg_compose(chi, dg_compose(psi, phi)), dg_compose(dg_compose(chi, psi), phi))
    expected = add_morphisms(dg_compose(dg_differential(psi), phi), dg_compose(psi, dg_differential(phi)),
                             -1 if psi.degree % 2 else 1)
    assert morphisms_equal(dg_differential(dg_compose(psi, phi)), expected)


def test_cone_of_an_inclusion(row, two_term):
    shifted_row = single_term_complex(row, degree=1)
    phi = comodule_map_morphism(shifted_row, two_term, {1: identity_map(row.M)})
    assert is_closed(phi)
    result = cone(phi)
    assert result.report.passed, result.report.to_text()
    assert (result.complex.rank(0), result.complex.rank(1)) == (4, 2)
    assert DG_TENSOR_NOTE in result.report.notes
    # (n, m) -> -delta(n) + m
    assert result.complex.d(0, unit_vec(1)) == {1: -1}
    assert result.complex.d(0, unit_vec(3)) == {1: 1}


def test_cone_needs_degree_zero(two_term):
    phi = random_morphism(two_term, two_term, 1, random.Random(7))
    with pytest.raises(NotDegreeZero):
        cone(phi)


def test_connection_round_trip(m2, two_term):
    connection = connection_from_complex(two_term, m2.base_point, max_degree=2)
    assert connection.report.passed, connection.report.to_text()
    assert connection.component(0, 0) == two_term.delta[0].columns
    complex_, report = complex_from_connection(connection)
    assert report.passed, report.to_text()
    assert complex_.rank(0) == complex_.rank(1) == 2


def test_based_connection(m2, two_term):
    connection = connection_from_complex(two_term, m2.base_point, based_variant=True, max_degree=2)
    assert connection.report.passed, connection.report.to_text()
    assert connection.report.check("nabla1.in_C+").passed


def test_based_connection_needs_base_point(m2, two_term):
    with pytest.raises(NotBased):
        connection_from_complex(two_term, {}, based_variant=True)


def test_module_map_of_identity(m2, two_term):
    connection = connection_from_complex(two_term, m2.base_point, max_degree=2)
    space, coords = module_map_from_comodule_map(identity_morphism(two_term), connection, connection)
    assert coords
    assert space.degree == 0


def test_cohesive(two_term):
    report = is_cohesive(two_term)
    assert report.passed, report.to_text()


if __name__ == '__main__':
    pytest.main(["test_comod.py"])
