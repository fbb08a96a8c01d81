import pytest as pytest

from coring_cdga.algmod import cyclic_group_algebra, identity_algebra_map, linmap
from coring_cdga.catalog import catalog_matrix, catalog_sweedler
from coring_cdga.cdga import identity_cdga_morphism, morphisms_equal
from coring_cdga.coring import CoringMorphism, based, check_coring, identity_coring_morphism
from coring_cdga.equiv import (check_group_like_curvature, d_variant_iso, explicit_flat_differential, lift_to_coring,
                               roundtrip_tu, roundtrip_ut, t_based, t_based_morphism, t_flat, t_morphism, u_functor,
                               u_morphism)
from coring_cdga.errors import DomainMismatch, NotMorphism
from coring_cdga.exactla import unit_vec


@pytest.fixture(scope="session")
def m2():
    return catalog_matrix(2)


@pytest.fixture(scope="session")
def m2_t(m2):
    return t_based(m2, max_degree=3)


def label_vec(coring, label):
    return unit_vec(coring.C.labels.index(label))


def test_flat_closed_form(m2):
    result = t_flat(m2.coring, m2.base_point, max_degree=3)
    assert result.report.passed, result.report.to_text()
    assert result.report.check("explicit_formula.degree2").passed


def test_flat_closed_form_off_base_point(m2):
    # any element works, the counit condition is not needed
    result = t_flat(m2.coring, label_vec(m2.coring, "E12"), max_degree=3)
    assert result.report.passed, result.report.to_text()
    assert result.cdga.d(1, unit_vec(0)) == explicit_flat_differential(result, 1, 0)


def test_based_agrees_with_flat(m2_t):
    assert m2_t.report.passed, m2_t.report.to_text()
    assert m2_t.cdga.V.rank == 3


def test_lift_to_coring_degree_one(m2_t):
    for i, column in enumerate(m2_t.splitting.inclusion.columns):
        assert lift_to_coring(m2_t, 1, unit_vec(i)) == {(c,): val for c, val in column.items()}


def test_identity_coring_morphism_gives_identity(m2, m2_t):
    f, report = t_based_morphism(identity_coring_morphism(m2.coring), m2_t, m2_t)
    assert report.passed, report.to_text()
    assert morphisms_equal(f, identity_cdga_morphism(m2_t.cdga))


def test_t_morphism_of_identity(m2):
    flat = t_flat(m2.coring, m2.base_point, max_degree=3, check_oracle=False)
    f = t_morphism(identity_coring_morphism(m2.coring), flat, flat)
    assert not f.omega
    assert morphisms_equal(f, identity_cdga_morphism(flat.cdga))
    other = t_based(catalog_matrix(2), max_degree=2)
    with pytest.raises(DomainMismatch):
        t_morphism(identity_coring_morphism(other.coring), flat, flat)


def test_t_morphism_rejects_non_morphism(m2):
    c = m2.coring
    flat = t_flat(c, m2.base_point, max_degree=3, check_oracle=False)
    doubled = CoringMorphism(source=c, target=c, f0=identity_algebra_map(c.algebra),
                             f1=linmap(c.C, c.C, [{i: 2} for i in range(c.rank)]))
    with pytest.raises(NotMorphism):
        t_morphism(doubled, flat, flat)
    assert t_morphism(doubled, flat, flat, check=False).omega == m2.base_point


def test_u_functor(m2_t):
    u = u_functor(m2_t.cdga)
    assert u.report.passed, u.report.to_text()
    assert u.coring.rank == 1 + 3
    assert u.based.base_point == {0: 1}
    assert u.coring.eps(u.based.base_point) == u.coring.algebra.unit


def test_u_morphism_of_identity(m2_t):
    u = u_functor(m2_t.cdga, check=False)
    m, report = u_morphism(identity_cdga_morphism(m2_t.cdga), u, u)
    assert report.passed, report.to_text()
    assert tuple(m.f1.columns) == tuple(unit_vec(i) for i in range(4))


def test_roundtrip_tu(m2_t):
    report = roundtrip_tu(m2_t.cdga)
    assert report.passed, report.to_text()
    assert "exact equality" in report.notes


def test_roundtrip_ut(m2):
    result = roundtrip_ut(m2, max_degree=2, morphisms=[(identity_coring_morphism(m2.coring), m2)])
    assert result.report.passed, result.report.to_text()
    assert result.report.check("naturality0.square").passed
    assert check_coring(result.u.coring).passed


def test_roundtrip_ut_sends_base_point_to_unit(m2):
    result = roundtrip_ut(m2, max_degree=2)
    assert result.phi.f1(m2.base_point) == result.u.based.base_point
    assert result.psi.f1(result.u.based.base_point) == m2.base_point


def test_d_variant(m2_t):
    _, report = d_variant_iso(m2_t.cdga)
    assert report.passed, report.to_text()


def test_matrix_base_point_is_curved(m2):
    report = check_group_like_curvature(m2)
    assert report.passed, report.to_text()
    assert not report.notes


def test_grouplike_base_point_is_flat():
    coring, result = catalog_sweedler(cyclic_group_algebra(2), max_degree=2)
    report = check_group_like_curvature(based(coring, result.x))
    assert report.passed, report.to_text()
    assert report.notes


if __name__ == '__main__':
    pytest.main(["test_equiv.py"])
