import pytest as pytest

from coring_cdga.algmod import cyclic_group_algebra, free_right_module, identity_map
from coring_cdga.catalog import catalog_matrix, catalog_sweedler, matrix_row_comodule
from coring_cdga.comod import connection_from_complex, single_term_complex
from coring_cdga.contra import (NABLA1_SIGN_NOTE, assemble_divergence, build_xi, check_contramodule,
                                check_contramodule_complex, check_contramodule_map, check_divergence_assembly,
                                cofree_contramodule, divergence_from_contramodule_complex,
                                divergence_from_curved_module, make_contramodule, make_contramodule_complex,
                                single_contramodule_complex)
from coring_cdga.equiv import t_based
from coring_cdga.errors import NotBased, NotComplex, NotContramodule, ShapeError, WindowTooNarrow
from coring_cdga.exactla import QQ, add_into, unit_vec, vec_sub


@pytest.fixture(scope="session")
def m2():
    return catalog_matrix(2)


@pytest.fixture(scope="session")
def cofree(m2):
    return cofree_contramodule(m2.coring, free_right_module(m2.coring.algebra, 1))


def test_cofree_contramodule(cofree):
    report = check_contramodule(cofree)
    assert report.passed, report.to_text()
    assert cofree.rank == 4


def test_doubled_structure_map_is_rejected(m2, cofree):
    doubled = [{i: 2 * val for i, val in col.items()} for col in cofree.alpha.columns]
    with pytest.raises(NotContramodule):
        make_contramodule(m2.coring, cofree.M, doubled)


def test_structure_map_shape(m2, cofree):
    with pytest.raises(ShapeError):
        make_contramodule(m2.coring, cofree.M, cofree.alpha.columns[:1])


def test_identity_is_a_contramodule_map(cofree):
    report = check_contramodule_map(identity_map(cofree.M), cofree, cofree)
    assert report.passed, report.to_text()


def test_contramodule_complex(m2, cofree):
    complex_ = make_contramodule_complex(m2.coring, 0, [cofree, cofree], [identity_map(cofree.M)])
    assert check_contramodule_complex(complex_).passed
    with pytest.raises(NotComplex):
        make_contramodule_complex(m2.coring, 0, [cofree] * 3, [identity_map(cofree.M)] * 2)


def test_xi_window(m2):
    cdga = t_based(m2, max_degree=2).cdga
    terms = [free_right_module(cdga.algebra, 1)]
    xi = build_xi(cdga, terms, 0)
    assert (xi.lo, xi.hi) == (-2, 0)
    assert [xi.rank(n) for n in xi.degrees] == [9, 3, 1]
    assert xi.report.passed, xi.report.to_text()
    with pytest.raises(WindowTooNarrow):
        build_xi(cdga, terms, 0, lo=-3)


def test_divergence_without_components(m2):
    # d vanishes on QQ, so only the d xi term survives
    cdga = t_based(m2, max_degree=2).cdga
    xi = build_xi(cdga, [free_right_module(cdga.algebra, 1)], 0)
    divergence = assemble_divergence(xi, {}, name="zero")
    assert divergence.report.check("divergence.leibniz.degree-2.A").passed
    assert divergence.nabla(-1, unit_vec(0)) == {}


def test_divergence_from_contramodule(m2, cofree):
    divergence = divergence_from_contramodule_complex(single_contramodule_complex(cofree), m2.base_point,
                                                      max_degree=2)
    assert divergence.report.passed, divergence.report.to_text()
    assert divergence.integrable
    assert divergence.xi.lo == -2


def test_degree_one_component_sign(m2, cofree):
    divergence = divergence_from_contramodule_complex(single_contramodule_complex(cofree), m2.base_point,
                                                      max_degree=2)
    assert NABLA1_SIGN_NOTE in divergence.report.notes
    comp = divergence.components[(-1, 1)]
    for c in range(comp.source.rank):
        cols = comp.source.columns({c: QQ(1)})
        at_x = {}
        for i, val in m2.base_point.items():
            add_into(at_x, cols[i], val)
        # (-1)^p (alpha(xi) - xi(x)) with p = -1
        assert comp.columns[c] == vec_sub(at_x, cofree.alpha(cofree.homs.coordinates(cols)))


def test_divergence_over_a_sweedler_coring():
    coring, result = catalog_sweedler(cyclic_group_algebra(2), max_degree=2)
    contramodule = cofree_contramodule(coring, free_right_module(coring.algebra, 1))
    assert check_contramodule(contramodule).passed
    divergence = divergence_from_contramodule_complex(single_contramodule_complex(contramodule), result.x,
                                                      max_degree=2)
    assert divergence.report.passed, divergence.report.to_text()
    assert divergence.integrable


def test_based_divergence_from_contramodule(m2, cofree):
    divergence = divergence_from_contramodule_complex(single_contramodule_complex(cofree), m2.base_point,
                                                      based_variant=True, max_degree=2)
    assert divergence.report.passed, divergence.report.to_text()
    assert divergence.cdga.V.rank == 3


def test_based_divergence_needs_base_point(m2, cofree):
    with pytest.raises(NotBased):
        divergence_from_contramodule_complex(single_contramodule_complex(cofree), {}, based_variant=True,
                                             max_degree=2)


def test_divergence_from_connection_module(m2):
    row = single_term_complex(matrix_row_comodule(m2.coring, 2))
    connection = connection_from_complex(row, m2.base_point, based_variant=True, max_degree=2)
    divergence = divergence_from_curved_module(connection.module)
    assert divergence.report.passed, divergence.report.to_text()
    assert [divergence.module.rank(n) for n in divergence.module.degrees] == [2, 6, 18]


def test_divergence_assembly_agrees(m2):
    row = single_term_complex(matrix_row_comodule(m2.coring, 2))
    connection = connection_from_complex(row, m2.base_point, based_variant=True, max_degree=2)
    report = check_divergence_assembly(connection.module)
    assert report.passed, report.to_text()
    assert [check.name for check in report.checks if check.name.startswith("agrees")] == \
        ["agrees.degree0", "agrees.degree1"]
    assert not report.notes


if __name__ == '__main__':
    pytest.main(["test_contra.py"])
