import json

import pytest as pytest

from coring_cdga.algmod import free_right_module, rationals
from coring_cdga.catalog import catalog_matrix, matrix_row_comodule
from coring_cdga.comod import identity_morphism, morphisms_equal, single_term_complex
from coring_cdga.contra import cofree_contramodule, single_contramodule_complex
from coring_cdga.coring import check_coring, identity_coring_morphism
from coring_cdga.equiv import t_based
from coring_cdga.errors import FormatError
from coring_cdga.exactla import QQ
from coring_cdga.serialize import (algebra_to_dict, based_to_dict, cdga_to_dict, complex_morphism_from_dict,
                                   complex_morphism_to_dict, complex_to_dict, contramodule_complex_to_dict,
                                   contramodule_to_dict, coring_morphism_to_dict, from_dict, kind_of, to_json_ready)


def through_json(data: dict) -> dict:
    return json.loads(json.dumps(to_json_ready(data)))


@pytest.fixture(scope="session")
def m2():
    return catalog_matrix(2)


def test_scalars_are_strings():
    data = to_json_ready({"half": QQ(1, 2), "two": QQ(2), (0, 1): [QQ(-3, 4)]})
    assert data == {"half": "1/2", "two": "2", "(0, 1)": ["-3/4"]}
    assert algebra_to_dict(rationals())["unit"] == ["1"]


def test_kind_guesses():
    assert kind_of({"mul": []}) == "algebra"
    assert kind_of({"d1_lift": [], "delta_lift": []}) == "cdga"
    assert kind_of({"terms": [{"alpha": []}]}) == "contramodule_complex"
    assert kind_of({"terms": [{"rho_lift": []}]}) == "complex"
    assert kind_of({"rank": 2}) == "module"


@pytest.mark.parametrize("data", [[], {}, {"kind": "bogus"}])
def test_unreadable_documents(data):
    with pytest.raises(FormatError):
        kind_of(data)


def test_missing_keys():
    with pytest.raises(FormatError):
        from_dict({"kind": "coring", "algebra": algebra_to_dict(rationals())})


def test_malformed_tensor_row(m2):
    data = through_json(based_to_dict(m2))
    data["delta_lift"][0] = [["1"]]
    with pytest.raises(FormatError):
        from_dict(data)


def test_module_documents_are_not_read_alone():
    with pytest.raises(FormatError):
        from_dict({"kind": "module", "rank": 1})


def test_based_coring(m2):
    coring, x = from_dict(through_json(based_to_dict(m2)))
    assert check_coring(coring).passed
    assert x == m2.base_point
    assert coring.C.labels == m2.coring.C.labels


def test_cdga(m2):
    cdga = t_based(m2, max_degree=2).cdga
    loaded = from_dict(through_json(cdga_to_dict(cdga)))
    assert loaded.max_degree == 2
    assert [loaded.dim(n) for n in range(3)] == [cdga.dim(n) for n in range(3)]
    assert loaded.gamma == cdga.gamma


def test_complex_and_morphism(m2):
    complex_ = single_term_complex(matrix_row_comodule(m2.coring, 2))
    loaded, x = from_dict(through_json(complex_to_dict(complex_, m2.base_point)))
    assert x == m2.base_point
    assert (loaded.lo, loaded.hi) == (0, 0)
    assert loaded.rank(0) == 2
    phi = complex_morphism_from_dict(through_json(complex_morphism_to_dict(identity_morphism(loaded))), loaded)
    assert morphisms_equal(phi, identity_morphism(loaded))


def test_contramodule(m2):
    cofree = cofree_contramodule(m2.coring, free_right_module(m2.coring.algebra, 1))
    loaded = from_dict(through_json(contramodule_to_dict(cofree)))
    assert loaded.rank == cofree.rank
    complex_ = from_dict(through_json(contramodule_complex_to_dict(single_contramodule_complex(cofree))))
    assert complex_.term(0).rank == cofree.rank


def test_coring_morphism(m2):
    morphism = from_dict(through_json(coring_morphism_to_dict(identity_coring_morphism(m2.coring))))
    assert morphism.source.rank == morphism.target.rank == 4


if __name__ == '__main__':
    pytest.main(["test_serialize.py"])
