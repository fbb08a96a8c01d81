import json

import pytest as pytest

from coring_cdga.cli import EXIT_FAILED, EXIT_OK, EXIT_USAGE, closure, main, parse_algebra, parse_pairs, parse_vec
from coring_cdga.algmod import identity_map
from coring_cdga.catalog import catalog_matrix, matrix_row_comodule
from coring_cdga.comod import DG_TENSOR_NOTE, comodule_map_morphism, make_complex
from coring_cdga.errors import FormatError
from coring_cdga.exactla import QQ, unit_vec
from coring_cdga.serialize import complex_morphism_to_dict, complex_to_dict, to_json_ready

ENV_VARS = ("CORING_CDGA_MAX_DEGREE", "CORING_CDGA_FORMAT", "CORING_CDGA_SEED", "CORING_CDGA_LOG_LEVEL",
            "CORING_CDGA_ENTWINING_WINDOW")


@pytest.fixture(autouse=True)
def clean_environment(monkeypatch, tmp_path):
    for name in ENV_VARS:
        monkeypatch.delenv(name, raising=False)
    monkeypatch.chdir(tmp_path)


@pytest.fixture
def matrix_file(tmp_path):
    path = tmp_path / "m2.json"
    assert main(["catalog", "matrix", "--n", "2", "--max-degree", "2", "--output", str(path)]) == EXIT_OK
    return path


def test_parse_algebra():
    assert parse_algebra("Q").dim == 1
    assert parse_algebra("M2").dim == 4
    assert parse_algebra("z3").dim == 3
    assert parse_algebra("T2").dim == 3
    for text in ("X2", "M", "M0"):
        with pytest.raises(FormatError):
            parse_algebra(text)


def test_parse_vec():
    assert parse_vec(None, 3) is None
    assert parse_vec("0,1/2,0", 3) == {1: QQ(1, 2)}
    assert parse_vec("2:-1", 3) == {2: -1}
    with pytest.raises(FormatError):
        parse_vec("1:x", 3)


def test_relations():
    assert parse_pairs("1:2, 2:3") == [("1", "2"), ("2", "3")]
    with pytest.raises(FormatError):
        parse_pairs("12")
    assert closure(["1", "2", "3"], [("1", "2"), ("2", "3")]) == \
        [("1", "1"), ("1", "2"), ("1", "3"), ("2", "2"), ("2", "3"), ("3", "3")]


def test_catalog_writes_a_based_coring(matrix_file):
    data = json.loads(matrix_file.read_text())
    assert data["kind"] == "coring"
    assert data["base_point"] == ["0", "0", "0", "1"]


def test_check_coring(matrix_file, capsys):
    assert main(["check", "coring", str(matrix_file)]) == EXIT_OK
    assert "base_point" in capsys.readouterr().out


def test_check_coring_as_json(matrix_file, capsys):
    assert main(["--format", "json", "check", "coring", str(matrix_file)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["status"] == "PASS"


def test_broken_counit_fails(matrix_file, capsys):
    data = json.loads(matrix_file.read_text())
    data["counit"][0] = ["2"]
    matrix_file.write_text(json.dumps(data))
    assert main(["check", "coring", str(matrix_file)]) == EXIT_FAILED
    assert "FAIL" in capsys.readouterr().out


def test_functor_pipeline(matrix_file, tmp_path):
    cdga_file = tmp_path / "t.json"
    assert main(["functor", "t", str(matrix_file), "--max-degree", "2", "--output", str(cdga_file)]) == EXIT_OK
    assert json.loads(cdga_file.read_text())["kind"] == "cdga"
    assert main(["check", "cdga", str(cdga_file)]) == EXIT_OK
    assert main(["roundtrip", "tu", str(cdga_file)]) == EXIT_OK


def test_entwining_complex(tmp_path, capsys):
    path = tmp_path / "entwining.json"
    assert main(["catalog", "entwining", "--window", "1", "--max-degree", "2", "--output", str(path)]) == EXIT_OK
    capsys.readouterr()
    assert main(["check", "complex", str(path), "--samples", "2"]) == EXIT_OK
    output = capsys.readouterr().out
    assert "CHECK dg.sample1.leibniz: PASS" in output
    assert f"# note: {DG_TENSOR_NOTE}" in output


def test_usage_errors(tmp_path, monkeypatch):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert main(["check", "coring", str(bad)]) == EXIT_USAGE
    assert main(["catalog", "matrix", "--algebra", "X1"]) == EXIT_USAGE
    assert main(["check", "coring", str(tmp_path / "missing.json")]) == EXIT_USAGE
    monkeypatch.setenv("CORING_CDGA_MAX_DEGREE", "abc")
    assert main(["catalog", "matrix"]) == EXIT_USAGE


def test_environment_degree_reaches_cdga_checks(matrix_file, tmp_path, monkeypatch, capsys):
    cdga_file = tmp_path / "t.json"
    assert main(["functor", "t", str(matrix_file), "--max-degree", "2", "--output", str(cdga_file)]) == EXIT_OK
    capsys.readouterr()
    monkeypatch.setenv("CORING_CDGA_MAX_DEGREE", "2")
    assert main(["--format", "json", "check", "cdga", str(cdga_file)]) == EXIT_OK
    names = [check["check"] for check in json.loads(capsys.readouterr().out)["checks"]]
    # the default of 4 would also check degree 1
    assert "degreewise.d_squared.degree0" in names
    assert "degreewise.d_squared.degree1" not in names


def test_perturbed_curvature_breaks_bianchi(matrix_file, tmp_path, capsys):
    cdga_file = tmp_path / "t.json"
    assert main(["functor", "t", str(matrix_file), "--max-degree", "2", "--output", str(cdga_file)]) == EXIT_OK
    data = json.loads(cdga_file.read_text())
    data["gamma_lift"].append([0, 0, "1"])
    cdga_file.write_text(json.dumps(data))
    capsys.readouterr()
    assert main(["check", "cdga", str(cdga_file), "--max-degree", "2"]) == EXIT_FAILED
    assert "CHECK bianchi: FAIL" in capsys.readouterr().out


def test_cone_of_a_non_chain_map_fails(tmp_path, capsys):
    m2 = catalog_matrix(2)
    row = matrix_row_comodule(m2.coring, 2)
    two_term = make_complex(m2.coring, 0, [row, row], [[unit_vec(0), unit_vec(1)]], name="row -> row")
    complex_file, morphism_file = tmp_path / "complex.json", tmp_path / "phi.json"
    complex_file.write_text(json.dumps(to_json_ready(complex_to_dict(two_term))))
    phi = comodule_map_morphism(two_term, two_term, {0: identity_map(row.M)})
    morphism_file.write_text(json.dumps(to_json_ready(complex_morphism_to_dict(phi))))
    assert main(["cone", str(complex_file), str(morphism_file)]) == EXIT_FAILED
    assert json.loads(capsys.readouterr().out)["error"] == "NotClosed"


def test_document_of_the_wrong_kind(matrix_file):
    assert main(["check", "cdga", str(matrix_file)]) == EXIT_USAGE


def test_bad_flag_exits():
    with pytest.raises(SystemExit) as error:
        main(["catalog", "nothing"])
    assert error.value.code == EXIT_USAGE


if __name__ == '__main__':
    pytest.main(["test_cli.py"])
