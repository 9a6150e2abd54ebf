import json
from fractions import Fraction

import pytest

from pseudolattices.cli import main
from pseudolattices.io import (
    InputError,
    decode_matrix,
    decode_number,
    dumps,
    encode,
    parse_factorization,
    parse_hom,
    parse_moves,
    parse_qdp_instance,
    read_input,
)
from pseudolattices.lattice import E
from pseudolattices.linalg import Matrix
from pseudolattices.qdp import QUADRIC, instance_from_images
from pseudolattices.spherical import z_of

G3_JSON = {"gram": [[1, 3, 6], [0, 1, 3], [0, 0, 1]]}
F3_JSON = {"source": G3_JSON, "target": {"gram": [[0, -1], [1, 0]]}, "matrix": [[0, 3, 6], [1, 1, 1]]}
CHAIN3 = {"cycles": [[0, 1], [3, 1], [6, 1]]}


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_encode_big_ints_and_fractions():
    big = 2**70
    assert encode(big) == str(big)
    assert decode_number(str(big)) == big
    assert encode(Fraction(-3, 2)) == "-3/2"
    assert decode_number("-3/2") == Fraction(-3, 2)
    assert decode_number("4/2") == 2
    with pytest.raises(InputError):
        decode_number(True)
    with pytest.raises(InputError):
        decode_number("x")


def test_decode_matrix_errors():
    assert decode_matrix([[1, "2"], [3, 4]]) == Matrix([[1, 2], [3, 4]])
    with pytest.raises(InputError):
        decode_matrix([[1, 2], [3]])
    with pytest.raises(InputError):
        decode_matrix("nope")


def test_hom_round_trip():
    _, f = z_of(E, [(0, 1), (3, 1), (6, 1)])
    again = parse_hom(json.loads(dumps(f)))
    assert again == f


def test_qdp_instance_forms():
    inst = instance_from_images(QUADRIC, Matrix([[2, 1], [1, 1]]))
    again = parse_qdp_instance(json.loads(dumps(inst)))
    assert again.f == inst.f and again.e_basis == inst.e_basis and again.ab_basis == inst.ab_basis
    assert parse_qdp_instance({"images": [[0, 1], [3, 1], [6, 1]]}).f.matrix == Matrix([[0, 3, 6], [1, 1, 1]])
    assert parse_qdp_instance(F3_JSON).rank == 3


def test_parse_misc():
    assert parse_factorization(CHAIN3) == ((0, 1), (3, 1), (6, 1))
    with pytest.raises(InputError):
        parse_factorization({"cycles": [[1, 2, 3]]})
    with pytest.raises(InputError):
        parse_moves([[1, "X"]])
    with pytest.raises(InputError):
        read_input(None)
    with pytest.raises(InputError):
        read_input("{not json")


def test_read_input_file(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps(G3_JSON))
    assert read_input(str(p)) == G3_JSON


def test_classify_lg_cli(capsys):
    code, out = run_json(capsys, "lefschetz", "classify-lg", "--input", json.dumps(CHAIN3))
    assert code == 0
    assert out["normal_form"] == "P2Chain" and out["n"] == 3


def test_inspect_surface_cli(capsys):
    code, out = run_json(capsys, "inspect", "--surface", "--input", json.dumps(G3_JSON))
    assert code == 0 and out["defect"] == 0
    assert out["K"] in ([3], [-3])
    assert sorted(map(tuple, out["point_like"])) == [(-1, 2, -1), (1, -2, 1)]


def test_inspect_text_mode(capsys):
    code, out, _ = run(capsys, "inspect", "--input", json.dumps(G3_JSON))
    assert code == 0
    assert "serre:" in out and "  [10, 6, 3]" in out


def test_sigma_cli(capsys):
    code, out = run_json(capsys, "lefschetz", "sigma", "--n", "12")
    assert code == 0 and out["sigma_y"] == -8
    code, out, _ = run(capsys, "lefschetz", "sigma", "--n", "12")
    assert "sigma_y: -8" in out


def test_mutate_cli(capsys):
    code, out = run_json(capsys, "mutate", "--move", "1:L", "--input", json.dumps(G3_JSON))
    assert code == 0 and out["exceptional"]
    assert out["gram"][0][1] == -3
    code, back = run_json(
        capsys, "mutate", "--move", "1:R", "--input", json.dumps({**G3_JSON, "columns": out["columns"]})
    )
    assert back["columns"] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_spherical_and_glue_cli(capsys):
    code, out = run_json(capsys, "spherical", "--input", json.dumps(F3_JSON))
    assert code == 0 and out["twist"] == [[1, -9], [0, 1]] and out["relative_cy"] is True
    assert out["cokernel"] == [3]
    za = {"source": {"gram": [[1]]}, "target": {"gram": [[0, -1], [1, 0]]}, "matrix": [[1], [0]]}
    code, out = run_json(capsys, "glue", "--input", json.dumps({"first": F3_JSON, "second": za}))
    assert code == 0 and out["pseudolattice"]["gram"][0] == [1, 3, 6, 1]


def test_classify_qdp_cli_replayable(capsys):
    inst = {"images": [[0, 1], [2, 1], [2, 1], [4, 1], [1, 0]]}
    code, out = run_json(capsys, "classify-qdp", "--input", json.dumps(inst))
    assert code == 0 and out["normal_form"] == "P2Chain" and out["n"] == 5
    # the emitted trace replays through ``mutate``
    gram = instance_from_images([tuple(v) for v in inst["images"]]).G.gram.tolist()
    code, rep = run_json(
        capsys, "mutate", "--input", json.dumps({"gram": gram, "moves": out["mutation_trace"], "flips": out["sign_flips"]})
    )
    target = z_of(E, [(0, 1), (3, 1), (6, 1), (1, 0), (1, 0)])[0].gram.tolist()
    assert rep["gram"] == target


def test_negative_exit_codes(capsys):
    assert run(capsys, "lefschetz", "is-quasi-lg", "--input", '{"cycles": [[1, 0]]}')[0] == 1
    bad = {"images": [[0, 1], [0, 2]]}
    assert run(capsys, "classify-qdp", "--input", json.dumps(bad))[0] == 1
    assert run(capsys, "inspect", "--surface", "--input", json.dumps({"gram": [[0, -1], [1, 0]]}))[0] == 1


def test_usage_exit_codes(capsys):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "inspect", "--bogus")[0] == 2
    assert run(capsys, "inspect")[0] == 2
    assert run(capsys, "inspect", "--input", '{"gram": [[1, 2]]}')[0] == 2
    assert run(capsys, "inspect", "--input", "{oops")[0] == 2
    assert run(capsys, "lefschetz", "sigma")[0] == 2
    assert run(capsys, "mutate", "--move", "1:Q", "--input", json.dumps(G3_JSON))[0] == 2


def test_breach_exit_code(capsys, monkeypatch):
    from pseudolattices import cli
    from pseudolattices.errors import ReplayMismatch

    def boom(*a, **k):
        raise ReplayMismatch("forced")

    monkeypatch.setattr(cli.lf, "classify_lg", boom)
    assert run(capsys, "lefschetz", "classify-lg", "--input", json.dumps(CHAIN3))[0] == 3


def test_json_output_round_trips(capsys):
    for argv in (
        ("inspect", "--surface", "--input", json.dumps(G3_JSON)),
        ("lefschetz", "seifert", "--input", json.dumps(CHAIN3)),
        ("lefschetz", "classify-lg", "--input", json.dumps(CHAIN3)),
        ("spherical", "--input", json.dumps(F3_JSON)),
    ):
        code, out, _ = run(capsys, *argv, "--json")
        value = json.loads(out)
        assert json.loads(json.dumps(value)) == value
        assert dumps(value) == out.strip()


def test_lefschetz_hurwitz_and_conjugate_cli(capsys):
    code, out = run_json(capsys, "lefschetz", "hurwitz", "--move", "1:fwd", "--input", json.dumps(CHAIN3))
    assert code == 0 and out["total_monodromy"] == [[1, -9], [0, 1]]
    code, out = run_json(capsys, "lefschetz", "conjugate", "--psi", "[[1,1],[0,1]]", "--input", '{"cycles": [[0, 1]]}')
    assert out["cycles"] == [[1, 1]]
    code, out = run_json(capsys, "lefschetz", "defect", "--input", json.dumps(CHAIN3))
    assert code == 0 and out["defect"] == 0
    code, out = run_json(capsys, "lefschetz", "total", "--input", json.dumps(CHAIN3))
    assert out["total_monodromy"] == [[1, -9], [0, 1]]
