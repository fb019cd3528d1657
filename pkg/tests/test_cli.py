import json
import math
import subprocess
import sys

import pytest

from blochjac import cli
from blochjac.fixtures import example3, example4
from blochjac.spectral import IdentityCheck


def run_cli(capsys, argv):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def run_json(capsys, argv):
    code, out = run_cli(capsys, argv)
    assert code == 0
    return json.loads(out)


def write_doc(tmp_path, capsys, argv, name="op.json"):
    code, out = run_cli(capsys, argv)
    assert code == 0
    path = tmp_path / name
    path.write_text(out)
    return str(path)


def test_example_emits_parseable_exact_document(capsys):
    doc = run_json(capsys, ["example", "example3", "--t", "1"])
    assert doc["schema"] == "blochjac/1"
    op = cli.operator_from_document(doc)
    want = example3(1)
    assert (op.p, op.m, op.a, op.b) == (want.p, want.m, want.a, want.b)


def test_example_fractional_parameter(capsys):
    doc = run_json(capsys, ["example", "example4", "--t", "1/2"])
    op = cli.operator_from_document(doc)
    want = example4("1/2")
    assert op.b == want.b


def test_bands_on_emitted_example(tmp_path, capsys):
    path = write_doc(tmp_path, capsys, ["example", "example4", "--t", "0"])
    doc = run_json(capsys, ["bands", path])
    segments = doc["payload"]["segments"]
    assert [s[2] for s in segments] == [1, 2, 1]
    flat = [x for s in segments for x in s[:2]]
    assert flat == pytest.approx([-2, -1, -1, 2, 2, 3], abs=1e-9)
    bands = doc["payload"]["branch_bands"]
    assert bands[0][0] == pytest.approx([-2, 2], abs=1e-9)
    assert bands[1][0] == pytest.approx([-1, 3], abs=1e-9)


def test_bands_output_is_byte_deterministic(tmp_path, capsys):
    path = write_doc(tmp_path, capsys, ["example", "example3", "--t", "1"])
    _, first = run_cli(capsys, ["bands", path])
    _, second = run_cli(capsys, ["bands", path])
    assert first == second


def test_bands_rejects_invalid_operator(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({
        "p": 1, "m": 2,
        "a": [[["1", "0"], ["0", "1"]]],
        "b": [[["0", "1"], ["2", "0"]]],
    }))
    code, _ = run_cli(capsys, ["bands", str(path)])
    assert code == 2


def test_bands_rejects_float_entries(tmp_path, capsys):
    path = tmp_path / "float.json"
    path.write_text(json.dumps({"p": 1, "m": 1, "a": [[[1.5]]], "b": [[[0]]]}))
    code, _ = run_cli(capsys, ["bands", str(path)])
    assert code == 2


def test_bands_rejects_malformed_json(tmp_path, capsys):
    path = tmp_path / "nope.json"
    path.write_text("{truncated")
    code, _ = run_cli(capsys, ["bands", str(path)])
    assert code == 2


def test_resonances_complex_pair(tmp_path, capsys):
    path = write_doc(tmp_path, capsys, ["example", "example3", "--t", "1/2"])
    payload = run_json(capsys, ["resonances", path])["payload"]
    assert payload["degenerate"] is False
    assert payload["real"] == [False, False]
    a, b = payload["zeros"]
    assert a[0] == pytest.approx(b[0])
    assert a[1] == pytest.approx(-b[1])


def test_resonances_real_pair_outside_unit_t(tmp_path, capsys):
    path = write_doc(tmp_path, capsys, ["example", "example3", "--t", "2"])
    payload = run_json(capsys, ["resonances", path])["payload"]
    assert payload["real"] == [True, True]
    assert payload["zeros"][0][0] < payload["zeros"][1][0]


def test_resonances_degenerate_free_block(tmp_path, capsys):
    path = write_doc(tmp_path, capsys, ["example", "free", "--p", "2", "--m", "2"])
    payload = run_json(capsys, ["resonances", path])["payload"]
    assert payload["degenerate"] is True
    assert payload["zeros"] == []


def test_resonances_exact_coefficients(tmp_path, capsys):
    path = write_doc(tmp_path, capsys, ["example", "example3", "--t", "1"])
    payload = run_json(capsys, ["resonances", path])["payload"]
    assert payload["rho"] == ["1/4", "1", "1"]


def test_lyapunov_single_point(tmp_path, capsys):
    path = write_doc(tmp_path, capsys, ["example", "free", "--p", "3", "--m", "1"])
    point = run_json(capsys, ["lyapunov", path, "--z", "0"])["payload"]["points"][0]
    assert point["branches"] == [{"real": True, "value": [0.0, 0.0]}]
    mult = point["multipliers"][0]
    assert mult["on_circle"] == [True, True]
    assert mult["abs"] == pytest.approx([1, 1])


def test_lyapunov_grid_sweep(tmp_path, capsys):
    path = write_doc(tmp_path, capsys, ["example", "free", "--p", "2", "--m", "1"])
    points = run_json(capsys, ["lyapunov", path, "--z-grid=-3:3:7"])["payload"]["points"]
    assert [p["z"][0] for p in points] == pytest.approx([-3, -2, -1, 0, 1, 2, 3])
    for p in points:
        x = p["z"][0]
        nu = p["branches"][0]["value"][0]
        assert nu == pytest.approx(x * x / 2 - 1, abs=1e-9)


def test_lyapunov_complex_point(tmp_path, capsys):
    path = write_doc(tmp_path, capsys, ["example", "free", "--p", "2", "--m", "1"])
    point = run_json(capsys, ["lyapunov", path, "--z", "1,1"])["payload"]["points"][0]
    assert point["branches"][0]["real"] is False
    # nu = z^2/2 - 1 at z = 1 + i
    assert point["branches"][0]["value"] == pytest.approx([-1, 1])


def test_lyapunov_rejects_bad_grid(tmp_path, capsys):
    path = write_doc(tmp_path, capsys, ["example", "free"])
    code, _ = run_cli(capsys, ["lyapunov", path, "--z-grid", "3:-3:7"])
    assert code == 2


def test_recover_free_scalar_document(tmp_path, capsys):
    data = {
        "schema": "blochjac/1",
        "p": 2,
        "m": 1,
        "kappas": [0.0, math.pi],
        "lambda_sets": [[-2, 2], [0]],
    }
    path = tmp_path / "data.json"
    path.write_text(json.dumps(data))
    payload = run_json(capsys, ["recover", str(path)])["payload"]
    assert payload["c"] == pytest.approx([-1, 0])
    assert payload["residuals"] == pytest.approx([0, 0], abs=1e-9)
    assert payload["exact"]["c"] == "-1"
    assert payload["exact"]["q"] == [["-2", "0", "1"], ["-1", "0", "0"]]
    assert payload["bands"]["segments"] == [[pytest.approx(-2), pytest.approx(2), 1]]


def test_recover_accepts_re_im_pairs(tmp_path, capsys):
    data = {
        "p": 2,
        "m": 1,
        "kappas": [0.0, math.pi],
        "lambda_sets": [[[-2, 0], [2, 0]], [[0, 0]]],
    }
    path = tmp_path / "pairs.json"
    path.write_text(json.dumps(data))
    payload = run_json(capsys, ["recover", str(path)])["payload"]
    assert payload["exact"]["c"] == "-1"


def test_recover_wrong_cardinality_exits_4(tmp_path, capsys):
    data = {"p": 2, "m": 1, "kappas": [0.0, math.pi], "lambda_sets": [[-2, 2], [0, 1]]}
    path = tmp_path / "short.json"
    path.write_text(json.dumps(data))
    code, _ = run_cli(capsys, ["recover", str(path)])
    assert code == 4


def test_verify_passes_on_free_operator(tmp_path, capsys):
    path = write_doc(tmp_path, capsys, ["example", "free", "--p", "3", "--m", "2"])
    code, out = run_cli(capsys, ["verify", path])
    assert code == 0
    payload = json.loads(out)["payload"]
    assert payload["all_pass"] is True
    assert all(c["status"] != "fail" for c in payload["checks"])


def test_verify_failure_exits_5(tmp_path, capsys, monkeypatch):
    path = write_doc(tmp_path, capsys, ["example", "free"])
    monkeypatch.setattr(
        cli, "verify_identities",
        lambda op: [IdentityCheck("rigged", "fail", 1.0, "forced for the exit-code test")],
    )
    code, out = run_cli(capsys, ["verify", path])
    assert code == 5
    assert json.loads(out)["payload"]["all_pass"] is False


def test_verify_invalid_operator_exits_2(tmp_path, capsys):
    path = tmp_path / "asym.json"
    path.write_text(json.dumps({
        "p": 1, "m": 2,
        "a": [[["1", "0"], ["0", "1"]]],
        "b": [[["0", "3"], ["0", "0"]]],
    }))
    code, _ = run_cli(capsys, ["verify", str(path)])
    assert code == 2


def test_documents_carry_schema_and_digest(tmp_path, capsys):
    path = write_doc(tmp_path, capsys, ["example", "free"])
    doc = run_json(capsys, ["bands", path])
    assert doc["schema"] == "blochjac/1"
    assert doc["command"] == "bands"
    assert doc["input"].startswith("sha256:")
    assert doc["version"]


def test_cli_pipe_round_trip():
    emit = subprocess.run(
        [sys.executable, "-m", "blochjac.cli", "example", "free", "--p", "2", "--m", "1"],
        capture_output=True, check=True,
    )
    bands = subprocess.run(
        [sys.executable, "-m", "blochjac.cli", "bands"],
        input=emit.stdout, capture_output=True, check=True,
    )
    payload = json.loads(bands.stdout)["payload"]
    assert payload["segments"] == [[pytest.approx(-2), pytest.approx(2), 1]]
