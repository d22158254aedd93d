import json
import re
import subprocess
import sys

import pytest

from scpkit.cli import Report, format_report, main, parse_instance, run
from scpkit.errors import ParseError, ValidationError
from scpkit.scp2d import QuadraticData
from scpkit.scp1d import WeightSeq1

QUAD = {"kind": "scp2d-quadratic", "a": "1", "b": "1", "c": "2", "d": "2", "e": "1"}
SHIFTED = {"kind": "obstruction",
           "moments": [[1], [4, 5], [17, 19, 27], [76, 77, 97, 157], [354, 331, 371, 535, 972]]}
ORIGINAL = {"kind": "moments", "moments": [[1], [1, 1], [2, 0, 3], [4, 0, 0, 9],
                                           [9, 0, 0, 0, 28]]}
FAMILY = {"kind": "scp2d-family",
          "alpha_sq": {"0,0": 1, "1,0": 2, "0,1": "3/2", "2,0": 2, "1,1": 2, "0,2": "9/5"},
          "beta_sq": {"0,0": 2, "1,0": 3, "0,1": "5/2", "2,0": 3, "1,1": 3, "0,2": "14/5"}}


def go(command, instance):
    return run(command, parse_instance(json.dumps(instance).encode()))


def test_parse_examples():
    assert parse_instance(json.dumps(QUAD)).payload == QuadraticData(1, 1, 2, 2, 1)
    inst = parse_instance(b'{"kind":"scp1d","alpha_sq":["3/2","5/3","9/5"]}')
    assert isinstance(inst.payload, WeightSeq1) and inst.depth == 6


@pytest.mark.parametrize("text, err", [
    (b'{"kind":"scp2d-quadratic","a":"0","b":1,"c":1,"d":1,"e":1}', ValidationError),
    (b'{"kind":"scp2d-quadratic","a":1,"b":1,"c":1,"d":1,"e":1,"f":1}', ParseError),
    (b'{"kind":"scp2d-quadratic","a":1.5,"b":1,"c":1,"d":1,"e":1}', ParseError),
    (b'{"kind":"nope"}', ParseError),
    (b'{"kind":"scp1d",\n "alpha_sq": [1,}', ParseError),
    (b'{"kind":"moments","moments":[[1],[2]]}', ValidationError),
    (b'{"kind":"scp1d","alpha_sq":[1],"depth":1}', ValidationError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_instance(text)


def test_parse_error_has_position():
    with pytest.raises(ParseError, match="line 2"):
        parse_instance(b'{"kind":"scp1d",\n "alpha_sq": [1,}')


def test_complete_reference():
    report, code = go("complete", QUAD)
    assert code == 0 and len(report.measure) == 3
    assert [a["density"] for a in report.measure] == ["1/3", "1/6", "1/2"]
    assert report.new_weights["r"] == "1/2"


def test_obstruct_reference():
    report, code = go("obstruct", SHIFTED)
    assert code == 1 and report.status == "Obstructed"
    assert list(report.witness) == ["7376/1", "7375/1"]


def test_other_commands():
    assert go("check", {"kind": "scp1d", "alpha_sq": [2, 1]})[1] == 1
    assert go("check", QUAD)[1] == 0
    assert go("complete", FAMILY)[0].case == "singular_rank2"
    report, code = go("translate", {**ORIGINAL, "translate": [3, 4]})
    assert code == 0 and [x.split("/")[0] for x in report.moments[4]] == \
        ["354", "331", "371", "535", "972"]
    assert go("obstruct", ORIGINAL)[0].relations == ("YX",)
    assert go("relations", ORIGINAL)[0].rank == 5
    assert go("hypo", QUAD)[1] == 0
    assert go("translate", ORIGINAL)[1] == 2
    assert go("obstruct", QUAD)[1] == 2
    assert go("complete", {"kind": "scp1d", "alpha_sq": [1, 2, 3, 4]})[1] == 2
    assert go("complete", {**QUAD, "c": "1/2"})[0].status == "NoCompletion"


def test_text_mode_uses_delta_notation():
    report, _ = go("complete", {**QUAD, "c": 1, "d": 1})
    assert "μ = δ_{(1,1)}" in format_report(report, "text").decode().splitlines()
    text = format_report(go("complete", {"kind": "scp1d", "alpha_sq": [1, 2, 3]})[0]).decode()
    assert "√2" in text


@pytest.mark.parametrize("command, instance", [
    ("complete", QUAD), ("obstruct", SHIFTED), ("complete", {"kind": "scp1d", "alpha_sq": [1, 2, 3]}),
    ("check", {"kind": "scp1d", "alpha_sq": [2, 1]}), ("hypo", QUAD), ("relations", ORIGINAL),
])
def test_json_round_trip_and_no_floats(command, instance):
    report, code = go(command, instance)
    once = format_report(report, "json")
    back = Report.from_json(once)
    assert back == report
    assert format_report(back, "json") == once
    assert back.exit_code == code
    for mode in ("json", "text"):
        assert not re.search(r"\d\.\d", format_report(report, mode).decode())
    rationals = re.findall(r'"(-?\d+(?:/\d+)?)"(?!:)', once.decode())
    assert all("/" in r for r in rationals)


def test_main_with_files(tmp_path, capsys):
    src = tmp_path / "q.json"
    src.write_text(json.dumps(QUAD))
    out = tmp_path / "r.json"
    assert main(["complete", "--input", str(src), "--format", "json", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["case"] == "rank3_e_lt_c"
    assert main(["check", "--input", str(tmp_path / "missing.json")]) == 2
    assert "InputError" in capsys.readouterr().out


def test_console_entry_point_via_stdin():
    proc = subprocess.run([sys.executable, "-m", "scpkit", "obstruct", "--format", "json"],
                          input=json.dumps(SHIFTED).encode(), capture_output=True)
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["witness"] == ["7376/1", "7375/1"]
