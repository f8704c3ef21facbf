import json

import pytest

from parahoric_lab.cli import main
from parahoric_lab.degree_stability import ParabolicHiggsDatum, full_report
from parahoric_lab.laurent import LaurentMatrix

HALF_DATUM = {"n": 2, "degrees": [0, 0], "points": [{"theta": [["1", "2"], ["0", "1"]]}]}
STABLE_DATUM = dict(HALF_DATUM, higgs=[[0, 0], [1, 0]])


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, "--json", *argv)
    return code, json.loads(out)


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def test_profile_golden(capsys):
    code, out = run_json(capsys, "profile", '{"theta":[["1","2"],["-1","2"]],"group":"sl","n":2}')
    assert code == 0
    assert out["cells"] == [["A", "z^{-1}A"], ["zA", "A"]]
    assert out["bounds"] == [[0, -1], [1, 0]]


def test_profile_variants(capsys):
    _, out = run_json(capsys, "profile", "--theta", "0,0,0")
    assert out["cells"] == [["A"] * 3] * 3
    _, out = run_json(capsys, "profile", "--theta", "0,1/3,2/3")
    assert out["bounds"] == [[0, 1, 1], [0, 0, 1], [0, 0, 0]]
    code, text, _ = run(capsys, "profile", "--theta", "0,1/2", "--both-conventions")
    assert code == 0 and "transposed reading" in text
    _, out = run_json(capsys, "profile", "--theta", "0,1/2", "--both-conventions")
    assert out["cells_transposed"] == [["A", "A"], ["zA", "A"]]


def test_parse_error_reports_position(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"theta": [1,\n  2,,]}')
    code, _, err = run(capsys, "profile", bad)
    assert code == 3
    assert "line 2" in err and "column" in err


def test_lift_descend_round_trip(capsys, tmp_path):
    src = {"theta": ["1/2", "-1/2"], **LaurentMatrix.from_terms([[1, {-1: 2}], [{1: 3}, 1]]).to_json()}
    code, lifted = run_json(capsys, "--verify", "lift", write(tmp_path, "z.json", src))
    assert code == 0 and lifted["d"] == 2 and lifted["a"] == [1, -1]
    assert LaurentMatrix.from_json(lifted) == LaurentMatrix.from_terms([[1, 2], [3, 1]], var="w")
    code, back = run_json(capsys, "descend", "--verify", write(tmp_path, "w.json", lifted))
    assert code == 0
    assert LaurentMatrix.from_json(back) == LaurentMatrix.from_json(src)


def test_identity_round_trip(capsys, tmp_path):
    src = {"d": 3, "a": [0, 1, 2], **LaurentMatrix.identity(3, "w").to_json()}
    code, out = run_json(capsys, "--verify", "descend", write(tmp_path, "i.json", src))
    assert code == 0 and out["theta"] == ["0/1", "1/3", "2/3"]
    assert LaurentMatrix.from_json(out).is_identity()


def test_higgs_at_zero_weight_unchanged(capsys, tmp_path):
    phi = LaurentMatrix.from_terms([[1, 0], [{1: 1}, -1]], kind="higgs")
    code, out = run_json(capsys, "lift", write(tmp_path, "phi.json", {"theta": [0, 0], **phi.to_json()}))
    assert code == 0 and out["d"] == 1
    assert LaurentMatrix.from_json(out) == phi.replace(var="w")


def test_descend_reports_offending_entry(capsys, tmp_path):
    src = {"d": 2, "a": [0, 1], **LaurentMatrix.from_terms([[1, 1], [0, 1]], var="w").to_json()}
    code, _, err = run(capsys, "descend", write(tmp_path, "bad.json", src))
    assert code == 3 and "entry (1,2) has exponent 0" in err


def test_member_and_liftability(capsys, tmp_path):
    phi = LaurentMatrix.from_terms([[1, 0], [{1: 1}, -1]], kind="higgs")
    path = write(tmp_path, "phi.json", {"theta": [0, 0], **phi.to_json()})
    code, out = run_json(capsys, "member", path, "--parabolic", "1,1", "--opposite")
    assert code == 0 and out["liftable"] is True
    code, out = run_json(capsys, "member", path, "--parabolic", "1,1")
    assert code == 1 and out["liftable"] is False
    g = LaurentMatrix.from_terms([[1, {-2: 1}], [0, 1]])
    code, text, _ = run(capsys, "member", write(tmp_path, "g.json", {"theta": ["1/2", "-1/2"], **g.to_json()}))
    assert code == 1 and "exponent -2 below bound -1" in text


def test_degree_command(capsys, tmp_path):
    path = write(tmp_path, "d.json", HALF_DATUM)
    code, out = run_json(capsys, "degree", path, "--subset", "1", "--flag", "1;1,2",
                         "--character=-1,1", "--cover-order", "2")
    assert code == 0
    assert out["canonical_mu"] == "1/4"
    assert out["subset"]["par_deg"] == "1/2"
    assert out["parahoric_degree"] == {"via_character": "-1/2", "via_blocks": "-1/2"}
    assert out["equivariant_degree"]["value"] == "-1/1"


@pytest.mark.parametrize(
    "obj, code",
    [
        (STABLE_DATUM, 0),
        ({"n": 1, "degrees": [3]}, 0),
        ({"n": 2, "degrees": [0, 0]}, 1),
        (HALF_DATUM, 2),
    ],
)
def test_stability_exit_codes(capsys, tmp_path, obj, code):
    got, out = run_json(capsys, "stability", write(tmp_path, "d.json", obj))
    assert got == code
    assert len(set(out["verdicts"].values())) == 1


def test_stability_report_json(capsys, tmp_path):
    _, out = run_json(capsys, "stability", write(tmp_path, "d.json", HALF_DATUM))
    assert out["verdicts"]["slope"] == "unstable"
    assert out["witnesses"]["slope"] == {"subset": [1], "margin": "-1/4"}
    assert out["witnesses"]["R"]["subset"] == out["witnesses"]["R_mu"]["subset"] == [1]


def test_stability_input_errors(capsys, tmp_path):
    assert run(capsys, "stability", write(tmp_path, "a.json", {"n": 2, "degrees": [0]}))[0] == 3
    assert run(capsys, "stability", write(tmp_path, "b.json", {"degrees": [0]}))[0] == 3
    assert run(capsys, "stability", tmp_path / "missing.json")[0] == 3


def scan_config(higgs=None, **grid):
    cfg = {"n": 2, "degrees": [0, 0], "grid": [[grid.get("x", {"start": "0", "stop": "1", "den": 4}),
                                                 grid.get("y", {"start": "0", "stop": "1", "den": 4})]]}
    if higgs is not None:
        cfg["higgs"] = higgs
    return cfg


def rows_of(text):
    lines = text.splitlines()
    assert lines[0] == "#parahoric-lab v1"
    header = lines[1].split(",")
    return [dict(zip(header, line.split(","))) for line in lines[2:]]


def test_walls_single_point_matches_stability(capsys, tmp_path):
    cfg = scan_config([[0, 0], [1, 0]], x={"values": ["1/2"]}, y="0")
    code, text, _ = run(capsys, "walls", write(tmp_path, "w.json", cfg))
    assert code == 0
    (row,) = rows_of(text)
    rep = full_report(ParabolicHiggsDatum.from_json(STABLE_DATUM))
    assert [row["R"], row["R_mu"], row["slope"]] == list(rep.verdicts.values())
    assert row["mu"] == "1/4"


def test_walls_flip_across_wall(capsys, tmp_path):
    # theta = (t, 0) without Higgs field: slope of {1} is t, of E is t/2; the wall is t = 0
    cfg = scan_config(x={"values": ["0", "1/2"]}, y="0")
    _, text, _ = run(capsys, "walls", write(tmp_path, "w.json", cfg))
    first, second = rows_of(text)
    assert first["slope"] == "semistable" and first["margin"] == "0/1"
    assert second["slope"] == "unstable" and second["witness"] == "1"


def test_walls_higgs_only_helps(capsys, tmp_path):
    _, bare, _ = run(capsys, "walls", write(tmp_path, "a.json", scan_config()))
    _, higgs, _ = run(capsys, "walls", write(tmp_path, "b.json", scan_config([[0, 0], [1, 0]])))
    rank = {"unstable": 0, "semistable": 1, "stable": 2}
    for a, b in zip(rows_of(bare), rows_of(higgs)):
        assert rank[b["slope"]] >= rank[a["slope"]]


def test_walls_output_file_and_errors(capsys, tmp_path):
    cfg = write(tmp_path, "w.json", scan_config())
    out = tmp_path / "scan.csv"
    assert run(capsys, "walls", cfg, "-o", out)[0] == 0
    assert len(rows_of(out.read_text())) == 25
    assert run(capsys, "walls", cfg, "-o", tmp_path / "no" / "such" / "dir.csv")[0] == 3
    bad = write(tmp_path, "bad.json", scan_config(x={"start": "0", "stop": "1", "den": 0}))
    assert run(capsys, "walls", bad)[0] == 3


def test_walls_parallel_matches_serial(capsys, tmp_path):
    cfg = write(tmp_path, "w.json", scan_config([[0, 0], [1, 0]]))
    _, serial, _ = run(capsys, "walls", cfg)
    _, parallel, _ = run(capsys, "walls", cfg, "--jobs", "2")
    assert serial == parallel


def test_hecke_command(capsys):
    code, out = run_json(capsys, "hecke", "--theta", "1/2,-1/2", "--shift", "0,0", "--check")
    assert code == 0 and out["bounds"] == [[0, -1], [1, 0]] and out["check"] is True
    _, out = run_json(capsys, "hecke", "--theta", "1/2,-1/2", "--shift", "2,2")
    assert out["bounds"] == [[0, -1], [1, 0]]
    _, out = run_json(capsys, "hecke", "--theta", "1/2,-1/2", "--shift", "1,0", "--check")
    assert out["bounds"] == [[0, -2], [2, 0]] and out["theta"] == ["3/2", "-1/2"]
    assert run(capsys, "hecke", "--theta", "1/2,-1/2", "--shift", "1/2,0")[0] == 3


def test_profile_json_feeds_back(capsys):
    _, first = run_json(capsys, "profile", "--theta", "1/3,-1/6,0")
    _, again = run_json(capsys, "profile", json.dumps({"theta": first["theta"]}))
    assert again == first


def test_outputs_are_deterministic(capsys, tmp_path):
    path = write(tmp_path, "d.json", STABLE_DATUM)
    assert run(capsys, "--json", "stability", path) == run(capsys, "--json", "stability", path)
