from __future__ import annotations

import json
from pathlib import Path

from fplpp.bijection import base_fpl
from fplpp.cli import main
from fplpp.geometry import classify
from fplpp.dynamics import wieland_gyration
from fplpp.grid import FplGrid
from fplpp.partitions import PlanePartition, macmahon

GOLDEN = Path(__file__).parent / "golden"


def run(capsys, *argv: str) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


def test_count(capsys):
    assert run(capsys, "count", "1", "1", "1") == (0, "2\n")
    assert run(capsys, "count", "2", "3", "4") == (0, "490\n")
    assert run(capsys, "count", "3", "0", "5") == (0, "1\n")


def test_count_q(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out = run(capsys, "--json-out", str(report), "count", "2", "2", "2", "--q")
    assert code == 0 and "q" in out
    data = json.loads(report.read_text())
    assert data["counts"]["coefficients"] == [1, 1, 3, 3, 4, 3, 3, 1, 1]
    assert data["counts"]["value_at_1"] == 20


def test_usage_errors(capsys):
    assert main(["count", "1", "1"]) == 2
    assert main(["count", "-1", "1", "1"]) == 2
    assert main(["verify", "99"]) == 2
    assert main(["nonsense"]) == 2
    capsys.readouterr()


def test_invalid_triple_exit_code(capsys):
    assert main(["enumerate", "6", "1", "2", "5"]) == 1
    capsys.readouterr()


def test_verify_small(capsys, tmp_path):
    report = tmp_path / "v.json"
    code, out = run(capsys, "--json-out", str(report), "verify", "4")
    assert code == 0
    data = json.loads(report.read_text())
    assert all(c["passed"] for c in data["checks"])
    assert out.startswith(f"{len(data['checks'])}/{len(data['checks'])} checks passed")


def test_enumerate(capsys):
    code, out = run(capsys, "enumerate", "4", *map(str, _centers(4)))
    assert code == 0
    data = json.loads(out)
    sizes = (data["geometry"][k] for k in "abc")
    assert len(data["configurations"]) == macmahon(*sizes)


def _centers(n: int) -> tuple[int, int, int]:
    from fplpp.geometry import all_triples

    g = all_triples(n)[0]
    return g.A, g.B, g.C


def test_biject_round_trip(capsys, tmp_path):
    geo = classify(3, 11, 3, 7)
    pp_file = tmp_path / "pp.json"
    pp_file.write_text(json.dumps(PlanePartition.full(1, 1, 1).to_json()))
    code, out = run(capsys, "biject", "pp2fpl", str(pp_file), "--geometry", "3", "11", "3", "7", "--round-trip")
    assert code == 0
    fpl_file = tmp_path / "fpl.json"
    fpl_file.write_text(out)
    code, out = run(capsys, "biject", "fpl2pp", str(fpl_file), "--round-trip")
    assert code == 0
    data = json.loads(out)
    assert PlanePartition.from_json(data["partition"]) == PlanePartition.full(1, 1, 1)
    assert data["geometry"]["A"] == geo.A


def test_biject_needs_geometry(capsys, tmp_path):
    pp_file = tmp_path / "pp.json"
    pp_file.write_text(json.dumps(PlanePartition.empty(1, 1, 1).to_json()))
    assert main(["biject", "pp2fpl", str(pp_file)]) == 2
    capsys.readouterr()


def test_biject_box_mismatch(capsys, tmp_path):
    pp_file = tmp_path / "pp.json"
    pp_file.write_text(json.dumps(PlanePartition.empty(2, 1, 1).to_json()))
    assert main(["biject", "pp2fpl", str(pp_file), "--geometry", "3", "11", "3", "7"]) == 1
    capsys.readouterr()


def test_render_golden(capsys, tmp_path):
    geo_file = tmp_path / "geo.json"
    geo_file.write_text(json.dumps({"n": 3, "A": 11, "B": 3, "C": 7}))
    code, out = run(capsys, "render", str(geo_file), "--layer", "fixed")
    assert code == 0 and out == (GOLDEN / "fixed_111.txt").read_text()
    code, out = run(capsys, "render", str(geo_file), "--layer", "fpl")
    assert code == 0 and out == (GOLDEN / "base_111.txt").read_text()


def test_render_svg_is_deterministic(capsys, tmp_path):
    geo_file = tmp_path / "geo.json"
    geo_file.write_text(json.dumps({"n": 5, "A": _centers(5)[0], "B": _centers(5)[1], "C": _centers(5)[2]}))
    for layer in ("fpl", "fixed", "dominos", "hexagon", "pp", "hfpl"):
        first = run(capsys, "render", str(geo_file), "--format", "svg", "--layer", layer)
        second = run(capsys, "render", str(geo_file), "--format", "svg", "--layer", layer)
        assert first[0] == 0 and first == second
        assert first[1].startswith("<svg")


def test_render_to_file(capsys, tmp_path):
    pp_file = tmp_path / "pp.json"
    pp_file.write_text(json.dumps(PlanePartition.full(2, 2, 2).to_json()))
    out = tmp_path / "o.txt"
    assert main(["render", str(pp_file), "--layer", "hfpl", "--out", str(out)]) == 0
    assert "loops 0" in out.read_text()
    capsys.readouterr()


def test_gyrate(capsys, tmp_path):
    geo = classify(3, 11, 3, 7)
    g = base_fpl(geo)
    f = tmp_path / "g.json"
    f.write_text(json.dumps(g.to_json()))
    code, out = run(capsys, "gyrate", str(f), "--steps", "3")
    assert code == 0
    h = g
    for _ in range(3):
        h = wieland_gyration(h)
    assert FplGrid.from_json(json.loads(out)) == h


def test_global_flags_after_subcommand(capsys, tmp_path):
    report = tmp_path / "r.json"
    assert run(capsys, "count", "1", "1", "1", "--json-out", str(report)) == (0, "2\n")
    assert json.loads(report.read_text())["counts"]["value"] == 2
