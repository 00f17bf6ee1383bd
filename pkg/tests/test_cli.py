import csv
import json

import pytest

from vanetgame.cli import main
from vanetgame.configio import default_config_dict


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(default_config_dict()))
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_enumerate_lists_every_structure(capsys):
    assert main(["enumerate"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "id,structure,normalized,n_coalitions"
    assert len(lines) == 1 + 15
    structures = {row.split(",", 1)[1] for row in lines[1:]}
    assert '"1,2,3,4","1,2,3,4",1' in structures


def test_enumerate_writes_csv_and_manifest(tmp_path, config_file):
    out = tmp_path / "partitions.csv"
    assert main(["enumerate", "--config", config_file, "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["id", "structure", "normalized", "n_coalitions"]
    assert len(rows) == 16
    manifest = json.loads((tmp_path / "partitions.csv.manifest.json").read_text())
    assert manifest["command"] == "enumerate"
    assert manifest["version"]


def test_payoffs_all_singletons(capsys):
    assert main(["payoffs", "--structure", "1|2|3|4"]) == 0
    out = capsys.readouterr().out
    rows = [line.split(",") for line in out.strip().splitlines()[1:]]
    payoff = {(r[1], r[2]): float(r[3]) for r in rows if r[2] == "payoff"}
    assert payoff[("1", "payoff")] == pytest.approx(2.4, abs=1e-12)
    assert payoff[("2", "payoff")] == pytest.approx(2.4, abs=1e-12)
    assert payoff[("3", "payoff")] == 0.0
    assert payoff[("4", "payoff")] == 0.0


def test_payoffs_structure_by_id_matches_blocks(capsys):
    assert main(["payoffs", "--structure", "1"]) == 0
    by_id = capsys.readouterr().out
    assert main(["payoffs", "--structure", "1,2,3,4"]) == 0
    by_blocks = capsys.readouterr().out
    assert by_id == by_blocks


def test_payoffs_d_sweep_produces_rows_per_range(tmp_path, config_file):
    out = tmp_path / "payoffs.csv"
    assert main(["payoffs", "--config", config_file, "--d-sweep", "0.1,0.3",
                 "--out", str(out)]) == 0
    rows = read_csv(out)
    d_values = {row[0] for row in rows[1:]}
    assert d_values == {"0.1", "0.3"}


def test_encounter_csv_is_byte_identical_across_runs(tmp_path, config_file):
    out_a = tmp_path / "a.csv"
    out_b = tmp_path / "b.csv"
    args = ["encounter", "--config", config_file, "--d-sweep", "0.2,0.4",
            "--slots", "20000", "--seed", "5"]
    assert main(args + ["--out", str(out_a)]) == 0
    assert main(args + ["--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    rows = read_csv(out_a)
    assert rows[0] == ["d_km", "vehicle", "rsu", "estimate", "stderr", "analytic"]
    assert len(rows) == 1 + 2 * 4   # two sweep points, four pairs


def test_core_reports_membership(capsys, config_file):
    assert main(["core", "--config", config_file]) == 0
    out = capsys.readouterr().out
    assert "grand vector in core: yes" in out
    assert "sufficient conditions hold: no" in out
    assert "witness" in out


def test_simulate_emits_comparison_rows(tmp_path, config_file):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--config", config_file, "--structure", "1,2,3,4",
                 "--slots", "20000", "--seed", "3", "--out", str(out)]) == 0
    rows = read_csv(out)
    assert rows[0] == ["player", "quantity", "estimate", "stderr", "analytic",
                       "n_slots", "seed"]
    assert len(rows) == 1 + 12
    for row in rows[1:]:
        est, se, ana = float(row[2]), float(row[3]), float(row[4])
        assert abs(est - ana) <= max(4 * se, 5e-3)


def test_check_passes_on_default_config(capsys, config_file):
    assert main(["check", "--config", config_file]) == 0
    out = capsys.readouterr().out
    assert "[FAIL]" not in out
    assert out.count("[PASS]") >= 8


def test_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as err:
        main(["frobnicate"])
    assert err.value.code == 2


def test_invalid_config_exits_3(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    doc = default_config_dict()
    doc["game"]["p"] = [0.6, 1.7]
    doc["game"]["delta"] = [[0.5], [0.5]]
    bad.write_text(json.dumps(doc))
    assert main(["enumerate", "--config", str(bad)]) == 3
    err = capsys.readouterr().err
    assert "probability out of range" in err
    assert "shape mismatch" in err


def test_missing_config_file_exits_3(capsys):
    assert main(["core", "--config", "/nonexistent/cfg.json"]) == 3
    assert "cannot read" in capsys.readouterr().err


def test_bad_structure_spec_exits_3(capsys, config_file):
    assert main(["payoffs", "--config", config_file, "--structure", "1,2|9"]) == 3
    assert "error" in capsys.readouterr().err


def test_shipped_default_config_matches_builtin_defaults():
    import pathlib
    shipped = json.loads(
        (pathlib.Path(__file__).parent.parent / "configs" / "default.json").read_text())
    assert shipped == default_config_dict()


def test_from_geometry_fills_encounter_matrix(tmp_path, capsys):
    doc = default_config_dict()
    doc["encounter"] = {"from_geometry": True}
    doc["geometry"]["n_slots"] = 20000
    path = tmp_path / "geo.json"
    path.write_text(json.dumps(doc))
    assert main(["payoffs", "--config", str(path)]) == 0
    rows = [line.split(",") for line in capsys.readouterr().out.strip().splitlines()[1:]]
    gain = {r[1]: float(r[3]) for r in rows if r[2] == "rate_gain"}
    # d=0.2 on a unit square: reach well below the 0.5-matrix default
    assert 0.0 < gain["1"] < 0.2
