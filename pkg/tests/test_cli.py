import json

import pytest

from shockstab.cli import main
from shockstab.fixtures import make_shocked_fixture


@pytest.fixture(scope="module")
def fixture_csv(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "shocked.csv"
    make_shocked_fixture().to_csv(path)
    return path


def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_schema_command(write_csv, capsys):
    path = write_csv("t.csv", "age,sector\n31,fin\n45,trade\n")
    code, out = _run(capsys, "schema", path)
    assert code == 0
    assert out["row_count"] == 2
    kinds = {c["name"]: c["kind"] for c in out["columns"]}
    assert kinds == {"age": "numerical", "sector": "categorical"}


def test_schema_categorical_override(write_csv, capsys):
    path = write_csv("g.csv", "gender\n0\n1\n0\n")
    code, out = _run(capsys, "schema", path, "--categorical-override", "2")
    assert out["columns"][0]["kind"] == "categorical"


def test_ds_command_and_json_out(write_csv, capsys, tmp_path):
    base = write_csv("base.csv", "x,s\n0,a\n1,b\n")
    shock = write_csv("shock.csv", "x,s\n5,a\n6,a\n")
    out_path = tmp_path / "ds.json"
    code, out = _run(capsys, "ds", base, shock, "--json", out_path)
    assert code == 0
    assert out["ds"] == pytest.approx(0.75)
    assert out["is_shock"]
    assert json.loads(out_path.read_text()) == out


def test_ds_exclude(write_csv, capsys):
    base = write_csv("b2.csv", "x,s\n0,a\n1,b\n")
    shock = write_csv("s2.csv", "x,s\n5,a\n6,a\n")
    code, out = _run(capsys, "ds", base, shock, "--exclude", "x")
    assert out["ds"] == pytest.approx(0.5)


def test_ss_command(capsys):
    code, out = _run(capsys, "ss", "--auc-base", "0.9", "--auc-shock", "0.4", "--ds", "0")
    assert code == 0
    assert out["ss"] == pytest.approx(0.70000299995500070, abs=1e-12)


def test_su_command(capsys):
    code, out = _run(
        capsys, "su", "--a", "0.75,0.65", "--b", "0.75,0.74", "--ds", "0.1"
    )
    assert code == 0
    assert out["su"] == pytest.approx(0.26648605124576667, abs=1e-12)
    assert out["su_display"] == out["su"]
    assert set(out) >= {"w_a", "w_b", "w", "w_sup", "ss_a", "ss_b"}


def test_su_grid_flat_list(tmp_path, capsys):
    records = [
        {
            "model": "m",
            "outliers_pct": "without",
            "auc_base_a": 0.75,
            "auc_shock_a": 0.65,
            "auc_base_b": 0.75,
            "auc_shock_b": 0.74,
        }
    ]
    path = tmp_path / "flat.json"
    path.write_text(json.dumps(records))
    code, out = _run(capsys, "su-grid", path, "--ds", "0.1")
    assert code == 0
    assert out["rows"][0]["cells"]["m"]["su"] == pytest.approx(0.2664860512, abs=1e-9)


def test_su_grid_per_run(tmp_path, capsys):
    table = {
        "ds": 0.1,
        "models": [
            {
                "name": "m",
                "levels": [
                    {
                        "outliers_pct": 5,
                        "runs": [
                            {"auc_base_a": 0.8, "auc_shock_a": 0.7,
                             "auc_base_b": 0.8, "auc_shock_b": 0.75},
                            {"auc_base_a": 0.81, "auc_shock_a": 0.72,
                             "auc_base_b": 0.82, "auc_shock_b": 0.74},
                        ],
                    }
                ],
            }
        ],
    }
    path = tmp_path / "nested.json"
    path.write_text(json.dumps(table))
    code, out = _run(capsys, "su-grid", path)
    assert code == 0
    assert out["models"] == ["m"]
    code, out = _run(capsys, "su-grid", path, "--per-run")
    assert code == 0
    assert out["models"] == ["m#run0", "m#run1"]


def test_su_grid_requires_ds_for_flat(tmp_path, capsys):
    path = tmp_path / "flat2.json"
    path.write_text(json.dumps([]))
    code, _ = _run(capsys, "su-grid", path)
    assert code == 2


def test_split_command_writes_files(fixture_csv, tmp_path, capsys):
    out_dir = tmp_path / "splits"
    code, out = _run(
        capsys,
        "split", fixture_csv,
        "--mode", "oot", "--date-col", "date", "--shock-date", "2018-03-22",
        "--runs", "2", "--seed", "3", "--out", out_dir,
    )
    assert code == 0
    assert len(out["files"]) == 6
    assert (out_dir / "train_000.csv").exists()
    assert (out_dir / "shock_001.csv").exists()


def test_synth_command(fixture_csv, tmp_path, capsys):
    out_csv = tmp_path / "synth.csv"
    mask_json = tmp_path / "mask.json"
    code, out = _run(
        capsys,
        "synth", fixture_csv,
        "--rows", "200", "--outliers-pct", "10", "--family", "gumbel",
        "--seed", "5", "--nonneg", "volume,price",
        "--out", out_csv, "--mask-out", mask_json,
    )
    assert code == 0
    assert out["rows"] == 200
    assert out["outliers"] == 20
    mask = json.loads(mask_json.read_text())
    assert mask["family"] == "gumbel"
    assert len(mask["outlier_rows"]) == 20
    assert out_csv.exists()


def test_calibrate_command(tmp_path, capsys):
    anchors = [
        {
            "a_base": 0.8, "a_shock": 0.7, "b_base": 0.8, "b_shock": 0.7,
            "ds": 0.2, "target_su": 0.0,
        }
    ]
    path = tmp_path / "anchors.json"
    path.write_text(json.dumps(anchors))
    code, out = _run(capsys, "calibrate", path)
    assert code == 0
    assert out["objective"] == 0.0
    assert out["coefficients"] == {"k1": 50.0, "k2": 500.0, "k3": 500.0}

    code, out = _run(
        capsys, "calibrate", path, "--grid", "k1=100;k2=1000;k3=1000"
    )
    assert out["coefficients"] == {"k1": 100.0, "k2": 1000.0, "k3": 1000.0}


def test_sweep_command(tmp_path, capsys):
    records = [
        {
            "model": "m", "outliers_pct": 5,
            "auc_base_a": 0.8, "auc_shock_a": 0.7,
            "auc_base_b": 0.82, "auc_shock_b": 0.78,
        }
    ]
    path = tmp_path / "recs.json"
    path.write_text(json.dumps(records))
    code, out = _run(capsys, "sweep", path, "--ds", "0.2")
    assert code == 0
    assert len(out["entries"]) == 27
    assert out["all_preserved"] in (True, False)


def test_train_eval_command(fixture_csv, capsys):
    code, out = _run(
        capsys,
        "train-eval", fixture_csv, "--label", "is_bad",
        "--mode", "oot", "--date-col", "date", "--shock-date", "2018-03-22",
        "--runs", "3", "--seed", "1",
    )
    assert code == 0
    assert len(out["runs"]) == 3
    assert out["auc_shock"]["median"] < out["auc_base"]["median"]


def test_pipeline_command_and_report(fixture_csv, tmp_path, capsys):
    config = {
        "input": str(fixture_csv),
        "label": "is_bad",
        "split": {
            "mode": "oot",
            "date_column": "date",
            "shock_date": "2018-03-22",
            "mc_runs": 3,
            "seed": 4,
        },
        "levels": ["without", 5],
        "seed": 4,
        "upsample_target": 4000,
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config))
    code, out = _run(capsys, "pipeline", cfg_path)
    assert code == 0
    assert len(out["levels"]) == 2

    report_path = tmp_path / "report.json"
    report_path.write_text(json.dumps(out))
    code, radial = _run(capsys, "report", "radial", report_path)
    assert code == 0
    assert len(radial["levels"]) == 2

    code, digest = _run(capsys, "report", "digest", report_path)
    assert code == 0
    assert digest["rows"][0]["model"] == "B"


def test_pipeline_override_flags(fixture_csv, tmp_path, capsys):
    config = {
        "input": str(fixture_csv),
        "label": "is_bad",
        "split": {
            "mode": "oot",
            "date_column": "date",
            "shock_date": "2018-03-22",
            "mc_runs": 5,
            "seed": 4,
        },
        "levels": ["without"],
        "upsample_target": 4000,
    }
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps(config))
    code, out = _run(capsys, "pipeline", cfg_path, "--runs", "2", "--levels", "without,3")
    assert code == 0
    assert len(out["a_model"]["runs"]) == 2
    assert [l["outliers_pct"] for l in out["levels"]] == ["without", "3"]


def test_exit_codes(write_csv, tmp_path, capsys):
    # data error: unreadable file
    code, _ = _run(capsys, "schema", tmp_path / "nope.csv")
    assert code == 3
    # config error: bad pipeline config
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"input": "x", "label": "y", "levels": [],
                               "split": {"mode": "oos", "shock_fraction": 0.2}}))
    code, _ = _run(capsys, "pipeline", cfg)
    assert code == 2
    # domain error: AUC outside [0, 1]
    code, _ = _run(capsys, "ss", "--auc-base", "1.4", "--auc-shock", "0.5", "--ds", "0")
    assert code == 3


def test_pipeline_partial_exit_code(fixture_csv, tmp_path, capsys):
    # a 0.999 pseudo-shock fraction starves training: every cell fails
    config = {
        "input": str(fixture_csv),
        "label": "is_bad",
        "split": {"mode": "oos", "shock_fraction": 0.999, "mc_runs": 2, "seed": 1},
        "levels": ["without"],
        "seed": 1,
    }
    cfg = tmp_path / "partial.json"
    cfg.write_text(json.dumps(config))
    code, out = _run(capsys, "pipeline", cfg)
    assert code == 4
    assert out["partial"]


def test_report_radial_rejects_grid_json(tmp_path, capsys):
    grid = {"ds": 0.1, "rows": [], "models": []}
    path = tmp_path / "grid.json"
    path.write_text(json.dumps(grid))
    code, _ = _run(capsys, "report", "radial", path)
    assert code == 2
