"""
CLI / 지표 파일 테스트
"""
import json

import numpy as np
import pytest

from app.core.exceptions import ConfigValidationError
from app.main import run_cli
from app.repositories.dataset_repository import load_manifest_dataset
from app.repositories.metrics_repository import MetricsRepository
from app.services.ablation_service import NAMED_GRIDS, parse_grid, variant_config
from tests.conftest import tiny_raw


@pytest.fixture
def config_file(tmp_path):
    def _write(**overrides):
        path = tmp_path / "config.input.json"
        path.write_text(json.dumps(tiny_raw(**overrides)))
        return path
    return _write


def test_run_is_byte_reproducible(tmp_path, config_file):
    path = config_file(mode="rahfl", seed=5)
    assert run_cli(["run", "--config", str(path), "--out", str(tmp_path / "a")]) == 0
    assert run_cli(["run", "--config", str(path), "--out", str(tmp_path / "b")]) == 0
    for name in ("metrics.jsonl", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    lines = (tmp_path / "a" / "metrics.jsonl").read_text().splitlines()
    assert len(lines) == 3
    assert [json.loads(line)["round"] for line in lines] == [0, 1, 2]
    effective = json.loads((tmp_path / "a" / "config.json").read_text())
    assert effective["seed"] == 5 and effective["aug_enabled"] is True


def test_seed_flag_changes_results(tmp_path, config_file):
    path = config_file(seed=5)
    run_cli(["run", "--config", str(path), "--out", str(tmp_path / "a")])
    run_cli(["run", "--config", str(path), "--seed", "6", "--out", str(tmp_path / "b")])
    assert json.loads((tmp_path / "b" / "config.json").read_text())["seed"] == 6
    assert (tmp_path / "a" / "metrics.jsonl").read_bytes() != (tmp_path / "b" / "metrics.jsonl").read_bytes()


def test_invalid_mode_is_usage_error(config_file):
    assert run_cli(["run", "--config", str(config_file()), "--mode", "bogus"]) == 2


def test_missing_config_fails(tmp_path):
    assert run_cli(["run", "--config", str(tmp_path / "missing.toml")]) == 1


def test_invalid_config_fails(tmp_path, config_file):
    path = config_file(data={"corruption_rate": 1.5})
    assert run_cli(["run", "--config", str(path), "--out", str(tmp_path / "x")]) == 1
    assert not (tmp_path / "x").exists()


def test_zero_rounds_write_empty_files(tmp_path, config_file):
    path = config_file(schedule={"rounds": 0})
    assert run_cli(["run", "--config", str(path), "--out", str(tmp_path / "out")]) == 0
    assert (tmp_path / "out" / "metrics.jsonl").read_text() == ""
    assert (tmp_path / "out" / "summary.csv").read_text() == "mode,seed,client_id,arch,acc_clean_final,acc_corrupt_final\n"


def test_summary_average_row(tmp_path, config_file):
    path = config_file(mode="asym_hfl")
    run_cli(["run", "--config", str(path), "--out", str(tmp_path / "out")])
    repository = MetricsRepository(tmp_path / "out")
    rows = repository.read_summary()
    assert [row["client_id"] for row in rows] == ["0", "1", "2", "avg"]
    assert [row["arch"] for row in rows] == ["mlp_16", "mlp_12_8", "mlp_16", ""]
    clients, avg = rows[:-1], rows[-1]
    for column in ("acc_clean_final", "acc_corrupt_final"):
        assert float(avg[column]) == pytest.approx(np.mean([float(row[column]) for row in clients]))

    last = repository.read_metrics()[-1]
    assert [float(row["acc_clean_final"]) for row in clients] == last.acc_clean
    assert last.acc_clean_avg == pytest.approx(float(avg["acc_clean_final"]))


def test_mode_flag_resets_toggles(tmp_path, config_file):
    path = config_file(mode="rahfl")
    run_cli(["run", "--config", str(path), "--mode", "asym_hfl", "--out", str(tmp_path / "out")])
    effective = json.loads((tmp_path / "out" / "config.json").read_text())
    assert effective["mode"] == "asym_hfl"
    assert effective["aug_enabled"] is False and effective["dcl_enabled"] is False


def test_ablate_modes_share_data_seed(tmp_path, config_file):
    path = config_file(seed=9)
    grid = "mode=local_only,hfl_symmetric,asym_hfl,rahfl"
    assert run_cli(["ablate", "--config", str(path), "--grid", grid, "--out", str(tmp_path / "grid")]) == 0

    effective = []
    for mode in ("local_only", "hfl_symmetric", "asym_hfl", "rahfl"):
        out = tmp_path / "grid" / f"mode-{mode}"
        assert len((out / "metrics.jsonl").read_text().splitlines()) == 3
        effective.append(json.loads((out / "config.json").read_text()))
    assert {e["seed"] for e in effective} == {9}
    assert all(e["data"] == effective[0]["data"] for e in effective)
    assert [(e["aug_enabled"], e["dcl_enabled"]) for e in effective][-1] == (True, True)


def test_parse_grid_product_and_named():
    variants = parse_grid("mode=asym_hfl,rahfl;xi=0.0,0.5")
    assert [label for label, _ in variants] == [
        "mode-asym_hfl_xi-0.0", "mode-asym_hfl_xi-0.5", "mode-rahfl_xi-0.0", "mode-rahfl_xi-0.5",
    ]
    assert variants[1][1] == {"mode": "asym_hfl", "data.corruption_rate": 0.5}
    assert [label for label, _ in parse_grid("ablation")] == [label for label, _ in NAMED_GRIDS["ablation"]]
    assert parse_grid("aug=false")[0][1] == {"aug_enabled": False}


@pytest.mark.parametrize("spec", ["nonsense", "colour=red", "mode="])
def test_parse_grid_rejects_bad_input(spec):
    with pytest.raises(ConfigValidationError) as excinfo:
        parse_grid(spec)
    assert excinfo.value.keys == ["grid"]


def test_variant_config_resets_toggles_with_mode():
    base = tiny_raw(mode="rahfl", aug_enabled=True, dcl_enabled=True)
    config = variant_config(base, {"mode": "asym_hfl"}, "out/x")
    assert not config.aug_enabled and not config.dcl_enabled
    kept = variant_config(base, {"mode": "asym_hfl", "aug_enabled": True}, "out/y")
    assert kept.aug_enabled and not kept.dcl_enabled
    assert kept.output_dir == "out/y"


def test_data_commands(tmp_path, capsys):
    assert run_cli(["gen-data", "--out", str(tmp_path / "clean"), "--count", "20", "--side", "8", "--seed", "1"]) == 0
    clean = load_manifest_dataset(tmp_path / "clean" / "manifest.json")
    assert len(clean) == 20 and clean.is_labeled

    assert run_cli(["corrupt", "--manifest", str(tmp_path / "clean" / "manifest.json"), "--xi", "1.0",
                    "--out", str(tmp_path / "dirty")]) == 0
    dirty = load_manifest_dataset(tmp_path / "dirty" / "manifest.json")
    np.testing.assert_array_equal(dirty.labels, clean.labels)
    assert not np.array_equal(dirty.images, clean.images)

    assert run_cli(["corrupt", "--manifest", str(tmp_path / "clean" / "manifest.json"), "--xi", "2",
                    "--out", str(tmp_path / "bad")]) == 2

    assert run_cli(["gen-data", "--out", str(tmp_path / "public"), "--count", "8", "--side", "8", "--no-labels"]) == 0
    assert not load_manifest_dataset(tmp_path / "public" / "manifest.json").is_labeled
    assert "저장" in capsys.readouterr().out


def test_manifest_source_run(tmp_path, config_file):
    run_cli(["gen-data", "--out", str(tmp_path / "source"), "--count", "160", "--side", "8", "--seed", "2"])
    path = config_file(data={"source": "manifest", "manifest_path": str(tmp_path / "source" / "manifest.json")})
    assert run_cli(["run", "--config", str(path), "--out", str(tmp_path / "out")]) == 0
    assert len(MetricsRepository(tmp_path / "out").read_metrics()) == 3


def test_inspect_metrics(tmp_path, config_file, capsys):
    run_cli(["run", "--config", str(config_file(mode="hfl_symmetric")), "--out", str(tmp_path / "out")])
    capsys.readouterr()
    assert run_cli(["inspect-metrics", "--dir", str(tmp_path / "out")]) == 0
    output = capsys.readouterr().out
    assert "round   2" in output
    assert "client_id=avg" in output


@pytest.mark.slow
def test_desk_preset_run(tmp_path):
    assert run_cli(["run", "--preset", "desk", "--seed", "0", "--out", str(tmp_path / "desk")]) == 0
    metrics = MetricsRepository(tmp_path / "desk").read_metrics()
    assert len(metrics) == 10
    assert metrics[-1].acc_clean_avg > 0.25
