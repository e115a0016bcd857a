"""
지표 파일 Repository 테스트
"""
import json

import pytest

from app.repositories.metrics_repository import MetricsRepository, build_summary, emit_metrics
from app.schemas.metrics import RoundMetrics

SCHEMA_KEYS = {
    "round", "acc_clean", "acc_corrupt", "loss_ce", "loss_jsd", "loss_supcon", "loss_dcl", "loss_col",
    "matrix_ones", "acc_clean_avg", "acc_corrupt_avg", "matrix_density", "kl_terms",
}


def _round(index: int, clean, corrupt) -> RoundMetrics:
    k = len(clean)
    return RoundMetrics(
        round=index,
        acc_clean=clean,
        acc_corrupt=corrupt,
        loss_ce=[1.0] * k,
        loss_jsd=[0.0] * k,
        loss_supcon=[0.0] * k,
        loss_dcl=[0.0] * k,
        loss_col=[0.5] * k,
        matrix_ones=1,
        acc_clean_avg=sum(clean) / k,
        acc_corrupt_avg=sum(corrupt) / k,
        matrix_density=0.5,
        kl_terms=[1, 0],
    )


def test_one_round_line_has_every_key(tmp_path):
    emit_metrics([_round(0, [0.5, 0.7], [0.25, 0.3])], tmp_path, mode="asym_hfl", seed=3, arch_names=["a", "b"])
    line = (tmp_path / "metrics.jsonl").read_text().splitlines()
    assert len(line) == 1
    assert set(json.loads(line[0])) == SCHEMA_KEYS
    assert not (tmp_path / "config.json").exists()


def test_summary_uses_last_round(tmp_path):
    metrics = [_round(0, [0.1, 0.2], [0.1, 0.1]), _round(1, [0.6, 0.9], [0.3, 0.4])]
    repository = emit_metrics(metrics, tmp_path, mode="rahfl", seed=0, arch_names=["a", "b"],
                              effective_config={"seed": 0})
    rows = repository.read_summary()
    assert rows[0] == {"mode": "rahfl", "seed": "0", "client_id": "0", "arch": "a",
                       "acc_clean_final": "0.6", "acc_corrupt_final": "0.3"}
    assert float(rows[-1]["acc_clean_final"]) == pytest.approx(0.75, abs=1e-9)
    assert float(rows[-1]["acc_corrupt_final"]) == pytest.approx(0.35, abs=1e-9)
    assert json.loads(repository.config_path.read_text()) == {"seed": 0}


def test_empty_metrics(tmp_path):
    assert build_summary([], "rahfl", 0, []) is None
    repository = emit_metrics([], tmp_path, mode="rahfl", seed=0, arch_names=[])
    assert repository.read_metrics() == []
    assert repository.read_summary() == []


def test_round_metrics_rejects_bad_accuracy():
    with pytest.raises(ValueError):
        _round(0, [1.5, 0.2], [0.1, 0.1])


def test_read_back_matches(tmp_path):
    metrics = [_round(0, [0.5, 0.7], [0.25, 0.3])]
    MetricsRepository(tmp_path).write_metrics(metrics)
    assert MetricsRepository(tmp_path).read_metrics() == metrics


def test_non_finite_loss_is_rejected_instead_of_written(tmp_path):
    broken = _round(0, [0.5, 0.7], [0.25, 0.3]).model_copy(update={"loss_ce": [float("nan"), 1.0]})
    with pytest.raises(ValueError):
        MetricsRepository(tmp_path).write_metrics([broken])
