"""
실험 지표 Repository
metrics.jsonl, summary.csv, config.json 기록/로드
"""
import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from app.core.constants import ExperimentConstants as EC
from app.schemas.metrics import ClientSummary, ExperimentSummary, RoundMetrics

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _format(value: float) -> str:
    return repr(float(value))


class MetricsRepository:
    """출력 디렉터리 단위 지표 파일 접근"""

    def __init__(self, out_dir: PathLike):
        self.out_dir = Path(out_dir)

    @property
    def metrics_path(self) -> Path:
        return self.out_dir / EC.METRICS_FILE

    @property
    def summary_path(self) -> Path:
        return self.out_dir / EC.SUMMARY_FILE

    @property
    def config_path(self) -> Path:
        return self.out_dir / EC.CONFIG_FILE

    def write_metrics(self, metrics: Sequence[RoundMetrics]) -> Path:
        """라운드당 JSON 한 줄"""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        lines = [json.dumps(m.model_dump(), separators=(",", ":"), allow_nan=False) for m in metrics]
        self.metrics_path.write_text("".join(f"{line}\n" for line in lines), encoding="utf-8")
        return self.metrics_path

    def write_summary(self, summary: Optional[ExperimentSummary]) -> Path:
        """클라이언트별 최종 정확도 + avg 행 (라운드가 없으면 헤더만)"""
        self.out_dir.mkdir(parents=True, exist_ok=True)
        with self.summary_path.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(EC.SUMMARY_COLUMNS)
            if summary is not None and summary.clients:
                for client in summary.clients:
                    writer.writerow([
                        summary.mode, summary.seed, client.client_id, client.arch,
                        _format(client.acc_clean_final), _format(client.acc_corrupt_final),
                    ])
                writer.writerow([
                    summary.mode, summary.seed, EC.AVG_ROW_ID, "",
                    _format(summary.acc_clean_avg), _format(summary.acc_corrupt_avg),
                ])
        return self.summary_path

    def write_config(self, effective: Dict[str, Any]) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.config_path.write_text(json.dumps(effective, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return self.config_path

    # ---- 조회 ----
    def read_metrics(self) -> List[RoundMetrics]:
        text = self.metrics_path.read_text(encoding="utf-8")
        return [RoundMetrics.model_validate_json(line) for line in text.splitlines() if line.strip()]

    def read_summary(self) -> List[Dict[str, str]]:
        with self.summary_path.open(newline="", encoding="utf-8") as f:
            return list(csv.DictReader(f))


def build_summary(metrics: Sequence[RoundMetrics], mode: str, seed: int, arch_names: Sequence[str]) -> Optional[ExperimentSummary]:
    """마지막 라운드 정확도로 요약 구성"""
    if not metrics:
        return None
    last = metrics[-1]
    clients = [
        ClientSummary(client_id=str(k), arch=arch, acc_clean_final=clean, acc_corrupt_final=corrupt)
        for k, (arch, clean, corrupt) in enumerate(zip(arch_names, last.acc_clean, last.acc_corrupt))
    ]
    return ExperimentSummary(mode=mode, seed=seed, clients=clients)


def emit_metrics(
    metrics: Sequence[RoundMetrics],
    out_dir: PathLike,
    *,
    mode: str,
    seed: int,
    arch_names: Sequence[str],
    effective_config: Optional[Dict[str, Any]] = None,
) -> MetricsRepository:
    """metrics.jsonl + summary.csv (+ config.json) 기록"""
    repository = MetricsRepository(out_dir)
    repository.write_metrics(metrics)
    repository.write_summary(build_summary(metrics, mode, seed, arch_names))
    if effective_config is not None:
        repository.write_config(effective_config)
    logger.info(f"지표 파일 기록: {repository.out_dir} ({len(metrics)} 라운드)")
    return repository
