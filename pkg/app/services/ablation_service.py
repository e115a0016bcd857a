"""
절제 실험 그리드 서비스
이름 있는 그리드 또는 'key=v1,v2;key=v' 형태의 명시적 데카르트 곱
"""
import itertools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

from app.core.exceptions import ConfigValidationError
from app.schemas.experiment import ExperimentConfig
from app.services.config_service import build_config
from app.services.experiment_service import ExperimentResult, run_experiment

logger = logging.getLogger(__name__)

Overrides = Dict[str, Any]

# 그리드 키 → 설정 점 표기 키
GRID_KEYS = {
    "mode": "mode",
    "aug": "aug_enabled",
    "dcl": "dcl_enabled",
    "contrastive": "contrastive_mode",
    "tf": "schedule.matrix_update_period",
    "xi": "data.corruption_rate",
    "scheme": "partition.scheme",
    "beta": "partition.beta",
}

NAMED_GRIDS: Dict[str, List[Tuple[str, Overrides]]] = {
    "ablation": [
        ("baseline", {"mode": "local_only", "aug_enabled": False, "dcl_enabled": False}),
        ("hfl", {"mode": "hfl_symmetric", "aug_enabled": False, "dcl_enabled": False}),
        ("asym_hfl", {"mode": "asym_hfl", "aug_enabled": False, "dcl_enabled": False}),
        ("asym_hfl_aug", {"mode": "asym_hfl", "aug_enabled": True, "dcl_enabled": False}),
        ("rahfl", {"mode": "rahfl", "aug_enabled": True, "dcl_enabled": True}),
    ],
    "contrastive": [
        ("without_scl", {"mode": "rahfl", "aug_enabled": True, "dcl_enabled": False}),
        ("supcon", {"mode": "rahfl", "aug_enabled": True, "dcl_enabled": True, "contrastive_mode": "supcon"}),
        ("dcl", {"mode": "rahfl", "aug_enabled": True, "dcl_enabled": True, "contrastive_mode": "dcl"}),
    ],
    "matrix-period": [
        (f"tf{period}", {"mode": "rahfl", "schedule.matrix_update_period": period}) for period in range(1, 6)
    ],
    "noniid": [
        ("iid", {"partition.scheme": "iid"}),
        ("dirichlet_1.0", {"partition.scheme": "dirichlet", "partition.beta": 1.0}),
    ],
}


@dataclass
class GridRun:
    """그리드 변형 하나의 결과"""
    label: str
    config: ExperimentConfig
    result: ExperimentResult


def _coerce(value: str) -> Any:
    lowered = value.strip().lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            continue
    return value.strip()


def parse_grid(spec: str) -> List[Tuple[str, Overrides]]:
    """그리드 이름 또는 'mode=rahfl,asym_hfl;xi=0.5' → (라벨, 오버라이드) 목록"""
    if spec in NAMED_GRIDS:
        return NAMED_GRIDS[spec]

    axes = []
    for part in filter(None, (chunk.strip() for chunk in spec.split(";"))):
        key, sep, values = part.partition("=")
        key = key.strip()
        if not sep or key not in GRID_KEYS or not values.strip():
            raise ConfigValidationError(f"잘못된 그리드 항목: '{part}' (키: {', '.join(GRID_KEYS)})", ["grid"])
        axes.append([(key, raw.strip()) for raw in values.split(",") if raw.strip()])
    if not axes:
        raise ConfigValidationError(f"알 수 없는 그리드: '{spec}' (이름: {', '.join(NAMED_GRIDS)})", ["grid"])

    variants = []
    for combo in itertools.product(*axes):
        overrides = {GRID_KEYS[key]: _coerce(raw) for key, raw in combo}
        label = "_".join(f"{key}-{raw}" for key, raw in combo)
        variants.append((label, overrides))
    return variants


def variant_config(base: Dict[str, Any], overrides: Overrides, output_dir: str) -> ExperimentConfig:
    """기본 설정 + 오버라이드 (모드만 바뀌면 aug/dcl 은 모드 기본값으로 재결정)"""
    raw = dict(base)
    if "mode" in overrides:
        for flag in ("aug_enabled", "dcl_enabled"):
            if flag not in overrides:
                raw[flag] = None
    return build_config(raw, overrides={**overrides, "output_dir": output_dir})


def run_grid(base: ExperimentConfig, spec: str, out_root: Union[str, Path]) -> List[GridRun]:
    """변형을 순차 실행 (데이터 시드는 공유)"""
    out_root = Path(out_root)
    base_raw = base.to_effective_dict()
    variants = parse_grid(spec)
    logger.info(f"그리드 '{spec}' 실행: {len(variants)}개 변형, 시드={base.seed}")

    runs = []
    for label, overrides in variants:
        config = variant_config(base_raw, overrides, str(out_root / label))
        result = run_experiment(config, out_dir=config.output_dir)
        runs.append(GridRun(label=label, config=config, result=result))
    return runs
