"""
실험 설정 로드 서비스
TOML/JSON 파일 → 프리셋 병합 → 평면 키 정리 → 검증 → 환경 변수 시드 적용
"""
import json
import logging
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

from pydantic import ValidationError

from app.core.config import Settings, get_settings
from app.core.constants import ErrorMessages
from app.core.constants import ExperimentConstants as EC
from app.core.exceptions import ConfigFileNotFoundError, ConfigValidationError
from app.schemas.experiment import SECTION_FIELDS, ExperimentConfig
from app.utils.validation_utils import ConfigValidation

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_config_file(path: PathLike) -> Dict[str, Any]:
    """확장자가 .json 이면 JSON, 그 외는 TOML"""
    path = Path(path)
    if not path.is_file():
        raise ConfigFileNotFoundError(ErrorMessages.config_missing(path))
    text = path.read_text(encoding="utf-8")
    try:
        if path.suffix.lower() == ".json":
            return json.loads(text) if text.strip() else {}
        return tomllib.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as e:
        raise ConfigValidationError(ErrorMessages.config_unreadable(path, e), []) from e


def build_config(
    raw: Mapping[str, Any],
    *,
    preset: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> ExperimentConfig:
    """원본 딕셔너리 → 검증된 ExperimentConfig

    overrides 키는 점 표기('schedule.rounds')를 사용한다.
    """
    owners = ConfigValidation.section_fields(ExperimentConfig, list(SECTION_FIELDS))
    top_level = ExperimentConfig.model_fields
    data = ConfigValidation.nest_flat_keys(raw, owners, top_level)

    if preset is not None:
        if preset not in EC.PRESETS:
            raise ConfigValidationError(ErrorMessages.unknown_preset(preset), ["preset"])
        data = ConfigValidation.deep_merge(EC.PRESETS[preset], data)
    for dotted, value in (overrides or {}).items():
        ConfigValidation.set_dotted(data, dotted, value)

    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigValidation.to_config_error(e) from e


def apply_environment(config: ExperimentConfig, env: Optional[Settings] = None) -> ExperimentConfig:
    """RAHFL_SEED 가 있으면 설정 시드를 대체"""
    env = env or get_settings()
    if env.seed is None or env.seed == config.seed:
        return config
    logger.info(f"환경 변수 시드 적용: {config.seed} → {env.seed}")
    return config.model_copy(update={"seed": env.seed})


def parse_config(
    path: PathLike,
    *,
    preset: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    env: Optional[Settings] = None,
) -> ExperimentConfig:
    """설정 파일 해석 및 검증 (모든 기본값 확정)"""
    config = build_config(read_config_file(path), preset=preset, overrides=overrides)
    return apply_environment(config, env)
