"""
설정 검증 유틸리티
"""
import copy
from typing import Any, Dict, List, Mapping

from pydantic import BaseModel, ValidationError

from app.core.constants import ErrorMessages
from app.core.exceptions import ConfigValidationError
from app.schemas.base import ErrorDetail, ValidationReport


class ConfigValidation:
    """설정 딕셔너리 정리와 검증 오류 변환"""

    @staticmethod
    def section_fields(model: type[BaseModel], sections: List[str]) -> Dict[str, str]:
        """섹션 필드 이름 → 섹션 이름"""
        owners: Dict[str, str] = {}
        for section in sections:
            section_model = model.model_fields[section].annotation
            for name in section_model.model_fields:
                owners[name] = section
        return owners

    @staticmethod
    def nest_flat_keys(raw: Mapping[str, Any], owners: Mapping[str, str], top_level: Mapping[str, Any]) -> Dict[str, Any]:
        """최상위에 놓인 섹션 필드를 해당 섹션으로 이동"""
        nested: Dict[str, Any] = {}
        for key, value in raw.items():
            if key in owners and key not in top_level:
                nested.setdefault(owners[key], {})[key] = value
            elif isinstance(value, Mapping) and isinstance(nested.get(key), dict):
                nested[key].update(value)
            else:
                nested[key] = copy.deepcopy(value) if isinstance(value, Mapping) else value
        return nested

    @staticmethod
    def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
        merged = copy.deepcopy(dict(base))
        for key, value in override.items():
            if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
                merged[key] = ConfigValidation.deep_merge(merged[key], value)
            else:
                merged[key] = value
        return merged

    @staticmethod
    def set_dotted(target: Dict[str, Any], dotted: str, value: Any) -> None:
        """'schedule.rounds' 형태 키로 값 지정"""
        *parents, leaf = dotted.split(".")
        node = target
        for part in parents:
            node = node.setdefault(part, {})
        node[leaf] = value

    @staticmethod
    def report(error: ValidationError) -> ValidationReport:
        details = []
        for item in error.errors():
            key = ".".join(str(part) for part in item["loc"]) or "config"
            details.append(ErrorDetail(type=item["type"], message=item["msg"], field=key))
        return ValidationReport(errors=details)

    @staticmethod
    def to_config_error(error: ValidationError) -> ConfigValidationError:
        """pydantic 오류 → 문제 키를 점 표기로 나열한 ConfigValidationError"""
        report = ConfigValidation.report(error)
        detail = "; ".join(f"{e.field}: {e.message}" for e in report.errors)
        return ConfigValidationError(f"{ErrorMessages.config_invalid(report.keys)} ({detail})", report.keys)
