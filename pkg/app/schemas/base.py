"""
기본 공통 스키마
"""
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field


class StrictModel(BaseModel):
    """알 수 없는 키를 거부하는 설정 스키마 기반"""
    model_config = ConfigDict(extra="forbid")


class ErrorDetail(BaseModel):
    """에러 상세 정보"""
    type: str = Field(..., description="에러 타입")
    message: str = Field(..., description="에러 메시지")
    field: Optional[str] = Field(None, description="관련 필드 (점 표기 키)")


class ValidationReport(BaseModel):
    """설정 검증 결과"""
    errors: List[ErrorDetail] = Field(default_factory=list, description="에러 목록")

    @property
    def keys(self) -> List[str]:
        return [error.field for error in self.errors if error.field]
