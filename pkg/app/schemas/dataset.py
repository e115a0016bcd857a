"""
데이터 생성/분할 관련 스키마
"""
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from app.core.constants import CorruptionKind


class CorruptionSpec(BaseModel):
    """손상 종류 + 심각도"""
    model_config = ConfigDict(frozen=True)

    kind: CorruptionKind = Field(..., description="손상 종류")
    severity: int = Field(..., ge=1, le=5, description="심각도 (1-5)")


class PartitionPlan(BaseModel):
    """클라이언트 분할 계획"""
    scheme: Literal["iid", "dirichlet"] = Field("iid", description="분할 방식")
    beta: float = Field(1.0, gt=0, description="디리클레 집중도 (작을수록 non-IID)")
    client_sizes: List[int] = Field(..., description="클라이언트별 샘플 수 N_k")

    @field_validator("client_sizes")
    @classmethod
    def validate_sizes(cls, v):
        if not v or any(size <= 0 for size in v):
            raise ValueError("client_sizes는 양수로 이루어진 비어 있지 않은 목록이어야 합니다")
        return v


class DatasetManifest(BaseModel):
    """평면 바이너리 데이터셋 매니페스트"""
    model_config = ConfigDict(extra="forbid")

    height: int = Field(..., gt=0, description="이미지 높이")
    width: int = Field(..., gt=0, description="이미지 너비")
    channels: Literal[1, 3] = Field(..., description="채널 수")
    count: int = Field(..., gt=0, description="이미지 수 N")
    num_classes: int = Field(..., gt=0, description="클래스 수 C")
    pixels: str = Field(..., description="화소 파일 상대 경로")
    labels: Optional[str] = Field(None, description="라벨 파일 상대 경로 (공개 데이터는 null)")

    @property
    def pixel_bytes(self) -> int:
        return self.count * self.height * self.width * self.channels
