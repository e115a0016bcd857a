"""
라운드 지표 / 실험 요약 스키마
"""
from typing import List

from pydantic import BaseModel, Field, field_validator


class RoundMetrics(BaseModel):
    """metrics.jsonl 한 줄"""
    round: int = Field(..., ge=0, description="라운드 인덱스 (0부터)")
    acc_clean: List[float] = Field(..., description="클라이언트별 깨끗한 테스트 정확도")
    acc_corrupt: List[float] = Field(..., description="클라이언트별 손상 테스트 정확도")
    loss_ce: List[float] = Field(..., description="클라이언트별 교차 엔트로피")
    loss_jsd: List[float] = Field(..., description="클라이언트별 JSD 일관성")
    loss_supcon: List[float] = Field(..., description="클라이언트별 대조 손실")
    loss_dcl: List[float] = Field(..., description="클라이언트별 DCL 정규화")
    loss_col: List[float] = Field(..., description="클라이언트별 협업 손실")
    matrix_ones: int = Field(..., ge=0, description="전달 행렬의 1 개수")
    acc_clean_avg: float = Field(0.0, description="깨끗한 테스트 평균 정확도")
    acc_corrupt_avg: float = Field(0.0, description="손상 테스트 평균 정확도")
    matrix_density: float = Field(0.0, ge=0.0, le=1.0, description="전달 행렬 밀도")
    kl_terms: List[int] = Field(default_factory=list, description="클라이언트별 공개 배치당 KL 항 수")

    @field_validator("acc_clean", "acc_corrupt")
    @classmethod
    def validate_accuracy(cls, v):
        if any(not 0.0 <= acc <= 1.0 for acc in v):
            raise ValueError("정확도는 [0, 1] 범위여야 합니다")
        return v


class ClientSummary(BaseModel):
    """summary.csv 클라이언트 행"""
    client_id: str
    arch: str
    acc_clean_final: float
    acc_corrupt_final: float


class ExperimentSummary(BaseModel):
    """실험 최종 요약"""
    mode: str
    seed: int
    clients: List[ClientSummary] = Field(default_factory=list)

    @property
    def acc_clean_avg(self) -> float:
        if not self.clients:
            return 0.0
        return sum(c.acc_clean_final for c in self.clients) / len(self.clients)

    @property
    def acc_corrupt_avg(self) -> float:
        if not self.clients:
            return 0.0
        return sum(c.acc_corrupt_final for c in self.clients) / len(self.clients)
