"""
실험 설정 스키마
"""
from typing import Any, Dict, List, Literal, Optional

from pydantic import Field, field_validator, model_validator

from app.core.augment import MixConfig
from app.core.constants import Mode, ModelConstants
from app.core.losses import LossWeights
from app.core.model import ModelSpec
from app.schemas.base import StrictModel
from app.schemas.dataset import PartitionPlan


class ArchTemplate(StrictModel):
    """아키텍처 템플릿 (repeat 만큼 반복 배정)"""
    name: str = Field(..., description="아키텍처 이름")
    hidden_dims: List[int] = Field(..., min_length=1, description="특징 추출기 층 폭")
    repeat: int = Field(1, ge=1, description="반복 횟수")

    @field_validator("hidden_dims")
    @classmethod
    def validate_dims(cls, v):
        if any(d <= 0 for d in v):
            raise ValueError("hidden_dims는 양수여야 합니다")
        return v


def _default_architectures() -> List[ArchTemplate]:
    return [ArchTemplate(name=name, hidden_dims=dims) for name, dims in ModelConstants.DEFAULT_ARCHITECTURES]


class DataConfig(StrictModel):
    """데이터 원천/크기/손상 설정"""
    source: Literal["synthetic", "manifest"] = Field("synthetic", description="데이터 원천")
    manifest_path: Optional[str] = Field(None, description="학습/평가용 라벨 매니페스트")
    public_manifest_path: Optional[str] = Field(None, description="공개 데이터 매니페스트 (없으면 원천에서 분리)")
    num_classes: int = Field(10, ge=2, description="클래스 수 C")
    image_side: int = Field(32, ge=8, description="합성 이미지 한 변")
    private_size: int = Field(10000, ge=1, description="클라이언트별 사설 데이터 크기 N_k")
    public_size: int = Field(5000, ge=1, description="공개 데이터 크기 N_0")
    eval_size: int = Field(500, ge=1, description="ACC 평가용 분할 크기")
    test_size: int = Field(10000, ge=1, description="테스트 분할 크기")
    corruption_rate: float = Field(0.5, ge=0.0, le=1.0, description="손상 비율 ξ")
    client_corruption_rates: Optional[List[float]] = Field(None, description="클라이언트별 ξ (지정 시 우선)")
    public_corrupted: bool = Field(False, description="공개 데이터에도 손상 적용")

    @field_validator("client_corruption_rates")
    @classmethod
    def validate_rates(cls, v):
        if v is not None and any(not 0.0 <= rate <= 1.0 for rate in v):
            raise ValueError("client_corruption_rates 값은 [0, 1] 범위여야 합니다")
        return v

    @model_validator(mode="after")
    def validate_source(self):
        if self.source == "manifest" and not self.manifest_path:
            raise ValueError("source=manifest 에는 manifest_path가 필요합니다")
        return self


class PartitionConfig(StrictModel):
    """분할 방식"""
    scheme: Literal["iid", "dirichlet"] = Field("iid", description="분할 방식")
    beta: float = Field(1.0, gt=0, description="디리클레 집중도 β")


class ScheduleConfig(StrictModel):
    """학습 일정"""
    rounds: int = Field(40, ge=0, description="협업 라운드 수 T_c")
    matrix_update_period: int = Field(1, ge=1, description="전달 행렬 갱신 주기 T_f")
    pretrain_epochs: int = Field(40, ge=0, description="사전 학습 에폭")
    pretrain_loss: Literal["ce", "local"] = Field("ce", description="사전 학습 손실")
    local_epochs: Optional[int] = Field(None, ge=1, description="로컬 에폭 T_l (없으면 max(N_0 // N_k, 1))")
    phase_order: Literal["collab_first", "local_first"] = Field("collab_first", description="라운드 내 단계 순서")
    batch_size: int = Field(256, ge=1, description="로컬 배치 크기")
    public_batch_size: int = Field(256, ge=1, description="공개 데이터 배치 크기")
    learning_rate: float = Field(0.001, gt=0, description="Adam 학습률 λ")


SECTION_FIELDS = ("data", "partition", "schedule", "loss", "mix")


class ExperimentConfig(StrictModel):
    """실험 전체 설정"""
    mode: Mode = Field(Mode.RAHFL, description="연합 학습 모드")
    aug_enabled: Optional[bool] = Field(None, description="혼합 증강 + JSD (없으면 모드로 결정)")
    dcl_enabled: Optional[bool] = Field(None, description="DCL (없으면 모드로 결정)")
    contrastive_mode: Literal["dcl", "supcon"] = Field("dcl", description="대조 학습 변형")
    num_clients: int = Field(4, ge=1, description="클라이언트 수 K")
    architectures: List[ArchTemplate] = Field(default_factory=_default_architectures, min_length=1)
    data: DataConfig = Field(default_factory=DataConfig)
    partition: PartitionConfig = Field(default_factory=PartitionConfig)
    schedule: ScheduleConfig = Field(default_factory=ScheduleConfig)
    loss: LossWeights = Field(default_factory=LossWeights)
    mix: MixConfig = Field(default_factory=MixConfig)
    seed: int = Field(0, ge=0, description="마스터 시드")
    output_dir: str = Field("runs/default", description="출력 디렉터리")

    @model_validator(mode="after")
    def resolve_defaults(self):
        """모드 기반 기본값 확정 및 교차 검증"""
        full = self.mode == Mode.RAHFL
        if self.aug_enabled is None:
            self.aug_enabled = full
        if self.dcl_enabled is None:
            self.dcl_enabled = full
        rates = self.data.client_corruption_rates
        if rates is not None and len(rates) != self.num_clients:
            raise ValueError(f"client_corruption_rates 길이 {len(rates)}가 num_clients {self.num_clients}와 다릅니다")
        return self

    # ---- 파생 값 ----
    @property
    def collaborative(self) -> bool:
        return self.mode != Mode.LOCAL_ONLY

    @property
    def local_epochs(self) -> int:
        """T_l = max(⌊N_0 / N_k⌋, 1)"""
        if self.schedule.local_epochs is not None:
            return self.schedule.local_epochs
        return max(self.data.public_size // self.data.private_size, 1)

    def client_architectures(self) -> List[ArchTemplate]:
        """템플릿 x 반복을 K개 클라이언트로 순환 배정"""
        expanded = [template for template in self.architectures for _ in range(template.repeat)]
        return [expanded[k % len(expanded)] for k in range(self.num_clients)]

    def model_specs(self, input_dim: int, num_classes: Optional[int] = None) -> List[ModelSpec]:
        """클라이언트별 모델 명세 (num_classes는 적재된 원천 데이터 값을 우선)"""
        classes = self.data.num_classes if num_classes is None else num_classes
        return [
            ModelSpec(input_dim=input_dim, hidden_dims=tuple(t.hidden_dims), num_classes=classes)
            for t in self.client_architectures()
        ]

    def client_corruption_rates(self) -> List[float]:
        rates = self.data.client_corruption_rates
        return list(rates) if rates is not None else [self.data.corruption_rate] * self.num_clients

    def partition_plan(self) -> PartitionPlan:
        return PartitionPlan(
            scheme=self.partition.scheme,
            beta=self.partition.beta,
            client_sizes=[self.data.private_size] * self.num_clients,
        )

    def to_effective_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")
