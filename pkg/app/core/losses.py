"""
학습 목적 함수
교차 엔트로피, JSD 일관성, 지도 대조 손실, 유사도 분포, DCL 정규화, 로컬/협업 손실
"""
import logging
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.constants import ErrorMessages, LossConstants
from app.core.exceptions import (
    DimensionMismatchError,
    EmptyPositiveSetError,
    LabelRangeError,
    SimplexViolationError,
    TransferMatrixError,
)
from app.core.tensor import Tensor, concat, gather, l2_normalize, log_softmax, logsumexp, softmax

logger = logging.getLogger(__name__)

Reduction = Literal["sum", "mean"]


class LossWeights(BaseModel):
    """로컬 손실 가중치와 온도"""
    model_config = ConfigDict(extra="forbid")

    mu: float = Field(12.0, ge=0, description="JSD 일관성 가중치 μ")
    gamma: float = Field(1.0, ge=0, description="DCL 정규화 가중치 γ")
    tau_c: float = Field(0.2, gt=0, description="대조 손실 온도 τ_c")
    tau_d: float = Field(0.2, gt=0, description="유사도 분포 온도 τ_d")
    contrastive_reduction: Reduction = Field("mean", description="대조/DCL 항 축약 방식")


@dataclass
class ContrastiveBatch:
    """단위 정규화된 원본/단순/복합 뷰 특징 + 라벨"""
    original_features: Tensor
    simple_features: Tensor
    complex_features: Tensor
    labels: np.ndarray

    @classmethod
    def from_raw(
        cls,
        original: Tensor,
        simple: Tensor,
        complex_: Tensor,
        labels: Sequence[int],
    ) -> "ContrastiveBatch":
        """추출기 출력을 행 단위 L2 정규화하여 배치 구성"""
        return cls(
            original_features=l2_normalize(original),
            simple_features=l2_normalize(simple),
            complex_features=l2_normalize(complex_),
            labels=np.asarray(labels, dtype=np.int64),
        )

    def __post_init__(self):
        b = len(self.labels)
        for name in ("original_features", "simple_features", "complex_features"):
            features = getattr(self, name)
            if features.ndim != 2 or features.shape[0] != b:
                raise DimensionMismatchError(ErrorMessages.dimension_mismatch(name, (b, "d"), features.shape))
            norms = np.linalg.norm(features.data, axis=1)
            # ReLU 출력이 전부 0인 행은 정규화 후에도 0으로 남는다
            if not (np.isclose(norms, 1.0, rtol=0.0, atol=1e-9) | (norms == 0.0)).all():
                raise ValueError(f"{name}의 행이 단위 노름이 아닙니다.")

    @property
    def size(self) -> int:
        return len(self.labels)

    def multiview(self) -> Tensor:
        """I = 원본 ∪ 단순 증강, |I| = 2B"""
        return concat([self.original_features, self.simple_features], axis=0)

    def multiview_labels(self) -> np.ndarray:
        return np.concatenate([self.labels, self.labels])

    def with_simple(self, features: Tensor) -> "ContrastiveBatch":
        return ContrastiveBatch(self.original_features, features, self.complex_features, self.labels)


# ---- 검증 헬퍼 ----
def _check_simplex(rows: np.ndarray, name: str) -> None:
    tol = LossConstants.SIMPLEX_TOLERANCE
    if (rows < -tol).any() or not np.allclose(rows.sum(axis=-1), 1.0, atol=tol):
        raise SimplexViolationError(ErrorMessages.not_simplex(name))


def _as_rows(t: Tensor) -> Tensor:
    return t.reshape(1, -1) if t.ndim == 1 else t


def _floored_log(p: Tensor) -> Tensor:
    return p.clamp_min(LossConstants.PROB_FLOOR).log()


def _reduce(per_anchor: Tensor, reduction: Reduction) -> Tensor:
    return per_anchor.sum() if reduction == "sum" else per_anchor.mean()


# ---- 손실 함수 ----
def cross_entropy(logits: Tensor, labels: Sequence[int]) -> Tensor:
    """배치 평균 -log softmax(logits)[label]"""
    labels = np.asarray(labels, dtype=np.int64)
    num_classes = logits.shape[1]
    bad = (labels < 0) | (labels >= num_classes)
    if bad.any():
        raise LabelRangeError(ErrorMessages.label_out_of_range(int(labels[bad][0]), num_classes))
    picked = gather(log_softmax(logits), np.arange(len(labels)), labels)
    return -picked.mean()


def kl_rows(p: Tensor, q: Tensor) -> Tensor:
    """행별 KL(p‖q) (두 인자 모두 1e-12 하한 적용)"""
    return (p * (_floored_log(p) - _floored_log(q))).sum(axis=-1)


def kl_divergence(p: Tensor, q: Tensor) -> Tensor:
    """Σ p·log(p/q), 배치면 행 평균"""
    p, q = _as_rows(p), _as_rows(q)
    _check_simplex(p.data, "p")
    _check_simplex(q.data, "q")
    return kl_rows(p, q).mean()


def jsd_consistency(phi: Tensor, phi1: Tensor, phi2: Tensor) -> Tensor:
    """세 분포의 일반화 Jensen-Shannon 발산, 배치 평균"""
    phi, phi1, phi2 = _as_rows(phi), _as_rows(phi1), _as_rows(phi2)
    for name, rows in (("phi", phi), ("phi1", phi1), ("phi2", phi2)):
        _check_simplex(rows.data, name)
    mixture = (phi + phi1 + phi2) / 3.0
    total = kl_rows(phi, mixture) + kl_rows(phi1, mixture) + kl_rows(phi2, mixture)
    return (total / 3.0).mean()


def _supcon_terms(views: Tensor, labels: np.ndarray, tau: float) -> Tensor:
    """앵커별 -1/|P_i| Σ_p log softmax_{A_i}(f_i·f_p/τ)"""
    n = len(labels)
    eye = np.eye(n, dtype=bool)
    positives = (labels[:, None] == labels[None, :]) & ~eye
    counts = positives.sum(axis=1)
    if (counts == 0).any():
        raise EmptyPositiveSetError(ErrorMessages.empty_positives(int(np.argmin(counts))))

    logits = (views @ views.T) / tau + Tensor(np.where(eye, LossConstants.MASK_LOGIT, 0.0))
    log_prob = logits - logsumexp(logits, axis=1)
    weights = Tensor(positives / counts[:, None])
    return -(log_prob * weights).sum(axis=1)


def supcon_loss(batch: ContrastiveBatch, tau_c: float, reduction: Reduction = "sum") -> Tensor:
    """원본 + 단순 뷰 다중뷰 배치의 지도 대조 손실 (복합 뷰는 포함하지 않음)"""
    terms = _supcon_terms(batch.multiview(), batch.multiview_labels(), tau_c)
    return _reduce(terms, reduction)


def _support_columns(batch_size: int) -> np.ndarray:
    """행 i의 지지 집합 A''_i = I ∖ {x''_i} 열 인덱스, (B, 2B-1)"""
    n = 2 * batch_size
    return np.array([[j for j in range(n) if j != batch_size + i] for i in range(batch_size)], dtype=np.int64)


def _similarity_rows(anchors: Tensor, support: Tensor, tau: float) -> Tensor:
    b = anchors.shape[0]
    sims = (anchors @ support.T) / tau
    rows = np.repeat(np.arange(b)[:, None], 2 * b - 1, axis=1)
    return softmax(gather(sims, rows, _support_columns(b)))


def similarity_distribution(
    anchor_feature: Tensor,
    batch: ContrastiveBatch,
    anchor_index: int,
    tau_d: float,
) -> Tensor:
    """exp(f_anchor·f_j/τ_d)를 A''_i 위에서 정규화한 확률 행"""
    b = batch.size
    anchor = _as_rows(anchor_feature)
    support_idx = np.array([j for j in range(2 * b) if j != b + anchor_index], dtype=np.int64)
    support = batch.multiview()[support_idx]
    return softmax((anchor @ support.T) / tau_d).reshape(-1)


def dcl_regularizer(batch: ContrastiveBatch, tau_d: float, reduction: Reduction = "sum") -> Tensor:
    """Σ_i KL(p(·|x''_i) ‖ p(·|x'_i)), 기울기는 복합 뷰 특징으로만 흐름"""
    support = batch.multiview().detach()
    target = _similarity_rows(batch.simple_features.detach(), support, tau_d).detach()
    learner = _similarity_rows(batch.complex_features, support, tau_d)
    return _reduce(kl_rows(target, learner), reduction)


@dataclass
class LocalViews:
    """같은 모델의 네 가지 뷰 출력"""
    logits: Tensor
    features: Tensor
    complex_logits: Optional[Sequence[Tensor]] = None
    complex_features: Optional[Tensor] = None
    simple_features: Optional[Tensor] = None


@dataclass
class LocalLossResult:
    """로컬 손실과 항별 값"""
    total: Tensor
    ce: float
    jsd: float = 0.0
    supcon: float = 0.0
    dcl: float = 0.0


def local_loss(
    views: LocalViews,
    labels: Sequence[int],
    weights: LossWeights,
    *,
    aug_enabled: bool = True,
    dcl_enabled: bool = True,
    contrastive_mode: Literal["dcl", "supcon"] = "dcl",
) -> LocalLossResult:
    """ℓ_ce + μ·ℓ_jsd + ℓ_c + γ·ℓ_d"""
    ce = cross_entropy(views.logits, labels)
    total = ce
    result = LocalLossResult(total=ce, ce=ce.item())

    if aug_enabled and weights.mu > 0 and views.complex_logits:
        phi1, phi2 = (softmax(logits) for logits in views.complex_logits)
        jsd = jsd_consistency(softmax(views.logits), phi1, phi2)
        total = total + weights.mu * jsd
        result.jsd = jsd.item()

    if dcl_enabled and views.simple_features is not None:
        batch = ContrastiveBatch.from_raw(
            views.features,
            views.simple_features,
            views.complex_features if views.complex_features is not None else views.simple_features,
            labels,
        )
        reduction = weights.contrastive_reduction
        if contrastive_mode == "supcon":
            contrast = supcon_loss(batch.with_simple(batch.complex_features), weights.tau_c, reduction)
        else:
            contrast = supcon_loss(batch, weights.tau_c, reduction)
        total = total + contrast
        result.supcon = contrast.item()

        if contrastive_mode == "dcl" and weights.gamma > 0 and views.complex_features is not None:
            regularizer = dcl_regularizer(batch, weights.tau_d, reduction)
            total = total + weights.gamma * regularizer
            result.dcl = regularizer.item()

    result.total = total
    return result


@dataclass
class CollaborativeLoss:
    """협업 손실과 평가된 KL 항 수"""
    value: Tensor
    kl_terms: int


def collaborative_loss(
    k: int,
    public_outputs: Sequence[Tensor],
    matrix_row: Sequence[int],
    learner_output: Optional[Tensor] = None,
) -> CollaborativeLoss:
    """Σ_i M[k][i]·KL(φ^i ‖ φ^k), 공개 배치 평균

    learner_output를 주면 φ^k로 사용하고(기울기 경로), 아니면 public_outputs[k]를 쓴다.
    다른 클라이언트 분포는 상수 목표로 분리된다.
    """
    if len(matrix_row) != len(public_outputs):
        raise TransferMatrixError(ErrorMessages.matrix_row_length(len(public_outputs), len(matrix_row)))

    learner = _as_rows(learner_output if learner_output is not None else public_outputs[k])
    _check_simplex(learner.data, f"phi_{k}")
    total: Tensor = Tensor(0.0)
    terms = 0
    for source, flag in enumerate(matrix_row):
        if not flag or source == k:
            continue
        target = _as_rows(public_outputs[source]).detach()
        _check_simplex(target.data, f"phi_{source}")
        total = total + kl_rows(target, learner).mean()
        terms += 1
    return CollaborativeLoss(value=total, kl_terms=terms)


def kl_term_counts(matrix: np.ndarray) -> List[int]:
    """클라이언트별 공개 배치당 KL 항 수"""
    return [int(np.asarray(row).sum()) for row in matrix]
