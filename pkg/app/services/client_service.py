"""
클라이언트 학습 서비스
사전 학습, 로컬 업데이트 단계, 정확도 평가
"""
import logging
from dataclasses import dataclass, fields
from typing import List, Literal, Optional

import numpy as np

from app.core.augment import MixConfig, augmix, simple_augment
from app.core.losses import LocalViews, LossWeights, local_loss
from app.core.model import Model, backward
from app.core.optim import adam_step
from app.models.client import ClientState
from app.models.dataset import Dataset

logger = logging.getLogger(__name__)

EVAL_CHUNK = 1024


@dataclass
class EpochLosses:
    """에폭 평균 손실 항"""
    total: float = 0.0
    ce: float = 0.0
    jsd: float = 0.0
    supcon: float = 0.0
    dcl: float = 0.0

    def accumulate(self, other: "EpochLosses") -> None:
        for f in fields(self):
            setattr(self, f.name, getattr(self, f.name) + getattr(other, f.name))

    def scaled(self, factor: float) -> "EpochLosses":
        return EpochLosses(**{f.name: getattr(self, f.name) * factor for f in fields(self)})


@dataclass
class TrainingOptions:
    """배치 구성과 손실 항 선택"""
    weights: LossWeights
    mix: MixConfig
    batch_size: int = 256
    aug_enabled: bool = True
    dcl_enabled: bool = True
    contrastive_mode: Literal["dcl", "supcon"] = "dcl"


def _augment_batch(images: np.ndarray, fn) -> np.ndarray:
    """이미지별 증강 후 (B, D) 입력 행렬"""
    augmented = np.stack([fn(image) for image in images])
    return augmented.reshape(len(augmented), -1)


def _batch_views(model: Model, images: np.ndarray, options: TrainingOptions, rng: np.random.Generator) -> LocalViews:
    """원본 + 복합 뷰 2개 + 단순 뷰에 대한 순전파"""
    out = model.forward(images.reshape(len(images), -1))
    views = LocalViews(logits=out.logits, features=out.features)
    if not (options.aug_enabled or options.dcl_enabled):
        return views

    first_rng, second_rng, simple_rng = rng.spawn(3)
    complex1 = model.forward(_augment_batch(images, lambda x: augmix(x, options.mix, first_rng)))
    if options.aug_enabled:
        complex2 = model.forward(_augment_batch(images, lambda x: augmix(x, options.mix, second_rng)))
        views.complex_logits = [complex1.logits, complex2.logits]
    if options.dcl_enabled:
        simple = model.forward(_augment_batch(images, lambda x: simple_augment(x, simple_rng)))
        views.complex_features = complex1.features
        views.simple_features = simple.features
    return views


def train_step(client: ClientState, data: Dataset, indices: np.ndarray, options: TrainingOptions,
               rng: np.random.Generator) -> EpochLosses:
    """배치 하나에 대한 ℓ_local 계산 + Adam 한 단계"""
    labels = data.require_labels()[indices]
    views = _batch_views(client.model, data.images[indices], options, rng)
    result = local_loss(
        views,
        labels,
        options.weights,
        aug_enabled=options.aug_enabled,
        dcl_enabled=options.dcl_enabled,
        contrastive_mode=options.contrastive_mode,
    )
    params = client.model.parameters()
    grads = backward(client.model, result.total)
    adam_step(client.adam, [param.data for param in params], grads)
    return EpochLosses(result.total.item(), result.ce, result.jsd, result.supcon, result.dcl)


def _run_epochs(client: ClientState, epochs: int, options: TrainingOptions,
                rng: np.random.Generator, phase: str) -> List[EpochLosses]:
    data = client.read_private(client.client_id)
    augment_rng = client.augment_rng if client.augment_rng is not None else rng
    history = []
    for epoch in range(epochs):
        order = rng.permutation(len(data))
        totals = EpochLosses()
        batches = 0
        for start in range(0, len(order), options.batch_size):
            totals.accumulate(train_step(client, data, order[start:start + options.batch_size], options, augment_rng))
            batches += 1
        mean = totals.scaled(1.0 / batches)
        history.append(mean)
        logger.debug(f"[{phase}] 클라이언트 {client.client_id} 에폭 {epoch + 1}/{epochs}: loss={mean.total:.4f}")
    return history


def pretrain(client: ClientState, epochs: int, options: TrainingOptions, rng: np.random.Generator,
             use_local_loss: bool = False) -> List[EpochLosses]:
    """사설 데이터로 사전 학습 (기본은 교차 엔트로피만)"""
    if epochs < 0:
        raise ValueError(f"epochs({epochs})는 0 이상이어야 합니다.")
    if not use_local_loss:
        options = TrainingOptions(options.weights, options.mix, options.batch_size, False, False)
    return _run_epochs(client, epochs, options, rng, "pretrain")


def local_update(
    client: ClientState,
    weights: LossWeights,
    aug_enabled: bool,
    dcl_enabled: bool,
    rng: np.random.Generator,
    *,
    mix: Optional[MixConfig] = None,
    batch_size: int = 256,
    contrastive_mode: Literal["dcl", "supcon"] = "dcl",
    epochs: Optional[int] = None,
) -> List[EpochLosses]:
    """T_l 에폭 동안 ℓ_local 최소화, 에폭별 평균 손실 반환"""
    options = TrainingOptions(weights, mix or MixConfig(), batch_size, aug_enabled, dcl_enabled, contrastive_mode)
    return _run_epochs(client, client.local_epochs if epochs is None else epochs, options, rng, "local")


def evaluate(model: Model, data: Dataset) -> float:
    """argmax(logits) == label 비율 (동점이면 가장 작은 클래스 인덱스)"""
    labels = data.require_labels()
    correct = 0
    for start in range(0, len(data), EVAL_CHUNK):
        chunk = np.arange(start, min(start + EVAL_CHUNK, len(data)))
        logits = model.forward(data.flat(chunk)).logits.data
        correct += int((np.argmax(logits, axis=1) == labels[chunk]).sum())
    return correct / len(data)
