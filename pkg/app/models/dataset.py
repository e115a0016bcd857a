"""
데이터셋 도메인 레코드
"""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from app.core.constants import ErrorMessages
from app.core.exceptions import LabelRangeError, UnlabeledDatasetError


@dataclass(frozen=True)
class LabeledExample:
    """단일 예제 (corrupted 플래그는 기록용, 학습에는 보이지 않음)"""
    image: np.ndarray
    label: Optional[int]
    corrupted: bool = False


@dataclass(frozen=True)
class Dataset:
    """이미지 묶음 (N, H, W, C) + 라벨 (공개 데이터는 라벨 없음)"""
    images: np.ndarray
    labels: Optional[np.ndarray]
    num_classes: int
    corrupted: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.images.ndim != 4 or len(self.images) == 0:
            raise ValueError(ErrorMessages.EMPTY_DATASET)
        if self.corrupted is None:
            object.__setattr__(self, "corrupted", np.zeros(len(self.images), dtype=bool))
        if self.labels is not None:
            if len(self.labels) != len(self.images):
                raise ValueError(f"라벨 수 {len(self.labels)}와 이미지 수 {len(self.images)}가 다릅니다.")
            bad = (self.labels < 0) | (self.labels >= self.num_classes)
            if bad.any():
                raise LabelRangeError(
                    ErrorMessages.label_out_of_range(int(self.labels[bad][0]), self.num_classes)
                )

    def __len__(self) -> int:
        return len(self.images)

    def __getitem__(self, index: int) -> LabeledExample:
        label = None if self.labels is None else int(self.labels[index])
        return LabeledExample(self.images[index], label, bool(self.corrupted[index]))

    @property
    def image_shape(self):
        return self.images.shape[1:]

    @property
    def input_dim(self) -> int:
        return int(np.prod(self.image_shape))

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    def require_labels(self) -> np.ndarray:
        if self.labels is None:
            raise UnlabeledDatasetError(ErrorMessages.UNLABELED_DATASET)
        return self.labels

    def flat(self, indices: Sequence[int] = None) -> np.ndarray:
        """모델 입력용 (B, H*W*C) 행렬"""
        images = self.images if indices is None else self.images[np.asarray(indices)]
        return images.reshape(len(images), -1)

    def subset(self, indices: Sequence[int]) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            images=self.images[idx],
            labels=None if self.labels is None else self.labels[idx],
            num_classes=self.num_classes,
            corrupted=self.corrupted[idx],
        )

    def without_labels(self) -> "Dataset":
        return Dataset(self.images, None, self.num_classes, self.corrupted)

    def class_counts(self) -> np.ndarray:
        return np.bincount(self.require_labels(), minlength=self.num_classes)
