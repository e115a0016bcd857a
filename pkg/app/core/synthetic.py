"""
합성 패턴 데이터셋 생성
클래스 c는 패턴 계열(원판, 고리, 십자, 체커, 가로/세로 줄무늬, 모서리 얼룩, 그라디언트)을 순환
"""
import logging

import numpy as np

from app.core.constants import SyntheticConstants as SC
from app.models.dataset import Dataset
from app.utils.image_utils import ImageUtils

logger = logging.getLogger(__name__)


def _pattern(family: str, variant: int, side: int, rng: np.random.Generator) -> np.ndarray:
    """하나의 (side, side) 패턴 생성 (위치/크기/세기 지터 포함)"""
    ys, xs = ImageUtils.grid((side, side))
    cy, cx = ImageUtils.center((side, side))
    cy += rng.uniform(-SC.CENTER_JITTER, SC.CENTER_JITTER) * side
    cx += rng.uniform(-SC.CENTER_JITTER, SC.CENTER_JITTER) * side
    scale = rng.uniform(*SC.SCALE_RANGE) * (1.0 - 0.2 * variant)
    intensity = rng.uniform(*SC.INTENSITY_RANGE)

    dy, dx = ys - cy, xs - cx
    radius = np.sqrt(dy ** 2 + dx ** 2)
    size = 0.3 * side * scale
    period = max(2, int(round(side / 8 * scale)) * 2)

    if family == "disc":
        mask = radius <= size
    elif family == "ring":
        mask = np.abs(radius - size) <= max(1.0, 0.08 * side)
    elif family == "cross":
        arm = max(1.0, 0.08 * side)
        mask = ((np.abs(dy) <= arm) | (np.abs(dx) <= arm)) & (np.abs(dy) <= size) & (np.abs(dx) <= size)
    elif family == "checker":
        mask = ((np.floor(ys / (period // 2)) + np.floor(xs / (period // 2))) % 2) == 0
    elif family == "stripes_h":
        mask = (np.floor(ys / (period // 2)) % 2) == 0
    elif family == "stripes_v":
        mask = (np.floor(xs / (period // 2)) % 2) == 0
    elif family == "corner_blob":
        by, bx = 0.2 * side + (cy - (side - 1) / 2), 0.2 * side + (cx - (side - 1) / 2)
        blob = np.exp(-((ys - by) ** 2 + (xs - bx) ** 2) / (2 * (0.15 * side * scale) ** 2))
        return intensity * blob
    else:
        ramp = xs / (side - 1)
        return intensity * ramp

    return intensity * mask.astype(np.float64)


def make_synthetic_dataset(n: int, num_classes: int, side: int, seed: int) -> Dataset:
    """균형 잡힌 흑백 합성 데이터셋 (8비트 격자로 양자화)"""
    if num_classes <= 0 or n < num_classes:
        raise ValueError(f"n({n})은 num_classes({num_classes}) 이상이어야 합니다.")
    if side < SC.MIN_SIDE:
        raise ValueError(f"side({side})는 {SC.MIN_SIDE} 이상이어야 합니다.")

    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % num_classes)
    families = SC.PATTERN_FAMILIES

    images = np.empty((n, side, side, 1), dtype=np.float64)
    for i, label in enumerate(labels):
        family = families[label % len(families)]
        variant = label // len(families)
        pattern = _pattern(family, variant, side, rng)
        noisy = pattern + rng.normal(0.0, SC.BACKGROUND_NOISE, size=pattern.shape)
        images[i, :, :, 0] = np.clip(noisy, 0.0, 1.0)

    # 매니페스트 저장/로드 왕복이 비트 단위로 일치하도록 양자화
    images = ImageUtils.from_bytes(ImageUtils.to_bytes(images))
    logger.debug(f"합성 데이터 생성: n={n}, C={num_classes}, side={side}")
    return Dataset(images=images, labels=labels.astype(np.int64), num_classes=num_classes)
