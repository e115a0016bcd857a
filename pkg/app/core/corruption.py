"""
이미지 손상 연산자 ε ∈ ℰ
"""
import logging
from typing import Callable, Dict

import numpy as np

from app.core.constants import CorruptionConstants as CC
from app.core.constants import CorruptionKind, ErrorMessages
from app.core.exceptions import UnknownKindError
from app.schemas.dataset import CorruptionSpec
from app.utils.image_utils import ImageUtils

logger = logging.getLogger(__name__)

CorruptionFn = Callable[[np.ndarray, int, np.random.Generator], np.ndarray]


def _gaussian_noise(image: np.ndarray, level: int, rng: np.random.Generator) -> np.ndarray:
    return image + rng.normal(0.0, CC.GAUSSIAN_SIGMA[level], size=image.shape)


def _shot_noise(image: np.ndarray, level: int, rng: np.random.Generator) -> np.ndarray:
    photons = CC.SHOT_PHOTONS[level]
    return rng.poisson(image * photons) / photons


def _impulse_noise(image: np.ndarray, level: int, rng: np.random.Generator) -> np.ndarray:
    flip = rng.random(image.shape) < CC.IMPULSE_PROB[level]
    salt = rng.random(image.shape) < 0.5
    return np.where(flip, salt.astype(np.float64), image)


def _box_blur(image: np.ndarray, level: int, rng: np.random.Generator) -> np.ndarray:
    blurred = image
    for _ in range(CC.BLUR_PASSES[level]):
        blurred = ImageUtils.box_filter(blurred, CC.BLUR_KERNEL[level])
    return blurred


def _brightness(image: np.ndarray, level: int, rng: np.random.Generator) -> np.ndarray:
    return image + CC.BRIGHTNESS_OFFSET[level]


def _contrast(image: np.ndarray, level: int, rng: np.random.Generator) -> np.ndarray:
    mean = image.mean()
    return (image - mean) * CC.CONTRAST_FACTOR[level] + mean


def _pixelate(image: np.ndarray, level: int, rng: np.random.Generator) -> np.ndarray:
    h, w = image.shape[:2]
    scale = CC.PIXELATE_SCALE[level]
    small = (max(1, int(round(h * scale))), max(1, int(round(w * scale))))
    return ImageUtils.resize_nearest(ImageUtils.resize_nearest(image, small), (h, w))


def _occlusion(image: np.ndarray, level: int, rng: np.random.Generator) -> np.ndarray:
    h, w = image.shape[:2]
    side = max(1, int(round(min(h, w) * CC.OCCLUSION_FRACTION[level])))
    top = int(rng.integers(0, h - side + 1))
    left = int(rng.integers(0, w - side + 1))
    occluded = image.copy()
    occluded[top:top + side, left:left + side] = CC.OCCLUSION_FILL
    return occluded


CORRUPTIONS: Dict[CorruptionKind, CorruptionFn] = {
    CorruptionKind.GAUSSIAN_NOISE: _gaussian_noise,
    CorruptionKind.SHOT_NOISE: _shot_noise,
    CorruptionKind.IMPULSE_NOISE: _impulse_noise,
    CorruptionKind.BOX_BLUR: _box_blur,
    CorruptionKind.BRIGHTNESS: _brightness,
    CorruptionKind.CONTRAST: _contrast,
    CorruptionKind.PIXELATE: _pixelate,
    CorruptionKind.OCCLUSION: _occlusion,
}


def apply_corruption(image: np.ndarray, spec: CorruptionSpec, rng: np.random.Generator) -> np.ndarray:
    """손상 적용 후 [0, 1]로 클램프 (형태 유지)"""
    corrupt = CORRUPTIONS.get(spec.kind)
    if corrupt is None:
        raise UnknownKindError(ErrorMessages.unknown_kind(spec.kind))
    return ImageUtils.clamp(corrupt(image, spec.severity - 1, rng))


def sample_corruption(rng: np.random.Generator) -> CorruptionSpec:
    """종류와 심각도를 균등 분포에서 추출"""
    kinds = list(CorruptionKind)
    kind = kinds[int(rng.integers(len(kinds)))]
    severity = int(rng.integers(1, len(CC.SEVERITY_LEVELS) + 1))
    return CorruptionSpec(kind=kind, severity=severity)
