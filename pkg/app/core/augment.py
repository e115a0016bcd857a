"""
무작위 혼합 증강과 단순 증강 파이프라인
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from app.core.constants import AugKind
from app.core.constants import AugmentConstants as AC
from app.utils.image_utils import ImageUtils

logger = logging.getLogger(__name__)


class AugOp(BaseModel):
    """증강 연산 + 세기"""
    kind: AugKind = Field(..., description="연산 종류")
    magnitude: float = Field(..., ge=0.0, le=1.0, description="세기 [0, 1]")


class AugChain(BaseModel):
    """1~3개 연산의 순차 적용"""
    ops: List[AugOp] = Field(..., min_length=1, max_length=AC.MAX_CHAIN_DEPTH)

    def apply(self, image: np.ndarray) -> np.ndarray:
        for op in self.ops:
            image = apply_op(image, op)
        return image


class MixConfig(BaseModel):
    """혼합 증강 설정"""
    model_config = ConfigDict(extra="forbid")

    num_sequences: int = Field(3, ge=1, description="연산 시퀀스 수 𝒮")
    alpha: float = Field(1.0, gt=0, description="디리클레/베타 분포 파라미터 α")


# ---- 픽셀 연산 ----
def _autocontrast(image: np.ndarray, magnitude: float) -> np.ndarray:
    low = image.min(axis=(0, 1), keepdims=True)
    high = image.max(axis=(0, 1), keepdims=True)
    spread = high - low
    flat = spread < AC.AUTOCONTRAST_MIN_RANGE
    return np.where(flat, image, (image - low) / np.where(flat, 1.0, spread))


def _equalize(image: np.ndarray, magnitude: float) -> np.ndarray:
    bins = AC.EQUALIZE_BINS
    levels = ImageUtils.to_bytes(image).astype(np.int64)
    out = image.copy()
    for channel in range(image.shape[2]):
        values = levels[:, :, channel]
        hist = np.bincount(values.ravel(), minlength=bins)
        cdf = np.cumsum(hist)
        cdf_min = cdf[hist > 0][0]
        total = values.size
        if total == cdf_min:
            continue
        lut = (cdf - cdf_min) / (total - cdf_min)
        out[:, :, channel] = np.clip(lut[values], 0.0, 1.0)
    return out


def _rotate(image: np.ndarray, magnitude: float) -> np.ndarray:
    theta = np.deg2rad(magnitude * AC.MAX_ROTATE_DEGREES)
    ys, xs = ImageUtils.grid(image.shape[:2])
    cy, cx = ImageUtils.center(image.shape[:2])
    cos, sin = np.cos(theta), np.sin(theta)
    src_y = cos * (ys - cy) - sin * (xs - cx) + cy
    src_x = sin * (ys - cy) + cos * (xs - cx) + cx
    return ImageUtils.bilinear_sample(image, src_y, src_x)


def _posterize(image: np.ndarray, magnitude: float) -> np.ndarray:
    levels = posterize_levels(magnitude)
    steps = np.minimum(np.floor(image * levels), levels - 1)
    return steps / (levels - 1)


def _solarize(image: np.ndarray, magnitude: float) -> np.ndarray:
    threshold = 1.0 - magnitude
    return np.where(image > threshold, 1.0 - image, image)


def _shear(axis: int) -> Callable[[np.ndarray, float], np.ndarray]:
    def _apply(image: np.ndarray, magnitude: float) -> np.ndarray:
        factor = magnitude * AC.MAX_SHEAR
        ys, xs = ImageUtils.grid(image.shape[:2])
        cy, cx = ImageUtils.center(image.shape[:2])
        if axis == 1:
            return ImageUtils.bilinear_sample(image, ys, xs + factor * (ys - cy))
        return ImageUtils.bilinear_sample(image, ys + factor * (xs - cx), xs)
    return _apply


def _translate(axis: int) -> Callable[[np.ndarray, float], np.ndarray]:
    def _apply(image: np.ndarray, magnitude: float) -> np.ndarray:
        shift = magnitude * AC.MAX_TRANSLATE_FRACTION * image.shape[axis]
        ys, xs = ImageUtils.grid(image.shape[:2])
        if axis == 1:
            return ImageUtils.bilinear_sample(image, ys, xs - shift)
        return ImageUtils.bilinear_sample(image, ys - shift, xs)
    return _apply


AUG_OPS: Dict[AugKind, Callable[[np.ndarray, float], np.ndarray]] = {
    AugKind.AUTOCONTRAST: _autocontrast,
    AugKind.EQUALIZE: _equalize,
    AugKind.ROTATE: _rotate,
    AugKind.POSTERIZE: _posterize,
    AugKind.SOLARIZE: _solarize,
    AugKind.SHEAR_X: _shear(axis=1),
    AugKind.SHEAR_Y: _shear(axis=0),
    AugKind.TRANSLATE_X: _translate(axis=1),
    AugKind.TRANSLATE_Y: _translate(axis=0),
}


def posterize_levels(magnitude: float) -> int:
    """세기 → 양자화 단계 수 [2, 8]"""
    return int(round(AC.POSTERIZE_MAX_LEVELS - AC.POSTERIZE_LEVEL_RANGE * magnitude))


def apply_op(image: np.ndarray, op: AugOp) -> np.ndarray:
    """결정적 화소 변환 (형태 유지, [0, 1] 클램프)"""
    return ImageUtils.clamp(AUG_OPS[op.kind](image, op.magnitude))


def sample_chain(rng: np.random.Generator, kinds: Optional[Sequence[AugKind]] = None) -> AugChain:
    """깊이 1~3 균등, 연산 종류 균등, 세기 U[0, 1]"""
    pool = list(kinds) if kinds else list(AugKind)
    depth = int(rng.integers(1, AC.MAX_CHAIN_DEPTH + 1))
    ops = [
        AugOp(kind=pool[int(rng.integers(len(pool)))], magnitude=float(rng.uniform(0.0, 1.0)))
        for _ in range(depth)
    ]
    return AugChain(ops=ops)


def sample_mixing_weights(cfg: MixConfig, rng: np.random.Generator) -> Tuple[np.ndarray, float]:
    """(w_1..w_𝒮) ~ Dir(α), η ~ Beta(α, α)"""
    weights = rng.dirichlet([cfg.alpha] * cfg.num_sequences)
    eta = float(rng.beta(cfg.alpha, cfg.alpha))
    return weights, eta


def augmix(
    image: np.ndarray,
    cfg: MixConfig,
    rng: np.random.Generator,
    *,
    eta: Optional[float] = None,
    kinds: Optional[Sequence[AugKind]] = None,
) -> np.ndarray:
    """η·x + (1-η)·Σ w_i·Seq_i(x)

    eta를 지정하면 베타 분포 추출값 대신 사용한다.
    """
    weights, sampled_eta = sample_mixing_weights(cfg, rng)
    skip = sampled_eta if eta is None else eta
    mixed = np.zeros_like(image)
    for weight in weights:
        mixed += weight * sample_chain(rng, kinds).apply(image)
    return ImageUtils.clamp(skip * image + (1.0 - skip) * mixed)


# ---- 단순 증강 (DCL 중간 뷰) ----
@dataclass(frozen=True)
class SimpleAugParams:
    """단순 증강 파이프라인의 단계별 추출값"""
    crop: Tuple[float, float, float, float]
    jitter: Optional[Tuple[float, float]] = None
    grayscale: bool = False
    blur: bool = False
    flip: bool = False

    @classmethod
    def identity(cls, shape: Tuple[int, int]) -> "SimpleAugParams":
        return cls(crop=(0.0, 0.0, float(shape[0]), float(shape[1])))


def sample_simple_params(rng: np.random.Generator, shape: Tuple[int, int]) -> SimpleAugParams:
    """RandomResizedCrop → ColorJitter → RandomGrayscale → GaussianBlur → HorizontalFlip"""
    h, w = shape
    area = rng.uniform(*AC.CROP_AREA_RANGE)
    side = np.sqrt(area)
    crop_h, crop_w = h * side, w * side
    top = rng.uniform(0.0, h - crop_h)
    left = rng.uniform(0.0, w - crop_w)

    jitter = None
    if rng.random() < AC.JITTER_PROB:
        jitter = (float(rng.uniform(*AC.JITTER_GAIN_RANGE)), float(rng.uniform(*AC.JITTER_OFFSET_RANGE)))
    return SimpleAugParams(
        crop=(float(top), float(left), float(crop_h), float(crop_w)),
        jitter=jitter,
        grayscale=bool(rng.random() < AC.GRAYSCALE_PROB),
        blur=bool(rng.random() < AC.BLUR_PROB),
        flip=bool(rng.random() < AC.FLIP_PROB),
    )


def apply_simple(image: np.ndarray, params: SimpleAugParams) -> np.ndarray:
    out = ImageUtils.resize_bilinear(image, image.shape[:2], params.crop)
    if params.jitter is not None:
        gain, offset = params.jitter
        out = ImageUtils.clamp(out * gain + offset)
    if params.grayscale and out.shape[2] > 1:
        out = np.repeat(out.mean(axis=2, keepdims=True), out.shape[2], axis=2)
    if params.blur:
        out = ImageUtils.gaussian_blur3(out)
    if params.flip:
        out = out[:, ::-1]
    return ImageUtils.clamp(out)


def simple_augment(image: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    return apply_simple(image, sample_simple_params(rng, image.shape[:2]))
