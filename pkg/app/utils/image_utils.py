"""
이미지 처리 공통 유틸리티
모든 이미지는 (H, W, C) float64 배열, 화소 범위 [0, 1]
"""
from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view


class ImageUtils:
    """이미지 리샘플링/필터 헬퍼"""

    @staticmethod
    def clamp(image: np.ndarray) -> np.ndarray:
        return np.clip(image, 0.0, 1.0)

    @staticmethod
    def grid(shape: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
        """출력 화소 좌표 격자 (ys, xs)"""
        h, w = shape
        return np.meshgrid(np.arange(h, dtype=np.float64), np.arange(w, dtype=np.float64), indexing="ij")

    @staticmethod
    def center(shape: Tuple[int, int]) -> Tuple[float, float]:
        h, w = shape
        return (h - 1) / 2.0, (w - 1) / 2.0

    @staticmethod
    def bilinear_sample(image: np.ndarray, src_y: np.ndarray, src_x: np.ndarray) -> np.ndarray:
        """가장자리 복제 방식 양선형 샘플링"""
        h, w = image.shape[:2]
        y = np.clip(src_y, 0.0, h - 1.0)
        x = np.clip(src_x, 0.0, w - 1.0)
        y0 = np.floor(y).astype(np.int64)
        x0 = np.floor(x).astype(np.int64)
        y1 = np.minimum(y0 + 1, h - 1)
        x1 = np.minimum(x0 + 1, w - 1)
        wy = (y - y0)[..., None]
        wx = (x - x0)[..., None]
        top = image[y0, x0] * (1.0 - wx) + image[y0, x1] * wx
        bottom = image[y1, x0] * (1.0 - wx) + image[y1, x1] * wx
        return top * (1.0 - wy) + bottom * wy

    @staticmethod
    def resize_bilinear(
        image: np.ndarray,
        out_shape: Tuple[int, int],
        box: Tuple[float, float, float, float] = None,
    ) -> np.ndarray:
        """box=(top, left, height, width) 영역을 out_shape로 리샘플링"""
        h, w = image.shape[:2]
        top, left, box_h, box_w = box if box is not None else (0.0, 0.0, float(h), float(w))
        out_h, out_w = out_shape
        ys, xs = ImageUtils.grid(out_shape)
        src_y = top + (ys + 0.5) * (box_h / out_h) - 0.5
        src_x = left + (xs + 0.5) * (box_w / out_w) - 0.5
        return ImageUtils.bilinear_sample(image, src_y, src_x)

    @staticmethod
    def resize_nearest(image: np.ndarray, out_shape: Tuple[int, int]) -> np.ndarray:
        """화소 중심 정렬 최근접 리샘플링 (정수 연산)"""
        h, w = image.shape[:2]
        out_h, out_w = out_shape
        rows = ((2 * np.arange(out_h) + 1) * h) // (2 * out_h)
        cols = ((2 * np.arange(out_w) + 1) * w) // (2 * out_w)
        return image[rows][:, cols]

    @staticmethod
    def box_filter(image: np.ndarray, kernel: int) -> np.ndarray:
        """k x k 평균 필터 (가장자리 복제)"""
        pad = kernel // 2
        padded = np.pad(image, ((pad, pad), (pad, pad), (0, 0)), mode="edge")
        windows = sliding_window_view(padded, (kernel, kernel), axis=(0, 1))
        return windows.mean(axis=(-2, -1))

    @staticmethod
    def gaussian_blur3(image: np.ndarray) -> np.ndarray:
        """[1,2,1]/4 분리형 3x3 가우시안 가중 블러"""
        weights = np.array([0.25, 0.5, 0.25])
        padded = np.pad(image, ((1, 1), (1, 1), (0, 0)), mode="edge")
        rows = padded[:-2] * weights[0] + padded[1:-1] * weights[1] + padded[2:] * weights[2]
        return rows[:, :-2] * weights[0] + rows[:, 1:-1] * weights[1] + rows[:, 2:] * weights[2]

    @staticmethod
    def to_bytes(images: np.ndarray) -> np.ndarray:
        return np.rint(np.clip(images, 0.0, 1.0) * 255.0).astype(np.uint8)

    @staticmethod
    def from_bytes(raw: np.ndarray) -> np.ndarray:
        return raw.astype(np.float64) / 255.0
