"""
중앙 차분 기울기 (역전파 검증용)
"""
from typing import Callable, List, Sequence

import numpy as np

from app.core.constants import ErrorMessages


def finite_diff_grad(
    loss_fn: Callable[[], float],
    params: Sequence[np.ndarray],
    h: float = 1e-5,
) -> List[np.ndarray]:
    """(loss(θ+h) - loss(θ-h)) / 2h 를 좌표별로 계산

    params 배열을 제자리에서 흔든 뒤 원래 값으로 복원한다.
    """
    if h <= 0:
        raise ValueError(ErrorMessages.NON_POSITIVE_STEP)

    grads = []
    for param in params:
        grad = np.zeros_like(param)
        for index in np.ndindex(param.shape):
            original = param[index]
            param[index] = original + h
            upper = float(loss_fn())
            param[index] = original - h
            lower = float(loss_fn())
            param[index] = original
            grad[index] = (upper - lower) / (2.0 * h)
        grads.append(grad)
    return grads


def max_relative_error(analytic: Sequence[np.ndarray], numeric: Sequence[np.ndarray], floor: float = 1e-6) -> float:
    """max |a - n| / max(|a|, |n|, floor)"""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        scale = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        if a.size:
            worst = max(worst, float(np.max(np.abs(a - n) / scale)))
    return worst
