"""
Adam 옵티마이저
"""
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from app.core.constants import ErrorMessages, ModelConstants
from app.core.exceptions import DimensionMismatchError


@dataclass
class AdamState:
    """Adam 모멘트 상태"""
    learning_rate: float = 0.001
    beta1: float = ModelConstants.ADAM_BETA1
    beta2: float = ModelConstants.ADAM_BETA2
    epsilon: float = ModelConstants.ADAM_EPSILON
    first_moment: List[np.ndarray] = field(default_factory=list)
    second_moment: List[np.ndarray] = field(default_factory=list)
    step_count: int = 0

    @classmethod
    def for_params(cls, params: Sequence[np.ndarray], learning_rate: float = 0.001) -> "AdamState":
        """파라미터 형태에 맞춰 0으로 초기화"""
        return cls(
            learning_rate=learning_rate,
            first_moment=[np.zeros_like(p) for p in params],
            second_moment=[np.zeros_like(p) for p in params],
        )


def adam_step(
    state: AdamState,
    params: Sequence[np.ndarray],
    grads: Sequence[np.ndarray],
) -> Sequence[np.ndarray]:
    """편향 보정을 포함한 Adam 한 단계 (params 제자리 갱신)"""
    if not (len(params) == len(grads) == len(state.first_moment)):
        raise DimensionMismatchError(
            ErrorMessages.dimension_mismatch("adam", len(state.first_moment), (len(params), len(grads)))
        )
    for index, (param, grad, moment) in enumerate(zip(params, grads, state.first_moment)):
        if param.shape != grad.shape or param.shape != moment.shape:
            raise DimensionMismatchError(
                ErrorMessages.dimension_mismatch(f"adam[{index}]", param.shape, grad.shape)
            )

    state.step_count += 1
    t = state.step_count
    correction1 = 1.0 - state.beta1 ** t
    correction2 = 1.0 - state.beta2 ** t

    for param, grad, m, v in zip(params, grads, state.first_moment, state.second_moment):
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * grad * grad
        m_hat = m / correction1
        v_hat = v / correction2
        param -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
    return params
