"""
이기종 클라이언트 모델
특징 추출기 f_k(u_k)와 분류기 g_k(v_k)로 구성된 다층 퍼셉트론
"""
import logging
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple, Union

import numpy as np

from app.core.constants import ErrorMessages
from app.core.exceptions import DimensionMismatchError
from app.core.tensor import Tensor, parameter, softmax

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelSpec:
    """모델 구조 명세"""
    input_dim: int
    hidden_dims: Tuple[int, ...]
    num_classes: int

    def __post_init__(self):
        if self.input_dim <= 0 or self.num_classes <= 0:
            raise ValueError(f"input_dim/num_classes는 양수여야 합니다: {self}")
        if not self.hidden_dims or any(d <= 0 for d in self.hidden_dims):
            raise ValueError(f"hidden_dims는 양수로 이루어진 비어 있지 않은 목록이어야 합니다: {self}")
        object.__setattr__(self, "hidden_dims", tuple(self.hidden_dims))

    @property
    def embedding_dim(self) -> int:
        return self.hidden_dims[-1]

    @property
    def layer_shapes(self) -> List[Tuple[int, int]]:
        """추출기 층 + 분류기 층의 (fan_in, fan_out)"""
        dims = [self.input_dim, *self.hidden_dims, self.num_classes]
        return list(zip(dims[:-1], dims[1:]))

    @property
    def parameter_count(self) -> int:
        return sum(fan_in * fan_out + fan_out for fan_in, fan_out in self.layer_shapes)


@dataclass
class ForwardOutput:
    """순전파 결과"""
    features: Tensor
    logits: Tensor


@dataclass
class Model:
    """특징 추출기 + 단일 아핀 분류기"""
    spec: ModelSpec
    weights: List[Tensor] = field(default_factory=list)
    biases: List[Tensor] = field(default_factory=list)

    @classmethod
    def initialize(cls, spec: ModelSpec, rng: np.random.Generator) -> "Model":
        """Glorot 균등 초기화 (편향 0)"""
        weights, biases = [], []
        for fan_in, fan_out in spec.layer_shapes:
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(parameter(rng.uniform(-limit, limit, size=(fan_in, fan_out))))
            biases.append(parameter(np.zeros(fan_out)))
        return cls(spec=spec, weights=weights, biases=biases)

    @classmethod
    def zeros(cls, spec: ModelSpec) -> "Model":
        weights = [parameter(np.zeros(shape)) for shape in spec.layer_shapes]
        biases = [parameter(np.zeros(fan_out)) for _, fan_out in spec.layer_shapes]
        return cls(spec=spec, weights=weights, biases=biases)

    # ---- 파라미터 접근 ----
    @property
    def extractor_params(self) -> List[Tensor]:
        params = []
        for weight, bias in zip(self.weights[:-1], self.biases[:-1]):
            params.extend([weight, bias])
        return params

    @property
    def classifier_params(self) -> List[Tensor]:
        return [self.weights[-1], self.biases[-1]]

    def parameters(self) -> List[Tensor]:
        return self.extractor_params + self.classifier_params

    def zero_grad(self) -> None:
        for param in self.parameters():
            param.grad = None

    def state(self) -> List[np.ndarray]:
        """파라미터 값 복사본"""
        return [param.data.copy() for param in self.parameters()]

    def load_state(self, state: Sequence[np.ndarray]) -> None:
        for param, value in zip(self.parameters(), state):
            param.data = np.array(value, dtype=np.float64)

    def clone(self) -> "Model":
        twin = Model.zeros(self.spec)
        twin.load_state(self.state())
        return twin

    # ---- 순전파 ----
    def forward(self, batch: Union[Tensor, np.ndarray]) -> ForwardOutput:
        return forward(self, batch)

    def predict_proba(self, batch: np.ndarray) -> np.ndarray:
        """그래프 없이 클래스 확률 계산"""
        return softmax(self.forward(batch).logits.detach()).data


def forward(model: Model, batch: Union[Tensor, np.ndarray]) -> ForwardOutput:
    """features = f(x), logits = g(features)"""
    x = batch if isinstance(batch, Tensor) else Tensor(batch)
    if x.ndim != 2 or x.shape[1] != model.spec.input_dim:
        raise DimensionMismatchError(
            ErrorMessages.dimension_mismatch("forward", f"(B, {model.spec.input_dim})", x.shape)
        )

    hidden = x
    for weight, bias in zip(model.weights[:-1], model.biases[:-1]):
        hidden = (hidden @ weight + bias).relu()
    logits = hidden @ model.weights[-1] + model.biases[-1]
    return ForwardOutput(features=hidden, logits=logits)


def backward(model: Model, loss: Tensor) -> List[np.ndarray]:
    """스칼라 손실에 대한 모든 파라미터의 기울기"""
    model.zero_grad()
    loss.backward()
    return [
        param.grad.copy() if param.grad is not None else np.zeros_like(param.data)
        for param in model.parameters()
    ]
