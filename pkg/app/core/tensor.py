"""
역전파 자동 미분 텐서
numpy 배열(float64) 위에서 동작하는 최소 reverse-mode autodiff
"""
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.constants import ErrorMessages, LossConstants
from app.core.exceptions import DimensionMismatchError, NonScalarBackwardError

ArrayLike = Union[np.ndarray, float, int, Sequence[float]]


def _unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """브로드캐스팅된 기울기를 원래 형태로 축약"""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


class Tensor:
    """기울기를 추적하는 실수 배열"""

    __slots__ = ("data", "grad", "requires_grad", "_parents", "_backward", "_op")
    # numpy 스칼라와의 연산을 Tensor 쪽 연산자로 위임
    __array_ufunc__ = None

    def __init__(
        self,
        data: ArrayLike,
        requires_grad: bool = False,
        _parents: Tuple["Tensor", ...] = (),
        _op: str = "",
    ):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: Optional[np.ndarray] = None
        self.requires_grad = requires_grad
        self._parents = _parents
        self._backward: Callable[[], None] = lambda: None
        self._op = _op

    # ---- 기본 속성 ----
    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def item(self) -> float:
        return float(self.data)

    def detach(self) -> "Tensor":
        """그래프에서 분리된 상수 텐서"""
        return Tensor(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, requires_grad={self.requires_grad}, op={self._op!r})"

    # ---- 그래프 구성 ----
    @staticmethod
    def _lift(value: Union["Tensor", ArrayLike]) -> "Tensor":
        return value if isinstance(value, Tensor) else Tensor(value)

    def _child(self, data: np.ndarray, parents: Tuple["Tensor", ...], op: str) -> "Tensor":
        return Tensor(data, any(p.requires_grad for p in parents), parents, op)

    def _accumulate(self, grad: np.ndarray) -> None:
        if not self.requires_grad:
            return
        if self.grad is None:
            self.grad = np.zeros_like(self.data)
        self.grad = self.grad + grad

    # ---- 산술 연산 ----
    def __add__(self, other) -> "Tensor":
        other = self._lift(other)
        out = self._child(self.data + other.data, (self, other), "add")

        def _backward():
            self._accumulate(_unbroadcast(out.grad, self.shape))
            other._accumulate(_unbroadcast(out.grad, other.shape))

        out._backward = _backward
        return out

    __radd__ = __add__

    def __neg__(self) -> "Tensor":
        out = self._child(-self.data, (self,), "neg")

        def _backward():
            self._accumulate(-out.grad)

        out._backward = _backward
        return out

    def __sub__(self, other) -> "Tensor":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "Tensor":
        return self._lift(other) + (-self)

    def __mul__(self, other) -> "Tensor":
        other = self._lift(other)
        out = self._child(self.data * other.data, (self, other), "mul")

        def _backward():
            self._accumulate(_unbroadcast(out.grad * other.data, self.shape))
            other._accumulate(_unbroadcast(out.grad * self.data, other.shape))

        out._backward = _backward
        return out

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Tensor":
        other = self._lift(other)
        out = self._child(self.data / other.data, (self, other), "div")

        def _backward():
            self._accumulate(_unbroadcast(out.grad / other.data, self.shape))
            other._accumulate(
                _unbroadcast(-out.grad * self.data / (other.data ** 2), other.shape)
            )

        out._backward = _backward
        return out

    def __rtruediv__(self, other) -> "Tensor":
        return self._lift(other) / self

    def __matmul__(self, other) -> "Tensor":
        other = self._lift(other)
        if self.ndim != 2 or other.ndim != 2 or self.shape[1] != other.shape[0]:
            raise DimensionMismatchError(
                ErrorMessages.dimension_mismatch("matmul", self.shape, other.shape)
            )
        out = self._child(self.data @ other.data, (self, other), "matmul")

        def _backward():
            self._accumulate(out.grad @ other.data.T)
            other._accumulate(self.data.T @ out.grad)

        out._backward = _backward
        return out

    @property
    def T(self) -> "Tensor":
        out = self._child(self.data.T, (self,), "transpose")

        def _backward():
            self._accumulate(out.grad.T)

        out._backward = _backward
        return out

    def __getitem__(self, index) -> "Tensor":
        out = self._child(self.data[index], (self,), "getitem")

        def _backward():
            grad = np.zeros_like(self.data)
            np.add.at(grad, index, out.grad)
            self._accumulate(grad)

        out._backward = _backward
        return out

    def reshape(self, *shape) -> "Tensor":
        out = self._child(self.data.reshape(*shape), (self,), "reshape")

        def _backward():
            self._accumulate(out.grad.reshape(self.shape))

        out._backward = _backward
        return out

    # ---- 축약 연산 ----
    def sum(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        out = self._child(self.data.sum(axis=axis, keepdims=keepdims), (self,), "sum")

        def _backward():
            grad = out.grad
            if axis is not None and not keepdims:
                grad = np.expand_dims(grad, axis)
            self._accumulate(np.broadcast_to(grad, self.shape).copy())

        out._backward = _backward
        return out

    def mean(self, axis: Optional[int] = None, keepdims: bool = False) -> "Tensor":
        count = self.data.size if axis is None else self.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) / float(count)

    # ---- 원소별 함수 ----
    def exp(self) -> "Tensor":
        value = np.exp(self.data)
        out = self._child(value, (self,), "exp")

        def _backward():
            self._accumulate(out.grad * value)

        out._backward = _backward
        return out

    def log(self) -> "Tensor":
        out = self._child(np.log(self.data), (self,), "log")

        def _backward():
            self._accumulate(out.grad / self.data)

        out._backward = _backward
        return out

    def sqrt(self) -> "Tensor":
        """제곱근 (0 지점의 기울기는 0으로 둔다)"""
        value = np.sqrt(self.data)
        out = self._child(value, (self,), "sqrt")

        def _backward():
            grad = np.zeros_like(value)
            np.divide(out.grad * 0.5, value, out=grad, where=value > 0)
            self._accumulate(grad)

        out._backward = _backward
        return out

    def relu(self) -> "Tensor":
        mask = self.data > 0
        out = self._child(np.where(mask, self.data, 0.0), (self,), "relu")

        def _backward():
            self._accumulate(out.grad * mask)

        out._backward = _backward
        return out

    def clamp_min(self, floor: float) -> "Tensor":
        """하한 적용 (하한 이하 구간의 기울기는 0)"""
        mask = self.data > floor
        out = self._child(np.where(mask, self.data, floor), (self,), "clamp_min")

        def _backward():
            self._accumulate(out.grad * mask)

        out._backward = _backward
        return out

    # ---- 역전파 ----
    def backward(self) -> None:
        """스칼라 값에서 모든 조상으로 기울기 전파"""
        if self.data.size != 1:
            raise NonScalarBackwardError(ErrorMessages.NON_SCALAR_BACKWARD)

        order: List[Tensor] = []
        visited = set()
        stack: List[Tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in visited:
                    stack.append((parent, False))

        self.grad = np.ones_like(self.data)
        for node in reversed(order):
            if node.grad is not None and node.requires_grad:
                node._backward()


def parameter(data: ArrayLike) -> Tensor:
    """학습 파라미터 텐서 생성"""
    return Tensor(np.array(data, dtype=np.float64), requires_grad=True)


def concat(tensors: Sequence[Tensor], axis: int = 0) -> Tensor:
    """텐서 이어붙이기"""
    datas = [t.data for t in tensors]
    out = Tensor(
        np.concatenate(datas, axis=axis),
        any(t.requires_grad for t in tensors),
        tuple(tensors),
        "concat",
    )
    bounds = np.cumsum([d.shape[axis] for d in datas])[:-1]

    def _backward():
        for tensor, grad in zip(tensors, np.split(out.grad, bounds, axis=axis)):
            tensor._accumulate(grad)

    out._backward = _backward
    return out


def gather(tensor: Tensor, rows: np.ndarray, cols: np.ndarray) -> Tensor:
    """(rows, cols) 인덱스 위치의 원소 선택"""
    return tensor[(np.asarray(rows), np.asarray(cols))]


def logsumexp(tensor: Tensor, axis: int = -1) -> Tensor:
    """안정화된 log-sum-exp (keepdims)"""
    shift = Tensor(tensor.data.max(axis=axis, keepdims=True))
    return (tensor - shift).exp().sum(axis=axis, keepdims=True).log() + shift


def log_softmax(logits: Tensor) -> Tensor:
    return logits - logsumexp(logits, axis=-1)


def softmax(logits: Tensor) -> Tensor:
    """행별 softmax (최댓값 차감으로 안정화)"""
    shifted = logits - Tensor(logits.data.max(axis=-1, keepdims=True))
    weights = shifted.exp()
    return weights / weights.sum(axis=-1, keepdims=True)


def l2_normalize(tensor: Tensor, eps: float = LossConstants.NORM_EPSILON) -> Tensor:
    """행 단위 L2 정규화"""
    norms = (tensor * tensor).sum(axis=-1, keepdims=True).sqrt().clamp_min(eps)
    return tensor / norms
