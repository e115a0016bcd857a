"""
지식 전달 행렬 M
M[p][q] = 1 이면 클라이언트 p가 이번 라운드에 q로부터 증류한다.
"""
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np


@dataclass
class KnowledgeMatrix:
    """K x K 이진 행렬 + 생성 라운드"""
    entries: np.ndarray
    round_index: int = 0

    @property
    def num_clients(self) -> int:
        return self.entries.shape[0]

    @property
    def ones(self) -> int:
        return int(self.entries.sum())

    @property
    def density(self) -> float:
        k = self.num_clients
        return self.ones / (k * (k - 1)) if k > 1 else 0.0

    def row(self, k: int) -> List[int]:
        return [int(v) for v in self.entries[k]]

    def learners(self) -> List[int]:
        """다른 클라이언트로부터 배우는 클라이언트 (행이 0이 아닌 경우)"""
        return [k for k in range(self.num_clients) if self.entries[k].any()]

    def to_list(self) -> List[List[int]]:
        return self.entries.astype(int).tolist()

    @classmethod
    def symmetric(cls, num_clients: int, round_index: int = 0) -> "KnowledgeMatrix":
        """대칭 HFL: 대각선 외 모두 1"""
        entries = np.ones((num_clients, num_clients), dtype=np.int64)
        np.fill_diagonal(entries, 0)
        return cls(entries=entries, round_index=round_index)


def build_transfer_matrix(accuracies: Sequence[float], round_index: int = 0) -> KnowledgeMatrix:
    """M[p][q] = 1  iff  p != q 이고 ACC_p <= ACC_q"""
    acc = np.asarray(accuracies, dtype=np.float64)
    entries = (acc[:, None] <= acc[None, :]).astype(np.int64)
    np.fill_diagonal(entries, 0)
    return KnowledgeMatrix(entries=entries, round_index=round_index)
