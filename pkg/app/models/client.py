"""
클라이언트 도메인 레코드
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from app.core.model import Model
from app.core.optim import AdamState
from app.models.dataset import Dataset
from app.services.protocol_monitor import ProtocolMonitor


@dataclass
class ClientState:
    """클라이언트 c_k: 모델, 옵티마이저, 손상된 사설 데이터"""
    client_id: int
    arch_name: str
    model: Model
    adam: AdamState
    private_data: Dataset = field(repr=False)
    local_epochs: int
    rng: np.random.Generator = field(repr=False)
    monitor: Optional[ProtocolMonitor] = field(default=None, repr=False)
    # 없으면 배치 순서 난수(rng)로 증강도 샘플링
    augment_rng: Optional[np.random.Generator] = field(default=None, repr=False)

    @classmethod
    def create(
        cls,
        client_id: int,
        arch_name: str,
        model: Model,
        private_data: Dataset,
        local_epochs: int,
        learning_rate: float,
        rng: np.random.Generator,
        monitor: Optional[ProtocolMonitor] = None,
        augment_rng: Optional[np.random.Generator] = None,
    ) -> "ClientState":
        adam = AdamState.for_params([p.data for p in model.parameters()], learning_rate)
        return cls(client_id, arch_name, model, adam, private_data, local_epochs, rng, monitor, augment_rng)

    def read_private(self, reader: int) -> Dataset:
        """사설 데이터 접근 (계측 기록)"""
        if self.monitor is not None:
            self.monitor.record_private_read(self.client_id, reader)
        return self.private_data
