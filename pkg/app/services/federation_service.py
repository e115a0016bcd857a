"""
연합 학습 서비스
공개 데이터 출력 스냅샷, 전달 행렬 갱신, 비대칭 협업 학습, 로컬 업데이트
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Literal, Optional, Sequence, TypeVar

import numpy as np

from app.core.config import settings
from app.core.constants import Mode
from app.core.losses import collaborative_loss, kl_term_counts
from app.core.model import backward
from app.core.optim import adam_step
from app.core.tensor import Tensor, softmax
from app.core.transfer_matrix import KnowledgeMatrix, build_transfer_matrix
from app.models.client import ClientState
from app.models.dataset import Dataset
from app.schemas.metrics import RoundMetrics
from app.services.client_service import EpochLosses, TrainingOptions, evaluate, local_update
from app.services.protocol_monitor import ProtocolMonitor, snapshot_digest

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass
class FederationState:
    """라운드 간 유지되는 연합 상태"""
    clients: List[ClientState]
    public_data: Dataset
    eval_split: Dataset
    test_clean: Dataset
    test_corrupt: Dataset
    options: TrainingOptions
    mode: Mode = Mode.RAHFL
    rounds: int = 40
    matrix_update_period: int = 1
    public_batch_size: int = 256
    phase_order: Literal["collab_first", "local_first"] = "collab_first"
    matrix: Optional[KnowledgeMatrix] = None
    monitor: ProtocolMonitor = field(default_factory=ProtocolMonitor)

    @property
    def num_clients(self) -> int:
        return len(self.clients)

    @property
    def aug_enabled(self) -> bool:
        return self.options.aug_enabled

    @property
    def dcl_enabled(self) -> bool:
        return self.options.dcl_enabled


@dataclass
class CollaborativeOutcome:
    """협업 단계 결과"""
    matrix: KnowledgeMatrix
    loss_col: List[float]
    kl_terms: List[int]


def run_per_client(fn: Callable[[int], T], count: int) -> List[T]:
    """클라이언트별 독립 작업 (결과는 인덱스 순서)"""
    workers = min(settings.worker_count, max(count, 1))
    if workers <= 1:
        return [fn(k) for k in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, range(count)))


def public_outputs(state: FederationState) -> List[np.ndarray]:
    """모든 클라이언트의 공개 데이터 softmax 출력 (읽기 전용 스냅샷)"""
    inputs = state.public_data.flat()
    batch = state.public_batch_size

    def _compute(k: int) -> np.ndarray:
        model = state.clients[k].model
        chunks = [model.predict_proba(inputs[start:start + batch]) for start in range(0, len(inputs), batch)]
        output = np.concatenate(chunks, axis=0)
        output.setflags(write=False)
        return output

    return run_per_client(_compute, state.num_clients)


def refresh_matrix(state: FederationState, round_index: int) -> KnowledgeMatrix:
    """T_f 라운드마다 평가 분할 정확도로 M 재구성 (대칭 모드는 항상 전부 1)"""
    if state.mode == Mode.HFL_SYMMETRIC:
        state.matrix = KnowledgeMatrix.symmetric(state.num_clients, round_index)
        return state.matrix
    if state.matrix is None or round_index % state.matrix_update_period == 0:
        accuracies = run_per_client(lambda k: evaluate(state.clients[k].model, state.eval_split), state.num_clients)
        state.matrix = build_transfer_matrix(accuracies, round_index)
        logger.info(f"라운드 {round_index}: 전달 행렬 갱신 (1의 개수={state.matrix.ones}, ACC={np.round(accuracies, 4).tolist()})")
    return state.matrix


def _distill(state: FederationState, k: int, snapshot: Sequence[np.ndarray], row: List[int], round_index: int) -> float:
    """학습자 k가 공개 데이터를 한 번 순회하며 식 (협업 손실) 최소화"""
    client = state.clients[k]
    inputs = state.public_data.flat()
    batch = state.public_batch_size
    losses = []
    for start in range(0, len(inputs), batch):
        stop = start + batch
        learner = softmax(client.model.forward(inputs[start:stop]).logits)
        targets = [Tensor(output[start:stop]) for output in snapshot]
        result = collaborative_loss(k, targets, row, learner_output=learner)
        state.monitor.record_kl_terms(round_index, k, result.kl_terms)
        state.monitor.record_peer_reads(result.kl_terms)

        params = client.model.parameters()
        grads = backward(client.model, result.value)
        adam_step(client.adam, [param.data for param in params], grads)
        losses.append(result.value.item())
    return float(np.mean(losses))


def collaborative_phase(state: FederationState, round_index: int) -> CollaborativeOutcome:
    """스냅샷 → 행렬 → 행이 0이 아닌 학습자만 증류"""
    snapshot = public_outputs(state)
    before = snapshot_digest(snapshot)
    matrix = refresh_matrix(state, round_index)
    learners = set(matrix.learners())

    def _learn(k: int) -> float:
        if k not in learners:
            logger.debug(f"라운드 {round_index}: 클라이언트 {k}는 더 나은 클라이언트가 없어 협업 학습 생략")
            return 0.0
        return _distill(state, k, snapshot, matrix.row(k), round_index)

    loss_col = run_per_client(_learn, state.num_clients)
    state.monitor.record_snapshot_check(before, snapshot_digest(snapshot))
    return CollaborativeOutcome(matrix=matrix, loss_col=loss_col, kl_terms=kl_term_counts(matrix.entries))


def local_phase(state: FederationState) -> List[EpochLosses]:
    """모든 클라이언트 T_l 에폭 로컬 업데이트, 에폭 평균 손실"""
    options = state.options

    def _update(k: int) -> EpochLosses:
        client = state.clients[k]
        history = local_update(
            client,
            options.weights,
            options.aug_enabled,
            options.dcl_enabled,
            client.rng,
            mix=options.mix,
            batch_size=options.batch_size,
            contrastive_mode=options.contrastive_mode,
        )
        totals = EpochLosses()
        for epoch in history:
            totals.accumulate(epoch)
        return totals.scaled(1.0 / max(len(history), 1))

    return run_per_client(_update, state.num_clients)


def record_round(
    state: FederationState,
    round_index: int,
    local: List[EpochLosses],
    outcome: Optional[CollaborativeOutcome] = None,
) -> RoundMetrics:
    """깨끗한/손상 테스트 평가 후 라운드 지표 구성"""
    k = state.num_clients
    acc_clean = run_per_client(lambda i: evaluate(state.clients[i].model, state.test_clean), k)
    acc_corrupt = run_per_client(lambda i: evaluate(state.clients[i].model, state.test_corrupt), k)
    metrics = RoundMetrics(
        round=round_index,
        acc_clean=acc_clean,
        acc_corrupt=acc_corrupt,
        loss_ce=[losses.ce for losses in local],
        loss_jsd=[losses.jsd for losses in local],
        loss_supcon=[losses.supcon for losses in local],
        loss_dcl=[losses.dcl for losses in local],
        loss_col=outcome.loss_col if outcome else [0.0] * k,
        matrix_ones=outcome.matrix.ones if outcome else 0,
        acc_clean_avg=float(np.mean(acc_clean)),
        acc_corrupt_avg=float(np.mean(acc_corrupt)),
        matrix_density=outcome.matrix.density if outcome else 0.0,
        kl_terms=outcome.kl_terms if outcome else [0] * k,
    )
    logger.info(
        f"라운드 {round_index}: 평균 ACC clean={metrics.acc_clean_avg:.4f}, "
        f"corrupt={metrics.acc_corrupt_avg:.4f}, M 1의 개수={metrics.matrix_ones}"
    )
    return metrics


def collaborative_round(state: FederationState, round_index: int) -> RoundMetrics:
    """협업 단계와 로컬 단계 (순서는 phase_order)"""
    if state.mode == Mode.LOCAL_ONLY:
        raise ValueError("local_only 모드에서는 협업 라운드를 수행하지 않습니다.")
    if state.phase_order == "local_first":
        local = local_phase(state)
        outcome = collaborative_phase(state, round_index)
    else:
        outcome = collaborative_phase(state, round_index)
        local = local_phase(state)
    return record_round(state, round_index, local, outcome)


def local_round(state: FederationState, round_index: int) -> RoundMetrics:
    """협업 없이 로컬 업데이트만 수행"""
    return record_round(state, round_index, local_phase(state))
