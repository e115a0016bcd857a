"""
실험 실행 서비스
데이터 구성 → 클라이언트 생성 → 사전 학습 → 라운드 반복 → 지표 기록
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional, Union

from app.core.model import Model
from app.models.client import ClientState
from app.repositories.metrics_repository import MetricsRepository, build_summary, emit_metrics
from app.schemas.experiment import ExperimentConfig
from app.schemas.metrics import ExperimentSummary, RoundMetrics
from app.services.client_service import TrainingOptions, pretrain
from app.services.dataset_service import FederationData, build_federation_data
from app.services.federation_service import FederationState, run_per_client, collaborative_round, local_round
from app.services.protocol_monitor import ProtocolMonitor
from app.utils.rng_utils import SeedStreams

logger = logging.getLogger(__name__)


@dataclass
class ExperimentResult:
    """실험 결과 (라운드 지표 + 요약 + 계측)"""
    config: ExperimentConfig
    metrics: List[RoundMetrics]
    summary: Optional[ExperimentSummary]
    monitor: ProtocolMonitor
    arch_names: List[str]

    def save(self, out_dir: Union[str, Path, None] = None) -> MetricsRepository:
        return emit_metrics(
            self.metrics,
            out_dir or self.config.output_dir,
            mode=self.config.mode.value,
            seed=self.config.seed,
            arch_names=self.arch_names,
            effective_config=self.config.to_effective_dict(),
        )


def training_options(config: ExperimentConfig) -> TrainingOptions:
    return TrainingOptions(
        weights=config.loss,
        mix=config.mix,
        batch_size=config.schedule.batch_size,
        aug_enabled=config.aug_enabled,
        dcl_enabled=config.dcl_enabled,
        contrastive_mode=config.contrastive_mode,
    )


def build_state(config: ExperimentConfig, data: FederationData, streams: SeedStreams) -> FederationState:
    """클라이언트별 이기종 모델 초기화 (클라이언트 전용 난수 스트림)"""
    monitor = ProtocolMonitor()
    templates = config.client_architectures()
    clients = [
        ClientState.create(
            client_id=k,
            arch_name=template.name,
            model=Model.initialize(spec, streams.generator(SeedStreams.INIT, k)),
            private_data=data.private[k],
            local_epochs=config.local_epochs,
            learning_rate=config.schedule.learning_rate,
            rng=streams.generator(SeedStreams.TRAIN, k),
            augment_rng=streams.generator(SeedStreams.AUGMENT, k),
            monitor=monitor,
        )
        for k, (template, spec) in enumerate(zip(templates, config.model_specs(data.input_dim, data.num_classes)))
    ]
    return FederationState(
        clients=clients,
        public_data=data.public,
        eval_split=data.eval_split,
        test_clean=data.test_clean,
        test_corrupt=data.test_corrupt,
        options=training_options(config),
        mode=config.mode,
        rounds=config.schedule.rounds,
        matrix_update_period=config.schedule.matrix_update_period,
        public_batch_size=config.schedule.public_batch_size,
        phase_order=config.schedule.phase_order,
        monitor=monitor,
    )


def pretrain_all(state: FederationState, config: ExperimentConfig, streams: SeedStreams) -> None:
    epochs = config.schedule.pretrain_epochs
    use_local = config.schedule.pretrain_loss == "local"
    run_per_client(
        lambda k: pretrain(
            state.clients[k], epochs, state.options, streams.generator(SeedStreams.TRAIN, k, "pretrain"), use_local
        ),
        state.num_clients,
    )
    logger.info(f"사전 학습 완료: {state.num_clients}개 클라이언트 x {epochs} 에폭")


def run_experiment(config: ExperimentConfig, out_dir: Union[str, Path, None] = None) -> ExperimentResult:
    """설정 하나에 대한 전체 실험, out_dir 를 주면 지표 파일까지 기록"""
    logger.info(
        f"실험 시작: mode={config.mode.value}, K={config.num_clients}, seed={config.seed}, "
        f"aug={config.aug_enabled}, dcl={config.dcl_enabled}, T_c={config.schedule.rounds}"
    )
    streams = SeedStreams(config.seed)
    data = build_federation_data(config, streams)
    state = build_state(config, data, streams)
    pretrain_all(state, config, streams)

    step = collaborative_round if config.collaborative else local_round
    metrics = [step(state, round_index) for round_index in range(config.schedule.rounds)]

    arch_names = [client.arch_name for client in state.clients]
    result = ExperimentResult(
        config=config,
        metrics=metrics,
        summary=build_summary(metrics, config.mode.value, config.seed, arch_names),
        monitor=state.monitor,
        arch_names=arch_names,
    )
    if result.summary is not None:
        logger.info(
            f"실험 완료: 최종 평균 ACC clean={result.summary.acc_clean_avg:.4f}, "
            f"corrupt={result.summary.acc_corrupt_avg:.4f}"
        )
    if out_dir is not None:
        result.save(out_dir)
    return result
