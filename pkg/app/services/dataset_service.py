"""
데이터셋 구성 서비스
손상 비율 적용, IID/디리클레 분할, 실험용 분할(사설/공개/평가/테스트) 생성
"""
import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from app.core.constants import ErrorMessages
from app.core.corruption import apply_corruption, sample_corruption
from app.core.exceptions import PartitionError
from app.core.synthetic import make_synthetic_dataset
from app.models.dataset import Dataset
from app.repositories.dataset_repository import load_manifest_dataset
from app.schemas.dataset import PartitionPlan
from app.schemas.experiment import ExperimentConfig
from app.utils.rng_utils import SeedStreams

logger = logging.getLogger(__name__)


def corrupt_dataset(d: Dataset, xi: float, rng: np.random.Generator) -> Dataset:
    """각 예제를 확률 ξ로 손상 (종류/심각도 균등 추출)"""
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"손상 비율 ξ={xi}는 [0, 1] 범위여야 합니다.")
    images = d.images.copy()
    hits = rng.random(len(d)) < xi
    for index in np.flatnonzero(hits):
        spec = sample_corruption(rng)
        images[index] = apply_corruption(images[index], spec, rng)
    logger.debug(f"손상 적용: ξ={xi}, {int(hits.sum())}/{len(d)}개")
    return Dataset(images=images, labels=d.labels, num_classes=d.num_classes, corrupted=d.corrupted | hits)


def _largest_remainder(proportions: np.ndarray, total: int) -> np.ndarray:
    """비율 x total 을 합이 정확히 total 인 정수로 반올림"""
    raw = proportions * total
    counts = np.floor(raw).astype(np.int64)
    remainder = total - int(counts.sum())
    if remainder > 0:
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[:remainder]] += 1
    return counts


def _iid_indices(n: int, sizes: List[int], rng: np.random.Generator) -> List[np.ndarray]:
    order = rng.permutation(n)
    bounds = np.cumsum([0, *sizes])
    return [np.sort(order[start:end]) for start, end in zip(bounds[:-1], bounds[1:])]


def _dirichlet_indices(
    labels: np.ndarray,
    num_classes: int,
    sizes: List[int],
    beta: float,
    rng: np.random.Generator,
) -> List[np.ndarray]:
    pools = [list(rng.permutation(np.flatnonzero(labels == c))) for c in range(num_classes)]
    parts = []
    for client, size in enumerate(sizes):
        proportions = rng.dirichlet([beta] * num_classes)
        targets = _largest_remainder(proportions, size)
        taken: List[int] = []
        for c, target in enumerate(targets):
            take = min(int(target), len(pools[c]))
            taken.extend(pools[c][:take])
            pools[c] = pools[c][take:]

        shortfall = size - len(taken)
        if shortfall > 0:
            # 부족분은 남은 다른 클래스에서 무작위로 채운다
            logger.warning(f"클라이언트 {client}: 클래스 가용량 부족으로 {shortfall}개를 다른 클래스에서 채움")
            remaining = np.array([index for pool in pools for index in pool], dtype=np.int64)
            fill = set(rng.choice(remaining, size=shortfall, replace=False).tolist())
            taken.extend(fill)
            pools = [[index for index in pool if index not in fill] for pool in pools]
        parts.append(np.sort(np.asarray(taken, dtype=np.int64)))
    return parts


def partition_indices(
    labels: np.ndarray,
    num_classes: int,
    plan: PartitionPlan,
    rng: np.random.Generator,
) -> List[np.ndarray]:
    """클라이언트별 서로소 인덱스 집합 (크기는 계획과 정확히 일치)"""
    requested = sum(plan.client_sizes)
    if requested > len(labels):
        raise PartitionError(ErrorMessages.infeasible_partition(requested, len(labels)))
    if plan.scheme == "iid":
        return _iid_indices(len(labels), plan.client_sizes, rng)
    return _dirichlet_indices(np.asarray(labels), num_classes, plan.client_sizes, plan.beta, rng)


def partition(d: Dataset, plan: PartitionPlan, rng: np.random.Generator) -> List[Dataset]:
    parts = partition_indices(d.require_labels(), d.num_classes, plan, rng)
    return [d.subset(indices) for indices in parts]


@dataclass
class FederationData:
    """실험 한 번에 필요한 모든 분할"""
    private: List[Dataset]
    public: Dataset
    eval_split: Dataset
    test_clean: Dataset
    test_corrupt: Dataset

    @property
    def input_dim(self) -> int:
        return self.eval_split.input_dim

    @property
    def num_classes(self) -> int:
        return self.eval_split.num_classes


def _load_source(config: ExperimentConfig, streams: SeedStreams) -> Dataset:
    data = config.data
    if data.source == "manifest":
        source = load_manifest_dataset(data.manifest_path)
        if source.num_classes != data.num_classes:
            logger.warning(
                f"매니페스트 클래스 수 {source.num_classes}가 설정값 {data.num_classes}와 달라 매니페스트 값을 사용합니다"
            )
        return source
    total = config.num_clients * data.private_size + data.eval_size + data.test_size
    if data.public_manifest_path is None:
        total += data.public_size
    return make_synthetic_dataset(
        n=total,
        num_classes=data.num_classes,
        side=data.image_side,
        seed=streams.derive_seed(SeedStreams.DATA),
    )


def build_federation_data(config: ExperimentConfig, streams: SeedStreams) -> FederationData:
    """원천 데이터 → 테스트/평가/공개 분리 → 나머지를 클라이언트에 분할 → 손상 적용"""
    data = config.data
    source = _load_source(config, streams)
    n = len(source)
    order = streams.generator(SeedStreams.DATA, "split").permutation(n)

    public_size = data.public_size if data.public_manifest_path is None else 0
    private_total = config.num_clients * data.private_size
    test_size, eval_size = data.test_size, data.eval_size
    spare = n - (test_size + eval_size + public_size + private_total)
    if spare < 0:
        # 부족분은 테스트 분할에서 먼저, 그다음 평가 분할에서 줄인다
        cut = min(-spare, test_size - 1)
        test_size -= cut
        eval_size -= min(-spare - cut, eval_size - 1)
        logger.warning(f"원천 데이터({n}개) 부족: test={test_size}, eval={eval_size}로 축소")

    test_idx = order[:test_size]
    eval_idx = order[test_size:test_size + eval_size]
    public_idx = order[test_size + eval_size:test_size + eval_size + public_size]
    pool_idx = order[test_size + eval_size + public_size:]

    test_clean = source.subset(test_idx)
    eval_split = source.subset(eval_idx)
    pool = source.subset(pool_idx)

    if data.public_manifest_path is not None:
        public = load_manifest_dataset(data.public_manifest_path)
    else:
        public = source.subset(public_idx)
    public = public.without_labels()
    if data.public_corrupted:
        public = corrupt_dataset(public, data.corruption_rate, streams.generator(SeedStreams.CORRUPTION, "public"))

    parts = partition(pool, config.partition_plan(), streams.generator(SeedStreams.PARTITION))
    rates = config.client_corruption_rates()
    private = [
        corrupt_dataset(part, rates[k], streams.generator(SeedStreams.CORRUPTION, k))
        for k, part in enumerate(parts)
    ]
    test_corrupt = corrupt_dataset(test_clean, 1.0, streams.generator(SeedStreams.TEST_CORRUPTION))

    logger.info(
        f"데이터 분할 완료: 클라이언트 {len(private)}개 x {data.private_size}, "
        f"공개 {len(public)}, 평가 {len(eval_split)}, 테스트 {len(test_clean)}"
    )
    return FederationData(private, public, eval_split, test_clean, test_corrupt)
