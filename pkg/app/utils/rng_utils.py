"""
시드 스트림 유틸리티
하나의 마스터 시드에서 이름별로 독립된 난수 스트림을 파생
"""
import zlib
from typing import Union

import numpy as np

StreamKey = Union[int, str]


class SeedStreams:
    """이름 + 키 조합별 독립 난수 생성기 팩토리"""

    DATA = "data"
    CORRUPTION = "corruption"
    PARTITION = "partition"
    INIT = "init"
    TRAIN = "train"
    AUGMENT = "augment"
    TEST_CORRUPTION = "test_corruption"

    def __init__(self, master_seed: int):
        self.master_seed = int(master_seed)

    @staticmethod
    def _key(part: StreamKey) -> int:
        if isinstance(part, str):
            return zlib.crc32(part.encode("utf-8"))
        return int(part)

    def seed_sequence(self, name: str, *keys: StreamKey) -> np.random.SeedSequence:
        spawn_key = tuple(self._key(part) for part in (name, *keys))
        return np.random.SeedSequence(entropy=self.master_seed, spawn_key=spawn_key)

    def generator(self, name: str, *keys: StreamKey) -> np.random.Generator:
        """(name, *keys)에 대한 결정적 생성기"""
        return np.random.default_rng(self.seed_sequence(name, *keys))

    def derive_seed(self, name: str, *keys: StreamKey) -> int:
        """하위 작업에 넘길 정수 시드"""
        return int(self.seed_sequence(name, *keys).generate_state(1, dtype=np.uint32)[0])
