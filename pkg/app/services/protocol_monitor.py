"""
프로토콜 계측
사설 데이터 접근, 다른 클라이언트 출력 읽기, KL 항 수, 스냅샷 불변성을 기록
"""
import hashlib
import logging
import threading
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

SERVER = -1


@dataclass
class ProtocolMonitor:
    """라운드 진행 중 접근 기록 (스레드 안전)"""
    private_reads: Counter = field(default_factory=Counter)
    peer_output_reads: int = 0
    kl_terms_per_batch: List[Tuple[int, int, int]] = field(default_factory=list)
    snapshot_violations: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def record_private_read(self, owner: int, reader: int) -> None:
        with self._lock:
            self.private_reads[(owner, reader)] += 1

    def record_peer_reads(self, count: int) -> None:
        with self._lock:
            self.peer_output_reads += count

    def record_kl_terms(self, round_index: int, learner: int, terms: int) -> None:
        with self._lock:
            self.kl_terms_per_batch.append((round_index, learner, terms))

    def record_snapshot_check(self, before: str, after: str) -> None:
        if before != after:
            logger.error("공개 출력 스냅샷이 라운드 중 변경되었습니다")
            with self._lock:
                self.snapshot_violations += 1

    # ---- 조회 ----
    @property
    def cross_client_private_reads(self) -> int:
        """소유자가 아닌 주체(서버 포함)의 사설 데이터 접근 수"""
        return sum(count for (owner, reader), count in self.private_reads.items() if owner != reader)

    def kl_terms_in_round(self, round_index: int) -> Dict[int, List[int]]:
        terms: Dict[int, List[int]] = {}
        for r, learner, count in self.kl_terms_per_batch:
            if r == round_index:
                terms.setdefault(learner, []).append(count)
        return terms

    def kl_terms_per_public_batch(self, round_index: int) -> int:
        """한 공개 배치에서 모든 학습자가 평가한 KL 항 합계"""
        per_learner = self.kl_terms_in_round(round_index)
        return sum(counts[0] for counts in per_learner.values() if counts)


def snapshot_digest(outputs: Sequence[np.ndarray]) -> str:
    """공개 출력 스냅샷의 내용 해시"""
    digest = hashlib.sha256()
    for output in outputs:
        digest.update(np.ascontiguousarray(output).tobytes())
    return digest.hexdigest()
