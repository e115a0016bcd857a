"""
시뮬레이터 예외 정의
"""
from typing import List


class RahflError(Exception):
    """시뮬레이터 공통 예외"""


class DimensionMismatchError(RahflError, ValueError):
    """텐서/배치 차원 불일치"""


class NonScalarBackwardError(RahflError, ValueError):
    """스칼라가 아닌 값에 대한 역전파"""


class SimplexViolationError(RahflError, ValueError):
    """확률 단체(simplex) 위반"""


class LabelRangeError(RahflError, ValueError):
    """라벨 범위 초과"""


class EmptyPositiveSetError(RahflError, ValueError):
    """양성 쌍이 없는 앵커"""


class UnknownKindError(RahflError, ValueError):
    """알 수 없는 손상/증강 종류"""


class ManifestNotFoundError(RahflError, FileNotFoundError):
    """매니페스트 또는 데이터 파일 없음"""


class ManifestShapeError(RahflError, ValueError):
    """매니페스트 형태/레코드 수 불일치"""


class PartitionError(RahflError, ValueError):
    """분할 계획 수행 불가"""


class UnlabeledDatasetError(RahflError, ValueError):
    """라벨 없는 데이터셋 평가"""


class TransferMatrixError(RahflError, ValueError):
    """지식 전달 행렬 형태 오류"""


class ConfigFileNotFoundError(RahflError, FileNotFoundError):
    """설정 파일 없음"""


class ConfigValidationError(RahflError, ValueError):
    """설정 검증 실패 (문제 키 목록 포함)"""

    def __init__(self, message: str, keys: List[str]):
        super().__init__(message)
        self.keys = keys
