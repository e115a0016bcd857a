"""
애플리케이션 상수 정의
"""
from enum import Enum


class CorruptionKind(str, Enum):
    """손상 종류 (노이즈/블러/날씨/디지털 범주의 부분집합)"""

    GAUSSIAN_NOISE = "gaussian_noise"
    SHOT_NOISE = "shot_noise"
    IMPULSE_NOISE = "impulse_noise"
    BOX_BLUR = "box_blur"
    BRIGHTNESS = "brightness"
    CONTRAST = "contrast"
    PIXELATE = "pixelate"
    OCCLUSION = "occlusion"


class AugKind(str, Enum):
    """혼합 증강 연산 종류"""

    AUTOCONTRAST = "autocontrast"
    EQUALIZE = "equalize"
    ROTATE = "rotate"
    POSTERIZE = "posterize"
    SOLARIZE = "solarize"
    SHEAR_X = "shear_x"
    SHEAR_Y = "shear_y"
    TRANSLATE_X = "translate_x"
    TRANSLATE_Y = "translate_y"


class Mode(str, Enum):
    """연합 학습 모드"""

    LOCAL_ONLY = "local_only"
    HFL_SYMMETRIC = "hfl_symmetric"
    ASYM_HFL = "asym_hfl"
    RAHFL = "rahfl"


class CorruptionConstants:
    """손상 심각도 테이블 (심각도 1~5)"""

    SEVERITY_LEVELS = [1, 2, 3, 4, 5]

    GAUSSIAN_SIGMA = [0.04, 0.08, 0.12, 0.16, 0.20]
    SHOT_PHOTONS = [500, 250, 100, 60, 30]
    IMPULSE_PROB = [0.01, 0.03, 0.06, 0.10, 0.17]
    BLUR_KERNEL = [3, 3, 5, 5, 7]
    BLUR_PASSES = [1, 2, 1, 2, 3]
    BRIGHTNESS_OFFSET = [0.1, 0.15, 0.2, 0.25, 0.3]
    CONTRAST_FACTOR = [0.75, 0.6, 0.45, 0.3, 0.2]
    PIXELATE_SCALE = [0.8, 0.65, 0.5, 0.4, 0.3]
    OCCLUSION_FRACTION = [0.1, 0.15, 0.2, 0.25, 0.3]
    OCCLUSION_FILL = 0.5


class AugmentConstants:
    """증강 연산 파라미터"""

    MAX_ROTATE_DEGREES = 30.0
    MAX_SHEAR = 0.3
    MAX_TRANSLATE_FRACTION = 0.25
    POSTERIZE_MAX_LEVELS = 8
    POSTERIZE_LEVEL_RANGE = 6
    AUTOCONTRAST_MIN_RANGE = 1e-6
    EQUALIZE_BINS = 256
    MAX_CHAIN_DEPTH = 3

    # 단순 증강 파이프라인
    CROP_AREA_RANGE = (0.6, 1.0)
    JITTER_GAIN_RANGE = (0.8, 1.2)
    JITTER_OFFSET_RANGE = (-0.1, 0.1)
    JITTER_PROB = 0.8
    GRAYSCALE_PROB = 0.2
    BLUR_PROB = 0.5
    FLIP_PROB = 0.5


class ModelConstants:
    """모델/옵티마이저 기본값"""

    DEFAULT_ARCHITECTURES = [
        ("mlp_64_32", [64, 32]),
        ("mlp_128_64", [128, 64]),
        ("mlp_32", [32]),
        ("mlp_96_48_24", [96, 48, 24]),
    ]
    ADAM_BETA1 = 0.9
    ADAM_BETA2 = 0.999
    ADAM_EPSILON = 1e-8


class LossConstants:
    """손실 함수 상수"""

    PROB_FLOOR = 1e-12
    SIMPLEX_TOLERANCE = 1e-9
    NORM_EPSILON = 1e-12
    # 마스킹된 로짓 (exp 결과가 정확히 0)
    MASK_LOGIT = -1e9


class SyntheticConstants:
    """합성 데이터 패턴 파라미터"""

    PATTERN_FAMILIES = [
        "disc", "ring", "cross", "checker",
        "stripes_h", "stripes_v", "corner_blob", "gradient",
    ]
    CENTER_JITTER = 0.1
    SCALE_RANGE = (0.85, 1.15)
    INTENSITY_RANGE = (0.65, 1.0)
    BACKGROUND_NOISE = 0.04
    MIN_SIDE = 8


class ExperimentConstants:
    """실험 하네스 상수"""

    METRICS_FILE = "metrics.jsonl"
    SUMMARY_FILE = "summary.csv"
    CONFIG_FILE = "config.json"
    MANIFEST_FILE = "manifest.json"
    PIXELS_FILE = "pixels.bin"
    LABELS_FILE = "labels.bin"
    SUMMARY_COLUMNS = ["mode", "seed", "client_id", "arch", "acc_clean_final", "acc_corrupt_final"]
    AVG_ROW_ID = "avg"

    # 탁상 규모 프리셋 (설정 파일 값이 프리셋 위에 덮어씀)
    PRESETS = {
        "desk": {
            "num_clients": 4,
            "data": {
                "num_classes": 4,
                "image_side": 16,
                "private_size": 600,
                "public_size": 400,
                "eval_size": 400,
                "test_size": 1000,
            },
            "schedule": {
                "rounds": 10,
                "batch_size": 32,
                "public_batch_size": 32,
                "pretrain_epochs": 5,
            },
        },
    }


class ErrorMessages:
    """에러 메시지 상수"""

    NON_SCALAR_BACKWARD = "스칼라 값에 대해서만 역전파할 수 있습니다."
    NON_POSITIVE_STEP = "유한 차분 간격 h는 0보다 커야 합니다."
    EMPTY_DATASET = "데이터셋이 비어 있습니다."
    UNLABELED_DATASET = "라벨이 없는 데이터셋은 평가할 수 없습니다."

    @staticmethod
    def dimension_mismatch(what: str, expected, actual) -> str:
        return f"차원 불일치 ({what}): 기대값 {expected}, 실제값 {actual}"

    @staticmethod
    def label_out_of_range(label: int, num_classes: int) -> str:
        return f"라벨 {label}이(가) 클래스 범위 [0, {num_classes})를 벗어났습니다."

    @staticmethod
    def not_simplex(name: str) -> str:
        return f"{name}이(가) 확률 단체 위에 있지 않습니다."

    @staticmethod
    def empty_positives(anchor: int) -> str:
        return f"앵커 {anchor}에 양성 샘플이 없습니다."

    @staticmethod
    def unknown_kind(kind) -> str:
        return f"지원하지 않는 종류: {kind}"

    @staticmethod
    def manifest_missing(path) -> str:
        return f"매니페스트 파일을 찾을 수 없습니다: {path}"

    @staticmethod
    def manifest_size(path, expected: int, actual: int) -> str:
        return f"바이너리 크기 불일치 ({path}): 기대 {expected} bytes, 실제 {actual} bytes"

    @staticmethod
    def infeasible_partition(requested: int, available: int) -> str:
        return f"분할 불가: 요청 {requested}개, 사용 가능 {available}개"

    @staticmethod
    def matrix_row_length(expected: int, actual: int) -> str:
        return f"전달 행렬 행 길이 {actual}이(가) 클라이언트 수 {expected}와 다릅니다."

    @staticmethod
    def config_missing(path) -> str:
        return f"설정 파일을 찾을 수 없습니다: {path}"

    @staticmethod
    def config_invalid(keys) -> str:
        return f"설정 검증 실패: {', '.join(keys)}"

    @staticmethod
    def config_unreadable(path, reason) -> str:
        return f"설정 파일을 해석할 수 없습니다 ({path}): {reason}"

    @staticmethod
    def unknown_preset(name: str) -> str:
        return f"알 수 없는 프리셋: {name}"
