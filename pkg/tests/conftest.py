"""
공통 테스트 픽스처
"""
from typing import Any, Dict

import numpy as np
import pytest

from app.core.config import settings
from app.core.synthetic import make_synthetic_dataset
from app.schemas.experiment import ExperimentConfig
from app.services.config_service import build_config

TINY_ARCHITECTURES = [
    {"name": "mlp_16", "hidden_dims": [16]},
    {"name": "mlp_12_8", "hidden_dims": [12, 8]},
]


def tiny_raw(**overrides: Any) -> Dict[str, Any]:
    """수 초 안에 끝나는 소형 실험 설정"""
    raw: Dict[str, Any] = {
        "num_clients": 3,
        "architectures": TINY_ARCHITECTURES,
        "data": {
            "num_classes": 4,
            "image_side": 8,
            "private_size": 24,
            "public_size": 16,
            "eval_size": 24,
            "test_size": 24,
        },
        "schedule": {
            "rounds": 3,
            "pretrain_epochs": 1,
            "batch_size": 8,
            "public_batch_size": 8,
            "local_epochs": 1,
        },
        "mix": {"num_sequences": 2},
    }
    for key, value in overrides.items():
        if isinstance(value, dict) and isinstance(raw.get(key), dict):
            raw[key] = {**raw[key], **value}
        else:
            raw[key] = value
    return raw


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_dataset():
    return make_synthetic_dataset(n=40, num_classes=4, side=8, seed=7)


@pytest.fixture
def tiny_config():
    """tiny_config(mode="asym_hfl", ...) 형태의 설정 팩토리"""
    def _make(**overrides: Any) -> ExperimentConfig:
        return build_config(tiny_raw(**overrides))
    return _make


@pytest.fixture(autouse=True)
def single_worker(monkeypatch):
    """테스트 기본값은 단일 작업자, RAHFL_SEED 미지정"""
    monkeypatch.setattr(settings, "threads", 1)
    monkeypatch.delenv("RAHFL_SEED", raising=False)
    monkeypatch.delenv("RAHFL_THREADS", raising=False)
