"""
데이터 유틸리티 명령: gen-data, corrupt
"""
import argparse
import logging
from pathlib import Path

import numpy as np

from app.core.synthetic import make_synthetic_dataset
from app.repositories.dataset_repository import load_manifest_dataset, save_manifest_dataset
from app.services.dataset_service import corrupt_dataset

logger = logging.getLogger(__name__)


def cmd_gen_data(args: argparse.Namespace) -> int:
    dataset = make_synthetic_dataset(args.count, args.num_classes, args.side, args.seed)
    path = save_manifest_dataset(dataset, args.out, include_labels=not args.no_labels)
    print(f"합성 데이터 {len(dataset)}개 저장: {path}")
    return 0


def cmd_corrupt(args: argparse.Namespace) -> int:
    dataset = load_manifest_dataset(args.manifest)
    corrupted = corrupt_dataset(dataset, args.xi, np.random.default_rng(args.seed))
    path = save_manifest_dataset(corrupted, args.out, include_labels=dataset.is_labeled)
    print(f"손상 {int(corrupted.corrupted.sum())}/{len(corrupted)}개 적용 후 저장: {path}")
    return 0


def _rate(value: str) -> float:
    rate = float(value)
    if not 0.0 <= rate <= 1.0:
        raise argparse.ArgumentTypeError(f"xi는 [0, 1] 범위여야 합니다: {value}")
    return rate


def register(subparsers) -> None:
    gen = subparsers.add_parser("gen-data", help="합성 데이터셋을 매니페스트 형식으로 저장")
    gen.add_argument("--out", type=Path, required=True, help="출력 디렉터리")
    gen.add_argument("--count", type=int, default=1000, help="이미지 수")
    gen.add_argument("--num-classes", type=int, default=4, help="클래스 수")
    gen.add_argument("--side", type=int, default=16, help="이미지 한 변")
    gen.add_argument("--seed", type=int, default=0, help="시드")
    gen.add_argument("--no-labels", action="store_true", help="라벨 파일 생략 (공개 데이터용)")
    gen.set_defaults(func=cmd_gen_data)

    corrupt = subparsers.add_parser("corrupt", help="매니페스트 데이터셋에 손상 비율 적용")
    corrupt.add_argument("--manifest", type=Path, required=True, help="입력 매니페스트")
    corrupt.add_argument("--xi", type=_rate, default=0.5, help="손상 비율 [0, 1]")
    corrupt.add_argument("--seed", type=int, default=0, help="시드")
    corrupt.add_argument("--out", type=Path, required=True, help="출력 디렉터리")
    corrupt.set_defaults(func=cmd_corrupt)
