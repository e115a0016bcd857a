"""
지표 확인 명령: inspect-metrics
"""
import argparse
from pathlib import Path

from app.repositories.metrics_repository import MetricsRepository


def cmd_inspect_metrics(args: argparse.Namespace) -> int:
    repository = MetricsRepository(args.dir)
    for m in repository.read_metrics():
        print(f"round {m.round:3d}  clean={m.acc_clean_avg:.4f}  corrupt={m.acc_corrupt_avg:.4f}  "
              f"M ones={m.matrix_ones}  kl_terms={m.kl_terms}")
    rows = repository.read_summary()
    for row in rows:
        print(", ".join(f"{key}={value}" for key, value in row.items()))
    return 0


def register(subparsers) -> None:
    inspect = subparsers.add_parser("inspect-metrics", help="metrics.jsonl / summary.csv 요약 출력")
    inspect.add_argument("--dir", type=Path, required=True, help="실험 출력 디렉터리")
    inspect.set_defaults(func=cmd_inspect_metrics)
