"""
실험 실행 명령: run, ablate
"""
import argparse
import logging
from pathlib import Path

from app.core.config import get_settings
from app.core.constants import ExperimentConstants as EC
from app.core.constants import Mode
from app.services.ablation_service import NAMED_GRIDS, GRID_KEYS, run_grid
from app.services.config_service import apply_environment, build_config, read_config_file
from app.services.experiment_service import run_experiment

logger = logging.getLogger(__name__)

CONFIG_HELP = (
    "TOML/JSON 설정 파일. 섹션 [data] [partition] [schedule] [loss] [mix] 또는 평면 키 사용. "
    "최상위: mode, aug_enabled, dcl_enabled, contrastive_mode, num_clients, architectures, seed, output_dir. "
    "data: source, manifest_path, public_manifest_path, num_classes, image_side, private_size, public_size, "
    "eval_size, test_size, corruption_rate, client_corruption_rates, public_corrupted. "
    "partition: scheme, beta. schedule: rounds, matrix_update_period, pretrain_epochs, pretrain_loss, "
    "local_epochs, phase_order, batch_size, public_batch_size, learning_rate. "
    "loss: mu, gamma, tau_c, tau_d, contrastive_reduction. mix: num_sequences, alpha."
)


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help=CONFIG_HELP)
    parser.add_argument("--preset", choices=sorted(EC.PRESETS), help="기본값 프리셋 (설정 파일 값이 우선)")
    parser.add_argument("--seed", type=int, help="마스터 시드 (RAHFL_SEED 보다 우선)")


def load_config(args: argparse.Namespace, **overrides):
    """설정 파일 < RAHFL_SEED < 명령행 플래그"""
    raw = read_config_file(args.config) if args.config else {}
    config = apply_environment(build_config(raw, preset=args.preset, overrides=overrides), get_settings())
    if args.seed is not None:
        config = config.model_copy(update={"seed": args.seed})
    return config


def cmd_run(args: argparse.Namespace) -> int:
    overrides = {}
    if args.mode is not None:
        overrides.update({"mode": args.mode, "aug_enabled": None, "dcl_enabled": None})
    if args.out is not None:
        overrides["output_dir"] = str(args.out)
    config = load_config(args, **overrides)
    result = run_experiment(config, out_dir=config.output_dir)
    summary = result.summary
    if summary is not None:
        print(f"{config.mode.value} seed={config.seed}: acc_clean_avg={summary.acc_clean_avg:.4f} "
              f"acc_corrupt_avg={summary.acc_corrupt_avg:.4f} → {config.output_dir}")
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    config = load_config(args)
    out_root = args.out or Path(get_settings().output_root) / "ablate"
    runs = run_grid(config, args.grid, out_root)
    for run in runs:
        summary = run.result.summary
        if summary is not None:
            print(f"{run.label}: acc_clean_avg={summary.acc_clean_avg:.4f} acc_corrupt_avg={summary.acc_corrupt_avg:.4f}")
    return 0


def register(subparsers) -> None:
    run = subparsers.add_parser("run", help="실험 한 번 실행")
    _add_config_args(run)
    run.add_argument("--mode", choices=[mode.value for mode in Mode], help="연합 학습 모드")
    run.add_argument("--out", type=Path, help="출력 디렉터리 (설정의 output_dir 대체)")
    run.set_defaults(func=cmd_run)

    ablate = subparsers.add_parser("ablate", help="절제 실험 그리드 순차 실행")
    _add_config_args(ablate)
    ablate.add_argument(
        "--grid",
        required=True,
        help=f"그리드 이름 ({', '.join(NAMED_GRIDS)}) 또는 'key=v1,v2;key=v' (키: {', '.join(GRID_KEYS)})",
    )
    ablate.add_argument("--out", type=Path, help="변형별 하위 디렉터리를 만들 출력 루트")
    ablate.set_defaults(func=cmd_ablate)
