"""
RAHFL 시뮬레이터 CLI 진입점
"""
import argparse
import logging
import sys
from typing import List, Optional

from app.commands import COMMAND_MODULES
from app.core.config import get_settings
from app.core.exceptions import RahflError

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="rahfl",
        description=f"{settings.app_name} {settings.version} - 손상 데이터에 강건한 이기종 연합 학습 시뮬레이터",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # 명령 등록
    for module in COMMAND_MODULES:
        module.register(subparsers)
    return parser


def configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s - %(message)s",
    )


def run_cli(argv: Optional[List[str]] = None) -> int:
    """명령 실행 후 종료 코드 반환 (사용법 오류 2, 실행 오류 1)"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    configure_logging(get_settings().log_level)
    try:
        return args.func(args)
    except RahflError as e:
        logger.error(f"{args.command} 실패: {e}")
        return 1
    except OSError as e:
        logger.error(f"{args.command} 입출력 실패: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(run_cli())
