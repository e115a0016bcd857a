#!/usr/bin/env python3
"""
RAHFL 시뮬레이터 실행 스크립트
"""
import sys
from pathlib import Path

# 프로젝트 루트를 Python 경로에 추가
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from app.main import run_cli


def main() -> int:
    """CLI 실행"""
    return run_cli(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
