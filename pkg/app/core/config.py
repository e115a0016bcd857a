"""
애플리케이션 설정
"""
from typing import Optional
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """실행 환경 설정 (RAHFL_ 접두사 환경 변수)"""

    # 기본 설정
    app_name: str = "RAHFL Simulator"
    version: str = "1.0.0"

    # 재현성 설정 (설정 파일의 seed보다 우선)
    seed: Optional[int] = None

    # 병렬 처리 설정
    threads: int = 1

    # 로깅 설정
    log_level: str = "INFO"

    # 출력 설정
    output_root: str = "runs"

    model_config = SettingsConfigDict(
        env_prefix="RAHFL_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    @property
    def worker_count(self) -> int:
        """병렬 작업자 수 (최소 1)"""
        return max(1, self.threads)


def get_settings() -> Settings:
    """현재 환경 기준 설정 로드"""
    return Settings()


settings = Settings()
