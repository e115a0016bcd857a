"""
CLI 하위 명령 등록
"""
from app.commands import data, experiment, metrics

COMMAND_MODULES = (experiment, data, metrics)
