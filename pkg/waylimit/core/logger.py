from __future__ import annotations

import datetime as _dt
import sys
from typing import Any

from waylimit.core.config import settings


LEVEL_DEBUG = "DEBUG"
LEVEL_INFO = "INFO"
LEVEL_WARNING = "WARNING"
LEVEL_ERROR = "ERROR"

_RANK = {LEVEL_DEBUG: 10, LEVEL_INFO: 20, LEVEL_WARNING: 30, LEVEL_ERROR: 40}


def _ts() -> str:
    return _dt.datetime.now().isoformat(timespec="seconds")


def _enabled(level: str) -> bool:
    return _RANK[level] >= _RANK.get(settings.log_level.upper(), 20)


def _emit(level: str, message: str, kwargs: dict[str, Any]) -> None:
    # stderr keeps CLI payloads on stdout parseable
    if not _enabled(level):
        return
    if kwargs:
        print(f"[{_ts()}] {level}: {message} | {kwargs}", file=sys.stderr)
    else:
        print(f"[{_ts()}] {level}: {message}", file=sys.stderr)


def log_debug(message: str, **kwargs: Any) -> None:
    _emit(LEVEL_DEBUG, message, kwargs)


def log_info(message: str, **kwargs: Any) -> None:
    _emit(LEVEL_INFO, message, kwargs)


def log_warning(message: str, **kwargs: Any) -> None:
    _emit(LEVEL_WARNING, message, kwargs)


def log_error(message: str, **kwargs: Any) -> None:
    _emit(LEVEL_ERROR, message, kwargs)
