#!/usr/bin/env python3
"""
執行設定

預設值 → 環境變數（KFREE_*，可放在 .env）→ 命令列參數，後者覆蓋前者。
"""

import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, field_validator

from finite_geometry.errors import ConfigError

logger = logging.getLogger(__name__)

ENV_PREFIX = "KFREE_"
IDENTITY_SEED = 0xC11CE


class Settings(BaseModel):
    """所有上限、預算與容許誤差"""

    field_size_cap: int = Field(default=8192, ge=3)
    vertex_cap: int = Field(default=20000, ge=1)
    eigen_cap: int = Field(default=6000, ge=1)
    identity_full_cap: int = Field(default=3000, ge=0)
    jacobi_max_n: int = Field(default=64, ge=0)
    clique_time_budget: float = Field(default=300.0, gt=0)
    tolerance: float = Field(default=1e-6, gt=0)
    identity_seed: int = IDENTITY_SEED
    identity_vectors: int = Field(default=32, ge=1)
    transitivity_exhaustive_cap: int = Field(default=200, ge=0)
    transitivity_samples: int = Field(default=500, ge=1)
    transitivity_seed: int = 20190101
    neighborhood_cap: int = Field(default=2000, ge=0)
    threads: int = Field(default=1, ge=1)
    output_dir: Path = Path("results")
    log_level: str = "WARNING"

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        value = value.upper()
        if value not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError(f"未知的日誌等級: {value}")
        return value

    def merged(self, **overrides: Any) -> "Settings":
        """以非 None 的覆寫值建立新設定"""
        changes = {k: v for k, v in overrides.items() if v is not None}
        return self.model_validate({**self.model_dump(), **changes})


def _env_overrides() -> Dict[str, str]:
    overrides = {}
    for name in Settings.model_fields:
        value = os.getenv(ENV_PREFIX + name.upper())
        if value not in (None, ""):
            overrides[name] = value
    return overrides


def load_settings(env_file: Optional[str] = None, **overrides: Any) -> Settings:
    """
    讀取設定

    Args:
        env_file: 指定 .env 檔；None 時由 python-dotenv 自行尋找
        overrides: 命令列覆寫值（None 表示未指定）

    Raises:
        ConfigError: 環境變數值無法通過驗證
    """
    load_dotenv(env_file)
    values: Dict[str, Any] = _env_overrides()
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        settings = Settings(**values)
    except ValueError as exc:
        raise ConfigError(f"設定值無效: {exc}") from exc
    logger.debug("設定: %s", settings.model_dump())
    return settings
