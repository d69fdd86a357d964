"""
Runtime configuration

Values come from the environment (prefix ``SDMC_``) or a ``.env`` file; CLI
flags override them.
"""

from functools import lru_cache
from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Toolkit settings"""

    model_config = SettingsConfigDict(
        env_prefix='SDMC_',
        env_file='.env',
        env_file_encoding='utf-8',
        extra='ignore',
    )

    seed: int = 0
    search_ceiling: int = 2 ** 64
    entry_bound: int = 2 ** 31
    max_workers: int = 1
    state_space_limit: int = 10 ** 6
    statistical_samples: int = 100_000
    chi2_alpha: float = 0.01
    phi_retries: int = 32
    log_level: str = 'INFO'
    log_file: Optional[str] = None


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return the process-wide settings instance"""
    return Settings()
