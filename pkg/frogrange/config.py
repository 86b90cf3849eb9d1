"""Конфигурация frogrange."""

from typing import Dict, Any
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Настройки вычислений и симуляции."""

    # Параллелизм (0 = по числу ядер)
    THREADS: int = 0

    # Точность рядов
    DEFAULT_TOL: float = 1e-12
    SITE_TRUNCATION_TOL: float = 1e-6  # бюджет по полной вариации

    # Монте-Карло
    REPLICA_BLOCK: int = 2048  # реплик на одну подпоследовательность ГСЧ
    MOMENT_ORDERS: int = 4
    MAX_WAVES: int = 1_000_000

    # Поиск моды
    MODE_SCAN_SLACK: int = 64

    # Логирование
    LOG_LEVEL: str = "WARNING"
    LOG_JSON: bool = False
    LOG_TO_FILE: bool = False
    LOG_DIR: str = "logs"

    model_config = {
        "env_prefix": "FROGRANGE_",
        "env_file": ".env",
        "env_file_encoding": "utf-8",
        "extra": "allow"
    }


# Глобальный экземпляр настроек
settings = Settings()


def load_settings() -> Settings:
    """Перечитывает окружение и возвращает проверенные настройки."""
    from frogrange.exceptions import ConfigurationError
    from frogrange.validators import validate_config

    fresh = Settings()
    result = validate_config(fresh.model_dump())
    if not result.is_valid:
        raise ConfigurationError(
            "Некорректная конфигурация: " + "; ".join(result.errors),
            config_key=result.errors[0].split(":", 1)[0],
        )
    return fresh


def get_default_config() -> Dict[str, Any]:
    """Возвращает конфигурацию по умолчанию."""
    return {
        "threads": settings.THREADS,
        "default_tol": settings.DEFAULT_TOL,
        "site_truncation_tol": settings.SITE_TRUNCATION_TOL,
        "replica_block": settings.REPLICA_BLOCK,
        "moment_orders": settings.MOMENT_ORDERS,
        "max_waves": settings.MAX_WAVES,
        "mode_scan_slack": settings.MODE_SCAN_SLACK,
        "log_level": settings.LOG_LEVEL,
        "log_json": settings.LOG_JSON,
        "log_to_file": settings.LOG_TO_FILE,
        "log_dir": settings.LOG_DIR,
    }
