#!/usr/bin/env python3
"""
Конфигурация для длинных прогонов на сервере: крупные блоки реплик и логи в файлы.
"""

from frogrange.config import Settings


class ProductionSettings(Settings):
    """Настройки для пакетных прогонов."""

    # Параллелизм
    THREADS: int = 0

    # Крупные блоки меньше дробят работу по потокам.
    # Результат при данном seed зависит от REPLICA_BLOCK.
    REPLICA_BLOCK: int = 16384
    MOMENT_ORDERS: int = 6

    # Логирование
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = True
    LOG_TO_FILE: bool = True
    LOG_DIR: str = "/var/log/frogrange"

    model_config = {
        "env_prefix": "FROGRANGE_",
        "env_file": ".env.production",
        "env_file_encoding": "utf-8",
        "extra": "allow"
    }


# Глобальный экземпляр настроек для продакшена
production_settings = ProductionSettings()


def get_production_config():
    """Возвращает конфигурацию для продакшена."""
    return {
        "threads": production_settings.THREADS,
        "replica_block": production_settings.REPLICA_BLOCK,
        "moment_orders": production_settings.MOMENT_ORDERS,
        "max_waves": production_settings.MAX_WAVES,
        "site_truncation_tol": production_settings.SITE_TRUNCATION_TOL,
        "log_level": production_settings.LOG_LEVEL,
        "log_json": production_settings.LOG_JSON,
        "log_to_file": production_settings.LOG_TO_FILE,
        "log_dir": production_settings.LOG_DIR,
    }


if __name__ == "__main__":
    print("🚀 Конфигурация frogrange для продакшена")
    print("=" * 60)

    for key, value in get_production_config().items():
        print(f"{key}: {value}")

    print("\n🔧 Значения переопределяются переменными окружения FROGRANGE_*:")
    print("   export FROGRANGE_THREADS=16")
    print("   export FROGRANGE_LOG_DIR=/data/logs")
