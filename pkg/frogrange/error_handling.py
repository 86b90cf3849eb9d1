"""Модуль для централизованной обработки ошибок командной строки."""

import logging
import sys
from functools import wraps
from typing import Callable

import click

from frogrange.exceptions import (
    FrogRangeError, DomainError, ValidationError, ConfigurationError, SimulationError
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


def exit_code_for(error: BaseException) -> int:
    """Код выхода для исключения."""
    if isinstance(error, DomainError):
        return EXIT_DOMAIN
    if isinstance(error, (ValidationError, ConfigurationError, click.UsageError)):
        return EXIT_USAGE
    return EXIT_FAILURE


def handle_cli_errors(func: Callable) -> Callable:
    """Декоратор: логирует ошибку, печатает одну строку в stderr и завершает процесс."""
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (DomainError, ValidationError, ConfigurationError) as e:
            logger.warning("Ошибка ввода: %s", e.message, extra={'details': e.details})
            click.echo(f"❌ {e.message}", err=True)
            sys.exit(exit_code_for(e))
        except SimulationError as e:
            logger.error("Ошибка симуляции: %s", e.message, extra={'details': e.details})
            click.echo(f"❌ {e.message}", err=True)
            sys.exit(EXIT_FAILURE)
        except FrogRangeError as e:
            logger.error("Ошибка: %s", e.message, exc_info=True)
            click.echo(f"❌ {e.message}", err=True)
            sys.exit(EXIT_FAILURE)
    return wrapper
