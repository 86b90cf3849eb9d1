#!/usr/bin/env python3
"""
Кастомные исключения frogrange.
Разделяют ошибки области определения, ошибки ввода, конфигурации и симуляции.
"""

from typing import Optional, Dict, Any, List


class FrogRangeError(Exception):
    """Базовое исключение frogrange."""

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        """Преобразует исключение в словарь."""
        return {
            'error_type': self.__class__.__name__,
            'message': self.message,
            'details': self.details
        }


class DomainError(FrogRangeError):
    """Аргумент вне математической области определения."""

    def __init__(self, message: str, parameter: Optional[str] = None,
                 value: Optional[Any] = None):
        super().__init__(message)
        self.parameter = parameter
        self.value = value
        self.details = {
            'parameter': parameter,
            'value': repr(value) if value is not None else None
        }


class ValidationError(FrogRangeError):
    """Исключение валидации входных данных."""

    def __init__(self, message: str, validation_errors: Optional[List[str]] = None,
                 warnings: Optional[List[str]] = None):
        super().__init__(message)
        self.validation_errors = validation_errors or [message]
        self.warnings = warnings or []
        self.details = {
            'validation_errors': self.validation_errors,
            'warnings': self.warnings
        }


class ConfigurationError(FrogRangeError):
    """Исключение конфигурации."""

    def __init__(self, message: str, config_key: Optional[str] = None,
                 invalid_value: Optional[Any] = None):
        super().__init__(message)
        self.config_key = config_key
        self.invalid_value = invalid_value
        self.details = {
            'config_key': config_key,
            'invalid_value': str(invalid_value) if invalid_value is not None else None,
            'value_type': type(invalid_value).__name__ if invalid_value is not None else None
        }


class SimulationError(FrogRangeError):
    """Диагностика симулятора: превышен лимит волн или окно узлов."""

    def __init__(self, message: str, stage: Optional[str] = None,
                 diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.stage = stage
        self.diagnostics = diagnostics or {}
        self.details = {
            'stage': stage,
            'diagnostics': self.diagnostics
        }


def require(condition: bool, message: str, parameter: str, value: Any) -> None:
    """Бросает DomainError, если условие не выполнено."""
    if not condition:
        raise DomainError(message, parameter, value)


class ErrorContext:
    """Контекст операции: переводит сырые ошибки numpy/Python в иерархию frogrange."""

    def __init__(self, operation: str, **context_data):
        self.operation = operation
        self.context_data = context_data
        self.warnings: List[str] = []

    def add_warning(self, warning: str):
        """Добавляет предупреждение в контекст."""
        self.warnings.append(warning)

    def to_dict(self) -> Dict[str, Any]:
        """Преобразует контекст в словарь."""
        return {
            'operation': self.operation,
            'context_data': self.context_data,
            'warnings': self.warnings
        }

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        if exc_type is None or isinstance(exc_val, FrogRangeError):
            return False
        if isinstance(exc_val, (ArithmeticError, FloatingPointError)):
            raise DomainError(
                f"Ошибка в операции '{self.operation}': {exc_val}",
                parameter=self.operation,
                value=self.context_data or None,
            ) from exc_val
        if isinstance(exc_val, ValueError):
            raise ValidationError(
                f"Ошибка в операции '{self.operation}': {exc_val}"
            ) from exc_val
        return False  # Не подавляем исключения
