#!/usr/bin/env python3
"""
Модуль валидации frogrange.
Проверка параметров, разбор η-спецификаций и списков ρ.
"""

import math
import re
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

from frogrange.distribution import FrogConfig, Tail
from frogrange.exceptions import DomainError, ValidationError
from frogrange.types import Support, TailKind


@dataclass
class ValidationResult:
    """Результат валидации."""
    is_valid: bool
    errors: List[str]
    warnings: List[str] = field(default_factory=list)

    def raise_for_errors(self, message: str) -> None:
        """Бросает ValidationError, если есть ошибки."""
        if not self.is_valid:
            raise ValidationError(message, self.errors, self.warnings)


class ParameterValidator:
    """Валидатор числовых параметров."""

    @staticmethod
    def validate_rho(value: Any) -> ValidationResult:
        """ρ строго в (0, 1)."""
        errors = []
        warnings = []
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            errors.append(f"rho: ожидалось число, получено {type(value).__name__}")
        elif not math.isfinite(value) or not 0.0 < value < 1.0:
            errors.append(f"rho: значение {value} вне интервала (0, 1)")
        elif value > 0.99999:
            warnings.append(f"rho: значение {value} близко к 1, ряды сходятся медленно")
        return ValidationResult(is_valid=not errors, errors=errors, warnings=warnings)

    @staticmethod
    def validate_positive_int(value: Any, name: str, minimum: int = 1) -> ValidationResult:
        """Целое число не меньше minimum."""
        errors = []
        if not isinstance(value, int) or isinstance(value, bool):
            errors.append(f"{name}: ожидалось целое число, получено {type(value).__name__}")
        elif value < minimum:
            errors.append(f"{name}: значение {value} меньше {minimum}")
        return ValidationResult(is_valid=not errors, errors=errors)

    @staticmethod
    def validate_tolerance(value: Any, name: str = "tol",
                           upper: float = 1.0) -> ValidationResult:
        """Допуск в (0, upper]."""
        errors = []
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            errors.append(f"{name}: ожидалось число, получено {type(value).__name__}")
        elif not 0.0 < value <= upper:
            errors.append(f"{name}: значение {value} вне (0, {upper}]")
        return ValidationResult(is_valid=not errors, errors=errors)

    @staticmethod
    def validate_unit_interval(value: Any, name: str) -> ValidationResult:
        """Открытый интервал (0, 1), для δ и α."""
        errors = []
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            errors.append(f"{name}: ожидалось число, получено {type(value).__name__}")
        elif not 0.0 < value < 1.0:
            errors.append(f"{name}: значение {value} вне интервала (0, 1)")
        return ValidationResult(is_valid=not errors, errors=errors)


def require_rho(value: float) -> float:
    """Проверяет ρ и бросает DomainError."""
    result = ParameterValidator.validate_rho(value)
    if not result.is_valid:
        raise DomainError(result.errors[0], "rho", value)
    return float(value)


class EtaSpecParser:
    """
    Разбор η-спецификаций.

    Грамматика:
        const:<n>
        arith:<a>,<b>
        prefix:[n0,n1,...];tail:<spec>     (<spec> также может быть zero)
    """

    _INT = re.compile(r"^\s*-?\d+\s*$")

    @classmethod
    def parse(cls, text: str, support: Support = Support.NONNEGATIVE) -> FrogConfig:
        """Строит FrogConfig из строки; ошибка называет неверный токен."""
        if text is None or not text.strip():
            raise ValidationError("Пустая η-спецификация", ["eta: пустая строка"])
        spec = text.strip()

        if spec.startswith("prefix:"):
            head, sep, tail_part = spec.partition(";")
            if not sep:
                raise ValidationError(
                    f"Ожидалось ';tail:<spec>' после префикса в '{spec}'",
                    [f"eta: нет хвоста в токене '{head}'"],
                )
            prefix = cls._parse_prefix(head[len("prefix:"):])
            tail_part = tail_part.strip()
            if not tail_part.startswith("tail:"):
                raise ValidationError(
                    f"Неизвестный токен '{tail_part}', ожидалось 'tail:<spec>'",
                    [f"eta: токен '{tail_part}'"],
                )
            tail = cls._parse_tail(tail_part[len("tail:"):].strip(), allow_zero=True)
        else:
            prefix = ()
            tail = cls._parse_tail(spec, allow_zero=False)

        return FrogConfig(prefix=prefix, tail=tail, support=support)

    @classmethod
    def _parse_prefix(cls, body: str) -> Tuple[int, ...]:
        body = body.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValidationError(
                f"Префикс должен быть в квадратных скобках: '{body}'",
                [f"eta: токен '{body}'"],
            )
        inner = body[1:-1].strip()
        if not inner:
            return ()
        return tuple(cls._parse_count(tok, minimum=0) for tok in inner.split(","))

    @classmethod
    def _parse_tail(cls, spec: str, allow_zero: bool) -> Tail:
        kind, sep, args = spec.partition(":")
        kind = kind.strip()
        if kind == TailKind.ZERO.value and allow_zero and not sep:
            return Tail(TailKind.ZERO)
        if kind == TailKind.CONSTANT.value and sep:
            return Tail(TailKind.CONSTANT, a=cls._parse_count(args, minimum=1))
        if kind == TailKind.ARITHMETIC.value and sep:
            parts = args.split(",")
            if len(parts) != 2:
                raise ValidationError(
                    f"arith ожидает два числа '<a>,<b>', получено '{args}'",
                    [f"eta: токен '{args}'"],
                )
            return Tail(TailKind.ARITHMETIC,
                        a=cls._parse_count(parts[0], minimum=1),
                        b=cls._parse_count(parts[1], minimum=0))
        raise ValidationError(
            f"Неизвестный токен '{spec}' в η-спецификации",
            [f"eta: токен '{spec}'"],
        )

    @classmethod
    def _parse_count(cls, token: str, minimum: int) -> int:
        if not cls._INT.match(token):
            raise ValidationError(
                f"Ожидалось целое число, получен токен '{token.strip()}'",
                [f"eta: токен '{token.strip()}'"],
            )
        value = int(token)
        if value < minimum:
            raise ValidationError(
                f"Значение '{token.strip()}' меньше {minimum}",
                [f"eta: токен '{token.strip()}'"],
            )
        return value


def parse_rho_list(text: str) -> List[float]:
    """
    Список ρ: 'r1,r2,...' или 'geom:<start>:<count>'.

    geom даёт ρ_k = 1 − (1 − start)·10^{−k}, k = 0..count−1.
    """
    if text is None or not text.strip():
        raise ValidationError("Пустой список rho", ["rho: пустой список"])
    text = text.strip()

    if text.startswith("geom:"):
        parts = text[len("geom:"):].split(":")
        if len(parts) != 2:
            raise ValidationError(
                f"Ожидалось 'geom:<start>:<count>', получено '{text}'",
                [f"rho: токен '{text}'"],
            )
        start = _parse_float(parts[0])
        count_result = EtaSpecParser._parse_count(parts[1], minimum=1)
        require_rho(start)
        values = [1.0 - (1.0 - start) * 10.0 ** (-k) for k in range(count_result)]
    else:
        tokens = [tok for tok in text.split(",")]
        if any(not tok.strip() for tok in tokens):
            raise ValidationError(
                f"Пустой элемент в списке rho '{text}'", [f"rho: токен '{text}'"]
            )
        values = [_parse_float(tok) for tok in tokens]

    for value in values:
        require_rho(value)
    return values


def _parse_float(token: str) -> float:
    try:
        return float(token)
    except ValueError:
        raise ValidationError(
            f"Ожидалось число, получен токен '{token.strip()}'",
            [f"rho: токен '{token.strip()}'"],
        ) from None


def validate_config(config: Dict[str, Any]) -> ValidationResult:
    """Валидирует словарь настроек (ключи как в Settings)."""
    errors: List[str] = []
    warnings: List[str] = []

    threads = config.get("THREADS", 0)
    if not isinstance(threads, int) or threads < 0:
        errors.append(f"THREADS: ожидалось целое ≥ 0, получено {threads!r}")

    for key in ("DEFAULT_TOL",):
        if key in config:
            res = ParameterValidator.validate_tolerance(config[key], key, upper=1e-3)
            errors.extend(res.errors)

    if "SITE_TRUNCATION_TOL" in config:
        res = ParameterValidator.validate_tolerance(
            config["SITE_TRUNCATION_TOL"], "SITE_TRUNCATION_TOL", upper=0.01)
        errors.extend(res.errors)

    for key in ("REPLICA_BLOCK", "MOMENT_ORDERS", "MAX_WAVES"):
        if key in config:
            errors.extend(ParameterValidator.validate_positive_int(config[key], key).errors)

    if "MODE_SCAN_SLACK" in config:
        errors.extend(ParameterValidator.validate_positive_int(
            config["MODE_SCAN_SLACK"], "MODE_SCAN_SLACK", minimum=0).errors)

    level = str(config.get("LOG_LEVEL", "WARNING")).upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        errors.append(f"LOG_LEVEL: неизвестный уровень {level}")

    if isinstance(config.get("REPLICA_BLOCK"), int) and config["REPLICA_BLOCK"] < 64:
        warnings.append("REPLICA_BLOCK: маленькие блоки замедляют векторизацию")

    return ValidationResult(is_valid=not errors, errors=errors, warnings=warnings)
