"""Типы данных frogrange."""

from typing import Dict, List, Union
from enum import Enum

import numpy as np


class TailKind(Enum):
    """Правило хвоста конфигурации η для k ≥ L."""
    ZERO = "zero"
    CONSTANT = "const"
    ARITHMETIC = "arith"


class Support(Enum):
    """Носитель начальной конфигурации."""
    NONNEGATIVE = "nonneg"
    ALL_OF_Z = "allz"


class Sampler(Enum):
    """Сэмплеры Монте-Карло."""
    NONNEG = "nonneg"
    ALLZ = "allz"
    DOMINATING = "dominating"
    BLOCK = "block"
    STEPPER = "stepper"


class OutputFormat(Enum):
    """Форматы вывода CLI."""
    JSON = "json"
    CSV = "csv"


# Псевдонимы
Rng = np.random.Generator
PMFMap = Dict[int, int]
RowList = List[Dict[str, Union[int, float, str, None]]]
