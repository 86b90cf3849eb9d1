"""Полиномы Белла и переход от кумулянтов к моментам."""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Sequence, Tuple

from frogrange.exceptions import DomainError, require

logger = logging.getLogger(__name__)

MAX_ORDER = 64


@dataclass(frozen=True)
class CumulantVector:
    """Кумулянты κ^{(1)}, …, κ^{(M)}; kappa[0] хранит κ^{(1)}."""
    kappa: Tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(k) for k in self.kappa)
        if not values:
            raise DomainError("CumulantVector не может быть пустым", "kappa", self.kappa)
        if not all(math.isfinite(k) for k in values):
            raise DomainError("Кумулянты должны быть конечными", "kappa", values)
        object.__setattr__(self, "kappa", values)

    def __len__(self) -> int:
        return len(self.kappa)


@lru_cache(maxsize=None)
def binomial_row(n: int) -> Tuple[int, ...]:
    """Строка треугольника Паскаля C(n, 0..n) целыми числами."""
    require(0 <= n <= MAX_ORDER, f"n должно лежать в [0, {MAX_ORDER}]", "n", n)
    if n == 0:
        return (1,)
    prev = binomial_row(n - 1)
    return (1,) + tuple(prev[i] + prev[i + 1] for i in range(n - 1)) + (1,)


def _bell_table(m: int, x: Sequence[float]) -> List[List[float]]:
    """Таблица B_{i,k} для 0 ≤ k ≤ i ≤ m по рекурсии по первому блоку."""
    table = [[0.0] * (m + 1) for _ in range(m + 1)]
    table[0][0] = 1.0
    for i in range(1, m + 1):
        row = binomial_row(i - 1)
        for k in range(1, i + 1):
            total = 0.0
            for j in range(1, i - k + 2):
                total += row[j - 1] * x[j - 1] * table[i - j][k - 1]
            table[i][k] = total
    return table


def partial_bell(m: int, k: int, x: Sequence[float]) -> float:
    """
    Частичный полином Белла B_{m,k}(x_1, …, x_{m−k+1}).

    B_{m,k} = Σ_{j=1}^{m−k+1} C(m−1, j−1) x_j B_{m−j,k−1}.
    """
    require(1 <= m <= MAX_ORDER, f"m должно лежать в [1, {MAX_ORDER}], получено {m}", "m", m)
    require(1 <= k <= m, f"k должно лежать в [1, m], получено {k}", "k", k)
    require(len(x) >= m - k + 1, f"нужно не меньше {m - k + 1} аргументов", "x", len(x))
    padded = list(x[:m - k + 1]) + [0.0] * (k - 1)
    return _bell_table(m, padded)[m][k]


def _partitions(m: int, k: int, largest: int):
    """Разбиения m ровно на k частей не больше largest, по убыванию."""
    if k == 0:
        if m == 0:
            yield ()
        return
    for part in range(min(largest, m - k + 1), 0, -1):
        for rest in _partitions(m - part, k - 1, part):
            yield (part,) + rest


def partial_bell_definitional(m: int, k: int, x: Sequence[float]) -> float:
    """B_{m,k} прямой суммой по разбиениям: m! ∏ (x_j/j!)^{k_j}/k_j!."""
    require(1 <= m <= MAX_ORDER, f"m должно лежать в [1, {MAX_ORDER}]", "m", m)
    require(1 <= k <= m, "k должно лежать в [1, m]", "k", k)
    require(len(x) >= m - k + 1, f"нужно не меньше {m - k + 1} аргументов", "x", len(x))
    total = 0.0
    for parts in _partitions(m, k, m - k + 1):
        counts: Dict[int, int] = {}
        for part in parts:
            counts[part] = counts.get(part, 0) + 1
        coeff = math.factorial(m)
        for j, kj in counts.items():
            coeff //= math.factorial(j) ** kj * math.factorial(kj)
        value = float(coeff)
        for j, kj in counts.items():
            value *= x[j - 1] ** kj
        total += value
    return total


def complete_bell(m: int, x: Sequence[float]) -> float:
    """
    Полный полином Белла B_m(x_1, …, x_m).

    B_{m+1} = Σ_{i=0}^{m} C(m, i) B_{m−i} x_{i+1}, B_0 = 1.
    """
    require(1 <= m <= MAX_ORDER, f"m должно лежать в [1, {MAX_ORDER}], получено {m}", "m", m)
    require(len(x) >= m, f"нужно не меньше {m} аргументов", "x", len(x))
    values = [1.0]
    for n in range(m):
        row = binomial_row(n)
        values.append(sum(row[i] * values[n - i] * x[i] for i in range(n + 1)))
    return values[m]


def complete_bell_definitional(m: int, x: Sequence[float]) -> float:
    """Σ_k B_{m,k}(x) через частичные полиномы."""
    require(1 <= m <= MAX_ORDER, f"m должно лежать в [1, {MAX_ORDER}]", "m", m)
    require(len(x) >= m, f"нужно не меньше {m} аргументов", "x", len(x))
    table = _bell_table(m, list(x[:m]))
    return math.fsum(table[m][1:])


def moments_from_cumulants(kappa: CumulantVector, m: int) -> float:
    """E(X^m) = B_m(κ^{(1)}, …, κ^{(m)})."""
    require(1 <= m <= len(kappa),
            f"m должно лежать в [1, {len(kappa)}], получено {m}", "m", m)
    return complete_bell(m, kappa.kappa)


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Числа Стирлинга второго рода S(n, k) = B_{n,k}(1, 1, …)."""
    require(0 <= k <= n <= MAX_ORDER, "нужно 0 ≤ k ≤ n ≤ 64", "n", (n, k))
    if n == k:
        return 1
    if k == 0:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def bell_number(m: int) -> int:
    """Число Белла: количество разбиений m-элементного множества."""
    return sum(stirling2(m, k) for k in range(m + 1))
