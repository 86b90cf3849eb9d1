#!/usr/bin/env python3
"""
Распределение минимума X посещённых узлов: одна лягушка на узел и общая
конфигурация η, моменты, мода и асимптотики при ρ ↑ 1.
"""

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from frogrange.bellpoly import CumulantVector, moments_from_cumulants
from frogrange.cache import CacheManager, cached_table
from frogrange.config import settings
from frogrange.exceptions import DomainError, ValidationError, require
from frogrange.qseries import (
    QParam, SeriesSum, certified_sum, geometric_cutoff, log_q_pochhammer_inf,
    power_geometric_tail, q_digamma, q_digamma_derivative, zeta_int
)
from frogrange.types import Support, TailKind

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Параметры
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DriftParam:
    """Снос ρ = (1 − p)/p ∈ (0, 1) и масштаб Z_ρ = ln(1 − ρ)/ln ρ."""
    rho: float

    def __post_init__(self):
        value = self.rho
        if (isinstance(value, bool) or not isinstance(value, (int, float, np.floating))
                or not 0.0 < float(value) < 1.0):
            raise DomainError(f"rho должно лежать в (0, 1), получено {value}", "rho", value)
        object.__setattr__(self, "rho", float(value))

    @classmethod
    def from_p(cls, p: float) -> "DriftParam":
        """Снос по вероятности шага вправо p ∈ (1/2, 1)."""
        require(0.5 < p < 1.0, f"p должно лежать в (1/2, 1), получено {p}", "p", p)
        return cls((1.0 - p) / p)

    @property
    def p(self) -> float:
        return 1.0 / (1.0 + self.rho)

    @property
    def log_rho(self) -> float:
        return math.log(self.rho)

    @property
    def log1m_rho(self) -> float:
        """ln(1 − ρ)."""
        return math.log1p(-self.rho)

    @property
    def z_rho(self) -> float:
        return self.log1m_rho / self.log_rho

    @property
    def q(self) -> QParam:
        return QParam(self.rho)


@dataclass(frozen=True)
class Tail:
    """Хвост η_k при k ≥ L: ноль, константа a или a + b·k."""
    kind: TailKind
    a: int = 0
    b: int = 0

    def __post_init__(self):
        if self.kind is TailKind.ZERO and (self.a or self.b):
            raise ValidationError("Хвост zero не имеет параметров")
        if self.kind is TailKind.CONSTANT and (self.a < 1 or self.b):
            raise ValidationError(f"const требует n ≥ 1, получено {self.a}")
        if self.kind is TailKind.ARITHMETIC and (self.a < 1 or self.b < 0):
            raise ValidationError(f"arith требует a ≥ 1, b ≥ 0, получено {self.a},{self.b}")

    def at(self, k: np.ndarray) -> np.ndarray:
        k = np.asarray(k, dtype=np.float64)
        if self.kind is TailKind.ZERO:
            return np.zeros_like(k)
        if self.kind is TailKind.CONSTANT:
            return np.full_like(k, float(self.a))
        return self.a + self.b * k

    def spec(self) -> str:
        if self.kind is TailKind.ZERO:
            return "zero"
        if self.kind is TailKind.CONSTANT:
            return f"const:{self.a}"
        return f"arith:{self.a},{self.b}"


@dataclass(frozen=True)
class FrogConfig:
    """
    Начальная конфигурация η: конечный префикс (η_0, …, η_{L−1}) и хвост.

    Для носителя ALL_OF_Z допускается только однородная константа n на всём ℤ.
    """
    prefix: Tuple[int, ...] = ()
    tail: Tail = field(default_factory=lambda: Tail(TailKind.CONSTANT, 1))
    support: Support = Support.NONNEGATIVE

    def __post_init__(self):
        prefix = tuple(int(n) for n in self.prefix)
        object.__setattr__(self, "prefix", prefix)
        if any(n < 0 for n in prefix):
            raise ValidationError(f"Отрицательное число лягушек в префиксе {list(prefix)}")
        if self.tail.kind is TailKind.ZERO and not any(prefix):
            raise ValidationError("Конфигурация без лягушек")
        if self.support is Support.ALL_OF_Z:
            uniform = (self.tail.kind is TailKind.CONSTANT
                       and all(n == self.tail.a for n in prefix))
            if not uniform:
                raise ValidationError(
                    "Носитель allz допускает только однородную конфигурацию const:<n>")

    # Фабрики
    @classmethod
    def single(cls) -> "FrogConfig":
        return cls()

    @classmethod
    def constant(cls, n: int) -> "FrogConfig":
        return cls(tail=Tail(TailKind.CONSTANT, n))

    @classmethod
    def arithmetic(cls, a: int, b: int) -> "FrogConfig":
        return cls(tail=Tail(TailKind.ARITHMETIC, a, b))

    @classmethod
    def all_of_z(cls, n: int) -> "FrogConfig":
        return cls(tail=Tail(TailKind.CONSTANT, n), support=Support.ALL_OF_Z)

    @property
    def prefix_length(self) -> int:
        return len(self.prefix)

    @property
    def constant_n(self) -> int:
        """n для однородной конфигурации const:<n>."""
        if self.tail.kind is not TailKind.CONSTANT or any(v != self.tail.a for v in self.prefix):
            raise DomainError("Конфигурация не является однородной константой",
                              "eta", self.spec())
        return self.tail.a

    def spec(self) -> str:
        """Строка η-спецификации, разбираемая EtaSpecParser."""
        if not self.prefix:
            return self.tail.spec()
        return f"prefix:[{','.join(map(str, self.prefix))}];tail:{self.tail.spec()}"

    def eta(self, k: int) -> int:
        if k < 0:
            return self.tail.a if self.support is Support.ALL_OF_Z else 0
        if k < len(self.prefix):
            return self.prefix[k]
        return int(self.tail.at(np.array(k)))

    def eta_array(self, k: np.ndarray) -> np.ndarray:
        """η_k для массива k ≥ 0."""
        k = np.asarray(k, dtype=np.int64)
        values = self.tail.at(k)
        if self.prefix:
            inside = k < len(self.prefix)
            values[inside] = np.asarray(self.prefix, dtype=np.float64)[k[inside]]
        return values

    def envelope(self) -> Tuple[float, float]:
        """(c0, b) с η_k ≤ c0 + b·k для всех k ≥ 0."""
        c0 = float(max(self.prefix, default=0))
        if self.tail.kind is not TailKind.ZERO:
            c0 = max(c0, float(self.tail.a))
        return c0, float(self.tail.b)

    def weighted_sum(self, rho: float, start=0):
        """Σ_{k ≥ start} η_k ρ^k в замкнутой форме; start может быть массивом."""
        start_arr = np.asarray(start, dtype=np.int64)
        length = len(self.prefix)
        if length:
            powers = np.asarray(self.prefix, dtype=np.float64) * rho ** np.arange(length)
            suffix = np.append(np.cumsum(powers[::-1])[::-1], 0.0)
            head = suffix[np.minimum(np.maximum(start_arr, 0), length)]
        else:
            head = np.zeros(start_arr.shape)
        n = np.maximum(start_arr, length).astype(np.float64)
        rn = np.power(rho, n)
        if self.tail.kind is TailKind.ZERO:
            rest = np.zeros_like(rn)
        elif self.tail.kind is TailKind.CONSTANT:
            rest = self.tail.a * rn / (1.0 - rho)
        else:
            rest = (self.tail.a * rn / (1.0 - rho)
                    + self.tail.b * (n * rn / (1.0 - rho) + rn * rho / (1.0 - rho) ** 2))
        total = head + rest
        return float(total) if np.ndim(total) == 0 else total

    def site_cutoff(self, rho: float, budget: float) -> int:
        """Наименьший X ≥ 0 с ρ·Σ_{x > X} η_x ρ^x ≤ budget."""
        require(budget > 0.0, "budget должен быть > 0", "budget", budget)
        return _smallest_satisfying(lambda x: rho * self.weighted_sum(rho, x + 1) <= budget, 0)

    def is_single_frog(self) -> bool:
        return (self.tail.kind is TailKind.CONSTANT and self.tail.a == 1
                and all(v == 1 for v in self.prefix))

    def satisfies_growth_condition(self) -> bool:
        """(1 − ρ)^{1+δ} Σ η_k ρ^k → 0 для любого δ > 0: верно для ограниченных хвостов."""
        return not (self.tail.kind is TailKind.ARITHMETIC and self.tail.b > 0)


def _smallest_satisfying(pred: Callable[[int], bool], lo: int, cap: int = 1 << 40) -> int:
    """Наименьшее целое n ≥ lo, для которого монотонный pred истинен."""
    if pred(lo):
        return lo
    step = 1
    hi = lo + step
    while not pred(hi):
        lo = hi
        step *= 2
        hi = lo + step
        if hi > cap:
            raise DomainError("Поиск отсечки не сошёлся", "cutoff", hi)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


# ---------------------------------------------------------------------------
# Табличное распределение
# ---------------------------------------------------------------------------

@cached_table("log1m_rho_pow")
def _log1m_powers(rho: float, n_max: int) -> np.ndarray:
    """ℓ_j = ln(1 − ρ^j), j = 0..n_max, с ℓ_0 := 0."""
    j = np.arange(n_max + 1, dtype=np.float64)
    table = np.log1p(-np.power(rho, j[1:]))
    table = np.concatenate(([0.0], table))
    table.setflags(write=False)
    return table


class RangeDistribution:
    """
    Ленивое распределение X для конфигурации на неотрицательных узлах.

    ln P(X ≤ x) = Σ_k η_k ln(1 − ρ^{x+k+1}) считается для всей сетки x
    сразу через суффиксные суммы ℓ_j; таблицы кэшируются по степеням двойки.
    Параллельные чтения безопасны.
    """

    def __init__(self, drift: DriftParam, config: Optional[FrogConfig] = None,
                 tol: Optional[float] = None):
        self.drift = drift
        self.config = config or FrogConfig.single()
        if self.config.support is not Support.NONNEGATIVE:
            raise DomainError("Замкнутая форма CDF определена только для носителя nonneg",
                              "support", self.config.support.value)
        self.tol = settings.DEFAULT_TOL if tol is None else tol
        self.log_tail_bound = 0.0
        self._cache = CacheManager(max_size=8)

    def _truncation_index(self, x_max: int) -> int:
        base = x_max + self.config.prefix_length + 1
        if self.config.tail.kind is TailKind.ZERO:
            return base
        rho = self.drift.rho
        c0, b = self.config.envelope()

        def bound(n: int) -> float:
            rn1 = rho ** (n + 1)
            total = c0 * rn1 / (1.0 - rho) + b * (n * rn1 / (1.0 - rho) + rho * rn1 / (1.0 - rho) ** 2)
            return total / (1.0 - rn1)

        n = _smallest_satisfying(lambda m: bound(m) <= self.tol, base)
        self.log_tail_bound = max(self.log_tail_bound, bound(n))
        return n

    def _compute_log_cdf(self, x_max: int) -> np.ndarray:
        n = self._truncation_index(x_max)
        ell = _log1m_powers(self.drift.rho, n)
        s1 = np.append(np.cumsum(ell[::-1])[::-1], 0.0)
        x = np.arange(x_max + 1)
        log_cdf = np.zeros(x_max + 1)

        for k, count in enumerate(self.config.prefix):
            if count:
                log_cdf += count * ell[x + k + 1]

        i = x + self.config.prefix_length + 1
        tail = self.config.tail
        if tail.kind is TailKind.CONSTANT:
            log_cdf += tail.a * s1[i]
        elif tail.kind is TailKind.ARITHMETIC:
            # Σ_{j ≥ i} (j − i) ℓ_j = Σ_{j > i} S1[j]
            shifted = np.append(np.cumsum(s1[::-1])[::-1][1:], 0.0)
            log_cdf += (tail.a + tail.b * self.config.prefix_length) * s1[i] + tail.b * shifted[i]

        logger.debug("Таблица ln CDF: x_max=%d, N=%d", x_max, n,
                     extra={'rho': self.drift.rho, 'terms_used': n})
        log_cdf.setflags(write=False)
        return log_cdf

    def log_cdf_table(self, x_max: int) -> np.ndarray:
        """ln P(X ≤ x) для x = 0..x_max."""
        cap = 64
        while cap <= x_max:
            cap *= 2
        table = self._cache.get_or_compute(("log_cdf", cap), lambda: self._compute_log_cdf(cap - 1))
        return table[:x_max + 1]

    def log_cdf_values(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        out = np.full(xs.shape, -np.inf)
        ok = xs >= 0
        if np.any(ok):
            table = self.log_cdf_table(int(xs.max()))
            out[ok] = table[xs[ok]]
        return out

    def log_pmf_values(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        log_f = self.log_cdf_values(xs)
        if self.config.is_single_frog():
            return np.where(xs >= 0, xs * self.drift.log_rho + log_f, -np.inf)
        log_prev = self.log_cdf_values(xs - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            gap = -np.expm1(log_prev - log_f)
            return np.where(xs >= 0, log_f + np.log(gap), -np.inf)

    def cdf(self, x: int) -> float:
        return float(np.exp(self.log_cdf_values(np.array([x]))[0]))

    def pmf(self, x: int) -> float:
        return float(np.exp(self.log_pmf_values(np.array([x]))[0]))

    def cdf_table(self, x_max: int) -> np.ndarray:
        return np.exp(self.log_cdf_table(x_max))

    def pmf_table(self, x_max: int) -> np.ndarray:
        return np.exp(self.log_pmf_values(np.arange(x_max + 1)))

    def survival_values(self, xs: np.ndarray) -> np.ndarray:
        """P(X > x) = −expm1(ln CDF(x))."""
        return -np.expm1(self.log_cdf_values(xs))

    def cache_stats(self) -> Dict[str, float]:
        return self._cache.get_stats()


# ---------------------------------------------------------------------------
# Одна лягушка на каждом неотрицательном узле
# ---------------------------------------------------------------------------

@dataclass
class MomentReport:
    """Точный момент, момент через полиномы Белла и асимптотика Z_ρ^m."""
    m: int
    exact: float
    via_bell: Optional[float]
    asymptotic: float
    ratio_exact_over_asymptotic: float
    tail_bound: float = 0.0

    def to_dict(self) -> Dict[str, Optional[float]]:
        return {
            "m": self.m,
            "exact": self.exact,
            "via_bell": self.via_bell,
            "asymptotic": self.asymptotic,
            "ratio": self.ratio_exact_over_asymptotic,
            "tail_bound": self.tail_bound,
        }


def _tol(tol: Optional[float]) -> float:
    return settings.DEFAULT_TOL if tol is None else tol


def single_cdf(drift: DriftParam, x: int, tol: Optional[float] = None) -> float:
    """P(X_ρ ≤ x) = (ρ^{x+1}; ρ)_∞."""
    if x < 0:
        return 0.0
    return log_q_pochhammer_inf(drift.rho ** (x + 1), drift.q, _tol(tol)).value


def single_pmf(drift: DriftParam, x: int, tol: Optional[float] = None) -> float:
    """P(X_ρ = x) = ρ^x (ρ^{x+1}; ρ)_∞."""
    if x < 0:
        return 0.0
    series = log_q_pochhammer_inf(drift.rho ** (x + 1), drift.q, _tol(tol))
    return math.exp(x * drift.log_rho + series.log_value)


def mode_bounds_unfloored(drift: DriftParam) -> Tuple[float, float]:
    """Границы моды до округления вниз; их разность лежит в (0, 2)."""
    lo = (drift.log1m_rho - drift.log_rho) / drift.log_rho
    hi = (drift.log1m_rho - math.log(2.0 - drift.rho)) / drift.log_rho
    return lo, hi


def mode_bounds(drift: DriftParam) -> Tuple[int, int]:
    """(⌊(ln(1−ρ) − ln ρ)/ln ρ⌋, ⌊(ln(1−ρ) − ln(2−ρ))/ln ρ⌋)."""
    lo, hi = mode_bounds_unfloored(drift)
    return math.floor(lo), math.floor(hi)


def mode_exact(drift: DriftParam, tol: Optional[float] = None) -> int:
    """Наименьший argmax PMF, перебором x ∈ [0, hi + MODE_SCAN_SLACK]."""
    _, hi = mode_bounds(drift)
    dist = RangeDistribution(drift, tol=_tol(tol))
    log_pmf = dist.log_pmf_values(np.arange(max(hi, 0) + settings.MODE_SCAN_SLACK + 1))
    return int(np.argmax(log_pmf))


def _lambert_tail(n: np.ndarray, rho: float, x_shift: float = 0.0) -> np.ndarray:
    u = np.power(rho, n + x_shift)
    return u / ((1.0 - rho) * (1.0 - u))


def mode_critical_point(drift: DriftParam, tol: Optional[float] = None) -> float:
    """
    Точка максимума непрерывного продолжения ln PMF.

    Корень Σ_{j≥1} ρ^{m+j}/(1 − ρ^{m+j}) = 1; 0, если PMF убывает с x = 0.
    ln PMF вогнута, поэтому целая мода лежит в {⌊m⌋, ⌊m⌋ + 1}.
    """
    rho = drift.rho
    tol = _tol(tol)

    def excess(m: float) -> float:
        total = certified_sum(
            lambda j: np.power(rho, j + m) / (1.0 - np.power(rho, j + m)),
            lambda j: _lambert_tail(j, rho, m),
            tol, start=1)
        return total.value - 1.0

    if excess(0.0) <= 0.0:
        return 0.0
    _, hi = mode_bounds_unfloored(drift)
    upper = max(hi, 1.0) + 1.0
    while excess(upper) > 0.0:
        upper *= 2.0
    return float(brentq(excess, 0.0, upper, xtol=1e-12))


def cumulant_series(drift: DriftParam, m: int, tol: Optional[float] = None) -> SeriesSum:
    """κ^{(m)} = Σ_{k≥1} k^{m−1} ρ^k/(1 − ρ^k) с сертификатом."""
    require(isinstance(m, (int, np.integer)) and m >= 1, "m должно быть ≥ 1", "m", m)
    rho = drift.rho

    def term(k):
        rk = np.power(rho, k.astype(np.float64))
        return np.power(k.astype(np.float64), m - 1) * rk / (1.0 - rk)

    return certified_sum(term, power_geometric_tail(m - 1, rho, 1.0 / (1.0 - rho)), _tol(tol), start=1)


def cumulant(drift: DriftParam, m: int, tol: Optional[float] = None) -> float:
    """m-й кумулянт X_ρ."""
    return cumulant_series(drift, m, tol).value


def cgf(drift: DriftParam, t: float, tol: Optional[float] = None) -> float:
    """g_ρ(t) = Σ_{k≥1} ln((1 − ρ^k)/(1 − e^t ρ^k)) при e^t ρ < 1."""
    rho = drift.rho
    if t >= -drift.log_rho:
        raise DomainError(f"Нужно e^t·ρ < 1, получено t={t}", "t", t)
    if t == 0.0:
        return 0.0
    et = math.exp(t)
    big = max(1.0, et)
    scale = abs(math.expm1(t))

    def term(k):
        rk = np.power(rho, k.astype(np.float64))
        return np.log1p(-rk) - np.log1p(-et * rk)

    def tail(n):
        rn = np.power(rho, n.astype(np.float64))
        return scale * rn / ((1.0 - rho) * (1.0 - big * rn))

    return certified_sum(term, tail, _tol(tol), start=1).value


def cumulant_vector(drift: DriftParam, m: int, tol: Optional[float] = None) -> CumulantVector:
    return CumulantVector(tuple(cumulant(drift, i, tol) for i in range(1, m + 1)))


def moment(drift: DriftParam, m: int, tol: Optional[float] = None) -> MomentReport:
    """E(X_ρ^m): прямая сумма Σ x^m PMF(x) и B_m(κ^{(1)}, …, κ^{(m)})."""
    require(isinstance(m, (int, np.integer)) and m >= 1, "m должно быть ≥ 1", "m", m)
    tol = _tol(tol)
    dist = RangeDistribution(drift, tol=tol)

    # PMF(x) ≤ ρ^x
    exact = certified_sum(
        lambda x: np.power(x.astype(np.float64), m) * np.exp(dist.log_pmf_values(x)),
        power_geometric_tail(m, drift.rho),
        tol, start=1)
    via_bell = moments_from_cumulants(cumulant_vector(drift, m, tol), m)
    asymptotic = drift.z_rho ** m
    return MomentReport(m, exact.value, via_bell, asymptotic, exact.value / asymptotic,
                        exact.tail_bound)


def mean_variance_closed_form(drift: DriftParam, tol: Optional[float] = None) -> Tuple[float, float]:
    """E(X_ρ) = (ψ_ρ(1) + ln(1−ρ))/ln ρ, Var(X_ρ) = ψ'_ρ(1)/ln²ρ."""
    tol = _tol(tol)
    mean = (q_digamma(1.0, drift.q, tol) + drift.log1m_rho) / drift.log_rho
    variance = q_digamma_derivative(1.0, drift.q, tol) / drift.log_rho ** 2
    return mean, variance


def cumulant_asymptotic(drift: DriftParam, j: int) -> float:
    """κ^{(1)} ∼ ln(1−ρ)/ln ρ; κ^{(j+1)} ∼ j! ζ(j+1)/(−ln ρ)^{j+1}."""
    require(isinstance(j, (int, np.integer)) and j >= 0, "j должно быть ≥ 0", "j", j)
    if j == 0:
        return drift.z_rho
    return math.factorial(j) * zeta_int(j + 1) / (-drift.log_rho) ** (j + 1)


def expected_hitters(drift: DriftParam, target_depth: float) -> float:
    """Среднее число лягушек, достигших узла −Z: ρ^Z/(1 − ρ)."""
    require(target_depth >= 0.0, "target_depth должно быть ≥ 0", "target_depth", target_depth)
    return math.exp(target_depth * drift.log_rho - drift.log1m_rho)


def scaled_convergence_report(drift: DriftParam, tol: Optional[float] = None) -> Tuple[float, float]:
    """(E(Y_ρ), Var(Y_ρ)) для Y_ρ = X_ρ/Z_ρ."""
    scale = 1.0 / drift.z_rho
    return scale * cumulant(drift, 1, tol), scale ** 2 * cumulant(drift, 2, tol)


def chebyshev_bound(drift: DriftParam, eps: float, config: Optional[FrogConfig] = None,
                    tol: Optional[float] = None) -> float:
    """Оценка P(|Y − 1| > eps) ≤ 4 Var(Y)/eps² при |E(Y) − 1| < eps/2, иначе 1."""
    require(eps > 0.0, "eps должно быть > 0", "eps", eps)
    if config is None or config.is_single_frog():
        mean_y, var_y = scaled_convergence_report(drift, tol)
    else:
        mean_y, var_y = general_scaled_convergence_report(drift, config, tol)
    if abs(mean_y - 1.0) >= eps / 2.0:
        return 1.0
    return min(1.0, 4.0 * var_y / eps ** 2)


def mgf_limit(drift: DriftParam, z: float, tol: Optional[float] = None) -> float:
    """E(z^{Y_ρ}) = exp(g_ρ(ln z · ln ρ/ln(1−ρ))); стремится к z при ρ ↑ 1."""
    require(z > 0.0, "z должно быть > 0", "z", z)
    return math.exp(cgf(drift, math.log(z) / drift.z_rho, tol))


def characteristic_limit(drift: DriftParam, t: float, tol: Optional[float] = None) -> complex:
    """E(e^{itY_ρ}) = (ρ;ρ)_∞ / (e^{it/Z_ρ} ρ; ρ)_∞; стремится к e^{it}."""
    rho = drift.rho
    tol = _tol(tol)
    w = cmath.exp(1j * t / drift.z_rho)
    terms = geometric_cutoff(rho, rho, tol * (1.0 - rho)) + 1
    k = np.arange(1, terms + 1, dtype=np.float64)
    rk = np.power(rho, k)
    log_value = np.sum(np.log1p(-rk)) - np.sum(np.log(1.0 - w * rk))
    return complex(np.exp(log_value))


# ---------------------------------------------------------------------------
# Общая конфигурация η на неотрицательных узлах
# ---------------------------------------------------------------------------

def _require_nonneg(config: FrogConfig) -> None:
    if config.support is not Support.NONNEGATIVE:
        raise DomainError("Операция определена только для носителя nonneg",
                          "support", config.support.value)


def general_log_cdf(drift: DriftParam, config: FrogConfig, x: int,
                    tol: Optional[float] = None) -> SeriesSum:
    """Σ_k η_k ln(1 − ρ^{x+k+1}) прямым суммированием по k."""
    _require_nonneg(config)
    if x < 0:
        return SeriesSum(-math.inf, 0.0, 0)
    rho = drift.rho
    shift = float(x + 1)

    def term(k):
        return config.eta_array(k) * np.log1p(-np.power(rho, k + shift))

    def tail(n):
        # η_k ln(1 − u) ≥ −η_k u/(1 − u)
        lead = rho ** shift * config.weighted_sum(rho, n)
        return lead / (1.0 - np.power(rho, n + shift))

    return certified_sum(term, tail, _tol(tol))


def general_cdf(drift: DriftParam, config: FrogConfig, x: int,
                tol: Optional[float] = None) -> float:
    """P(X_{ρ,η} ≤ x) = ∏_k (1 − ρ^{x+k+1})^{η_k}."""
    return math.exp(general_log_cdf(drift, config, x, tol).value)


def general_pmf(drift: DriftParam, config: FrogConfig, x: int,
                tol: Optional[float] = None) -> float:
    """P(X_{ρ,η} = x) как разность CDF(x) − CDF(x − 1) в лог-шкале."""
    _require_nonneg(config)
    if x < 0:
        return 0.0
    log_f = general_log_cdf(drift, config, x, tol).value
    log_prev = general_log_cdf(drift, config, x - 1, tol).value
    return math.exp(log_f) * -math.expm1(log_prev - log_f)


def general_pmf_delta(drift: DriftParam, config: FrogConfig, x: int,
                      tol: Optional[float] = None) -> float:
    """
    P(X_{ρ,η} = x) = CDF(x)·(1 − ∏_{k≥0} (1 − ρ^{x+k})^{Δ_k}),
    Δ_0 = η_0, Δ_k = η_k − η_{k−1}.
    """
    _require_nonneg(config)
    if x < 0:
        return 0.0
    rho = drift.rho
    tol = _tol(tol)
    cdf = general_cdf(drift, config, x, tol)
    # CDF(−1) = 0
    if x == 0:
        return cdf
    length = config.prefix_length
    eta = config.eta_array(np.arange(length + 1))
    delta = np.diff(np.concatenate(([0.0], eta)))

    k = np.arange(length + 1, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        logs = np.log1p(-np.power(rho, x + k))
        log_prod = float(np.sum(np.where(delta != 0.0, delta * logs, 0.0)))
    if config.tail.kind is TailKind.ARITHMETIC and config.tail.b:
        log_prod += config.tail.b * log_q_pochhammer_inf(
            rho ** (x + length + 1), drift.q, tol).log_value
    return cdf * -math.expm1(log_prod)


def general_moment(drift: DriftParam, config: FrogConfig, m: int,
                   tol: Optional[float] = None) -> MomentReport:
    """E(X_{ρ,η}^m) = Σ_x ((x+1)^m − x^m)·P(X > x); асимптотика Z_ρ^m."""
    _require_nonneg(config)
    require(isinstance(m, (int, np.integer)) and m >= 1, "m должно быть ≥ 1", "m", m)
    tol = _tol(tol)
    rho = drift.rho
    dist = RangeDistribution(drift, config, tol)

    # P(X > x) ≤ ρ^{x+1} W/(1 − ρ), (x+1)^m − x^m ≤ m (x+1)^{m−1}
    scale = m * rho * config.weighted_sum(rho, 0) / (1.0 - rho)

    def term(x):
        xf = x.astype(np.float64)
        return (np.power(xf + 1.0, m) - np.power(xf, m)) * dist.survival_values(x)

    def tail(n):
        nf = n.astype(np.float64)
        lead = scale * np.power(nf + 1.0, m - 1) * np.power(rho, nf)
        ratio = np.power((nf + 2.0) / (nf + 1.0), m - 1) * rho
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(ratio < 1.0, lead / (1.0 - ratio), np.inf)

    exact = certified_sum(term, tail, tol)
    via_bell = moment(drift, m, tol).via_bell if config.is_single_frog() else None
    asymptotic = drift.z_rho ** m
    return MomentReport(m, exact.value, via_bell, asymptotic, exact.value / asymptotic,
                        exact.tail_bound)


def general_scaled_convergence_report(drift: DriftParam, config: FrogConfig,
                                      tol: Optional[float] = None) -> Tuple[float, float]:
    """(E(Y), Var(Y)) для Y = X_{ρ,η}/Z_ρ."""
    first = general_moment(drift, config, 1, tol).exact
    second = general_moment(drift, config, 2, tol).exact
    scale = 1.0 / drift.z_rho
    return scale * first, scale ** 2 * (second - first ** 2)


def conditional_positive_moment(drift: DriftParam, config: FrogConfig, m: int,
                                tol: Optional[float] = None) -> float:
    """E(X^m | X > 0) = E(X^m)/(1 − P(X = 0))."""
    dist = RangeDistribution(drift, config, _tol(tol))
    p_zero = dist.cdf(0)
    return general_moment(drift, config, m, tol).exact / (1.0 - p_zero)


def zrho_ratio_lemma_check(drift: DriftParam, delta: float, m: int,
                           tol: Optional[float] = None) -> float:
    """
    Σ_{x≥1} (Z_ρ(1+δ) + x)^m ρ^x, делённое на Z_ρ^m (1+δ)^m/(1 − ρ).

    При m = 0 отношение равно ρ; при ρ ↑ 1 оно стремится к 1 для любого m.
    """
    require(delta > 0.0, "delta должно быть > 0", "delta", delta)
    require(isinstance(m, (int, np.integer)) and m >= 0, "m должно быть ≥ 0", "m", m)
    rho = drift.rho
    shift = drift.z_rho * (1.0 + delta)

    # (1 + x/A)^m ρ^x, отношение соседних оценок ((A+n+1)/(A+n))^m ρ
    def term(x):
        xf = x.astype(np.float64)
        return np.power(1.0 + xf / shift, m) * np.power(rho, xf)

    def tail(n):
        nf = n.astype(np.float64)
        lead = np.power(1.0 + nf / shift, m) * np.power(rho, nf)
        ratio = np.power((shift + nf + 1.0) / (shift + nf), m) * rho
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(ratio < 1.0, lead / (1.0 - ratio), np.inf)

    total = certified_sum(term, tail, _tol(tol) * 1e-3, start=1)
    return (1.0 - rho) * total.value
