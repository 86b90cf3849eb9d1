#!/usr/bin/env python3
"""
Монте-Карло для минимума посещённых узлов.

Основной сэмплер не моделирует время: на носителе ℤ₊ все лягушки
рано или поздно просыпаются, а лягушка со старта s уходит левее s
на D узлов с P(D ≥ k) = ρ^k. Поэтому минимум определяется только
максимальными смещениями лягушек, и его можно разыграть напрямую.
Для носителя ℤ добавляются волны: каждое углубление минимума будит
лягушек на открывшихся отрицательных узлах.

Реплики разбиты на блоки по REPLICA_BLOCK; блок b получает поток
Philox(key=seed), сдвинутый на b·2^128 шагов, поэтому результат не
зависит от числа потоков.
"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy import stats

from frogrange.config import settings
from frogrange.distribution import DriftParam, FrogConfig, RangeDistribution
from frogrange.exceptions import DomainError, ErrorContext, SimulationError, ValidationError
from frogrange.logging_config import LoggingContext, log_performance_metric
from frogrange.range_bounds import block_length, epsilon_rho_n
from frogrange.types import PMFMap, Rng, Sampler, Support

logger = logging.getLogger(__name__)

_SITE_CHUNK = 4096
_MAX_SEED = 2 ** 64 - 1
_DEFAULT_WINDOW = (-40, 150)


@dataclass(frozen=True)
class SimConfig:
    """Параметры одного прогона Монте-Карло."""
    drift: DriftParam
    config: FrogConfig
    replicas: int
    seed: int
    site_truncation_tol: float = field(default_factory=lambda: settings.SITE_TRUNCATION_TOL)
    horizon: Optional[int] = None
    sampler: Sampler = Sampler.NONNEG
    delta: Optional[float] = None
    window: Tuple[int, int] = _DEFAULT_WINDOW
    threads: Optional[int] = None
    moment_orders: int = field(default_factory=lambda: settings.MOMENT_ORDERS)

    def __post_init__(self):
        errors = []
        if not isinstance(self.replicas, int) or self.replicas < 1:
            errors.append(f"replicas: ожидалось целое ≥ 1, получено {self.replicas}")
        if not isinstance(self.seed, int) or not 0 <= self.seed <= _MAX_SEED:
            errors.append(f"seed: ожидалось целое в [0, 2^64), получено {self.seed}")
        if not 0.0 < self.site_truncation_tol <= 0.01:
            errors.append(f"site_truncation_tol: значение {self.site_truncation_tol} вне (0, 0.01]")
        if self.moment_orders < 1:
            errors.append("moment_orders: нужно ≥ 1")
        if self.horizon is not None and self.horizon < 0:
            errors.append(f"horizon: ожидалось целое ≥ 0, получено {self.horizon}")
        if self.sampler is Sampler.STEPPER:
            if self.horizon is None:
                errors.append("horizon: обязателен для сэмплера stepper")
            left, right = self.window
            if not left < 0 <= right:
                errors.append(f"window: нужно left < 0 ≤ right, получено {self.window}")
        if self.sampler is Sampler.BLOCK and self.delta is None:
            errors.append("delta: обязателен для сэмплера block")
        if errors:
            raise ValidationError("Некорректная конфигурация симуляции", errors)

        allz = self.config.support is Support.ALL_OF_Z
        if self.sampler in (Sampler.NONNEG, Sampler.STEPPER) and allz:
            raise DomainError(f"Сэмплер {self.sampler.value} требует носитель nonneg",
                              "support", self.config.support.value)
        if self.sampler is Sampler.ALLZ and not allz:
            raise DomainError("Сэмплер allz требует носитель allz",
                              "support", self.config.support.value)


@dataclass(frozen=True)
class MomentEstimate:
    """Оценка E(X^m) и её стандартная ошибка."""
    m: int
    estimate: float
    standard_error: float


@dataclass
class SimReport:
    """Итог прогона: эмпирическая PMF, моменты и счётчики волн."""
    sampler: str
    seed: int
    replicas: int
    empirical_pmf: PMFMap
    moments: List[MomentEstimate]
    wave_counts: Optional[PMFMap] = None
    samples: np.ndarray = field(default=None, repr=False, compare=False)

    def frequency(self, x: int) -> float:
        return self.empirical_pmf.get(x, 0) / self.replicas

    def moment(self, m: int) -> MomentEstimate:
        for row in self.moments:
            if row.m == m:
                return row
        raise ValidationError(f"Момент порядка {m} не оценивался")

    def to_dict(self) -> Dict:
        result = {
            "sampler": self.sampler,
            "seed": self.seed,
            "replicas": self.replicas,
            "empirical_pmf": [
                {"x": x, "count": count, "frequency": count / self.replicas}
                for x, count in sorted(self.empirical_pmf.items())
            ],
            "moments": [
                {"m": row.m, "estimate": row.estimate, "standard_error": row.standard_error}
                for row in self.moments
            ],
            "wave_counts": None,
        }
        if self.wave_counts is not None:
            result["wave_counts"] = [
                {"waves": w, "count": c} for w, c in sorted(self.wave_counts.items())
            ]
        return result


# ---------------------------------------------------------------------------
# Смещения
# ---------------------------------------------------------------------------

def sample_min_displacement(drift: DriftParam, rng: Rng) -> int:
    """D = ⌊ln U/ln ρ⌋, U ∈ (0, 1]: P(D ≥ k) = ρ^k."""
    u = 1.0 - rng.random()
    return int(math.floor(math.log(u) / drift.log_rho))


def sample_min_displacement_batch(drift: DriftParam, rng: Rng, size: int) -> np.ndarray:
    u = 1.0 - rng.random(size)
    return np.floor(np.log(u) / drift.log_rho).astype(np.int64)


def _site_max_displacement(log_rho: float, counts: np.ndarray, u: np.ndarray) -> np.ndarray:
    """
    Максимум c независимых смещений одним числом: P(M < k) = (1 − ρ^k)^c.

    Нулевые counts дают −1, то есть узел без лягушек никого не пускает влево.
    """
    with np.errstate(divide="ignore", invalid="ignore"):
        gap = -np.expm1(np.log(u) / counts)
        depth = np.ceil(np.log(gap) / log_rho) - 1.0
    depth = np.where(counts > 0, depth, -1.0)
    return np.maximum(depth, -1.0).astype(np.int64)


def _deepest_from_sites(drift: DriftParam, sites: np.ndarray, counts: np.ndarray,
                        rng: Rng, size: int) -> np.ndarray:
    """max_s (M_s − s) по узлам ℤ₊ для size реплик; столбцы идут блоками."""
    best = np.full(size, -1, dtype=np.int64)
    for lo in range(0, sites.size, _SITE_CHUNK):
        block_sites = sites[lo:lo + _SITE_CHUNK]
        block_counts = counts[lo:lo + _SITE_CHUNK]
        u = rng.random((size, block_sites.size))
        reach = _site_max_displacement(drift.log_rho, block_counts, u) - block_sites
        np.maximum(best, reach.max(axis=1), out=best)
    return best


def _first_wave_sites(sim: SimConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Узлы 0..X_max и числа лягушек на них; X_max из бюджета полной вариации."""
    rho = sim.drift.rho
    cutoff = sim.config.site_cutoff(rho, sim.site_truncation_tol)
    sites = np.arange(cutoff + 1, dtype=np.int64)
    counts = sim.config.eta_array(sites)
    keep = counts > 0
    logger.debug("Первая волна: X_max=%d", cutoff, extra={'rho': rho})
    return sites[keep], counts[keep]


# ---------------------------------------------------------------------------
# Носитель ℤ₊
# ---------------------------------------------------------------------------

def sample_range_nonneg_batch(sim: SimConfig, rng: Rng, size: int) -> np.ndarray:
    """size независимых значений X для конфигурации на ℤ₊."""
    sites, counts = _first_wave_sites(sim)
    deepest = _deepest_from_sites(sim.drift, sites, counts, rng, size)
    return np.maximum(deepest, 0)


def sample_range_nonneg(sim: SimConfig, rng: Rng) -> int:
    return int(sample_range_nonneg_batch(sim, rng, 1)[0])


# ---------------------------------------------------------------------------
# Носитель ℤ: лавина волн
# ---------------------------------------------------------------------------

def sample_range_allz_batch(sim: SimConfig, rng: Rng,
                            size: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Глубины и числа волн для однородной конфигурации const:n на ℤ.

    Волна 1: лягушки на ℤ₊. Пока минимум −M глубже открытой области
    −E, просыпаются лягушки на узлах −(E+1)..−M.
    """
    n = float(sim.config.constant_n)
    depth = np.maximum(sample_range_nonneg_batch(sim, rng, size), 0)
    exposed = np.zeros(size, dtype=np.int64)
    waves = np.ones(size, dtype=np.int64)

    active = np.flatnonzero(depth > exposed)
    while active.size:
        lengths = depth[active] - exposed[active]
        owner = np.repeat(np.arange(active.size), lengths)
        starts = np.repeat(exposed[active] + 1, lengths)
        offsets = np.arange(owner.size) - np.repeat(np.cumsum(lengths) - lengths, lengths)
        sites = starts + offsets

        u = rng.random(sites.size)
        reach = _site_max_displacement(sim.drift.log_rho, np.full(sites.size, n), u) + sites
        deepest = np.full(active.size, -1, dtype=np.int64)
        np.maximum.at(deepest, owner, reach)

        exposed[active] = depth[active]
        depth[active] = np.maximum(depth[active], deepest)
        waves[active] += 1
        if waves.max() > settings.MAX_WAVES:
            raise SimulationError(
                f"Лавина не закончилась за {settings.MAX_WAVES} волн",
                stage="allz",
                diagnostics={'rho': sim.drift.rho, 'max_depth': int(depth.max())})
        active = active[depth[active] > exposed[active]]
    return depth, waves


def sample_range_allz(sim: SimConfig, rng: Rng) -> Tuple[int, int]:
    depth, waves = sample_range_allz_batch(sim, rng, 1)
    return int(depth[0]), int(waves[0])


# ---------------------------------------------------------------------------
# Варианты из доказательства границ
# ---------------------------------------------------------------------------

def _positive_part_table(drift: DriftParam, n: int, tol: float) -> np.ndarray:
    """CDF закона X_{ρ,n} | X > 0 на 0..x_max, с хвостом ниже tol."""
    dist = RangeDistribution(drift, FrogConfig.constant(n))
    x_max = 64
    while dist.survival_values(np.array([x_max]))[0] > tol:
        x_max *= 2
    log_cdf = dist.log_cdf_table(x_max)
    p_zero = math.exp(log_cdf[0])
    return (np.exp(log_cdf) - p_zero) / (1.0 - p_zero)


def sample_dominating_variant_batch(sim: SimConfig, rng: Rng, size: int) -> np.ndarray:
    """
    W = Y_1 + … + Y_T, T ~ geometric(ε_{ρ,n}) на {0, 1, …},
    Y_k независимы и распределены как X_{ρ,n} при условии X > 0.
    """
    n = sim.config.constant_n
    eps = math.exp(epsilon_rho_n(sim.drift, n))
    if eps < 1e-4:
        raise SimulationError("ε_{ρ,n} слишком мало для прямого розыгрыша W",
                              stage="dominating", diagnostics={'epsilon': eps})
    cdf = _positive_part_table(sim.drift, n, sim.site_truncation_tol * 1e-3)
    counts = rng.geometric(eps, size) - 1
    owner = np.repeat(np.arange(size), counts)
    y = np.searchsorted(cdf, rng.random(owner.size), side="right")
    return np.bincount(owner, weights=y, minlength=size).astype(np.int64)


def sample_dominating_variant(sim: SimConfig, rng: Rng) -> int:
    return int(sample_dominating_variant_batch(sim, rng, 1)[0])


def sample_block_variant_batch(sim: SimConfig, rng: Rng, size: int,
                               delta: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    V = τ·K: блоки по K узлов с n лягушками.

    Блок продолжает лавину, если лягушка с позиции x внутри блока
    уходит хотя бы на K + x узлов; τ ~ geometric(θ_{ρ,δ}) на {0, 1, …}.
    """
    delta = sim.delta if delta is None else delta
    n = float(sim.config.constant_n)
    k = block_length(sim.drift, delta)
    offsets = np.arange(k, dtype=np.int64)
    counts = np.full(k, n)
    blocks = np.zeros(size, dtype=np.int64)
    active = np.arange(size)
    while active.size:
        if blocks.max() > settings.MAX_WAVES:
            raise SimulationError(f"Блочная лавина не закончилась за {settings.MAX_WAVES} блоков",
                                  stage="block", diagnostics={'block_length': k})
        u = rng.random((active.size, k))
        reach = _site_max_displacement(sim.drift.log_rho, counts, u) - offsets
        carried = (reach >= k).any(axis=1)
        blocks[active[carried]] += 1
        active = active[carried]
    return blocks * k, blocks


def sample_block_variant(sim: SimConfig, delta: float, rng: Rng) -> Tuple[int, int]:
    depth, blocks = sample_block_variant_batch(sim, rng, 1, delta)
    return int(depth[0]), int(blocks[0])


# ---------------------------------------------------------------------------
# Пошаговая проверка
# ---------------------------------------------------------------------------

def bounded_horizon_stepper_batch(sim: SimConfig, rng: Rng, size: int) -> np.ndarray:
    """
    Буквальная динамика на окне [left, right] за horizon шагов.

    Посещённое множество всегда отрезок [lo, hi], так что лягушка с узла x
    просыпается, как только hi ≥ x. Ушедшие правее окна отбрасываются:
    чтобы вернуться к минимуму, им нужно right + 1 чистых шагов влево.
    """
    left, right = sim.window
    home = np.repeat(np.arange(right + 1, dtype=np.int64),
                     sim.config.eta_array(np.arange(right + 1)).astype(np.int64))
    p = sim.drift.p

    pos = np.broadcast_to(home, (size, home.size)).copy()
    alive = np.ones_like(pos, dtype=bool)
    lo = np.zeros(size, dtype=np.int64)
    hi = np.zeros(size, dtype=np.int64)
    awake = pos <= 0
    for _ in range(sim.horizon):
        step = np.where(rng.random(pos.shape) < p, 1, -1)
        moving = awake & alive
        pos += step * moving
        lo = np.minimum(lo, np.where(moving, pos, 0).min(axis=1))
        hi = np.maximum(hi, np.where(moving, pos, left).max(axis=1))
        if (lo < left).any():
            raise SimulationError(
                f"Минимум вышел за левую границу окна {left}",
                stage="stepper", diagnostics={'window': list(sim.window), 'min': int(lo.min())})
        alive &= pos <= right
        awake |= home[None, :] <= hi[:, None]
    return -lo


def bounded_horizon_stepper(sim: SimConfig, rng: Rng) -> int:
    return int(bounded_horizon_stepper_batch(sim, rng, 1)[0])


# ---------------------------------------------------------------------------
# Прогон
# ---------------------------------------------------------------------------

BatchFn = Callable[[SimConfig, Rng, int], Tuple[np.ndarray, Optional[np.ndarray]]]

_BATCH_SAMPLERS: Dict[Sampler, BatchFn] = {
    Sampler.NONNEG: lambda sim, rng, size: (sample_range_nonneg_batch(sim, rng, size), None),
    Sampler.ALLZ: sample_range_allz_batch,
    Sampler.DOMINATING: lambda sim, rng, size: (sample_dominating_variant_batch(sim, rng, size), None),
    Sampler.BLOCK: sample_block_variant_batch,
    Sampler.STEPPER: lambda sim, rng, size: (bounded_horizon_stepper_batch(sim, rng, size), None),
}


def block_rng(seed: int, block: int) -> Rng:
    """Независимый поток для блока реплик: Philox(key=seed) со сдвигом block·2^128."""
    bit_generator = np.random.Philox(key=seed)
    if block:
        bit_generator = bit_generator.jumped(block)
    return np.random.Generator(bit_generator)


def _worker_count(sim: SimConfig, blocks: int) -> int:
    threads = settings.THREADS if sim.threads is None else sim.threads
    if threads <= 0:
        threads = os.cpu_count() or 1
    return max(1, min(threads, blocks))


def _counts(values: np.ndarray) -> PMFMap:
    keys, counts = np.unique(values, return_counts=True)
    return {int(k): int(c) for k, c in zip(keys, counts)}


def moment_estimates(samples: np.ndarray, orders: int) -> List[MomentEstimate]:
    """Выборочные E(X^m), m = 1..orders, со стандартными ошибками."""
    values = samples.astype(np.float64)
    rows = []
    for m in range(1, orders + 1):
        powers = values ** m
        se = float(powers.std(ddof=1) / math.sqrt(powers.size)) if powers.size > 1 else 0.0
        rows.append(MomentEstimate(m, float(powers.mean()), se))
    return rows


def run_monte_carlo(sim: SimConfig) -> SimReport:
    """Реплики блоками, параллельно по потокам; сборка в фиксированном порядке."""
    block_size = settings.REPLICA_BLOCK
    n_blocks = -(-sim.replicas // block_size)
    sample = _BATCH_SAMPLERS[sim.sampler]

    def run_block(b: int):
        size = min(block_size, sim.replicas - b * block_size)
        with ErrorContext("run_block", block=b, sampler=sim.sampler.value):
            return sample(sim, block_rng(sim.seed, b), size)

    workers = _worker_count(sim, n_blocks)
    with LoggingContext(logger, "run_monte_carlo", rho=sim.drift.rho,
                        replicas=sim.replicas, seed=sim.seed) as ctx:
        if workers == 1:
            parts = [run_block(b) for b in range(n_blocks)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(run_block, range(n_blocks)))
    log_performance_metric("monte_carlo_seconds", ctx.duration,
                           replicas=sim.replicas, rho=sim.drift.rho)

    samples = np.concatenate([values for values, _ in parts])
    waves = None
    if parts[0][1] is not None:
        waves = _counts(np.concatenate([w for _, w in parts]))
    return SimReport(
        sampler=sim.sampler.value,
        seed=sim.seed,
        replicas=sim.replicas,
        empirical_pmf=_counts(samples),
        moments=moment_estimates(samples, sim.moment_orders),
        wave_counts=waves,
        samples=samples,
    )


# ---------------------------------------------------------------------------
# Согласие с законом
# ---------------------------------------------------------------------------

def ks_statistic(samples: np.ndarray, cdf_values: np.ndarray) -> float:
    """sup_x |F_n(x) − F(x)| по x = 0..len(cdf_values) − 1."""
    samples = np.asarray(samples)
    grid = np.arange(len(cdf_values))
    empirical = np.searchsorted(np.sort(samples), grid, side="right") / samples.size
    return float(np.max(np.abs(empirical - np.asarray(cdf_values))))


def ks_critical_value(size: int, alpha: float = 1e-3) -> float:
    """Квантиль 1 − alpha распределения Колмогорова; для дискретных законов консервативен."""
    return float(stats.kstwo.ppf(1.0 - alpha, size))


def chi_square_pvalue(samples: np.ndarray, probabilities: np.ndarray,
                      min_expected: float = 5.0) -> float:
    """
    p-value критерия χ² на ячейках 0..K и «> K».

    Правые ячейки с ожидаемой частотой ниже min_expected сливаются.
    """
    samples = np.asarray(samples)
    probs = np.asarray(probabilities, dtype=np.float64)
    k = probs.size
    observed = np.bincount(np.minimum(samples, k), minlength=k + 1).astype(np.float64)
    expected = np.append(probs, max(0.0, 1.0 - probs.sum())) * samples.size

    while expected.size > 2 and expected[-1] < min_expected:
        expected[-2] += expected[-1]
        observed[-2] += observed[-1]
        expected = expected[:-1]
        observed = observed[:-1]
    expected *= observed.sum() / expected.sum()
    return float(stats.chisquare(observed, expected).pvalue)
