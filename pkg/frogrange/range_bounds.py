#!/usr/bin/env python3
"""
Границы моментов минимума для конфигурации с n лягушками на каждом узле ℤ.

Каждая граница доступна в двух видах: собранная до асимптотики форма
(её можно сверять с симуляцией при фиксированном ρ) и предельное
выражение при ρ ↑ 1. Все величины возвращаются в логарифмах.
"""

import logging
import math
from dataclasses import dataclass, asdict
from typing import Dict, Tuple

import numpy as np
from scipy.special import gammaln, logsumexp

from frogrange.bellpoly import stirling2
from frogrange.config import settings
from frogrange.distribution import DriftParam, FrogConfig, general_moment
from frogrange.exceptions import DomainError, require
from frogrange.qseries import (
    certified_sum, log_q_pochhammer_finite, log_q_pochhammer_inf, power_geometric_tail
)

logger = logging.getLogger(__name__)

# Ниже этого ε прямой ряд для E(T^m) слишком длинный
DIRECT_SUM_MIN_EPS = 1e-4


@dataclass(frozen=True)
class DeltaFn:
    """
    δ(ρ) = |ln(1 − ρ)|^{−α} при ρ > 1 − e^{−1}.

    Ниже этой точки значение задаётся произвольно; с extend=True
    возвращается extension_value, иначе DomainError.
    """
    alpha: float
    extend: bool = False
    extension_value: float = 0.5

    def __post_init__(self):
        require(0.0 < self.alpha < 1.0, f"alpha должно лежать в (0, 1), получено {self.alpha}",
                "alpha", self.alpha)
        require(0.0 < self.extension_value < 1.0, "extension_value должно лежать в (0, 1)",
                "extension_value", self.extension_value)

    @staticmethod
    def domain_start() -> float:
        return 1.0 - math.exp(-1.0)

    def in_domain(self, drift: DriftParam) -> bool:
        return drift.rho > self.domain_start()

    def __call__(self, drift: DriftParam) -> float:
        if self.in_domain(drift):
            return (-drift.log1m_rho) ** (-self.alpha)
        if self.extend:
            return self.extension_value
        raise DomainError(
            f"δ(ρ) определена при ρ > 1 − 1/e ≈ {self.domain_start():.6f}, получено {drift.rho}",
            "rho", drift.rho)


def block_length(drift: DriftParam, delta: float) -> int:
    """K = Z_ρ(1 − δ), округлённое к ближайшему целому (половины вверх)."""
    require(0.0 < delta < 1.0, f"delta должно лежать в (0, 1), получено {delta}", "delta", delta)
    k = math.floor(drift.z_rho * (1.0 - delta) + 0.5)
    if k < 1:
        raise DomainError(f"Длина блока Z_ρ(1 − δ) округляется до {k} < 1",
                          "block_length", k)
    return k


def epsilon_rho_n(drift: DriftParam, n: int, tol: float = None) -> float:
    """ln ε_{ρ,n} = n·ln (ρ;ρ)_∞ = ln P(X_{ρ,n} = 0)."""
    require(n >= 1, "n должно быть ≥ 1", "n", n)
    return n * log_q_pochhammer_inf(drift.rho, drift.q, tol).log_value


def theta(drift: DriftParam, delta: float, n: int) -> float:
    """ln θ_{ρ,δ} = n·Σ_{j<K} ln(1 − ρ^K ρ^j): ни одна лягушка блока не уходит на K глубже."""
    require(n >= 1, "n должно быть ≥ 1", "n", n)
    k = block_length(drift, delta)
    return n * log_q_pochhammer_finite(drift.rho ** k, drift.q, k)


def log_geometric_moment(epsilon: float, m: int) -> float:
    """
    ln E(T^m) для T с P(T = k) = (1 − ε)^k ε.

    Через факториальные моменты E[(T)_j] = j!((1 − ε)/ε)^j и числа Стирлинга;
    пригодно при ε вплоть до 1e−300.
    """
    require(0.0 < epsilon < 1.0, f"epsilon должно лежать в (0, 1), получено {epsilon}",
            "epsilon", epsilon)
    require(m >= 0, "m должно быть ≥ 0", "m", m)
    if m == 0:
        return 0.0
    log_ratio = math.log1p(-epsilon) - math.log(epsilon)
    j = np.arange(1, m + 1)
    weights = np.array([math.log(stirling2(m, int(i))) for i in j])
    return float(logsumexp(weights + gammaln(j + 1.0) + j * log_ratio))


def geometric_moment(epsilon: float, m: int, tol: float = None) -> Tuple[float, float]:
    """
    (E(T_ε^m), m!/ε^m).

    При ε ≥ 1e−4 точное значение суммируется напрямую с сертификатом
    остатка, иначе берётся замкнутая форма.
    """
    require(0.0 < epsilon < 1.0, f"epsilon должно лежать в (0, 1), получено {epsilon}",
            "epsilon", epsilon)
    require(m >= 1, "m должно быть ≥ 1", "m", m)
    asymptotic = math.exp(gammaln(m + 1.0) - m * math.log(epsilon))
    if epsilon < DIRECT_SUM_MIN_EPS:
        return math.exp(log_geometric_moment(epsilon, m)), asymptotic

    tol = settings.DEFAULT_TOL if tol is None else tol
    survive = 1.0 - epsilon

    def term(k):
        kf = k.astype(np.float64)
        return np.power(kf, m) * np.power(survive, kf) * epsilon

    exact = certified_sum(term, power_geometric_tail(m, survive, epsilon),
                          tol * max(1.0, asymptotic), start=1)
    return exact.value, asymptotic


def phi_upper(drift: DriftParam, n: int, m: int) -> float:
    """ln φ ≈ m ln Z_ρ + (n/2) ln((1 − ρ)/(2π)) + (π²/6)·mn/(1 − ρ)."""
    require(n >= 1, "n должно быть ≥ 1", "n", n)
    require(m >= 0, "m должно быть ≥ 0", "m", m)
    one_minus = 1.0 - drift.rho
    return (m * math.log(drift.z_rho)
            + 0.5 * n * math.log(one_minus / (2.0 * math.pi))
            + (math.pi ** 2 / 6.0) * m * n / one_minus)


def phi_upper_pre(drift: DriftParam, n: int, m: int, tol: float = None) -> float:
    """ln(ε_{ρ,n}^{−m} Z_ρ^m)."""
    require(m >= 0, "m должно быть ≥ 0", "m", m)
    return -m * epsilon_rho_n(drift, n, tol) + m * math.log(drift.z_rho)


def log_phi_wald(drift: DriftParam, n: int, m: int, tol: float = None) -> float:
    """
    ln[E(T̃^m)·E(Y^m)]: точная верхняя граница для E(W^m), где
    W = Y_1 + … + Y_T̃, T̃ ~ geometric(ε_{ρ,n}), Y ~ X_{ρ,n} | X > 0.
    """
    require(m >= 1, "m должно быть ≥ 1", "m", m)
    log_eps = epsilon_rho_n(drift, n, tol)
    eps = math.exp(log_eps)
    if eps <= 0.0:
        raise DomainError("ε_{ρ,n} ниже диапазона float64; используйте phi_upper_pre",
                          "rho", drift.rho)
    moment_x = general_moment(drift, FrogConfig.constant(n), m, tol).exact
    log_y = math.log(moment_x) - math.log1p(-eps)
    return log_geometric_moment(eps, m) + log_y


def psi_lower(drift: DriftParam, n: int, m: int, delta: DeltaFn) -> float:
    """ln ψ_δ ≈ ln m! + m ln Z_ρ + mn/(1 − ρ)^{δ(ρ)}."""
    require(n >= 1, "n должно быть ≥ 1", "n", n)
    require(m >= 1, "m должно быть ≥ 1", "m", m)
    d = delta(drift)
    return (float(gammaln(m + 1.0)) + m * math.log(drift.z_rho)
            + m * n * math.exp(-d * drift.log1m_rho))


def psi_lower_remark(drift: DriftParam, n: int, m: int, delta: DeltaFn) -> float:
    """ln ψ_δ в виде ln m! + m ln Z_ρ + mn·exp(|ln(1 − ρ)|^{1−α})."""
    require(delta.in_domain(drift),
            "Форма через α определена только при ρ > 1 − 1/e", "rho", drift.rho)
    return (float(gammaln(m + 1.0)) + m * math.log(drift.z_rho)
            + m * n * math.exp((-drift.log1m_rho) ** (1.0 - delta.alpha)))


def psi_lower_pre(drift: DriftParam, n: int, m: int, delta: DeltaFn) -> float:
    """ln(m!·θ^{−m}·Z_ρ^m(1 − δ)^m)."""
    d = delta(drift)
    return (float(gammaln(m + 1.0)) - m * theta(drift, d, n)
            + m * math.log(drift.z_rho) + m * math.log1p(-d))


def log_psi_exact(drift: DriftParam, n: int, m: int, delta: DeltaFn) -> float:
    """ln E(V^m) = m ln K + ln E(τ^m), τ ~ geometric(θ_{ρ,δ})."""
    d = delta(drift)
    k = block_length(drift, d)
    theta_value = math.exp(theta(drift, d, n))
    if theta_value <= 0.0:
        raise DomainError("θ_{ρ,δ} ниже диапазона float64", "rho", drift.rho)
    if theta_value >= 1.0:
        return -math.inf
    return m * math.log(k) + log_geometric_moment(theta_value, m)


def log_p_far(drift: DriftParam, delta: float, tol: float = None) -> float:
    """ln P_{ρ,δ} = ln ∏_{j≥1} (1 − (1 − ρ)^{1+δ} ρ^j)."""
    require(delta > 0.0, f"delta должно быть > 0, получено {delta}", "delta", delta)
    a = math.exp((1.0 + delta) * drift.log1m_rho) * drift.rho
    return log_q_pochhammer_inf(a, drift.q, tol).log_value


def log_q_near(drift: DriftParam, delta: float) -> float:
    """ln Q_{ρ,δ} = ln ∏_{j<K} (1 − (1 − ρ)^{1−δ} ρ^j)."""
    k = block_length(drift, delta)
    a = math.exp((1.0 - delta) * drift.log1m_rho)
    return log_q_pochhammer_finite(a, drift.q, k)


def remark_probabilities(drift: DriftParam, delta: float,
                         tol: float = None) -> Tuple[float, float]:
    """(P_{ρ,δ}, Q_{ρ,δ})."""
    return math.exp(log_p_far(drift, delta, tol)), math.exp(log_q_near(drift, delta))


@dataclass
class BoundsReport:
    """Все формы верхней и нижней границ в одной точке (ρ, n, m, α)."""
    rho: float
    n: int
    m: int
    alpha: float
    delta: float
    block_length: int
    log_epsilon: float
    log_theta: float
    log_phi_asym: float
    log_phi_pre: float
    log_psi_asym: float
    log_psi_pre: float
    log_psi_remark: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


def bounds_report(drift: DriftParam, n: int, m: int, delta: DeltaFn,
                  tol: float = None) -> BoundsReport:
    """Собирает BoundsReport; δ вне области определения даёт DomainError."""
    d = delta(drift)
    remark = (psi_lower_remark(drift, n, m, delta) if delta.in_domain(drift)
              else psi_lower(drift, n, m, delta))
    report = BoundsReport(
        rho=drift.rho, n=n, m=m, alpha=delta.alpha, delta=d,
        block_length=block_length(drift, d),
        log_epsilon=epsilon_rho_n(drift, n, tol),
        log_theta=theta(drift, d, n),
        log_phi_asym=phi_upper(drift, n, m),
        log_phi_pre=phi_upper_pre(drift, n, m, tol),
        log_psi_asym=psi_lower(drift, n, m, delta),
        log_psi_pre=psi_lower_pre(drift, n, m, delta),
        log_psi_remark=remark,
    )
    logger.debug("Границы собраны", extra={'rho': drift.rho})
    return report
