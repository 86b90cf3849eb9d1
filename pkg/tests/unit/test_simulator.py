"""Тесты для Монте-Карло сэмплеров."""

import math

import numpy as np
import pytest

from frogrange.config import settings
from frogrange.distribution import (
    DriftParam, FrogConfig, RangeDistribution, general_cdf, single_cdf
)
from frogrange.exceptions import DomainError, SimulationError, ValidationError
from frogrange.range_bounds import log_phi_wald, theta
from frogrange.simulator import (
    SimConfig, SimReport, _site_max_displacement, block_rng, bounded_horizon_stepper,
    bounded_horizon_stepper_batch, chi_square_pvalue, ks_critical_value, ks_statistic,
    moment_estimates, run_monte_carlo, sample_block_variant, sample_block_variant_batch,
    sample_dominating_variant_batch, sample_min_displacement, sample_min_displacement_batch,
    sample_range_allz, sample_range_allz_batch, sample_range_nonneg,
    sample_range_nonneg_batch
)
from frogrange.types import Sampler
from frogrange.validators import EtaSpecParser


def nonneg_sim(rho=0.5, n=1, **kwargs):
    """SimConfig для n лягушек на каждом узле ℤ₊."""
    kwargs.setdefault("replicas", 1000)
    kwargs.setdefault("seed", 7)
    return SimConfig(drift=DriftParam(rho), config=FrogConfig.constant(n), **kwargs)


def allz_sim(rho=0.5, n=1, **kwargs):
    """SimConfig для n лягушек на каждом узле ℤ."""
    kwargs.setdefault("replicas", 1000)
    kwargs.setdefault("seed", 7)
    kwargs.setdefault("sampler", Sampler.ALLZ)
    return SimConfig(drift=DriftParam(rho), config=FrogConfig.all_of_z(n), **kwargs)


class TestSimConfig:
    """Тесты для проверки SimConfig."""

    def test_defaults(self):
        """Тест значений по умолчанию из настроек."""
        sim = nonneg_sim()
        assert sim.sampler is Sampler.NONNEG
        assert sim.site_truncation_tol == settings.SITE_TRUNCATION_TOL
        assert sim.moment_orders == settings.MOMENT_ORDERS

    @pytest.mark.parametrize("kwargs", [
        {"replicas": 0},
        {"seed": -1},
        {"seed": 2 ** 64},
        {"site_truncation_tol": 0.5},
        {"sampler": Sampler.STEPPER},
        {"sampler": Sampler.BLOCK},
        {"sampler": Sampler.STEPPER, "horizon": 10, "window": (0, 10)},
    ])
    def test_invalid(self, kwargs):
        """Тест некорректных параметров."""
        with pytest.raises(ValidationError):
            nonneg_sim(**kwargs)

    def test_errors_collected(self):
        """Тест: все ошибки перечисляются сразу."""
        with pytest.raises(ValidationError) as exc_info:
            nonneg_sim(replicas=0, seed=-1)
        assert len(exc_info.value.validation_errors) == 2

    def test_support_mismatch(self):
        """Тест несовпадения сэмплера и носителя."""
        with pytest.raises(DomainError):
            allz_sim(sampler=Sampler.NONNEG)
        with pytest.raises(DomainError):
            nonneg_sim(sampler=Sampler.ALLZ)


class TestDisplacements:
    """Тесты для смещений."""

    def test_single_displacement(self):
        """Тест: одиночное смещение неотрицательно."""
        rng = block_rng(1, 0)
        assert all(sample_min_displacement(DriftParam(0.5), rng) >= 0 for _ in range(100))

    def test_displacement_law(self):
        """Тест: P(D ≥ k) = ρ^k, среднее ρ/(1 − ρ)."""
        rng = block_rng(3, 0)
        values = sample_min_displacement_batch(DriftParam(0.5), rng, 100_000)
        assert values.mean() == pytest.approx(1.0, abs=0.03)
        assert np.mean(values >= 2) == pytest.approx(0.25, abs=0.01)

    def test_site_max_zero_counts(self):
        """Тест: узел без лягушек даёт −1."""
        depth = _site_max_displacement(math.log(0.5), np.array([0.0, 2.0]), np.array([0.3, 0.3]))
        assert depth[0] == -1
        assert depth[1] >= 0

    def test_site_max_law(self):
        """Тест: P(M ≥ k) = 1 − (1 − ρ^k)^c."""
        rng = block_rng(5, 0)
        c = 3.0
        u = 1.0 - rng.random(200_000)
        depth = _site_max_displacement(math.log(0.5), np.full(u.size, c), u)
        expected = 1.0 - (1.0 - 0.5 ** 2) ** c
        assert np.mean(depth >= 2) == pytest.approx(expected, abs=0.005)


class TestBlockRng:
    """Тесты для потоков ГСЧ."""

    def test_reproducible(self):
        """Тест: один и тот же блок даёт ту же последовательность."""
        assert np.array_equal(block_rng(42, 3).random(5), block_rng(42, 3).random(5))

    def test_blocks_differ(self):
        """Тест: разные блоки и разные seed дают разные потоки."""
        first = block_rng(42, 0).random(5)
        assert not np.array_equal(first, block_rng(42, 1).random(5))
        assert not np.array_equal(first, block_rng(43, 0).random(5))


class TestNonnegSampler:
    """Тесты для сэмплера на ℤ₊."""

    def test_matches_exact_law(self):
        """Тест: эмпирическая CDF согласуется с точной по Колмогорову."""
        sim = nonneg_sim(rho=0.5)
        samples = sample_range_nonneg_batch(sim, block_rng(11, 0), 20_000)
        cdf = RangeDistribution(sim.drift).cdf_table(int(samples.max()) + 5)
        assert ks_statistic(samples, cdf) < ks_critical_value(samples.size)

    def test_chi_square(self):
        """Тест: χ² для n = 2 не отвергает точный закон."""
        sim = nonneg_sim(rho=0.7, n=2)
        samples = sample_range_nonneg_batch(sim, block_rng(12, 0), 20_000)
        pmf = RangeDistribution(sim.drift, sim.config).pmf_table(30)
        assert chi_square_pvalue(samples, pmf) > 1e-3

    @pytest.mark.slow
    @pytest.mark.parametrize("rho", [0.3, 0.5, 0.7])
    @pytest.mark.parametrize("spec", ["const:1", "const:3", "arith:1,1"])
    def test_ks_grid(self, rho, spec):
        """Тест: сэмплер согласуется с точной CDF по Колмогорову на сетке ρ и η."""
        drift = DriftParam(rho)
        config = EtaSpecParser.parse(spec)
        sim = SimConfig(drift=drift, config=config, replicas=100_000, seed=13)
        samples = sample_range_nonneg_batch(sim, block_rng(13, 0), 100_000)
        cdf = [general_cdf(drift, config, x) for x in range(int(samples.max()) + 5)]
        assert ks_statistic(samples, np.array(cdf)) < ks_critical_value(samples.size)

    def test_single_draw(self):
        """Тест одиночной реплики."""
        assert sample_range_nonneg(nonneg_sim(), block_rng(1, 0)) >= 0


class TestAllzSampler:
    """Тесты для лавины волн на ℤ."""

    def test_dominates_nonneg(self):
        """Тест: на тех же случайных числах минимум на ℤ не меньше, чем на ℤ₊."""
        size = 2000
        base = sample_range_nonneg_batch(nonneg_sim(), block_rng(21, 0), size)
        depth, waves = sample_range_allz_batch(allz_sim(), block_rng(21, 0), size)
        assert np.all(depth >= base)
        assert np.all(waves >= 1)

    def test_single_wave_means_no_depth(self):
        """Тест: одна волна бывает только при нулевой глубине."""
        depth, waves = sample_range_allz_batch(allz_sim(), block_rng(22, 0), 2000)
        assert np.all(depth[waves == 1] == 0)
        assert np.all(waves[depth > 0] >= 2)

    def test_single_draw(self):
        """Тест одиночной реплики."""
        depth, waves = sample_range_allz(allz_sim(), block_rng(23, 0))
        assert depth >= 0 and waves >= 1

    def test_wave_limit(self, monkeypatch):
        """Тест: превышение MAX_WAVES даёт SimulationError."""
        monkeypatch.setattr(settings, "MAX_WAVES", 1)
        with pytest.raises(SimulationError) as exc_info:
            sample_range_allz_batch(allz_sim(rho=0.9), block_rng(24, 0), 200)
        assert exc_info.value.stage == "allz"


class TestProofVariants:
    """Тесты для вариантов из оценки моментов."""

    def test_dominating_mean(self):
        """Тест: среднее W совпадает с E(X)/ε."""
        sim = allz_sim(sampler=Sampler.DOMINATING)
        values = sample_dominating_variant_batch(sim, block_rng(31, 0), 20_000)
        expected = math.exp(log_phi_wald(sim.drift, 1, 1))
        assert values.mean() == pytest.approx(expected, rel=0.05)

    def test_dominating_small_epsilon(self):
        """Тест: при ε < 1e−4 розыгрыш W отклоняется."""
        sim = allz_sim(rho=0.9, sampler=Sampler.DOMINATING)
        with pytest.raises(SimulationError):
            sample_dominating_variant_batch(sim, block_rng(32, 0), 10)

    def test_block_geometric_law(self):
        """Тест: число блоков геометрическое с параметром θ."""
        sim = allz_sim(rho=0.9, sampler=Sampler.BLOCK, delta=0.5)
        depth, blocks = sample_block_variant_batch(sim, block_rng(33, 0), 10_000)
        assert np.array_equal(depth, blocks * 11)
        theta_value = math.exp(theta(sim.drift, 0.5, 1))
        assert blocks.mean() == pytest.approx((1.0 - theta_value) / theta_value, rel=0.05)
        assert np.mean(blocks == 0) == pytest.approx(theta_value, abs=0.01)

    def test_block_single_draw(self):
        """Тест одиночной реплики с явным δ."""
        sim = allz_sim(rho=0.9, sampler=Sampler.BLOCK, delta=0.5)
        depth, blocks = sample_block_variant(sim, 0.3, block_rng(34, 0))
        assert depth == blocks * 15

    def test_block_limit(self, monkeypatch):
        """Тест: превышение MAX_WAVES в блочной лавине."""
        monkeypatch.setattr(settings, "MAX_WAVES", 0)
        sim = allz_sim(rho=0.9, sampler=Sampler.BLOCK, delta=0.5)
        with pytest.raises(SimulationError):
            sample_block_variant_batch(sim, block_rng(35, 0), 100)


class TestStepper:
    """Тесты для пошаговой динамики."""

    def stepper_sim(self, horizon, window=(-40, 60), rho=0.5):
        return nonneg_sim(rho=rho, sampler=Sampler.STEPPER, horizon=horizon, window=window)

    def test_zero_horizon(self):
        """Тест: без шагов минимум равен нулю."""
        values = bounded_horizon_stepper_batch(self.stepper_sim(0), block_rng(41, 0), 50)
        assert np.all(values == 0)

    def test_monotone_in_horizon(self):
        """Тест: на тех же случайных числах глубина не убывает с горизонтом."""
        short = bounded_horizon_stepper_batch(self.stepper_sim(20), block_rng(42, 0), 200)
        long = bounded_horizon_stepper_batch(self.stepper_sim(80), block_rng(42, 0), 200)
        assert np.all(long >= short)
        assert np.all(short >= 0)

    def test_left_edge(self):
        """Тест: выход минимума за левую границу окна."""
        sim = self.stepper_sim(300, window=(-1, 20), rho=0.9)
        with pytest.raises(SimulationError) as exc_info:
            bounded_horizon_stepper_batch(sim, block_rng(43, 0), 50)
        assert exc_info.value.stage == "stepper"

    def test_single_draw(self):
        """Тест одиночной реплики."""
        assert bounded_horizon_stepper(self.stepper_sim(30), block_rng(44, 0)) >= 0

    @pytest.mark.slow
    def test_long_horizon_matches_exact_law(self):
        """Тест: при ρ = 0.2 и длинном горизонте закон глубины совпадает с точным."""
        size = 20_000
        sim = self.stepper_sim(400, window=(-20, 40), rho=0.2)
        values = bounded_horizon_stepper_batch(sim, block_rng(45, 0), size)
        assert np.mean(values == 0) == pytest.approx(single_cdf(sim.drift, 0), abs=0.01)

        cdf = RangeDistribution(sim.drift).cdf_table(int(values.max()) + 5)
        assert ks_statistic(values, cdf) < ks_critical_value(size)

        # Двухвыборочное сравнение с прямым сэмплером
        direct = sample_range_nonneg_batch(nonneg_sim(rho=0.2), block_rng(46, 0), size)
        grid = np.arange(int(max(values.max(), direct.max())) + 1)
        direct_cdf = np.searchsorted(np.sort(direct), grid, side="right") / size
        assert ks_statistic(values, direct_cdf) < math.sqrt(2.0) * ks_critical_value(size)


class TestRunMonteCarlo:
    """Тесты для прогона по блокам."""

    def test_reproducible(self):
        """Тест: одинаковый seed даёт одинаковый отчёт."""
        first = run_monte_carlo(nonneg_sim(replicas=500, seed=99))
        second = run_monte_carlo(nonneg_sim(replicas=500, seed=99))
        assert first.empirical_pmf == second.empirical_pmf
        assert np.array_equal(first.samples, second.samples)

    def test_independent_of_threads(self, monkeypatch):
        """Тест: результат не зависит от числа потоков."""
        monkeypatch.setattr(settings, "REPLICA_BLOCK", 100)
        single = run_monte_carlo(nonneg_sim(replicas=350, threads=1))
        multi = run_monte_carlo(nonneg_sim(replicas=350, threads=4))
        assert np.array_equal(single.samples, multi.samples)
        assert single.samples.size == 350

    def test_report(self):
        """Тест содержимого отчёта."""
        report = run_monte_carlo(nonneg_sim(replicas=400, moment_orders=2))
        assert isinstance(report, SimReport)
        assert sum(report.empirical_pmf.values()) == 400
        assert report.wave_counts is None
        assert report.moment(1).estimate == pytest.approx(report.samples.mean())
        assert report.frequency(-5) == 0.0
        with pytest.raises(ValidationError):
            report.moment(3)

        data = report.to_dict()
        assert data["sampler"] == "nonneg"
        assert sum(row["frequency"] for row in data["empirical_pmf"]) == pytest.approx(1.0)
        assert [row["m"] for row in data["moments"]] == [1, 2]
        assert data["wave_counts"] is None

    @pytest.mark.parametrize("rho,sampler,extra", [
        (0.7, Sampler.ALLZ, {}),
        (0.8, Sampler.BLOCK, {"delta": 0.5}),
    ])
    def test_wave_counts(self, rho, sampler, extra):
        """Тест: сэмплеры лавин заполняют wave_counts."""
        report = run_monte_carlo(allz_sim(rho=rho, replicas=300, sampler=sampler, **extra))
        assert report.wave_counts is not None
        assert sum(report.wave_counts.values()) == 300
        assert report.to_dict()["wave_counts"][0]["count"] > 0

    def test_simulation_error_passes_through(self, monkeypatch):
        """Тест: ошибка сэмплера доходит до вызывающего."""
        monkeypatch.setattr(settings, "MAX_WAVES", 1)
        with pytest.raises(SimulationError):
            run_monte_carlo(allz_sim(rho=0.9, replicas=200, threads=1))


class TestStatistics:
    """Тесты для статистик согласия."""

    def test_moment_estimates(self):
        """Тест выборочных моментов."""
        rows = moment_estimates(np.array([0, 1, 2, 3]), 2)
        assert rows[0].estimate == pytest.approx(1.5)
        assert rows[1].estimate == pytest.approx(3.5)
        assert rows[0].standard_error > 0.0

    def test_moment_single_sample(self):
        """Тест: у одной реплики стандартная ошибка нулевая."""
        assert moment_estimates(np.array([4]), 1)[0].standard_error == 0.0

    def test_ks_statistic(self):
        """Тест статистики Колмогорова на точной выборке."""
        assert ks_statistic(np.array([0, 0, 1, 1]), np.array([0.5, 1.0])) == pytest.approx(0.0)
        assert ks_statistic(np.array([1, 1]), np.array([0.5, 1.0])) == pytest.approx(0.5)

    def test_ks_critical_value(self):
        """Тест: критическое значение убывает с размером выборки."""
        assert ks_critical_value(100) > ks_critical_value(10_000) > 0.0

    def test_chi_square_rejects(self):
        """Тест: χ² отвергает явно чужой закон."""
        samples = np.zeros(1000, dtype=np.int64)
        assert chi_square_pvalue(samples, np.array([0.25, 0.25, 0.25, 0.25])) < 1e-6

    def test_chi_square_accepts_geometric(self):
        """Тест: χ² принимает геометрическую выборку."""
        rng = block_rng(51, 0)
        samples = rng.geometric(0.5, 10_000) - 1
        probs = 0.5 ** np.arange(1, 16)
        assert chi_square_pvalue(samples, probs) > 1e-3
