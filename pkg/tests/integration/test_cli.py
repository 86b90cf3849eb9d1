"""Интеграционные тесты CLI frogrange."""

import json

import pytest
from click.testing import CliRunner

from frogrange import __version__
from frogrange.cli import cli
from frogrange.error_handling import EXIT_DOMAIN, EXIT_USAGE
from frogrange.export import frame_to_csv, from_csv

EULER_HALF = 0.2887880950866024


@pytest.fixture
def runner():
    return CliRunner()


def invoke(runner, *args):
    """Запуск CLI с подавлением информационных логов."""
    return runner.invoke(cli, ["--log-level", "ERROR", *args])


def invoke_json(runner, *args):
    result = invoke(runner, *args)
    assert result.exit_code == 0, result.output
    return json.loads(result.output)


@pytest.mark.integration
class TestDist:
    """Тесты подкоманды dist."""

    def test_json(self, runner):
        """Тест таблицы PMF/CDF в JSON."""
        data = invoke_json(runner, "dist", "--rho", "0.5", "--eta", "const:1", "--x-max", "5")
        assert data["schema"] == "frogrange-report/1"
        assert data["subcommand"] == "dist"
        assert data["timestamp"] is None
        rows = data["payload"]["rows"]
        assert [row["x"] for row in rows] == list(range(6))
        assert rows[0]["pmf"] == pytest.approx(EULER_HALF, rel=1e-12)
        assert rows[0]["pmf"] == pytest.approx(rows[0]["cdf"])

    def test_single_row(self, runner):
        """Тест x-max = 0: одна строка, pmf = cdf."""
        rows = invoke_json(runner, "dist", "--rho", "0.5", "--x-max", "0")["payload"]["rows"]
        assert len(rows) == 1
        assert rows[0]["pmf"] == pytest.approx(rows[0]["cdf"], rel=1e-12)

    def test_csv_round_trip(self, runner):
        """Тест: повторный вывод прочитанной CSV-таблицы побайтно совпадает."""
        result = invoke(runner, "dist", "--rho", "0.7", "--eta", "arith:1,1", "--x-max", "8",
                        "--format", "csv")
        assert result.exit_code == 0
        assert result.output.splitlines()[0] == "x,pmf,cdf,log_pmf,log_cdf"
        assert frame_to_csv(from_csv(result.output)) == result.output

    def test_deterministic(self, runner):
        """Тест: одинаковые параметры дают одинаковый вывод."""
        args = ("dist", "--rho", "0.9", "--eta", "prefix:[0,2];tail:const:1", "--x-max", "10")
        assert invoke(runner, *args).output == invoke(runner, *args).output

    def test_stamp(self, runner):
        """Тест отметки времени по флагу."""
        data = invoke_json(runner, "dist", "--rho", "0.5", "--x-max", "1", "--stamp")
        assert data["timestamp"] is not None

    def test_rho_out_of_range(self, runner):
        """Тест: ρ вне (0, 1) даёт код 3."""
        result = invoke(runner, "dist", "--rho", "1.5", "--x-max", "3")
        assert result.exit_code == EXIT_DOMAIN
        assert "❌" in result.output

    def test_bad_eta_token(self, runner):
        """Тест: ошибка разбора η называет токен."""
        result = invoke(runner, "dist", "--rho", "0.5", "--eta", "konst:1", "--x-max", "3")
        assert result.exit_code == EXIT_USAGE
        assert "konst" in result.output

    def test_missing_option(self, runner):
        """Тест: без обязательной опции click даёт код 2."""
        result = invoke(runner, "dist", "--rho", "0.5")
        assert result.exit_code == EXIT_USAGE

    def test_output_file(self, runner, tmp_path):
        """Тест сохранения в файл."""
        target = tmp_path / "dist.json"
        result = invoke(runner, "dist", "--rho", "0.5", "--x-max", "2", "-o", str(target))
        assert result.exit_code == 0
        assert "✅" in result.output
        data = json.loads(target.read_text(encoding="utf-8"))
        assert len(data["payload"]["rows"]) == 3


@pytest.mark.integration
class TestMomentsAndMode:
    """Тесты подкоманд moments и mode."""

    def test_moments(self, runner):
        """Тест первого момента при ρ = 1/2."""
        rows = invoke_json(runner, "moments", "--rho", "0.5", "--eta", "const:1",
                           "--m-max", "2")["payload"]["rows"]
        assert [row["m"] for row in rows] == [1, 2]
        assert rows[0]["exact"] == pytest.approx(1.6067, abs=1e-4)
        assert rows[0]["via_bell"] == pytest.approx(rows[0]["exact"], rel=1e-8)

    def test_moments_general_config(self, runner):
        """Тест: для arith:1,1 есть столбец отношения."""
        rows = invoke_json(runner, "moments", "--rho", "0.9", "--eta", "arith:1,1",
                           "--m-max", "1")["payload"]["rows"]
        assert "ratio" in rows[0]
        assert rows[0]["ratio"] > 0.0

    def test_moments_zero_order(self, runner):
        """Тест: m-max = 0 даёт код 2."""
        result = invoke(runner, "moments", "--rho", "0.5", "--m-max", "0")
        assert result.exit_code == EXIT_USAGE

    def test_mode(self, runner):
        """Тест границ моды при ρ = 0.9."""
        row = invoke_json(runner, "mode", "--rho", "0.9")["payload"]["rows"][0]
        assert (row["lo"], row["hi"]) == (20, 22)
        assert 20 <= row["exact"] <= 22

    def test_mode_half(self, runner):
        """Тест моды при ρ = 1/2."""
        row = invoke_json(runner, "mode", "--rho", "0.5")["payload"]["rows"][0]
        assert row["exact"] in (0, 1)

    def test_mode_zero_rho(self, runner):
        """Тест: ρ = 0 даёт код 3."""
        assert invoke(runner, "mode", "--rho", "0").exit_code == EXIT_DOMAIN


@pytest.mark.integration
class TestSweep:
    """Тесты подкоманды sweep."""

    def test_mean_ratio_trend(self, runner):
        """Тест: отношение E(X)/Z_ρ приближается к 1."""
        rows = invoke_json(runner, "sweep", "--rho", "0.9,0.99,0.999",
                           "--quantity", "mean-ratio")["payload"]["rows"]
        gaps = [abs(row["value"] - 1.0) for row in rows]
        assert gaps == sorted(gaps, reverse=True)
        assert all(row["quantity"] == "mean-ratio" for row in rows)

    def test_var_y_decreasing(self, runner):
        """Тест: Var(Y_ρ) убывает."""
        rows = invoke_json(runner, "sweep", "--rho", "0.9,0.99",
                           "--quantity", "var-Y")["payload"]["rows"]
        assert rows[1]["value"] < rows[0]["value"]

    def test_geometric_list(self, runner):
        """Тест списка ρ вида geom:<start>:<count>."""
        rows = invoke_json(runner, "sweep", "--rho", "geom:0.9:3",
                           "--quantity", "euler-asymptotic")["payload"]["rows"]
        assert [row["rho"] for row in rows] == pytest.approx([0.9, 0.99, 0.999])
        assert rows[1]["value"] < 1e-2

    def test_remark_probabilities(self, runner):
        """Тест монотонности вероятностей дальнего и ближнего уходов."""
        far = invoke_json(runner, "sweep", "--rho", "0.9,0.99,0.999",
                          "--quantity", "p-far")["payload"]["rows"]
        near = invoke_json(runner, "sweep", "--rho", "0.9,0.99,0.999",
                           "--quantity", "q-near")["payload"]["rows"]
        far_values = [row["value"] for row in far]
        near_values = [row["value"] for row in near]
        assert far_values == sorted(far_values)
        assert near_values == sorted(near_values, reverse=True)

    def test_empty_list(self, runner):
        """Тест: пустой список ρ даёт код 2."""
        result = invoke(runner, "sweep", "--rho", "", "--quantity", "mean-ratio")
        assert result.exit_code == EXIT_USAGE

    def test_csv(self, runner):
        """Тест длинного формата CSV."""
        result = invoke(runner, "sweep", "--rho", "0.5,0.6", "--quantity", "kappa2-ratio",
                        "--format", "csv")
        assert result.exit_code == 0
        lines = result.output.splitlines()
        assert lines[0] == "rho,quantity,value"
        assert len(lines) == 3


@pytest.mark.integration
class TestSimulate:
    """Тесты подкоманды simulate."""

    def test_zero_frequency(self, runner):
        """Тест: частота X = 0 близка к (ρ; ρ)_∞."""
        data = invoke_json(runner, "simulate", "--rho", "0.5", "--replicas", "20000",
                           "--seed", "7")
        payload = data["payload"]
        assert payload["sampler"] == "nonneg"
        assert payload["replicas"] == 20000
        zero = next(row for row in payload["empirical_pmf"] if row["x"] == 0)
        assert zero["frequency"] == pytest.approx(EULER_HALF, abs=0.015)
        assert payload["wave_counts"] is None

    def test_same_seed_same_bytes(self, runner):
        """Тест воспроизводимости по зерну."""
        args = ("simulate", "--rho", "0.7", "--replicas", "3000", "--seed", "11")
        assert invoke(runner, *args).output == invoke(runner, *args).output

    def test_threads_do_not_change_output(self, runner):
        """Тест: число потоков не влияет на результат."""
        base = ("simulate", "--rho", "0.6", "--replicas", "5000", "--seed", "3")
        single = invoke_json(runner, *base, "--threads", "1")["payload"]
        multi = invoke_json(runner, *base, "--threads", "4")["payload"]
        assert single == multi

    def test_allz_wave_counts(self, runner):
        """Тест: на ℤ отчёт содержит счётчики волн."""
        payload = invoke_json(runner, "simulate", "--support", "allz", "--eta", "const:2",
                              "--rho", "0.3", "--replicas", "2000", "--seed", "1")["payload"]
        assert payload["sampler"] == "allz"
        assert payload["wave_counts"]
        assert sum(row["count"] for row in payload["wave_counts"]) == 2000

    def test_stepper(self, runner):
        """Тест пошагового сэмплера."""
        payload = invoke_json(runner, "simulate", "--rho", "0.5", "--replicas", "500",
                              "--seed", "2", "--sampler", "stepper",
                              "--horizon", "200")["payload"]
        assert payload["sampler"] == "stepper"
        assert sum(row["count"] for row in payload["empirical_pmf"]) == 500

    def test_csv(self, runner):
        """Тест CSV с эмпирической PMF."""
        result = invoke(runner, "simulate", "--rho", "0.5", "--replicas", "1000", "--seed", "5",
                        "--format", "csv")
        assert result.exit_code == 0
        assert result.output.splitlines()[0] == "x,count,frequency"

    def test_sampler_support_mismatch(self, runner):
        """Тест: сэмплер nonneg на носителе ℤ даёт код 3."""
        result = invoke(runner, "simulate", "--support", "allz", "--sampler", "nonneg",
                        "--rho", "0.5", "--replicas", "10", "--seed", "1")
        assert result.exit_code == EXIT_DOMAIN

    def test_negative_replicas(self, runner):
        """Тест: неположительное число реплик даёт код 2."""
        result = invoke(runner, "simulate", "--rho", "0.5", "--replicas", "0", "--seed", "1")
        assert result.exit_code == EXIT_USAGE


@pytest.mark.integration
class TestBounds:
    """Тесты подкоманды bounds."""

    def test_ordering(self, runner):
        """Тест: нижняя граница меньше верхней при ρ = 0.99."""
        payload = invoke_json(runner, "bounds", "--rho", "0.99", "--n", "1", "--m", "1",
                              "--alpha", "0.5")["payload"]
        assert payload["log_psi_pre"] < payload["log_phi_pre"]
        assert payload["block_length"] == 245
        assert payload["log_phi_wald"] is not None

    def test_delta_domain_gate(self, runner):
        """Тест: ниже 1 − 1/e нужен --extend-delta."""
        args = ("bounds", "--rho", "0.6", "--n", "1", "--m", "1", "--alpha", "0.5")
        assert invoke(runner, *args).exit_code == EXIT_DOMAIN
        assert invoke(runner, "bounds", "--rho", "0.5", "--n", "1").exit_code == EXIT_DOMAIN
        payload = invoke_json(runner, *args, "--extend-delta")["payload"]
        assert payload["delta"] == 0.5

    def test_zero_frogs(self, runner):
        """Тест: n = 0 даёт код 2."""
        result = invoke(runner, "bounds", "--rho", "0.9", "--n", "0")
        assert result.exit_code == EXIT_USAGE


@pytest.mark.integration
class TestAuxiliaryCommands:
    """Тесты вспомогательных команд."""

    def test_version(self, runner):
        """Тест вывода версии."""
        result = runner.invoke(cli, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_schema(self, runner):
        """Тест печати схемы."""
        result = invoke(runner, "schema")
        assert result.exit_code == 0
        assert json.loads(result.output)["$id"] == "frogrange-report/1"

    def test_config(self, runner):
        """Тест вывода конфигурации."""
        result = invoke(runner, "config")
        assert result.exit_code == 0
        assert "replica_block:" in result.output
        assert "default_tol:" in result.output
