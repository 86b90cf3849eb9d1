"""CLI интерфейс frogrange."""

import json
import logging
import math
from functools import wraps
from typing import Any, Callable, Dict, Optional

import click

from frogrange import __version__
from frogrange.config import get_default_config, settings
from frogrange.distribution import (
    DriftParam, FrogConfig, RangeDistribution, cumulant, cumulant_asymptotic,
    general_moment, general_scaled_convergence_report, mgf_limit, mode_bounds,
    mode_critical_point, mode_exact, moment, scaled_convergence_report
)
from frogrange.error_handling import handle_cli_errors
from frogrange.exceptions import DomainError
from frogrange.export import build_envelope, load_schema, to_csv, to_json, write_output
from frogrange.logging_config import LoggingContext, setup_logging
from frogrange.qseries import euler_function_log_asymptotic, log_q_pochhammer_inf
from frogrange.range_bounds import (
    DeltaFn, bounds_report, log_phi_wald, log_psi_exact, phi_upper_pre,
    psi_lower_pre, remark_probabilities
)
from frogrange.simulator import SimConfig, run_monte_carlo
from frogrange.types import OutputFormat, RowList, Sampler, Support
from frogrange.validators import EtaSpecParser, ParameterValidator, parse_rho_list

logger = logging.getLogger(__name__)

SWEEP_QUANTITIES = (
    "mean-ratio", "moment2-ratio", "var-Y", "var-Y-normalized", "kappa2-ratio",
    "mgf-limit", "p-far", "q-near", "euler-asymptotic", "bound-gap",
)


def output_options(func: Callable) -> Callable:
    """Общие опции вывода: формат, файл, отметка времени."""
    func = click.option('--stamp', '--timestamp', 'stamp', is_flag=True,
                        help='Записать время запуска в конверт')(func)
    func = click.option('--output', '-o', type=click.Path(),
                        help='Файл для сохранения результата')(func)
    func = click.option('--format', 'output_format',
                        type=click.Choice([f.value for f in OutputFormat]),
                        default=OutputFormat.JSON.value, help='Формат вывода')(func)
    return func


def _check(result, message: str) -> None:
    result.raise_for_errors(message)


def _resolve_tol(tol: Optional[float]) -> float:
    tol = settings.DEFAULT_TOL if tol is None else tol
    _check(ParameterValidator.validate_tolerance(tol, "tol", upper=1e-3), "Некорректный допуск")
    return tol


def _emit(subcommand: str, parameters: Dict[str, Any], payload: Dict[str, Any],
          rows: RowList, output_format: str, output: Optional[str], stamp: bool) -> None:
    """JSON-конверт или CSV-таблица в stdout либо в файл."""
    if output_format == OutputFormat.CSV.value:
        text = to_csv(rows)
    else:
        envelope = build_envelope(subcommand, parameters, payload, stamp)
        text = to_json(envelope)
    if output:
        write_output(text, output)
        click.echo(f"✅ Результат сохранен в {output}", err=True)
    else:
        click.echo(text, nl=False)


def _table(subcommand: str, parameters: Dict[str, Any], rows: RowList, output_format: str,
           output: Optional[str], stamp: bool) -> None:
    _emit(subcommand, parameters, {"rows": rows}, rows, output_format, output, stamp)


def _log_or_none(value: float) -> Optional[float]:
    return math.log(value) if value > 0.0 else None


def timed(subcommand: str) -> Callable:
    """Логирует длительность подкоманды."""
    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs):
            with LoggingContext(logger, subcommand, subcommand=subcommand):
                return func(*args, **kwargs)
        return wrapper
    return decorator


@click.group()
@click.version_option(version=__version__)
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']),
              default=None, help='Уровень логирования (stderr)')
@click.option('--log-json', is_flag=True, default=False, help='Логи в формате JSON')
def cli(log_level: Optional[str], log_json: bool):
    """frogrange - распределение минимума посещённых узлов в модели лягушек на ℤ."""
    setup_logging(level=log_level or settings.LOG_LEVEL,
                  log_to_file=settings.LOG_TO_FILE,
                  json_format=log_json or settings.LOG_JSON,
                  log_dir=settings.LOG_DIR)


@cli.command()
@click.option('--rho', type=float, required=True, help='Снос ρ ∈ (0, 1)')
@click.option('--eta', default='const:1', show_default=True, help='η-спецификация')
@click.option('--x-max', type=int, required=True, help='Последнее x таблицы')
@click.option('--tol', type=float, default=None, help='Допуск усечения рядов')
@output_options
@handle_cli_errors
@timed("dist")
def dist(rho: float, eta: str, x_max: int, tol: Optional[float],
         output_format: str, output: Optional[str], stamp: bool):
    """Таблица PMF и CDF для x = 0..x_max."""
    drift = DriftParam(rho)
    config = EtaSpecParser.parse(eta)
    _check(ParameterValidator.validate_positive_int(x_max, "x-max", minimum=0),
           "Некорректный x-max")
    tol = _resolve_tol(tol)

    table = RangeDistribution(drift, config, tol)
    log_cdf = table.log_cdf_table(x_max)
    log_pmf = table.log_pmf_values(range(x_max + 1))
    rows = [
        {
            "x": x,
            "pmf": math.exp(lp),
            "cdf": math.exp(lc),
            "log_pmf": float(lp),
            "log_cdf": float(lc),
        }
        for x, (lp, lc) in enumerate(zip(log_pmf, log_cdf))
    ]
    params = {"rho": rho, "eta": config.spec(), "x_max": x_max, "tol": tol}
    _table("dist", params, rows, output_format, output, stamp)


@cli.command()
@click.option('--rho', type=float, required=True, help='Снос ρ ∈ (0, 1)')
@click.option('--eta', default='const:1', show_default=True, help='η-спецификация')
@click.option('--m-max', type=int, required=True, help='Старший порядок момента')
@click.option('--tol', type=float, default=None, help='Допуск усечения рядов')
@output_options
@handle_cli_errors
@timed("moments")
def moments(rho: float, eta: str, m_max: int, tol: Optional[float],
            output_format: str, output: Optional[str], stamp: bool):
    """Моменты E(X^m): точные, через полиномы Белла и асимптотика Z_ρ^m."""
    drift = DriftParam(rho)
    config = EtaSpecParser.parse(eta)
    _check(ParameterValidator.validate_positive_int(m_max, "m-max"), "Некорректный m-max")
    tol = _resolve_tol(tol)

    rows = []
    for m in range(1, m_max + 1):
        report = moment(drift, m, tol) if config.is_single_frog() else general_moment(drift, config, m, tol)
        row = report.to_dict()
        row["log_exact"] = _log_or_none(report.exact)
        rows.append(row)
    params = {"rho": rho, "eta": config.spec(), "m_max": m_max, "tol": tol}
    _table("moments", params, rows, output_format, output, stamp)


@cli.command()
@click.option('--rho', type=float, required=True, help='Снос ρ ∈ (0, 1)')
@click.option('--tol', type=float, default=None, help='Допуск усечения рядов')
@output_options
@handle_cli_errors
@timed("mode")
def mode(rho: float, tol: Optional[float], output_format: str, output: Optional[str],
         stamp: bool):
    """Границы моды PMF одной лягушки на узел и точное значение."""
    drift = DriftParam(rho)
    tol = _resolve_tol(tol)
    lo, hi = mode_bounds(drift)
    rows = [{
        "lo": lo,
        "hi": hi,
        "exact": mode_exact(drift, tol),
        "critical_point": mode_critical_point(drift, tol),
    }]
    _table("mode", {"rho": rho, "tol": tol}, rows, output_format, output, stamp)


def _sweep_value(quantity: str, drift: DriftParam, config: FrogConfig, tol: float,
                 z: float, delta: float, m: int, delta_fn: DeltaFn) -> float:
    single = config.is_single_frog()
    if quantity in ("mean-ratio", "moment2-ratio"):
        order = 1 if quantity == "mean-ratio" else 2
        report = moment(drift, order, tol) if single else general_moment(drift, config, order, tol)
        return report.ratio_exact_over_asymptotic
    if quantity in ("var-Y", "var-Y-normalized"):
        if single:
            _, var_y = scaled_convergence_report(drift, tol)
        else:
            _, var_y = general_scaled_convergence_report(drift, config, tol)
        if quantity == "var-Y":
            return var_y
        return var_y * drift.log1m_rho ** 2 / (math.pi ** 2 / 6.0)
    if quantity == "kappa2-ratio":
        return cumulant(drift, 2, tol) / cumulant_asymptotic(drift, 1)
    if quantity == "mgf-limit":
        return mgf_limit(drift, z, tol)
    if quantity == "p-far":
        return remark_probabilities(drift, delta, tol)[0]
    if quantity == "q-near":
        return remark_probabilities(drift, delta, tol)[1]
    if quantity == "euler-asymptotic":
        exact = log_q_pochhammer_inf(drift.rho, drift.q, tol).log_value
        return abs(exact - euler_function_log_asymptotic(drift.q)) / abs(exact)
    n = config.constant_n
    return phi_upper_pre(drift, n, m, tol) - psi_lower_pre(drift, n, m, delta_fn)


@cli.command()
@click.option('--rho', 'rho_spec', required=True,
              help="Список 'r1,r2,...' или 'geom:<start>:<count>'")
@click.option('--quantity', type=click.Choice(SWEEP_QUANTITIES), required=True,
              help='Величина для прохода по ρ')
@click.option('--eta', default='const:1', show_default=True, help='η-спецификация')
@click.option('--z', type=float, default=2.0, show_default=True, help='Аргумент mgf-limit')
@click.option('--delta', type=float, default=0.5, show_default=True,
              help='δ для p-far и q-near')
@click.option('--m', type=int, default=1, show_default=True, help='Порядок для bound-gap')
@click.option('--alpha', type=float, default=0.5, show_default=True, help='α для bound-gap')
@click.option('--extend-delta', is_flag=True, help='Продолжить δ(ρ) константой ниже 1 − 1/e')
@click.option('--tol', type=float, default=None, help='Допуск усечения рядов')
@output_options
@handle_cli_errors
@timed("sweep")
def sweep(rho_spec: str, quantity: str, eta: str, z: float, delta: float, m: int,
          alpha: float, extend_delta: bool, tol: Optional[float],
          output_format: str, output: Optional[str], stamp: bool):
    """Проход по списку ρ: одна строка на пару (ρ, величина)."""
    rhos = parse_rho_list(rho_spec)
    config = EtaSpecParser.parse(eta)
    tol = _resolve_tol(tol)
    _check(ParameterValidator.validate_positive_int(m, "m"), "Некорректный m")
    _check(ParameterValidator.validate_unit_interval(delta, "delta"), "Некорректный delta")
    _check(ParameterValidator.validate_unit_interval(alpha, "alpha"), "Некорректный alpha")
    delta_fn = DeltaFn(alpha, extend=extend_delta)

    rows = []
    for rho in rhos:
        drift = DriftParam(rho)
        value = _sweep_value(quantity, drift, config, tol, z, delta, m, delta_fn)
        rows.append({"rho": rho, "quantity": quantity, "value": float(value)})
    params = {
        "rho": rhos, "quantity": quantity, "eta": config.spec(), "z": z, "delta": delta,
        "m": m, "alpha": alpha, "extend_delta": extend_delta, "tol": tol,
    }
    _table("sweep", params, rows, output_format, output, stamp)


@cli.command()
@click.option('--rho', type=float, required=True, help='Снос ρ ∈ (0, 1)')
@click.option('--eta', default='const:1', show_default=True, help='η-спецификация')
@click.option('--support', type=click.Choice([s.value for s in Support]),
              default=Support.NONNEGATIVE.value, show_default=True, help='Носитель η')
@click.option('--replicas', type=int, required=True, help='Число реплик')
@click.option('--seed', type=int, required=True, help='Зерно ГСЧ')
@click.option('--sampler', type=click.Choice([s.value for s in Sampler]), default=None,
              help='Сэмплер (по умолчанию nonneg или allz по носителю)')
@click.option('--horizon', type=int, default=None, help='Число шагов для stepper')
@click.option('--delta', type=float, default=None, help='δ для сэмплера block')
@click.option('--alpha', type=float, default=0.5, show_default=True,
              help='α для δ(ρ), если --delta не задан')
@click.option('--extend-delta', is_flag=True, help='Продолжить δ(ρ) константой ниже 1 − 1/e')
@click.option('--window-left', type=int, default=-40, show_default=True,
              help='Левая граница окна stepper')
@click.option('--window-right', type=int, default=150, show_default=True,
              help='Правая граница окна stepper')
@click.option('--site-tol', type=float, default=None,
              help='Бюджет полной вариации на отброшенные узлы')
@click.option('--threads', type=int, default=None, help='Число потоков (0 = все ядра)')
@output_options
@handle_cli_errors
@timed("simulate")
def simulate(rho: float, eta: str, support: str, replicas: int, seed: int,
             sampler: Optional[str], horizon: Optional[int], delta: Optional[float],
             alpha: float, extend_delta: bool, window_left: int, window_right: int,
             site_tol: Optional[float], threads: Optional[int],
             output_format: str, output: Optional[str], stamp: bool):
    """Монте-Карло для минимума; отчёт воспроизводим по --seed."""
    drift = DriftParam(rho)
    support_kind = Support(support)
    config = EtaSpecParser.parse(eta, support_kind)
    if sampler is None:
        sampler = Sampler.ALLZ.value if support_kind is Support.ALL_OF_Z else Sampler.NONNEG.value
    sampler_kind = Sampler(sampler)
    if sampler_kind is Sampler.BLOCK and delta is None:
        delta = DeltaFn(alpha, extend=extend_delta)(drift)
    site_tol = settings.SITE_TRUNCATION_TOL if site_tol is None else site_tol

    sim = SimConfig(
        drift=drift, config=config, replicas=replicas, seed=seed,
        site_truncation_tol=site_tol, horizon=horizon, sampler=sampler_kind,
        delta=delta, window=(window_left, window_right), threads=threads,
    )
    report = run_monte_carlo(sim)
    rows = report.to_dict()["empirical_pmf"]
    params = {
        "rho": rho, "eta": config.spec(), "support": support, "replicas": replicas,
        "seed": seed, "sampler": sampler, "horizon": horizon, "delta": delta,
        "window": [window_left, window_right], "site_tol": site_tol,
        "moment_orders": sim.moment_orders, "replica_block": settings.REPLICA_BLOCK,
    }
    _emit("simulate", params, report.to_dict(), rows, output_format, output, stamp)


@cli.command()
@click.option('--rho', type=float, required=True, help='Снос ρ ∈ (0, 1)')
@click.option('--n', type=int, required=True, help='Лягушек на узел')
@click.option('--m', type=int, default=1, show_default=True, help='Порядок момента')
@click.option('--alpha', type=float, default=0.5, show_default=True, help='α в δ(ρ)')
@click.option('--extend-delta', is_flag=True, help='Продолжить δ(ρ) константой ниже 1 − 1/e')
@click.option('--tol', type=float, default=None, help='Допуск усечения рядов')
@output_options
@handle_cli_errors
@timed("bounds")
def bounds(rho: float, n: int, m: int, alpha: float, extend_delta: bool,
           tol: Optional[float], output_format: str, output: Optional[str], stamp: bool):
    """Верхняя и нижняя границы E(range^m) для const:n на ℤ, в логарифмах."""
    drift = DriftParam(rho)
    _check(ParameterValidator.validate_positive_int(n, "n"), "Некорректный n")
    _check(ParameterValidator.validate_positive_int(m, "m"), "Некорректный m")
    _check(ParameterValidator.validate_unit_interval(alpha, "alpha"), "Некорректный alpha")
    tol = _resolve_tol(tol)
    delta_fn = DeltaFn(alpha, extend=extend_delta)

    payload = bounds_report(drift, n, m, delta_fn, tol).to_dict()
    try:
        payload["log_phi_wald"] = log_phi_wald(drift, n, m, tol)
    except DomainError as e:
        logger.info("log_phi_wald недоступна: %s", e.message)
        payload["log_phi_wald"] = None
    try:
        payload["log_psi_exact"] = log_psi_exact(drift, n, m, delta_fn)
    except DomainError as e:
        logger.info("log_psi_exact недоступна: %s", e.message)
        payload["log_psi_exact"] = None

    params = {"rho": rho, "n": n, "m": m, "alpha": alpha,
              "extend_delta": extend_delta, "tol": tol}
    _emit("bounds", params, payload, [payload], output_format, output, stamp)


@cli.command()
def schema():
    """Печатает JSON-схему выходного конверта."""
    click.echo(json.dumps(load_schema(), ensure_ascii=False, indent=2))


@cli.command()
def config():
    """Показывает текущую конфигурацию."""
    click.echo("⚙️ Конфигурация:", err=True)
    for key, value in get_default_config().items():
        click.echo(f"  {key}: {value}")


def main():
    cli()


if __name__ == '__main__':
    main()
