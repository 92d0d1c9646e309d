import logging
import sys
from functools import wraps

import click

from config_loader import load_config
from models import BellLikeState, ChannelSpec, DecayPoint, MixedBoundQuery, PureBoundQuery, ScanGrid
from services.cache_service import log_cache_stats
from services.channel_registry import get_all_models, get_model_info
from services.channel_service import evolved_closed_form, kraus_discrepancy
from services.error_handling import ExitCode, QslchanError, get_error_service
from services.export_service import (density_report, density_to_csv, record_to_csv, render_rows, to_json,
                                     write_output)
from services.numerics_config import reload_numerics_config, update_numerics_config
from services.qslt_service import memoryless_ad_oracle, pd_mixed_closed_form, qslt_mixed, qslt_pure_ratio
from services.scan_service import FIGURE_IDS, ScanService
from services.validation_service import ValidationSuite, format_report

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')

logger = logging.getLogger(__name__)


def configure_logging(level='WARNING', log_file=None):
    """ Configure logging level & format for the console and an optional log file. """
    root = logging.getLogger()
    root.setLevel(getattr(logging, str(level).upper(), logging.WARNING))

    for handler in [h for h in root.handlers if getattr(h, '_qslchan', False)]:
        root.removeHandler(handler)
        handler.close()

    # stdout carries the data; logs go to stderr
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(logging.Formatter(LOG_FORMAT))
    console_handler._qslchan = True
    root.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        file_handler._qslchan = True
        root.addHandler(file_handler)

    logging.getLogger('matplotlib').setLevel(max(root.level, logging.WARNING))


def init_app(config_path=None, log_level=None, log_file=None, workers=None):
    """ Load configuration, set up logging and the shared numerics settings. """
    config = load_config(config_path)
    configure_logging(log_level or config.get('log_level', 'WARNING'), log_file or config.get('log_file'))
    reload_numerics_config(config.get('numerics'))
    if workers:
        update_numerics_config({'workers': workers})
    return config


def handle_errors(command):
    """Turn toolkit errors into a console report and the matching exit code."""
    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except QslchanError as e:
            service = get_error_service()
            report = service.handle_error(e, {'command': command.__name__})
            click.echo(service.format_for_console(report), err=True)
            sys.exit(report['exit_code'])
    return wrapper


def parse_float_list(ctx, param, value):
    if value is None:
        return None
    try:
        values = [float(v) for v in value.split(',') if v.strip()]
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got '{value}'")
    if not values:
        raise click.BadParameter("expected at least one number")
    return values


def resolve_state(alpha, concurrence):
    if alpha is not None and concurrence is not None:
        raise click.UsageError("Give either --alpha or --concurrence, not both")
    if alpha is None and concurrence is None:
        raise click.UsageError("One of --alpha or --concurrence is required")
    if concurrence is not None:
        return BellLikeState.from_concurrence(concurrence)
    return BellLikeState(alpha)


def _family_help():
    return "Channel family: " + "; ".join(f"{m['id']} = {m['name']}" for m in get_all_models())


def channel_options(command):
    """--family, --mu, --alpha/--concurrence and --rate."""
    options = [
        click.option('--family', required=True, type=click.Choice(['ad', 'pd', 'depol'], case_sensitive=False),
                     help=_family_help()),
        click.option('--mu', required=True, type=click.FloatRange(0.0, 1.0), help='Correlation strength.'),
        click.option('--alpha', type=click.FloatRange(0.0, 1.0), default=None,
                     help='Amplitude of |00> in alpha|00> + beta|11>.'),
        click.option('--concurrence', type=click.FloatRange(0.0, 1.0), default=None,
                     help='Initial concurrence C; sets alpha <= sqrt(2)/2.'),
        click.option('--rate', type=click.FloatRange(0.0, min_open=True), default=None,
                     help='Decay rate (default: 1 for ad, 0.5 for pd and depol).')
    ]
    for option in reversed(options):
        command = option(command)
    return command


def output_options(formats):
    def decorator(command):
        command = click.option('--format', 'fmt', type=click.Choice(formats), default=formats[0],
                               help='Output format.')(command)
        command = click.option('--out', type=click.Path(dir_okay=False), default=None,
                               help='Output file (default: standard output).')(command)
        return command
    return decorator


@click.group()
@click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None,
              envvar='QSLCHAN_LOG_LEVEL', help='Logging level (logs go to standard error).')
@click.option('--config', 'config_path', type=click.Path(dir_okay=False), default=None,
              help='JSON configuration file (default: $QSLCHAN_CONFIG).')
@click.option('--workers', type=click.IntRange(min=1), default=None, help='Worker threads for scans.')
@click.option('--log-file', type=click.Path(dir_okay=False), default=None, help='Also log to this file.')
@click.pass_context
def cli(ctx, log_level, config_path, workers, log_file):
    """Speed limits of two-qubit states in correlated noisy channels."""
    ctx.obj = {'config': init_app(config_path, log_level, log_file, workers)}


@cli.command()
@channel_options
@click.option('--endpoint', required=True, type=click.FloatRange(0.0, 1.0, min_open=True),
              help='Decay parameter P (ad) or p (pd, depol) of the evolved state.')
@output_options(['json', 'csv'])
@handle_errors
def evolve(family, mu, alpha, concurrence, rate, endpoint, out, fmt):
    """Evolve alpha|00> + beta|11> through the channel."""
    state = resolve_state(alpha, concurrence)
    spec = ChannelSpec(family, mu, rate)
    decay = DecayPoint(endpoint)
    rho = evolved_closed_form(spec, state, decay)
    report = density_report(rho, kraus_discrepancy(spec, state, decay))
    logger.info(f"Evolved {family} mu={mu} alpha={state.alpha:.6g} to endpoint {endpoint}")
    if fmt == 'csv':
        text = density_to_csv(report)
    else:
        text = to_json({'family': spec.family.value, 'mu': mu, 'alpha': state.alpha,
                        'concurrence': state.concurrence, 'endpoint': endpoint, **report})
    write_output(text, out)


@cli.command()
@channel_options
@click.option('--bound', type=click.Choice(['pure', 'mixed']), default='pure', help='Which speed limit.')
@click.option('--endpoint', type=click.FloatRange(0.0, 1.0, min_open=True), default=None,
              help='Final decay parameter (pure bound).')
@click.option('--tau', type=click.FloatRange(0.0), default=None, help='Window start (mixed bound).')
@click.option('--tau-d', type=click.FloatRange(0.0, min_open=True), default=None,
              help='Driving time (mixed bound).')
@output_options(['json', 'csv'])
@handle_errors
def qslt(family, mu, alpha, concurrence, rate, bound, endpoint, tau, tau_d, out, fmt):
    """Compute the pure- or mixed-state quantum speed limit."""
    if bound == 'pure' and endpoint is None:
        raise click.UsageError("--bound pure requires --endpoint")
    if bound == 'mixed' and (tau is None or tau_d is None):
        raise click.UsageError("--bound mixed requires --tau and --tau-d")
    state = resolve_state(alpha, concurrence)
    spec = ChannelSpec(family, mu, rate)

    if bound == 'pure':
        decay = DecayPoint(endpoint)
        result = qslt_pure_ratio(PureBoundQuery(spec, state, decay))
        if result.oracle is None and spec.family.value == 'ad' and mu == 0.0 and state.beta > 0.0:
            result.oracle = memoryless_ad_oracle(state, decay)
        inputs = {'endpoint': endpoint}
    else:
        result = qslt_mixed(MixedBoundQuery(spec, state, tau, tau_d))
        if spec.family.value == 'pd':
            result.oracle = pd_mixed_closed_form(state, mu, tau, tau_d, spec.rate)
        inputs = {'tau': tau, 'tau_d': tau_d, 'rate': spec.rate}

    payload = {'family': spec.family.value, 'mu': mu, 'alpha': state.alpha,
               'concurrence': state.concurrence, **inputs, **result.to_dict()}
    write_output(record_to_csv(payload) if fmt == 'csv' else to_json(payload), out)


@cli.command()
@click.option('--family', type=click.Choice(['ad', 'pd', 'depol'], case_sensitive=False), default=None,
              help='Channel family of a grid scan.')
@click.option('--critical', type=click.Choice(['p-tau-c', 'c-c', 'mu-critical']), default=None,
              help='Run a critical-value search instead of a grid scan.')
@click.option('--mu-values', callback=parse_float_list, default=None, help='Comma-separated mu values.')
@click.option('--c-values', callback=parse_float_list, default=None, help='Comma-separated concurrences.')
@click.option('--endpoint-values', callback=parse_float_list, default=None,
              help='Comma-separated decay endpoints.')
@click.option('--c', 'c_value', type=float, default=None, help='Concurrence for p-tau-c and mu-critical.')
@click.option('--mu', 'mu_value', type=float, default=None, help='mu for p-tau-c and c-c.')
@click.option('--p-tau', type=float, default=None, help='Endpoint for c-c and mu-critical.')
@output_options(['csv', 'json'])
@click.pass_context
@handle_errors
def scan(ctx, family, critical, mu_values, c_values, endpoint_values, c_value, mu_value, p_tau, out, fmt):
    """Grid scan of the pure-bound ratio, or a critical-value search."""
    figures = ctx.obj['config'].get('figures', {})
    service = ScanService(figures=figures)

    if critical is not None:
        required = {'p-tau-c': ('c', 'mu'), 'c-c': ('mu', 'p-tau'), 'mu-critical': ('c', 'p-tau')}[critical]
        given = {'c': c_value, 'mu': mu_value, 'p-tau': p_tau}
        missing = [f"--{name}" for name in required if given[name] is None]
        if missing:
            raise click.UsageError(f"--critical {critical} requires {' and '.join(missing)}")
        if critical == 'p-tau-c':
            result = service.find_p_tau_c(c_value, mu_value)
        elif critical == 'c-c':
            result = service.find_c_c(mu_value, p_tau)
        else:
            result = service.find_mu_critical(c_value, p_tau)
        log_cache_stats()
        payload = {'critical': critical, **{k.replace('-', '_'): v for k, v in given.items() if v is not None},
                   **result.to_dict()}
        write_output(record_to_csv(payload) if fmt == 'csv' else to_json(payload), out)
        return

    if family is None:
        raise click.UsageError("A grid scan requires --family")
    grid = ScanGrid(
        family,
        tuple(mu_values or figures.get('mu_values', [0.0, 0.3, 0.6, 1.0])),
        tuple(c_values or [k / 10.0 for k in range(11)]),
        tuple(endpoint_values or [float(figures.get('fixed_endpoint', 0.5))])
    )
    rows = service.run_grid(grid)
    log_cache_stats()
    write_output(render_rows(rows, fmt), out)


@cli.command()
@click.argument('figure_id', type=click.Choice(FIGURE_IDS))
@click.option('--points', type=click.IntRange(min=2), default=None, help='Points per swept axis.')
@output_options(['csv', 'json', 'svg'])
@click.pass_context
@handle_errors
def figure(ctx, figure_id, points, out, fmt):
    """Regenerate the dataset behind a figure."""
    service = ScanService(figures=ctx.obj['config'].get('figures', {}))
    rows = service.figure_dataset(figure_id, points)
    log_cache_stats()
    write_output(render_rows(rows, fmt, title=figure_id), out)


@cli.command()
@click.option('--inject-kraus-fault', 'fault', type=float, default=None,
              help='Scale the first Kraus operator by (1 + DELTA) in the channel checks.')
@output_options(['text', 'json'])
@handle_errors
def validate(fault, out, fmt):
    """Run the invariant and reference-value checks."""
    suite = ValidationSuite(fault_delta=fault)
    checks = suite.run()
    log_cache_stats()
    if fmt == 'json':
        text = to_json({'passed': suite.passed, 'checks': [c.to_dict() for c in checks]})
    else:
        text = format_report(checks)
    write_output(text, out)
    sys.exit(ExitCode.SUCCESS if suite.passed else ExitCode.FAILURE)


@cli.command()
@click.option('--details', is_flag=True, help='Also show the decay parameter and closed-form oracle.')
def channels(details):
    """List the available channel families."""
    for model in get_all_models():
        click.echo(f"{model['id']:<6} {model['name']:<18} {model['description']}")
        if details:
            info = get_model_info(model['id'])
            click.echo(f"       decay parameter {info['decay_symbol']}, closed form: {info['closed_form_oracle']}, "
                       f"docs: {info['documentation']}")
