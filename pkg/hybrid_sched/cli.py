'''
Command line interface. Exit codes: 0 success, 1 a check failed,
2 usage, parse or config error.
'''
from fractions import Fraction
from functools import wraps
import logging
import os
from typing import Any, Callable, Optional, TypeVar
import click
from inifile import IniFile
from .baselines import POLICIES, UnknownPolicyError, baseline_run
from .config import MODELS, WEIGHTS, ConfigError, GeneratorConfig
from .dispatcher import NoRouteError
from .dual import certify
from .engine import IncompleteLogError
from .metrics import run_cost
from .model import InstanceError
from .oracle import OracleLimits, OracleScaleError, brute_force_opt
from .report import (
    comparison_rows, format_runlog, write_certification, write_comparison,
    write_oracle, write_packets
)
from .util import fmt_rational, parse_rational
from .workload import ParseError, generate as generate_instance
from .workload import load_instance, serialize_instance

logger = logging.getLogger(__name__)

F = TypeVar('F', bound=Callable[..., Any])

# errors of the input, not of the algorithm
INPUT_ERRORS = (ParseError, InstanceError, NoRouteError, ConfigError,
                OracleScaleError, UnknownPolicyError, IncompleteLogError,
                OSError, UnicodeDecodeError)


class RationalType(click.ParamType):
    name = 'p/q'

    def convert(self, value: Any, param: Any, ctx: Any) -> Fraction:
        if isinstance(value, Fraction):
            return value
        try:
            return parse_rational(str(value))
        except ValueError as e:
            self.fail(str(e), param, ctx)


RATIONAL = RationalType()


def input_errors(fn: F) -> F:
    ''' Report input errors on stderr and exit with code 2. '''
    @wraps(fn)
    def wrapper(*args: Any, **kwargs: Any) -> Any:
        try:
            return fn(*args, **kwargs)
        except INPUT_ERRORS as e:
            click.echo(f'Error: {e}', err=True)
            raise SystemExit(2)
    return wrapper  # type: ignore


def _out_file(out_dir: str, name: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    return os.path.join(out_dir, name)


def _open(path: str) -> Any:
    return open(path, 'w', encoding='utf-8', newline='')


instance_option = click.option(
    '--instance', 'instance_path', required=True,
    type=click.Path(exists=True, dir_okay=False), help='Instance file.')
epsilon_option = click.option(
    '--epsilon', type=RATIONAL, default='1', show_default=True,
    help='Speed augmentation ε as p/q, must be > 0.')
out_dir_option = click.option(
    '--out-dir', default='.', show_default=True,
    type=click.Path(file_okay=False), help='Directory for the output files.')


@click.group()
@click.option('-v', '--verbose', count=True, help='-v info, -vv debug.')
def cli(verbose: int) -> None:
    ''' Online scheduling in hybrid reconfigurable networks. '''
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(verbose, 2)]
    logging.basicConfig(level=level, format='%(levelname)s %(name)s: %(message)s')


@cli.command()
@instance_option
@click.option('--policy', type=click.Choice(list(POLICIES)), default='alg',
              show_default=True)
@click.option('--seed', type=int, default=0, show_default=True,
              help='Seed of random-dispatch.')
@out_dir_option
@input_errors
def simulate(instance_path: str, policy: str, seed: int,
             out_dir: str) -> None:
    ''' Run one policy, write runlog.txt and packets.csv. '''
    instance = load_instance(instance_path)
    log = baseline_run(instance, policy, seed)
    with _open(_out_file(out_dir, 'runlog.txt')) as fp:
        fp.write(format_runlog(log))
    with _open(_out_file(out_dir, 'packets.csv')) as fp:
        write_packets(fp, log)
    click.echo(f'cost {fmt_rational(run_cost(log))}')


@cli.command()
@instance_option
@epsilon_option
@click.option('--all-lemmas', is_flag=True,
              help='Also run the full constraint sweeps.')
@out_dir_option
@input_errors
def verify(instance_path: str, epsilon: Fraction, all_lemmas: bool,
           out_dir: str) -> None:
    ''' Run ALG, fit the dual and check it. Exit 1 if any check fails. '''
    if epsilon <= 0:
        raise click.BadParameter('must be > 0', param_hint='--epsilon')
    instance = load_instance(instance_path)
    log = baseline_run(instance, 'alg')
    reports = certify(log, epsilon, all_lemmas=all_lemmas)
    with _open(_out_file(out_dir, 'certification.csv')) as fp:
        write_certification(fp, reports)
    for r in reports:
        click.echo(f'{r.check:<20} {r.status} ({r.constraints_checked} checked)')
    if not all(r.ok for r in reports):
        raise SystemExit(1)


@cli.command()
@instance_option
@click.option('--max-packets', type=int, default=OracleLimits().max_packets,
              show_default=True)
@out_dir_option
@input_errors
def oracle(instance_path: str, max_packets: int, out_dir: str) -> None:
    ''' Exhaustive optimum, write oracle.csv and oracle_schedule.csv. '''
    instance = load_instance(instance_path)
    result = brute_force_opt(instance, OracleLimits(max_packets=max_packets))
    with _open(_out_file(out_dir, 'oracle.csv')) as fp:
        write_oracle(fp, result)
    with _open(_out_file(out_dir, 'oracle_schedule.csv')) as fp:
        write_packets(fp, result.log)
    click.echo(f'cost {fmt_rational(result.cost)}')


@cli.command()
@click.option('--config', 'config_path', default=None,
              type=click.Path(exists=True, dir_okay=False),
              help='Ini file with generator settings.')
@click.option('--section', default='generator', show_default=True,
              help='Section of the ini file.')
@click.option('--model', type=click.Choice(MODELS), default=None)
@click.option('--seed', type=int, default=None)
@click.option('--packets', type=int, default=None)
@click.option('--sources', type=int, default=None)
@click.option('--destinations', type=int, default=None)
@click.option('--transmitters', type=int, default=None,
              help='Transmitters per source.')
@click.option('--receivers', type=int, default=None,
              help='Receivers per destination.')
@click.option('--weights', type=click.Choice(WEIGHTS), default=None)
@click.option('--skew', type=float, default=None)
@click.option('--rate', type=float, default=None)
@click.option('--burst-on', type=int, default=None)
@click.option('--burst-off', type=int, default=None)
@click.option('--out', required=True, type=click.Path(dir_okay=False))
@input_errors
def generate(config_path: Optional[str], section: str, out: str,
             **options: Any) -> None:
    ''' Write a synthetic instance. Options override the ini values. '''
    if config_path:
        cfg = GeneratorConfig.from_ini(section, IniFile(config_path))
    else:
        cfg = GeneratorConfig(section)
    cfg = cfg.updated(options)
    instance = generate_instance(cfg)
    with _open(out) as fp:
        fp.write(serialize_instance(instance))
    click.echo(f'{len(instance.packets)} packets written to {out}')


@cli.command()
@instance_option
@epsilon_option
@click.option('--seed', type=int, default=0, show_default=True,
              help='Seed of random-dispatch.')
@click.option('--max-packets', type=int, default=OracleLimits().max_packets,
              show_default=True)
@out_dir_option
@input_errors
def compare(instance_path: str, epsilon: Fraction, seed: int,
            max_packets: int, out_dir: str) -> None:
    ''' All policies against the dual bound and the oracle. '''
    if epsilon <= 0:
        raise click.BadParameter('must be > 0', param_hint='--epsilon')
    instance = load_instance(instance_path)
    rows = comparison_rows(instance, epsilon, seed=seed,
                           limits=OracleLimits(max_packets=max_packets))
    with _open(_out_file(out_dir, 'comparison.csv')) as fp:
        write_comparison(fp, rows)
    for row in rows:
        click.echo('{policy:<16} {cost}'.format(**row))


main = cli

if __name__ == '__main__':
    cli()
