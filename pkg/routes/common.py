"""
Command Plumbing

Shared click options and the decorator that turns a command body into a
report: it times the call, maps errors to error reports and exit codes,
serialises the report and writes it to stdout or --out.
"""
import functools
import logging
import re
import time
from typing import Callable, Optional, Tuple

import click

from config import Config
from models import BilinearForm, FieldSpec, PointSet
from services.errors import BudgetExceeded, VolsetError
from services.gf import make_field
from services.linalg import make_form
from services.pointsets import load_pointset
from services.proofcheck import ProofCheckService
from services.reports import FORMATS, build_report, emit_report, error_report, write_atomic
from services.volset import VolumeSetService

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_INPUT = 4

# parameters that shape the output channel, not the result
_CHANNEL = ('out', 'fmt')


def int_list(ctx, param, value) -> Optional[Tuple[int, ...]]:
    if value is None:
        return None
    try:
        return tuple(int(v) for v in re.split(r'[,\s]+', value.strip()) if v)
    except ValueError:
        raise click.BadParameter(f'expected integers separated by commas or spaces, got {value!r}')


def field_options(func: Callable) -> Callable:
    """--p --k --mod for commands that build their own field."""
    func = click.option('--mod', 'modulus', callback=int_list,
                        help='Modulus coefficients c0,...,ck (low degree first), k > 1 only')(func)
    func = click.option('--k', 'k', type=int, default=1, show_default=True, help='Extension degree')(func)
    func = click.option('--p', 'p', type=int, required=True, help='Odd prime characteristic')(func)
    return func


def dimension_option(func: Callable) -> Callable:
    return click.option('--d', 'd', type=click.IntRange(min=2), required=True, help='Ambient dimension')(func)


def input_option(func: Callable) -> Callable:
    return click.option('--input', '-i', 'input_path', type=click.Path(exists=True, dir_okay=False),
                        required=True, help='Point-set file for E')(func)


def second_option(func: Callable) -> Callable:
    return click.option('--second', 'second_path', type=click.Path(exists=True, dir_okay=False),
                        help='Point-set file for F (default: F = E)')(func)


def seed_option(func: Callable) -> Callable:
    return click.option('--seed', type=int, help='Random seed (default: VOLSET_SEED)')(func)


def budget_option(func: Callable) -> Callable:
    return click.option('--budget', type=click.IntRange(min=1),
                        help='Tuple budget for exhaustive work (default: VOLSET_BUDGET)')(func)


def form_options(func: Callable) -> Callable:
    """--dot or --form <d*d ints>."""
    func = click.option('--form', 'gram', callback=int_list, help='Gram matrix as d*d integers, row by row')(func)
    func = click.option('--dot', 'use_dot', is_flag=True, help='Use the dot product')(func)
    return func


def output_options(func: Callable) -> Callable:
    func = click.option('--format', 'fmt', type=click.Choice(FORMATS), default='json', show_default=True)(func)
    func = click.option('--out', type=click.Path(dir_okay=False), help='Write the report here instead of stdout')(func)
    return func


def resolve_field(p: int, k: int, modulus) -> FieldSpec:
    return make_field(p, k, modulus)


def resolve_form(spec: FieldSpec, d: int, use_dot: bool, gram) -> BilinearForm:
    """The form selected by --dot / --form."""
    if use_dot == (gram is not None):
        raise click.UsageError('give exactly one of --dot and --form')
    if use_dot:
        return BilinearForm.identity(spec, d)
    if len(gram) != d * d:
        raise click.BadParameter(f'expected {d * d} entries for a {d}x{d} Gram matrix, got {len(gram)}',
                                 param_hint='--form')
    return make_form(spec, [gram[i * d:(i + 1) * d] for i in range(d)])


def load_pair(input_path: str, second_path: Optional[str]) -> Tuple[PointSet, PointSet]:
    E = load_pointset(input_path)
    F = load_pointset(second_path, expected_d=E.d) if second_path else E
    if F.spec != E.spec:
        raise VolsetError(f'{second_path} is over {F.spec}, {input_path} over {E.spec}')
    return E, F


def make_services(budget: Optional[int]) -> Tuple[VolumeSetService, ProofCheckService]:
    """Per-invocation services honouring --budget."""
    volsets = VolumeSetService(budget=budget)
    return volsets, ProofCheckService(volsets)


def reporting(command: str) -> Callable:
    """
    Turn a command body into a report.

    The body returns (results, exit_code). Its keyword arguments, minus
    the output channel, become the report parameters; seed and budget are
    recorded at their effective values.
    """
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        @click.pass_context
        def wrapper(ctx: click.Context, **kwargs):
            parameters = {k: v for k, v in kwargs.items() if k not in _CHANNEL and v is not None}
            if 'seed' in kwargs and kwargs['seed'] is None:
                parameters['seed'] = Config.SEED
            if 'budget' in kwargs and kwargs['budget'] is None:
                parameters['budget'] = Config.BUDGET

            started = time.perf_counter()
            try:
                results, code = func(**kwargs)
                report = build_report(command, parameters, results, time.perf_counter() - started, code)
            except BudgetExceeded as e:
                logger.error(f'{command}: {e.message}')
                report = error_report(command, parameters, e.message, e.code, EXIT_BUDGET)
            except VolsetError as e:
                logger.error(f'{command}: {e.message}')
                report = error_report(command, parameters, e.message, e.code, EXIT_INPUT)
            except (ValueError, ZeroDivisionError) as e:
                logger.error(f'{command}: {e}')
                report = error_report(command, parameters, str(e), 'INVALID_INPUT', EXIT_INPUT)
            logger.info(f'{command} finished in {time.perf_counter() - started:.3f}s (exit {report.exit_code})')

            data = emit_report(report, kwargs.get('fmt', 'json'))
            if kwargs.get('out'):
                write_atomic(kwargs['out'], data)
            else:
                click.echo(data, nl=False)
            if isinstance(ctx.obj, dict):
                ctx.obj['report'] = report
            if report.exit_code:
                ctx.exit(report.exit_code)
        return wrapper
    return decorator
