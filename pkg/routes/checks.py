"""
Check Commands

Subcommands that test the covering statement and its supporting chain on
concrete sets: verify, trace-base, trace-induct, scan, sharp and selftest.
Each exits 1 when a step fails or a red flag is raised.
"""
import logging

import click

from config import Config
from routes.common import (
    EXIT_FAILED,
    EXIT_OK,
    budget_option,
    dimension_option,
    field_options,
    input_option,
    int_list,
    make_services,
    output_options,
    reporting,
    resolve_field,
    seed_option,
)
from services.pointsets import load_pointset
from services.proofcheck import SCAN_FAMILIES
from services.selftest import run_selftest

logger = logging.getLogger(__name__)


@click.command('verify')
@input_option
@seed_option
@budget_option
@output_options
@reporting('verify')
def verify_command(input_path, seed, budget, out, fmt):
    """Witness certificate for vol(E) = F_q."""
    E = load_pointset(input_path)
    _, checks = make_services(budget)
    certificate = checks.verify_theorem(E, seed=seed)
    return {'certificate': certificate.to_dict()}, EXIT_FAILED if certificate.red_flag else EXIT_OK


@click.command('trace-base')
@input_option
@seed_option
@budget_option
@output_options
@reporting('trace-base')
def trace_base_command(input_path, seed, budget, out, fmt):
    """Replay the F_q^3 inequality chain on E."""
    E = load_pointset(input_path, expected_d=3)
    _, checks = make_services(budget)
    trace = checks.trace_base_case(E, seed=seed)
    return {'trace': trace.to_dict()}, EXIT_OK if trace.overall else EXIT_FAILED


@click.command('trace-induct')
@input_option
@seed_option
@budget_option
@output_options
@reporting('trace-induct')
def trace_induct_command(input_path, seed, budget, out, fmt):
    """Replay the step from d-1 to d (d >= 4) on E."""
    E = load_pointset(input_path)
    _, checks = make_services(budget)
    trace = checks.trace_induction_step(E, seed=seed)
    return {'trace': trace.to_dict()}, EXIT_OK if trace.overall else EXIT_FAILED


@click.command('scan')
@field_options
@dimension_option
@click.option('--sizes', callback=int_list, required=True, help='Set sizes to scan, e.g. 18,20,27')
@click.option('--trials', type=click.IntRange(min=1), default=20, show_default=True)
@click.option('--family', type=click.Choice(SCAN_FAMILIES), default='uniform', show_default=True)
@seed_option
@output_options
@reporting('scan')
def scan_command(p, k, modulus, d, sizes, trials, family, seed, out, fmt):
    """Coverage frequency of seeded random sets of each size."""
    spec = resolve_field(p, k, modulus)
    _, checks = make_services(None)
    table = checks.scan_threshold(spec, d, sizes, trials, seed=seed, family=family)
    return table.to_dict(), EXIT_OK


@click.command('sharp')
@field_options
@dimension_option
@output_options
@reporting('sharp')
def sharp_command(p, k, modulus, d, out, fmt):
    """vol of the coordinate hyperplane {y_d = 0}, expected to be {0}."""
    spec = resolve_field(p, k, modulus)
    _, checks = make_services(None)
    certificate = checks.sharpness_demo(spec, d)
    results = {'volume_set': certificate.covered_values, 'certificate': certificate.to_dict()}
    return results, EXIT_OK if certificate.covered_values == [0] else EXIT_FAILED


@click.command('selftest')
@seed_option
@output_options
@reporting('selftest')
def selftest_command(seed, out, fmt):
    """Run the invariant suites at q in {3, 5}, d in {2, 3}."""
    checks = run_selftest(Config.SEED if seed is None else seed)
    passed = all(c['passed'] for c in checks)
    return {'passed': passed, 'table': checks}, EXIT_OK if passed else EXIT_FAILED


check_commands = [
    verify_command,
    trace_base_command,
    trace_induct_command,
    scan_command,
    sharp_command,
    selftest_command,
]
