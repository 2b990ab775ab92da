"""
Computation Commands

Subcommands that compute one object and report it: volset, cross, nu,
bstar, dot, grass and gen.
"""
import logging

import click
import numpy as np

from config import Config
from routes.common import (
    EXIT_FAILED,
    EXIT_INPUT,
    EXIT_OK,
    budget_option,
    dimension_option,
    field_options,
    form_options,
    input_option,
    int_list,
    load_pair,
    make_services,
    output_options,
    reporting,
    resolve_field,
    resolve_form,
    second_option,
    seed_option,
)
from services.errors import VolsetError
from services.grassmann import enumerate_subspaces, gaussian_binomial
from services.pointsets import (
    coordinate_hyperplane,
    emit_pointset,
    full_space,
    hyperplane_subset,
    load_pointset,
    random_subset,
)
from services.proofcheck import star_bound_operands, star_bound_text
from services.reports import write_atomic
from services.volset import VOLUME_MODES

logger = logging.getLogger(__name__)

GEN_FAMILIES = ('full', 'uniform', 'hyperplane', 'coordinate')


@click.command('volset')
@input_option
@click.option('--mode', type=click.Choice(VOLUME_MODES), default='wedge', show_default=True)
@budget_option
@output_options
@reporting('volset')
def volset_command(input_path, mode, budget, out, fmt):
    """vol(E): every determinant of d rows drawn from E."""
    E = load_pointset(input_path)
    volsets, _ = make_services(budget)
    values = volsets.volume_set(E, mode)
    return {'size': len(E), 'volume_set': values.to_dict()}, EXIT_OK


@click.command('cross')
@input_option
@click.option('--mode', type=click.Choice(('wedge', 'decomposed')), default='wedge', show_default=True)
@click.option('--counts', is_flag=True, help='Include the multiplicity g_E of every wedge value')
@budget_option
@output_options
@reporting('cross')
def cross_command(input_path, mode, counts, budget, out, fmt):
    """F*_E: the nonzero wedge values of (d-1)-tuples of E."""
    E = load_pointset(input_path)
    volsets, _ = make_services(budget)
    results = {'size': len(E)}
    if mode == 'decomposed':
        vectors, records = volsets.decomposed_cross_product(E)
        results['cross_product_set'] = vectors.to_dict()
        results['hyperplanes'] = [r.to_dict() for r in records]
    else:
        results['cross_product_set'] = volsets.cross_product_set(E).to_dict()
    if counts:
        results['wedge_counter'] = volsets.wedge_counter(E).to_dict()
    return results, EXIT_OK


@click.command('nu')
@input_option
@second_option
@form_options
@click.option('--t', 't', type=int, help='Report nu_t for this value alone as well')
@output_options
@reporting('nu')
def nu_command(input_path, second_path, use_dot, gram, t, out, fmt):
    """Incidence counts nu_t(E, F) for a bilinear form, with their error bounds."""
    E, F = load_pair(input_path, second_path)
    form = resolve_form(E.spec, E.d, use_dot, gram)
    volsets, checks = make_services(None)
    table = volsets.incidence_count(E, F, form)
    trace = checks.trace_incidence_bound(E, F, form)
    results = table.to_dict()
    if t is not None:
        if not 0 <= t < E.spec.q:
            raise click.BadParameter(f't={t} is not an element index of {E.spec}', param_hint='--t')
        results['t'] = t
        results['nu'] = table.counts[t]
    results['trace'] = trace.to_dict()
    return results, EXIT_OK if trace.overall else EXIT_FAILED


@click.command('bstar')
@input_option
@form_options
@output_options
@reporting('bstar')
def bstar_command(input_path, use_dot, gram, out, fmt):
    """B*(E) for E in F_q^2: nonzero form values over E x E."""
    E = load_pointset(input_path, expected_d=2)
    form = resolve_form(E.spec, 2, use_dot, gram)
    volsets, _ = make_services(None)
    values = volsets.bstar(E, form)
    lhs, rhs = star_bound_operands(len(values), len(E), E.spec.q)
    results = {
        'size': len(E),
        'bstar': values.to_dict(),
        'lower_bound': star_bound_text('|E|'),
        'squared_sides': [lhs, rhs],
        'meets_bound': lhs >= rhs,
    }
    return results, EXIT_OK if lhs >= rhs else EXIT_FAILED


@click.command('dot')
@input_option
@second_option
@output_options
@reporting('dot')
def dot_command(input_path, second_path, out, fmt):
    """E·F, checked against the |E||F| > q^(d+1) covering condition."""
    E, F = load_pair(input_path, second_path)
    volsets, checks = make_services(None)
    values = volsets.dot_product_set(E, F)
    trace = checks.trace_dot_coverage(E, F)
    condition, covered = trace.steps
    results = {'dot_product_set': values.to_dict(), 'condition_met': condition.passed, 'trace': trace.to_dict()}
    # only a covering failure under the condition is a finding
    return results, EXIT_FAILED if condition.passed and not covered.passed else EXIT_OK


@click.command('grass')
@click.option('--p', 'p', type=int, required=True, help='Odd prime characteristic')
@click.option('--ext', 'k', type=int, default=1, show_default=True,
              help='Extension degree (--k is the subspace dimension here)')
@click.option('--mod', 'modulus', callback=int_list, help='Modulus coefficients c0,...,ck')
@dimension_option
@click.option('--k', 'dim_k', type=click.IntRange(min=0), required=True, help='Subspace dimension')
@click.option('--count', 'count_only', is_flag=True, help='Report the Gaussian binomial only')
@output_options
@reporting('grass')
def grass_command(p, k, modulus, d, dim_k, count_only, out, fmt):
    """G(k, d): count or list the k-dimensional subspaces of F_q^d."""
    spec = resolve_field(p, k, modulus)
    count = gaussian_binomial(dim_k, d, spec.q)
    if count_only:
        return {'count': count}, EXIT_OK
    family = enumerate_subspaces(dim_k, d, spec)
    return {'count': count, 'family': family.to_dict()}, EXIT_FAILED if len(family) != count else EXIT_OK


@click.command('gen')
@field_options
@dimension_option
@click.option('--family', type=click.Choice(GEN_FAMILIES), default='uniform', show_default=True)
@click.option('--size', type=click.IntRange(min=0), help='Number of points (uniform and hyperplane families)')
@seed_option
@click.option('--out', type=click.Path(dir_okay=False), help='Write the point-set file here instead of stdout')
@click.pass_context
def gen_command(ctx, p, k, modulus, d, family, size, seed, out):
    """Write a point-set file: full space, coordinate hyperplane, or a seeded random set."""
    seed = Config.SEED if seed is None else seed
    if family in ('uniform', 'hyperplane') and size is None:
        raise click.UsageError(f'--size is required for the {family} family')

    try:
        spec = resolve_field(p, k, modulus)
        if family == 'full':
            E = full_space(spec, d)
        elif family == 'coordinate':
            E = coordinate_hyperplane(spec, d)
        else:
            draw = random_subset if family == 'uniform' else hyperplane_subset
            E = draw(spec, d, size, np.random.default_rng(seed))
    except VolsetError as e:
        logger.error(f'gen: {e.message}')
        click.echo(f'Error: {e.message}', err=True)
        ctx.exit(EXIT_INPUT)
    logger.info(f'Generated {len(E)} points ({family}, seed {seed})')

    text = emit_pointset(E)
    if out:
        write_atomic(out, text.encode('utf-8'))
    else:
        click.echo(text, nl=False)


computation_commands = [
    volset_command,
    cross_command,
    nu_command,
    bstar_command,
    dot_command,
    grass_command,
    gen_command,
]
