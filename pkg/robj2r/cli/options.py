""" Reusable options, validators and error reporting for the CLI """
import functools
import json
import logging

import click

from ..algorithms.ate_analysis import ModelForm, VarianceMethod
from ..algorithms.j2r_imputer import NuPolicy
from ..errors import J2RError
from ..regression.robust_loss import HUBER_L, LossSpec
from ..regression.weights import WeightMode
from ..utils import DEFAULT_SEED

logger = logging.getLogger('robj2r')

#: Exit status of a command stopped by a module error
EXIT_MODULE_ERROR = 2


# CLI VALIDATORS
def valid_int_gt_zero(ctx, param, value):
    """ Validator for integers > 0 (value >= 1)"""
    if value is None:
        return value
    try:
        value = int(value)
    except (TypeError, ValueError) as e:
        raise click.BadParameter('%s must be integer above zero: %s'
                                 % (param.metavar, e))
    if value <= 0:
        raise click.BadParameter('%s must be an integer above zero'
                                 % param.metavar)
    return value


def valid_bootstrap_b(ctx, param, value):
    """ 0 (no bootstrap) or at least 2 replicates """
    if value != 0 and value < 2:
        raise click.BadParameter('bootstrap needs at least 2 replicates '
                                 '(0 to skip)')
    return value


def valid_nu(ctx, param, value):
    try:
        return NuPolicy.parse(value, folds=ctx.params.get('cv_folds', 5),
                              seed=ctx.params.get('seed', DEFAULT_SEED))
    except ValueError as e:
        raise click.BadParameter(str(e))


def loss_from_options(kind, huber_l, eps):
    try:
        return LossSpec.parse(kind, huber_l=huber_l, eps=eps)
    except ValueError as e:
        raise click.BadParameter(str(e))


# CLI OPTIONS
opt_input = click.option(
    '--input', '-i', 'input_path', required=True, metavar='<csv>',
    type=click.Path(exists=True, readable=True, dir_okay=False),
    help='Trial CSV file')

opt_loss = click.option(
    '--loss', default='huber', show_default=True,
    type=click.Choice(['ls', 'huber', 'abs', 'eps']),
    help='Loss of the imputation regressions and the working model')

opt_analysis_loss = click.option(
    '--analysis-loss', default=None,
    type=click.Choice(['ls', 'huber', 'abs', 'eps']),
    help='Working-model loss, if different from --loss')

opt_huber_l = click.option(
    '--huber-l', default=HUBER_L, type=float, show_default=True,
    metavar='<l>', help='Huber tuning multiplier of the residual scale')

opt_eps = click.option(
    '--eps', default=0.0, type=float, show_default=True, metavar='<eps>',
    help='Width of the epsilon-insensitive zone')

# --cv-folds and --seed are eager so --nu can read them
opt_cv_folds = click.option(
    '--cv-folds', default=5, show_default=True, metavar='<K>',
    is_eager=True, callback=valid_int_gt_zero,
    help='Folds for --nu cv')

opt_nu = click.option(
    '--nu', default='fixed:10', show_default=True,
    metavar='<fixed:v|cv>', callback=valid_nu,
    help='Covariate-weight tuning constant per visit')

opt_form = click.option(
    '--form', default=ModelForm.INTERACTION.value, show_default=True,
    type=click.Choice([f.value for f in ModelForm]),
    help='Working-model form')

opt_weight_mode = click.option(
    '--weight-mode', default=WeightMode.NORMALIZED.value, show_default=True,
    type=click.Choice([m.value for m in WeightMode]),
    help='Trisquare covariate weight form')

opt_variance = click.option(
    '--variance', default=VarianceMethod.LINEARIZED.value, show_default=True,
    type=click.Choice([v.value for v in VarianceMethod]),
    help='Variance estimator(s)')

opt_bootstrap_b = click.option(
    '--bootstrap-b', 'B', default=200, show_default=True, type=int,
    metavar='<B>', callback=valid_bootstrap_b,
    help='Bootstrap replicates')

opt_mi_m = click.option(
    '--mi-m', 'M', default=10, show_default=True, type=int, metavar='<M>',
    help='Multiple imputations')

opt_reps = click.option(
    '--reps', default=None, type=int, metavar='<reps>',
    callback=valid_int_gt_zero, help='Monte Carlo replicates')

opt_seed = click.option(
    '--seed', default=DEFAULT_SEED, show_default=True, type=int,
    is_eager=True, metavar='<seed>', help='Root random seed')

opt_out = click.option(
    '--out', '-o', default=None, metavar='<json>',
    type=click.Path(writable=True, dir_okay=False),
    help='Write the JSON report here instead of stdout')


# OUTPUT
def emit_report(text, out=None):
    """ Write report text to ``out`` or stdout """
    if out:
        with open(out, 'w', encoding='utf-8') as f:
            f.write(text)
        logger.info('Wrote report to %s', out)
    else:
        click.echo(text, nl=False)


def error_report(exc):
    """ Machine-readable description of a module error """
    report = {'error': type(exc).__name__, 'message': str(exc)}
    for attr in ('visit', 'subject', 'pattern', 'failed', 'failures',
                 'total'):
        value = getattr(exc, attr, None)
        if value is not None:
            report[attr] = value
    cause = getattr(exc, 'cause', None)
    if cause is not None:
        report['cause'] = type(cause).__name__
    return report


def report_errors(func):
    """ Turn module errors into a JSON error object and exit status 2

    The error object is written to stderr and, when the command has an
    ``out`` path, to that file.
    """
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except J2RError as exc:
            logger.error('%s: %s', type(exc).__name__, exc)
            text = json.dumps(error_report(exc), sort_keys=True, default=str)
            click.echo(text, err=True)
            if kwargs.get('out'):
                with open(kwargs['out'], 'w', encoding='utf-8') as f:
                    f.write(text + '\n')
            click.get_current_context().exit(EXIT_MODULE_ERROR)
    return wrapper
