""" Loads all commands for the robj2r command line interface

Modeled after the ``click`` interface of ``rasterio``:
https://github.com/mapbox/rasterio/blob/master/rasterio/rio/main.py

"""
from importlib.metadata import entry_points
import logging
import os
import sys

import click
import click_plugins

import robj2r
from . import options

logger = logging.getLogger('robj2r')

# NumPy linear algebra multithreading related variables
NP_THREAD_VARS = ['OPENBLAS_NUM_THREADS', 'MKL_NUM_THREADS', 'OMP_NUM_THREADS']


def set_np_thread_vars(n):
    for envvar in NP_THREAD_VARS:
        if envvar in os.environ and os.environ[envvar] != str(n):
            logger.warning('Overriding %s with --threads=%i' % (envvar, n))
        os.environ[envvar] = str(n)


# If --threads set, parse it before click CLI interface so envvars are
# set BEFORE numpy is imported by the commands
if '--threads' in sys.argv[1:-1]:
    n_threads = sys.argv[sys.argv.index('--threads') + 1]
    try:
        set_np_thread_vars(int(n_threads))
    except ValueError:
        pass  # reported by the option validator

from .analyze import analyze  # noqa: E402
from .reproduce import reproduce  # noqa: E402
from .simulate import simulate  # noqa: E402

_context = dict(
    token_normalize_func=lambda x: x.lower(),
    help_option_names=['--help', '-h']
)


@click_plugins.with_plugins(
    entry_points(group='robj2r.robj2r_commands'))
@click.group(help='Robust jump-to-reference ATE estimation',
             context_settings=_context)
@click.version_option(robj2r.__version__)
@click.option('--threads', metavar='<threads>', default=1, type=int,
              show_default=True, callback=options.valid_int_gt_zero,
              help='Number of threads for OPENBLAS/MKL/OMP and joblib '
                   'workers')
@click.option('--verbose', '-v', is_flag=True, help='Be verbose')
@click.option('--quiet', '-q', is_flag=True, help='Be quiet')
@click.pass_context
def cli(ctx, threads, verbose, quiet):
    # Logging config
    if verbose:
        logger.setLevel(logging.DEBUG)
    if quiet:
        logger.setLevel(logging.WARNING)
    ctx.ensure_object(dict)
    ctx.obj['threads'] = threads


cli.add_command(analyze)
cli.add_command(simulate)
cli.add_command(reproduce)
