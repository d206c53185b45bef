""" Command line interface for re-running a published simulation table
"""
import logging

import click

from ..config_parser import RunConfig
from ..simulation.reproduce import (ORACLE_N, TABLES,
                                   reproduce as run_reproduce)
from ..utils import dumps_report, timestamp
from . import options

logger = logging.getLogger('robj2r')

#: Exit status when any reproduced value falls outside its band
EXIT_VERDICT_FAILED = 1


def format_verdicts(verdicts):
    """ Plain-text comparison table """
    lines = ['%-55s %10s %12s  %s' % ('check', 'published', 'reproduced',
                                       'verdict')]
    for v in verdicts:
        lines.append('%-55s %10.3f %12.3f  %s' % (
            v['check'][:55], v['published'], v['reproduced'],
            v['verdict'].upper()))
    return '\n'.join(lines)


def format_truths(truths):
    lines = ['%-30s %10s %10s' % ('scenario', 'oracle', 'published')]
    for name, truth in sorted(truths.items()):
        oracle = ('n/a' if truth['oracle'] is None
                  else '%.4f' % truth['oracle'])
        lines.append('%-30s %10s %10.4f' % (name, oracle,
                                               truth['reference']))
    return '\n'.join(lines)


@click.command(short_help='Reproduce a simulation table with tolerance '
                          'checks')
@click.argument('table', metavar='<table>',
                type=click.Choice(sorted(TABLES)))
@options.opt_reps
@options.opt_seed
@click.option('--bootstrap-b', 'B', default=0, show_default=True, type=int,
              metavar='<B>', callback=options.valid_bootstrap_b,
              help='Bootstrap replicates per estimate (0 to skip)')
@options.opt_mi_m
@click.option('--n-per-arm', default=None, type=int, metavar='<n>',
              callback=options.valid_int_gt_zero,
              help='Override the scenario sample size per arm')
@click.option('--oracle-n', default=ORACLE_N, show_default=True, type=int,
              metavar='<n>',
              help='Subjects per arm for the oracle truth (0 to use the '
                   'published reference values)')
@options.opt_out
@click.pass_context
@options.report_errors
def reproduce(ctx, table, reps, seed, B, M, n_per_arm, oracle_n, out):
    n_jobs = ctx.obj.get('threads', 1) if ctx.obj else 1
    result = run_reproduce(table, reps=reps, seed=seed, B=B, M=M,
                           n_jobs=n_jobs, n_per_arm=n_per_arm,
                           oracle_n=oracle_n)
    run_cfg = RunConfig('reproduce', seed=seed, table=table,
                        reps=result['reps'], B=B, M=M, threads=n_jobs,
                        out=out,
                        extra={'n_per_arm': n_per_arm, 'oracle_n': oracle_n})
    report = {
        'created': timestamp(),
        'config': run_cfg.to_dict(),
        'table': result['table'],
        'title': result['title'],
        'truths': result['truths'],
        'verdicts': result['verdicts'],
        'passed': result['passed'],
        'scenarios': {name: r.to_dict()
                      for name, r in result['reports'].items()},
    }
    click.echo(format_truths(result['truths']), err=True)
    click.echo(format_verdicts(result['verdicts']), err=True)
    options.emit_report(dumps_report(report), out)
    if not result['passed']:
        ctx.exit(EXIT_VERDICT_FAILED)
