""" Command line interface for Monte Carlo studies of one scenario
"""
from dataclasses import replace
import logging

import click

from ..config_parser import RunConfig, resolve_scenario
from ..simulation.montecarlo import DEFAULT_METHODS, Method, run_mc
from ..utils import dumps_report, timestamp
from . import options

logger = logging.getLogger('robj2r')


def _methods_callback(ctx, param, value):
    try:
        return [Method.parse(v) for v in value.split(',') if v.strip()]
    except ValueError as e:
        raise click.BadParameter(str(e))


@click.command(short_help='Run a Monte Carlo study of a scenario')
@click.option('--scenario', '-s', default='normal-h1', show_default=True,
              metavar='<name|yaml>',
              help='Built-in scenario name or scenario YAML file')
@click.option('--methods', default=','.join(m.value for m in
                                            DEFAULT_METHODS),
              show_default=True, callback=_methods_callback,
              help='Comma-separated methods to compare')
@options.opt_reps
@options.opt_seed
@click.option('--bootstrap-b', 'B', default=0, show_default=True, type=int,
              metavar='<B>', callback=options.valid_bootstrap_b,
              help='Bootstrap replicates per estimate (0 to skip)')
@options.opt_mi_m
@click.option('--n-per-arm', default=None, type=int, metavar='<n>',
              callback=options.valid_int_gt_zero,
              help='Override the scenario sample size per arm')
@click.option('--oracle-n', default=0, show_default=True, type=int,
              metavar='<n>',
              help='Subjects for the Monte Carlo J2R truth (0 to skip)')
@click.option('--replicates-csv', default=None, metavar='<csv>',
              type=click.Path(writable=True, dir_okay=False),
              help='Write per-replicate records to this CSV')
@options.opt_out
@click.pass_context
@options.report_errors
def simulate(ctx, scenario, methods, reps, seed, B, M, n_per_arm, oracle_n,
             replicates_csv, out):
    try:
        sc = resolve_scenario(scenario)
    except (KeyError, ValueError) as e:
        raise click.BadParameter(str(e), param_hint='--scenario')
    if n_per_arm:
        sc = replace(sc, n_per_arm=n_per_arm)
    reps = reps or 100
    n_jobs = ctx.obj.get('threads', 1) if ctx.obj else 1

    report = run_mc(sc, methods, reps=reps, B=B, M=M, seed=seed,
                    n_jobs=n_jobs, oracle_n=oracle_n)
    if replicates_csv:
        report.write_records_csv(replicates_csv)

    run_cfg = RunConfig('simulate', seed=seed, scenario=sc.name,
                        methods=[m.value for m in methods], B=B, M=M,
                        reps=reps, threads=n_jobs, out=out,
                        extra={'oracle_n': oracle_n})
    options.emit_report(dumps_report({'created': timestamp(),
                                      'config': run_cfg.to_dict(),
                                      'results': report.to_dict()}), out)
