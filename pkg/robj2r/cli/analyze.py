""" Command line interface for estimating the ATE of one trial dataset
"""
import logging

import click

from ..algorithms.ate_analysis import PipelineConfig, estimate_ate
from ..algorithms.mi_baseline import MiConfig, run_mi
from ..config_parser import RunConfig
from ..trial_data import CsvSchema, load_csv
from ..utils import dumps_report, timestamp
from . import options

logger = logging.getLogger('robj2r')


@click.command(short_help='Estimate the J2R treatment effect of a CSV trial')
@options.opt_input
@options.opt_seed
@options.opt_cv_folds
@options.opt_loss
@options.opt_analysis_loss
@options.opt_huber_l
@options.opt_eps
@options.opt_nu
@options.opt_form
@options.opt_weight_mode
@options.opt_variance
@options.opt_bootstrap_b
@click.option('--mi-m', 'M', default=0, show_default=True, type=int,
              metavar='<M>',
              help='Also report multiple imputation with M imputations '
                   '(0 to skip)')
@click.option('--force-monotone', is_flag=True,
              help='Delete observations made after a missed visit instead '
                   'of rejecting the subject')
@click.option('--id-column', default='id', show_default=True,
              help='Subject identifier column')
@click.option('--treatment-column', default='trt', show_default=True,
              help='Treatment indicator column')
@options.opt_out
@click.pass_context
@options.report_errors
def analyze(ctx, input_path, seed, cv_folds, loss, analysis_loss, huber_l,
            eps, nu, form, weight_mode, variance, B, M, force_monotone,
            id_column, treatment_column, out):
    imputation_spec = options.loss_from_options(loss, huber_l, eps)
    analysis_spec = options.loss_from_options(analysis_loss or loss,
                                              huber_l, eps)
    if M == 1 or M < 0:
        raise click.BadParameter('--mi-m must be 0 or at least 2')
    n_jobs = ctx.obj.get('threads', 1) if ctx.obj else 1

    d = load_csv(input_path,
                 schema=CsvSchema(id=id_column, treatment=treatment_column),
                 monotone='force' if force_monotone else 'error')
    config = PipelineConfig(imputation_spec, analysis_spec, form=form,
                            nu_policy=nu, weight_mode=weight_mode)
    est = estimate_ate(d, config, variance=variance, B=B, seed=seed,
                       n_jobs=n_jobs)

    run_cfg = RunConfig(
        'analyze', seed=seed, input=input_path,
        loss=imputation_spec.to_dict(), analysis_loss=analysis_spec.to_dict(),
        nu=nu.to_dict(), form=form, weight_mode=weight_mode,
        variance=variance, B=B, M=M or None, threads=n_jobs,
        force_monotone=force_monotone, out=out)
    report = {
        'created': timestamp(),
        'config': run_cfg.to_dict(),
        'data': {'n': d.n, 'visits': d.t, 'covariates': d.p - 1,
                 'covariate_names': list(d.covariate_names),
                 'outcome_names': list(d.outcome_names)},
        'estimate': est.to_dict(),
    }
    if M:
        report['mi'] = run_mi(d, MiConfig(M=M, seed=seed, form=form,
                                          n_jobs=n_jobs)).to_dict()
    logger.info('tau_hat = %.6g (95%% CI %.6g, %.6g)', est.tau_hat,
                *est.ci95)
    options.emit_report(dumps_report(report), out)
