""" Data model for two-arm longitudinal trials with monotone missingness

A :class:`TrialDataset` holds, per subject, the treatment indicator ``A``,
baseline covariates ``X`` (intercept first), post-baseline outcomes ``Y`` and
observation indicators ``R``. Unobserved outcomes are stored as NaN.

Subjects stay in input order; every per-subject quantity computed downstream
indexes into that order.
"""
from dataclasses import InitVar, dataclass, field
import logging
import re

import numpy as np
import pandas as pd

from .errors import MonotonicityError, RankError, SchemaError

logger = logging.getLogger('robj2r')

#: Cell values read as "unobserved" in CSV input
MISSING_TOKENS = ('', 'NA')


def _frozen(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class History(object):
    """ Regressor history ``H_is = (X_i, Y_i1, ..., Y_is)`` of one subject

    Attributes:
        subject (int): row index of the subject
        visit (int): last outcome visit ``s`` included (0 gives ``X_i``)
        values (np.ndarray): vector of length ``p + s``
    """
    subject: int
    visit: int
    values: np.ndarray

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError('History of subject %i at visit %i contains '
                             'undefined entries' % (self.subject, self.visit))

    def __len__(self):
        return self.values.size


@dataclass(frozen=True, eq=False)
class TrialDataset(object):
    """ Immutable, validated two-arm trial dataset

    Use :meth:`from_arrays` or :func:`load_csv` rather than the constructor
    when the intercept still needs to be prepended.

    Attributes:
        treatment (np.ndarray): ``(n,)`` 0/1 treatment indicators
        baseline (np.ndarray): ``(n, p)`` baseline covariates, first column 1
        outcomes (np.ndarray): ``(n, t)`` outcomes, NaN where unobserved
        observed (np.ndarray): ``(n, t)`` boolean observation indicators
        ids (tuple): subject identifiers, unique
        covariate_names (tuple): names of the ``p - 1`` non-intercept columns
        outcome_names (tuple): names of the ``t`` outcome columns
        check_rank (bool): init-only; verify the baseline column rank

    Raises:
        SchemaError: shapes, treatment values or undefined entries are wrong
        MonotonicityError: a subject is observed after a missed visit
        RankError: baseline columns are linearly dependent
    """
    treatment: np.ndarray
    baseline: np.ndarray
    outcomes: np.ndarray
    observed: np.ndarray
    ids: tuple = None
    covariate_names: tuple = None
    outcome_names: tuple = None
    check_rank: InitVar[bool] = True

    def __post_init__(self, check_rank):
        treatment = np.asarray(self.treatment)
        baseline = np.asarray(self.baseline, dtype=float)
        outcomes = np.asarray(self.outcomes, dtype=float)
        observed = np.asarray(self.observed, dtype=bool)

        if baseline.ndim != 2 or outcomes.ndim != 2 or treatment.ndim != 1:
            raise SchemaError('Baseline and outcomes must be 2D and '
                              'treatment 1D')
        n = treatment.size
        if baseline.shape[0] != n or outcomes.shape[0] != n:
            raise SchemaError('Treatment, baseline and outcomes disagree on '
                              'the number of subjects')
        if observed.shape != outcomes.shape:
            raise SchemaError('Observation indicators must match the shape '
                              'of the outcomes (%r != %r)'
                              % (observed.shape, outcomes.shape))
        if outcomes.shape[1] < 1:
            raise SchemaError('At least one post-baseline visit is required')
        if not np.all(np.isin(treatment, (0, 1))):
            raise SchemaError('Treatment indicators must be 0 or 1')
        treatment = treatment.astype(np.int8)

        ids = self.ids
        if ids is None:
            ids = tuple(str(i) for i in range(n))
        ids = tuple(str(i) for i in ids)
        if len(ids) != n:
            raise SchemaError('Expected %i subject ids, got %i'
                              % (n, len(ids)))
        if len(set(ids)) != n:
            raise SchemaError('Subject ids must be unique')

        p, t = baseline.shape[1], outcomes.shape[1]
        covariate_names = self.covariate_names
        if covariate_names is None:
            covariate_names = tuple('x%i' % (j + 1) for j in range(p - 1))
        outcome_names = self.outcome_names
        if outcome_names is None:
            outcome_names = tuple('y%i' % (j + 1) for j in range(t))
        if len(covariate_names) != p - 1 or len(outcome_names) != t:
            raise SchemaError('Column names do not match the data dimensions')

        _check_baseline(baseline, check_rank)

        # First subject (in input order) returning after a gap
        gaps = np.diff(observed.astype(np.int8), axis=1) > 0
        bad = np.flatnonzero(gaps.any(axis=1))
        if bad.size:
            raise MonotonicityError(ids[bad[0]], observed[bad[0]])

        defined = np.isfinite(outcomes)
        if np.any(observed & ~defined):
            i = np.flatnonzero((observed & ~defined).any(axis=1))[0]
            raise SchemaError('Subject "%s" is flagged observed but has an '
                              'undefined outcome' % ids[i])
        if np.any(~observed & ~np.isnan(outcomes)):
            i = np.flatnonzero((~observed & ~np.isnan(outcomes))
                               .any(axis=1))[0]
            raise SchemaError('Subject "%s" has an outcome value at a visit '
                              'flagged unobserved' % ids[i])

        object.__setattr__(self, 'treatment', _frozen(treatment))
        object.__setattr__(self, 'baseline', _frozen(baseline))
        object.__setattr__(self, 'outcomes', _frozen(outcomes))
        object.__setattr__(self, 'observed', _frozen(observed))
        object.__setattr__(self, 'ids', ids)
        object.__setattr__(self, 'covariate_names', tuple(covariate_names))
        object.__setattr__(self, 'outcome_names', tuple(outcome_names))

    @classmethod
    def from_arrays(cls, treatment, covariates, outcomes, observed=None,
                    ids=None, covariate_names=None, outcome_names=None,
                    add_intercept=True):
        """ Build a dataset from plain arrays

        Args:
            treatment (array-like): ``(n,)`` 0/1 indicators
            covariates (array-like): ``(n, p - 1)`` baseline covariates
                (``(n, p)`` including the intercept if ``add_intercept`` is
                False)
            outcomes (array-like): ``(n, t)`` outcomes; NaN marks unobserved
                entries when ``observed`` is not given
            observed (array-like, optional): ``(n, t)`` observation flags;
                outcomes at unobserved entries are discarded
            ids (sequence, optional): subject identifiers
            covariate_names (sequence, optional): covariate column names
            outcome_names (sequence, optional): outcome column names
            add_intercept (bool): prepend a column of ones

        Returns:
            TrialDataset: validated dataset

        """
        treatment = np.asarray(treatment)
        covariates = np.asarray(covariates, dtype=float)
        if covariates.ndim == 1:
            covariates = covariates[:, None]
        if covariates.size == 0:
            covariates = covariates.reshape(treatment.size, 0)
        if add_intercept:
            baseline = np.column_stack((np.ones(treatment.size), covariates))
        else:
            baseline = covariates
        outcomes = np.array(outcomes, dtype=float, copy=True)
        if outcomes.ndim == 1:
            outcomes = outcomes[:, None]
        if observed is None:
            observed = np.isfinite(outcomes)
        else:
            observed = np.asarray(observed, dtype=bool)
            outcomes[~observed] = np.nan
        return cls(treatment, baseline, outcomes, observed, ids=ids,
                   covariate_names=covariate_names,
                   outcome_names=outcome_names)

    # DIMENSIONS
    @property
    def n(self):
        return self.treatment.size

    @property
    def t(self):
        return self.outcomes.shape[1]

    @property
    def p(self):
        return self.baseline.shape[1]

    @property
    def completer_pattern(self):
        """ int: pattern value reported for subjects observed at every visit
        """
        return self.t + 1

    def arm_rows(self, arm):
        """ Row indices of subjects in ``arm`` (0 control, 1 treatment) """
        return np.flatnonzero(self.treatment == arm)

    def has_both_arms(self):
        return bool(np.any(self.treatment == 0) and
                    np.any(self.treatment == 1))

    # HISTORIES
    def history(self, i, s):
        """ Return the observed history ``H_is`` of subject ``i``

        Raises:
            ValueError: the history includes an unobserved outcome
        """
        return History(i, s, np.concatenate((self.baseline[i],
                                             self.outcomes[i, :s])))

    def history_matrix(self, s, rows=None):
        """ Stack ``H_s`` for the given rows (NaN where unobserved)

        Args:
            s (int): visit; ``0`` returns the baseline
            rows (array-like, optional): row indices or boolean mask

        Returns:
            np.ndarray: ``(len(rows), p + s)`` regressor matrix

        """
        H = np.hstack((self.baseline, self.outcomes[:, :s]))
        return H if rows is None else H[rows]

    # DERIVED DATASETS
    def subset(self, rows):
        """ New dataset made from selected subject rows

        Repeated rows (bootstrap resamples) get suffixed ids so ids stay
        unique. The baseline rank is not checked again: resamples may repeat
        rows and each fit checks its own design.
        """
        rows = np.asarray(rows)
        if rows.dtype == bool:
            rows = np.flatnonzero(rows)
        ids = [self.ids[i] for i in rows]
        if len(set(ids)) != len(ids):
            seen = {}
            unique = []
            for _id in ids:
                k = seen.get(_id, 0)
                seen[_id] = k + 1
                unique.append(_id if k == 0 else '%s#%i' % (_id, k))
            ids = unique
        return TrialDataset(self.treatment[rows], self.baseline[rows],
                            self.outcomes[rows], self.observed[rows],
                            ids=ids,
                            covariate_names=self.covariate_names,
                            outcome_names=self.outcome_names,
                            check_rank=False)

    def with_outcomes(self, outcomes, observed=None):
        """ Copy of this dataset with replaced outcomes (and flags) """
        observed = self.observed if observed is None else observed
        return TrialDataset(self.treatment, self.baseline, outcomes, observed,
                            ids=self.ids,
                            covariate_names=self.covariate_names,
                            outcome_names=self.outcome_names,
                            check_rank=False)


@dataclass(frozen=True, eq=False)
class CompletedDataset(object):
    """ A :class:`TrialDataset` whose missing outcomes have been imputed

    Attributes:
        source (TrialDataset): dataset before imputation
        outcomes (np.ndarray): ``(n, t)`` complete outcome matrix
    """
    source: TrialDataset
    outcomes: np.ndarray = field(repr=False)

    def __post_init__(self):
        outcomes = np.asarray(self.outcomes, dtype=float)
        if outcomes.shape != self.source.outcomes.shape:
            raise SchemaError('Completed outcomes must match the source '
                              'dataset shape')
        if not np.all(np.isfinite(outcomes)):
            raise SchemaError('Completed outcomes contain undefined entries')
        obs = self.source.observed
        if not np.array_equal(outcomes[obs], self.source.outcomes[obs]):
            raise SchemaError('Completed outcomes alter observed entries')
        object.__setattr__(self, 'outcomes', _frozen(outcomes))

    @property
    def imputed(self):
        """ np.ndarray: ``(n, t)`` True where the entry was imputed """
        return ~self.source.observed

    def provenance(self):
        """ Per-entry ``'observed'`` / ``'imputed'`` labels """
        return np.where(self.source.observed, 'observed', 'imputed')

    @property
    def treatment(self):
        return self.source.treatment

    @property
    def baseline(self):
        return self.source.baseline

    @property
    def n(self):
        return self.source.n

    @property
    def t(self):
        return self.source.t

    @property
    def p(self):
        return self.source.p

    def history(self, i, s):
        """ Completed history ``H*_is``; always defined """
        return History(i, s, np.concatenate((self.baseline[i],
                                             self.outcomes[i, :s])))

    def history_matrix(self, s, rows=None):
        H = np.hstack((self.baseline, self.outcomes[:, :s]))
        return H if rows is None else H[rows]

    def arm_means(self, visit=None):
        """ Mean completed outcome per arm at ``visit`` (default: last) """
        visit = self.t if visit is None else visit
        y = self.outcomes[:, visit - 1]
        return {int(a): float(y[self.treatment == a].mean())
                for a in (0, 1) if np.any(self.treatment == a)}


# PATTERNS
def dropout_pattern(d, i):
    """ First visit (1-indexed) at which subject ``i`` is unobserved

    Completers get ``d.completer_pattern`` (``t + 1``).

    Raises:
        IndexError: ``i`` is not a subject row
    """
    if not 0 <= i < d.n:
        raise IndexError('Subject index %i out of range [0, %i)' % (i, d.n))
    missing = np.flatnonzero(~d.observed[i])
    return int(missing[0]) + 1 if missing.size else d.completer_pattern


def dropout_patterns(d):
    """ Vectorized :func:`dropout_pattern` over every subject """
    first_missing = np.argmin(d.observed, axis=1) + 1
    return np.where(d.observed.all(axis=1), d.completer_pattern,
                    first_missing)


def force_monotone(outcomes, observed):
    """ Delete every observation made after a subject's first missed visit

    Args:
        outcomes (np.ndarray): ``(n, t)`` outcomes
        observed (np.ndarray): ``(n, t)`` observation flags

    Returns:
        tuple: (outcomes, observed, number of deleted cells)

    """
    observed = np.asarray(observed, dtype=bool)
    monotone = np.logical_and.accumulate(observed, axis=1)
    outcomes = np.array(outcomes, dtype=float, copy=True)
    outcomes[~monotone] = np.nan
    return outcomes, monotone, int(np.sum(observed & ~monotone))


# CSV I/O
@dataclass(frozen=True)
class CsvSchema(object):
    """ Column-name mapping for :func:`load_csv`

    ``covariates`` / ``outcomes`` default to the ``x1..`` / ``y1..`` columns
    found in the header, in numeric order.
    """
    id: str = 'id'
    treatment: str = 'trt'
    covariates: tuple = None
    outcomes: tuple = None

    def resolve(self, columns):
        """ Return (covariate names, outcome names) present in ``columns``
        """
        def _numbered(prefix):
            found = [(int(m.group(1)), c) for c in columns
                     for m in [re.match(r'^%s(\d+)$' % prefix, c)] if m]
            return tuple(c for _, c in sorted(found))

        covariates = (_numbered('x') if self.covariates is None
                      else tuple(self.covariates))
        outcomes = (_numbered('y') if self.outcomes is None
                    else tuple(self.outcomes))
        required = (self.id, self.treatment) + covariates + outcomes
        missing = [c for c in required if c not in columns]
        if missing:
            raise SchemaError('CSV is missing column(s): %s'
                              % ', '.join(missing))
        if not outcomes:
            raise SchemaError('CSV does not contain any outcome columns')
        return covariates, outcomes


def _check_baseline(baseline, check_rank=True):
    if not np.all(np.isfinite(baseline)):
        raise SchemaError('Baseline covariates contain undefined entries')
    if baseline.shape[1] < 1 or not np.all(baseline[:, 0] == 1):
        raise SchemaError('First baseline column must be the intercept')
    if not check_rank:
        return
    # Against min(n, p) so that tiny files are still loadable; every fit
    # checks its own design rank again
    rank = np.linalg.matrix_rank(baseline)
    if rank < min(baseline.shape):
        raise RankError('Baseline covariates are rank deficient (rank %i '
                        'with %i columns)' % (rank, baseline.shape[1]))


def _parse_column(frame, column, allow_missing):
    values = frame[column].str.strip()
    missing = values.isin(MISSING_TOKENS)
    if missing.any() and not allow_missing:
        raise SchemaError('Column "%s" has missing values' % column)
    # float() rounds correctly, so values written with %.17g load back
    # bit-for-bit
    try:
        parsed = values.mask(missing).map(float, na_action='ignore')
    except (ValueError, TypeError) as exc:
        raise SchemaError('Column "%s" is not numeric: %s' % (column, exc))
    return parsed.to_numpy(dtype=float)


def load_csv(path, schema=None, monotone='error'):
    """ Read and validate a trial CSV file

    Args:
        path (str): UTF-8 CSV with a header row
        schema (CsvSchema, optional): column mapping
        monotone (str): ``'error'`` to reject non-monotone subjects, or
            ``'force'`` to delete observations after the first missed visit

    Returns:
        TrialDataset: dataset with the intercept prepended

    Raises:
        SchemaError: missing/non-numeric columns or non-binary treatment
        MonotonicityError: non-monotone subject and ``monotone='error'``
        RankError: rank-deficient baseline

    """
    schema = schema or CsvSchema()
    frame = pd.read_csv(path, dtype=str, keep_default_na=False,
                        encoding='utf-8')
    frame.columns = [c.strip() for c in frame.columns]
    covariates, outcomes = schema.resolve(list(frame.columns))

    trt = frame[schema.treatment].str.strip()
    if not trt.isin(('0', '1')).all():
        bad = trt[~trt.isin(('0', '1'))].iloc[0]
        raise SchemaError('Treatment column "%s" must contain only 0/1 '
                          '(found "%s")' % (schema.treatment, bad))

    X = np.column_stack([_parse_column(frame, c, False)
                         for c in covariates]) if covariates else \
        np.zeros((len(frame), 0))
    Y = np.column_stack([_parse_column(frame, c, True) for c in outcomes])
    R = np.isfinite(Y)

    if monotone == 'force':
        Y, R, n_deleted = force_monotone(Y, R)
        if n_deleted:
            logger.warning('Deleted %i observations made after a missed '
                           'visit to force monotone missingness', n_deleted)
    elif monotone != 'error':
        raise ValueError('Unknown monotone handling "%s"' % monotone)

    d = TrialDataset.from_arrays(trt.astype(int).to_numpy(), X, Y,
                                 observed=R,
                                 ids=frame[schema.id].str.strip().tolist(),
                                 covariate_names=covariates,
                                 outcome_names=outcomes)
    logger.debug('Read %i subjects, %i covariates, %i visits from %s',
                 d.n, d.p - 1, d.t, path)
    return d


def write_csv(d, path):
    """ Write ``d`` in the :func:`load_csv` layout (intercept omitted) """
    frame = pd.DataFrame({'id': list(d.ids), 'trt': d.treatment.astype(int)})
    for j, name in enumerate(d.covariate_names):
        frame[name] = d.baseline[:, j + 1]
    for j, name in enumerate(d.outcome_names):
        frame[name] = d.outcomes[:, j]
    frame.to_csv(path, index=False, na_rep='', float_format='%.17g',
                 encoding='utf-8')
