""" Exceptions raised by ``robj2r``

All domain failures derive from :class:`J2RError` so callers (the CLI in
particular) can handle them in one place.
"""


class J2RError(Exception):
    """ Base class for all ``robj2r`` errors """
    pass


# DATA ERRORS
class J2RDataError(J2RError):
    """ Input data does not satisfy the trial data model """
    pass


class SchemaError(J2RDataError):
    """ Input columns are missing, malformed, or out of domain """
    pass


class MonotonicityError(J2RDataError):
    """ A subject returns after missing a visit

    Args:
        subject (str): identifier of the offending subject
        pattern (sequence): that subject's observation indicators
    """
    def __init__(self, subject, pattern=None):
        self.subject = subject
        self.pattern = None if pattern is None else [int(r) for r in pattern]
        msg = 'Subject "%s" has non-monotone missingness' % subject
        if self.pattern is not None:
            msg += ' (R=%s)' % ''.join(str(r) for r in self.pattern)
        super(MonotonicityError, self).__init__(msg)


class RankError(J2RDataError):
    """ A design or regressor matrix is not of full column rank """
    pass


class InsufficientDataError(J2RDataError):
    """ Too few rows to perform a fit or a robust scatter estimate

    Args:
        message (str): description
        visit (int, optional): visit (1-indexed) where the shortage occurred
    """
    def __init__(self, message, visit=None):
        self.visit = visit
        super(InsufficientDataError, self).__init__(message)


class InsufficientCompletersError(J2RDataError):
    """ Fewer completers than outlier injection requires """
    pass


# NUMERICAL ERRORS
class J2RFitError(J2RError):
    """ A numerical procedure failed """
    pass


class UnsupportedDerivative(J2RFitError):
    """ Loss has no usable derivative of psi """
    pass


class SingularScatterError(J2RFitError):
    """ Robust scatter matrix cannot be inverted """
    pass


class DegenerateScaleError(J2RFitError):
    """ A robust scale estimate is zero """
    pass


class NonConvergenceError(J2RFitError):
    """ IRLS hit its iteration limit

    Args:
        message (str): description
        result (FitResult): last iterate
    """
    def __init__(self, message, result=None):
        self.result = result
        super(NonConvergenceError, self).__init__(message)


class CvExhaustedError(J2RFitError):
    """ Every cross-validation grid point failed """
    pass


class ImputationFitError(J2RFitError):
    """ Sequential imputation fit failed at a visit

    Args:
        visit (int): visit (1-indexed) whose fit failed
        cause (Exception): underlying failure
    """
    def __init__(self, visit, cause):
        self.visit = visit
        self.cause = cause
        super(ImputationFitError, self).__init__(
            'Imputation fit failed at visit %i: %s: %s'
            % (visit, type(cause).__name__, cause))


class SingularJacobianError(J2RFitError):
    """ Estimating-equation Jacobian is singular """
    pass


class DegenerateNoiseError(J2RFitError):
    """ Residual variance of an imputation regression is zero """
    pass


# AGGREGATE FAILURES
class BootstrapInstabilityError(J2RError):
    """ Too many bootstrap replicates failed """
    def __init__(self, message, failed=0, total=0):
        self.failed = failed
        self.total = total
        super(BootstrapInstabilityError, self).__init__(message)


class McInstabilityError(J2RError):
    """ Too many Monte Carlo replicates failed for a method """
    def __init__(self, message, failures=None, total=0):
        self.failures = dict(failures or {})
        self.total = total
        super(McInstabilityError, self).__init__(message)
