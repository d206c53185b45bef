import logging
import os

_FORMAT = '%(asctime)s:%(levelname)s:%(lineno)s:%(module)s.%(funcName)s:%(message)s'
_formatter = logging.Formatter(_FORMAT, '%H:%M:%S')
_handler = logging.StreamHandler()
_handler.setFormatter(_formatter)

#: Environment variable read once at import to set the package log level
LOG_ENVVAR = 'J2R_LOG'


def level_from_env(value, default=logging.INFO):
    """ Translate a ``J2R_LOG`` value into a logging level

    Args:
        value (str or None): level name (``DEBUG``, ``warning``) or integer
        default (int): level used when ``value`` is empty or unknown

    Returns:
        tuple: (int level, bool whether ``value`` was understood)

    """
    if value is None or not str(value).strip():
        return default, True
    value = str(value).strip()
    if value.lstrip('-').isdigit():
        return int(value), True
    level = logging.getLevelName(value.upper())
    if isinstance(level, int):
        return level, True
    return default, False


logger = logging.getLogger('robj2r')
logger.addHandler(_handler)
_level, _understood = level_from_env(os.environ.get(LOG_ENVVAR))
logger.setLevel(_level)
if not _understood:
    logger.warning('Could not understand %s=%s; logging at INFO',
                   LOG_ENVVAR, os.environ.get(LOG_ENVVAR))

logger_algo = logging.getLogger('robj2r_algo')
logger_algo.addHandler(_handler)
logger_algo.setLevel(logging.WARNING)
