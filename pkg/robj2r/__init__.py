from .version import __version__

from . import log_robj2r
