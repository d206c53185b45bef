""" Scenario files and the resolved run configuration
"""
from dataclasses import asdict, dataclass, field
import logging
import os

import yaml

from .simulation.scenarios import BUILTIN_SCENARIOS, Scenario
from .utils import DEFAULT_SEED, to_jsonable
from .version import __version__

logger = logging.getLogger('robj2r')

SCENARIO_KEYS = ('name', 'errors', 'hypothesis', 'outliers', 'n_per_arm',
                 'phi', 'sigma', 'truth')


def parse_scenario_file(path):
    """ Parse a YAML scenario file

    The file holds a ``scenario`` section whose keys override the built-in
    scenario named by its optional ``base`` key (default ``normal-h1``)::

        scenario:
          base: normal-h1
          name: small-t5
          errors: t5
          n_per_arm: 200

    Args:
        path (str): path to YAML file

    Returns:
        Scenario: parsed scenario

    Raises:
        KeyError: raise KeyError if the file is not specified correctly

    """
    with open(path) as f:
        cfg = yaml.safe_load(f) or {}
    cfg = expand_envvars(cfg)

    if 'scenario' not in cfg or not isinstance(cfg['scenario'], dict):
        raise KeyError('scenario must be a section in the scenario YAML file')
    section = dict(cfg['scenario'])
    base = section.pop('base', 'normal-h1')
    if base not in BUILTIN_SCENARIOS:
        raise KeyError('Base scenario specified (%s) is not a built-in '
                       'scenario' % base)
    unknown = set(section) - set(SCENARIO_KEYS)
    if unknown:
        raise KeyError('Unknown key(s) in scenario section: %s'
                       % ', '.join(sorted(unknown)))

    params = BUILTIN_SCENARIOS[base].to_dict()
    params.update(section)
    if 'hypothesis' in section and 'phi' not in section:
        params['phi'] = None
    if ('hypothesis' in section or 'errors' in section) and \
            'truth' not in section:
        params['truth'] = None
    logger.debug('Parsed scenario %s from %s', params['name'], path)
    return Scenario(**params)


def resolve_scenario(value):
    """ Built-in scenario name or path to a scenario file """
    if value in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[value]
    if os.path.isfile(value):
        return parse_scenario_file(value)
    raise KeyError('Scenario "%s" is neither a built-in scenario (%s) nor a '
                   'file' % (value, ', '.join(sorted(BUILTIN_SCENARIOS))))


def expand_envvars(d):
    """ Recursively expand values that look like environment variables

    Strings are expanded with ``os.path.expandvars``; unset variables are
    left as they are.

    Args:
        d (dict): expand environment variables used in the values of this
            dictionary

    Returns:
        dict: input dictionary with environment variables expanded

    """
    _d = d.copy()
    for k, v in _d.items():
        if isinstance(v, dict):
            _d[k] = expand_envvars(v)
        elif isinstance(v, str):
            _d[k] = os.path.expandvars(v)
        elif isinstance(v, (list, tuple)):
            _d[k] = [os.path.expandvars(_v) if isinstance(_v, str) else _v
                     for _v in v]
    return _d


@dataclass
class RunConfig(object):
    """ Resolved options of one command, echoed into its report """
    subcommand: str
    seed: int = DEFAULT_SEED
    input: str = None
    scenario: str = None
    table: str = None
    loss: dict = None
    analysis_loss: dict = None
    nu: dict = None
    form: str = None
    weight_mode: str = None
    variance: str = None
    methods: list = None
    B: int = None
    M: int = None
    reps: int = None
    threads: int = 1
    force_monotone: bool = False
    out: str = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.seed is None:
            self.seed = DEFAULT_SEED

    def to_dict(self):
        out = {k: v for k, v in asdict(self).items() if v is not None}
        out['version'] = __version__
        return to_jsonable(out)
