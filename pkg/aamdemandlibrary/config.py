'''
Run configuration: keyword arguments, or an INI file with the same keys grouped in sections.

:license: MIT, see LICENSE for more details.
'''
import configparser
import logging
import os
from collections import namedtuple
from aamdemandlibrary.choice import DecisionRule
from aamdemandlibrary.exceptions import ConfigurationError, InvalidInputError, MissingFileError
from aamdemandlibrary.geo import EarthModel, EARTH_RADIUS_MI

LOGGER = logging.getLogger(__name__)

RouterConfig = namedtuple('RouterConfig', [
    'mode', 'base_url', 'timeout_s', 'retries', 'backoff_s', 'max_in_flight', 'cache_path',
    'circuity_factor', 'avg_speed_mph', 'earth'
])
CurveConfig = namedtuple('CurveConfig', 'access_leg_mi egress_leg_mi wage_usd_per_h')

# section -> key -> (type, default)
SCHEMA = {
    'run': {
        'workers': (int, 1),
        'seed': (int, 0),
        'logit_scale': (float, 1.0),
        'decision': (str, 'threshold'),
        'threshold': (float, 0.5)
    },
    'filter': {
        'range_filter': (bool, True),
        'include_uam': (bool, True),
        'include_ram': (bool, True)
    },
    'hubs': {
        'depart_h': (float, 0.5),
        'arrive_h': (float, 0.25)
    },
    'earth': {
        'radius_mi': (float, EARTH_RADIUS_MI)
    },
    'calibration': {
        'blocktime_degree': (int, 2),
        'min_block_h': (float, 0.25)
    },
    'router': {
        'mode': (str, 'synthetic'),
        'base_url': (str, None),
        'timeout_s': (float, 10.0),
        'retries': (int, 2),
        'backoff_s': (float, 0.5),
        'max_in_flight': (int, 4),
        'cache_path': (str, None),
        'circuity_factor': (float, 1.2),
        'avg_speed_mph': (float, 45.0)
    },
    'curves': {
        'access_leg_mi': (float, 10.0),
        'egress_leg_mi': (float, 10.0),
        'wage_usd_per_h': (float, 30.0)
    }
}

_BOOLEANS = {'1': True, 'yes': True, 'true': True, 'on': True,
             '0': False, 'no': False, 'false': False, 'off': False}


def _convert(key, kind, value):
    if value is None or not isinstance(value, str):
        return value
    if kind is bool:
        if value.strip().lower() not in _BOOLEANS:
            raise ConfigurationError('%s=%r is not a boolean' % (key, value))
        return _BOOLEANS[value.strip().lower()]
    try:
        return kind(value.strip())
    except ValueError:
        raise ConfigurationError('%s=%r is not a valid %s' % (key, value, kind.__name__))


class RunConfig(object):
    '''
    Every setting of a run.

    Kwargs (flat, see SCHEMA for sections and defaults):
        workers (int): evaluation threads (default=1)
        seed (int): run seed for the sample decision rule (default=0)
        logit_scale (float): multiplier on the logit exponent (default=1)
        decision (str): "threshold" or "sample" (default="threshold")
        threshold (float): AAM is chosen when p_aam exceeds it (default=0.5)
        range_filter (bool): force GROUND outside the enabled range classes (default=True)
        include_uam (bool): UAM trips may choose AAM (default=True)
        include_ram (bool): RAM trips may choose AAM (default=True)
        depart_h (float): departure airport hours when hubs.csv has none (default=0.5)
        arrive_h (float): arrival airport hours when hubs.csv has none (default=0.25)
        radius_mi (float): earth radius (default=3958.8)
        blocktime_degree (int): block time polynomial degree (default=2)
        min_block_h (float): lower clamp on block time (default=0.25)
        mode (str): router mode "synthetic", "remote" or "remote_with_fallback"
        base_url (str): routing server (default=$ROUTER_BASE_URL)
        timeout_s, retries, backoff_s, max_in_flight, cache_path: remote router settings
        circuity_factor (float): synthetic road miles per great circle mile (default=1.2)
        avg_speed_mph (float): synthetic driving speed (default=45)
        access_leg_mi, egress_leg_mi, wage_usd_per_h: canonical trip used for curves
    '''

    def __init__(self, **kwargs):
        known = {key: (section, spec) for section, keys in SCHEMA.items()
                 for key, spec in keys.items()}
        for key in kwargs:
            if key not in known:
                raise ConfigurationError('unknown configuration key %r' % key)
        for key, (_, (kind, default)) in known.items():
            setattr(self, key, _convert(key, kind, kwargs.get(key, default)))
        self.validate()

    def validate(self):
        '''
        Check ranges and enumerations.

        Raises:
            ConfigurationError
        '''
        if self.workers < 1:
            raise ConfigurationError('workers must be >= 1')
        if not self.logit_scale > 0:
            raise ConfigurationError('logit_scale must be positive')
        if self.decision not in ('threshold', 'sample'):
            raise ConfigurationError('decision must be "threshold" or "sample"')
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigurationError('threshold must be within [0, 1]')
        if self.depart_h < 0 or self.arrive_h < 0:
            raise ConfigurationError('airport processing hours must be >= 0')
        if self.blocktime_degree < 0:
            raise ConfigurationError('blocktime_degree must be >= 0')
        if self.min_block_h < 0:
            raise ConfigurationError('min_block_h must be >= 0')
        if self.mode not in ('synthetic', 'remote', 'remote_with_fallback'):
            raise ConfigurationError('router mode %r is not supported' % self.mode)
        if self.retries < 0 or self.max_in_flight < 1 or not self.timeout_s > 0:
            raise ConfigurationError('router retries/max_in_flight/timeout_s out of range')
        if self.circuity_factor < 1.0 or not self.avg_speed_mph > 0:
            raise ConfigurationError('circuity_factor must be >= 1 and avg_speed_mph > 0')
        if min(self.access_leg_mi, self.egress_leg_mi, self.wage_usd_per_h) < 0:
            raise ConfigurationError('curve legs and wage must be >= 0')
        try:
            self.earth
        except InvalidInputError as exc:
            raise ConfigurationError(str(exc))

    @property
    def earth(self):
        '''EarthModel of the run'''
        return EarthModel(self.radius_mi)

    @property
    def decision_rule(self):
        '''DecisionRule of the run'''
        if self.decision == 'sample':
            return DecisionRule.sample(self.seed)
        return DecisionRule.threshold(self.threshold)

    @property
    def router(self):
        '''RouterConfig of the run'''
        return RouterConfig(
            self.mode, self.base_url or os.environ.get('ROUTER_BASE_URL'), self.timeout_s,
            self.retries, self.backoff_s, self.max_in_flight, self.cache_path,
            self.circuity_factor, self.avg_speed_mph, self.earth
        )

    @property
    def curves(self):
        '''CurveConfig of the run'''
        return CurveConfig(self.access_leg_mi, self.egress_leg_mi, self.wage_usd_per_h)

    def apply_overrides(self, overrides):
        '''
        Apply the optional overrides of a params file.

        Args:
            overrides (dict): logit_scale, min_block_h, depart_h and/or arrive_h
        '''
        for key, value in overrides.items():
            if not hasattr(self, key):
                raise ConfigurationError('unknown override %r' % key)
            LOGGER.info('params file overrides %s=%r', key, value)
            setattr(self, key, value)
        self.validate()

    def as_dict(self):
        '''
        The configuration by section, for run metadata.
        '''
        return {section: {key: getattr(self, key) for key in keys}
                for section, keys in SCHEMA.items()}


def load_config(path=None):
    '''
    Read a RunConfig from an INI file; None gives the defaults.

    Raises:
        ConfigurationError: unknown section/key or bad value
        MissingFileError: the file does not exist
    '''
    if path is None:
        return RunConfig()
    if not os.path.isfile(path):
        raise MissingFileError('%s: file does not exist' % path)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'))
    try:
        with open(path, encoding='utf-8') as cfile:
            parser.read_file(cfile)
    except configparser.Error as exc:
        raise ConfigurationError('%s: %s' % (path, exc))
    kwargs = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigurationError('%s: unknown section [%s]' % (path, section))
        for key, value in parser[section].items():
            if key not in SCHEMA[section]:
                raise ConfigurationError('%s: unknown key %s.%s' % (path, section, key))
            kwargs[key] = value if value != '' else None
    return RunConfig(**kwargs)
