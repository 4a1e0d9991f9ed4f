'''
Ground driving distance and time between two points, from an OSRM server or
from an offline synthetic road model.

:license: MIT, see LICENSE for more details.
'''
import logging
import os
from collections import namedtuple
import pandas as pd
from aamdemandlibrary.exceptions import RoutingError, ConfigurationError
from aamdemandlibrary.geo import EARTH, haversine_distance
from aamdemandlibrary.osrminteract import OsrmHTTP
from aamdemandlibrary.routerinterface import RouterInterface, GroundLeg, exclusive
from aamdemandlibrary.routerinterface import REMOTE, SYNTHETIC

LOGGER = logging.getLogger(__name__)

METERS_PER_MILE = 1609.34
ROUTER_MODES = ('synthetic', 'remote', 'remote_with_fallback')
CACHE_COLUMNS = ['a_lat', 'a_lon', 'b_lat', 'b_lon', 'distance_m', 'duration_s']


class SyntheticRoadModel(namedtuple('SyntheticRoadModel', 'circuity_factor avg_speed_mph')):
    '''
    Offline road model: road miles are great circle miles times a circuity factor.

    Args:
        circuity_factor (float): >= 1 (default=1.2)
        avg_speed_mph (float): > 0 (default=45)
    '''
    __slots__ = ()

    def __new__(cls, circuity_factor=1.2, avg_speed_mph=45.0):
        circuity_factor, avg_speed_mph = float(circuity_factor), float(avg_speed_mph)
        if not circuity_factor >= 1.0:
            raise ConfigurationError('circuity_factor must be >= 1, got %r' % circuity_factor)
        if not avg_speed_mph > 0.0:
            raise ConfigurationError('avg_speed_mph must be positive, got %r' % avg_speed_mph)
        return super(SyntheticRoadModel, cls).__new__(cls, circuity_factor, avg_speed_mph)

    def leg(self, road_mi):
        '''A synthetic GroundLeg for a given number of road miles'''
        return GroundLeg(road_mi, road_mi / self.avg_speed_mph, SYNTHETIC)


def synthetic_route(a, b, model, earth=EARTH):
    '''
    Route two points with the synthetic road model.

    Args:
        a (GeoPoint): origin
        b (GeoPoint): destination
        model (SyntheticRoadModel): circuity and speed
        earth (EarthModel): sphere for the great circle distance
    Returns:
        GroundLeg. source="SYNTHETIC"
    '''
    return model.leg(model.circuity_factor * haversine_distance(a, b, earth))


class SyntheticRouter(RouterInterface):
    '''
    A router that never leaves the process.

    Kwargs:
        model (SyntheticRoadModel): road model (default=SyntheticRoadModel())
        earth (EarthModel): sphere for the great circle distance
    '''
    source = SYNTHETIC

    def __init__(self, **kwargs):
        self.init_common(**kwargs)
        self.model = kwargs.get('model') or SyntheticRoadModel()
        self.earth = kwargs.get('earth', EARTH)

    def route(self, a, b):
        return synthetic_route(a, b, self.model, self.earth)


def _remote_leg(meters, seconds):
    '''
    GroundLeg of an OSRM (meters, seconds) reply.

    Raises:
        RoutingError: the reply is negative, or zero in only one of its values
    '''
    return GroundLeg(meters / METERS_PER_MILE, seconds / 3600.0, REMOTE)


def _cache_key(a, b):
    return (round(a.lat_deg, 5), round(a.lon_deg, 5), round(b.lat_deg, 5), round(b.lon_deg, 5))


class OsrmRouter(RouterInterface):
    '''
    A router backed by an OSRM server with a response cache.

    Kwargs:
        base_url (str): server root (default=the public demo)
        timeout (float): seconds per request (default=10)
        retries (int): retries per request (default=2)
        backoff (float): retry backoff factor (default=0.5)
        max_in_flight (int): concurrent requests (default=4)
        cache_path (str): csv file the cache is loaded from and saved to (default=None)
        fallback (RouterInterface): router used when a request fails (default=None, raise)
        client (OsrmHTTP): transport to use instead of building one
    '''
    source = REMOTE

    def __init__(self, **kwargs):
        self.init_common(**kwargs)
        self.client = kwargs.get('client') or OsrmHTTP(
            base_url=kwargs.get('base_url'),
            timeout=kwargs.get('timeout', 10.0),
            retries=kwargs.get('retries', 2),
            backoff=kwargs.get('backoff', 0.5),
            max_in_flight=kwargs.get('max_in_flight', 4)
        )
        self.fallback = kwargs.get('fallback')
        self.cache_path = kwargs.get('cache_path')
        self.cache = {}
        self.failures = 0
        if self.cache_path and os.path.isfile(self.cache_path):
            self.load_cache(self.cache_path)

    @exclusive
    def cached(self, key):
        '''Cached (meters, seconds) for a key, or None'''
        return self.cache.get(key)

    @exclusive
    def store(self, key, value):
        '''Store (meters, seconds) for a key'''
        self.cache[key] = value

    def route(self, a, b):
        key = _cache_key(a, b)
        hit = self.cached(key)
        if hit is not None:
            return _remote_leg(*hit)
        LOGGER.debug('route cache miss %r', key)
        try:
            hit = self.client.interact(a, b)
            leg = _remote_leg(*hit)
        except RoutingError as exc:
            if self.fallback is None:
                raise
            with self.lock:
                self.failures += 1
            LOGGER.warning('remote routing failed, using %s: %s',
                           type(self.fallback).__name__, exc)
            return self.fallback.ground_route(a, b)
        self.store(key, hit)
        return leg

    @exclusive
    def load_cache(self, path):
        '''
        Merge a cache file into the in-memory cache.
        '''
        frame = pd.read_csv(path)
        if list(frame.columns) != CACHE_COLUMNS:
            raise ConfigurationError('%s: not a route cache (header %s)' % (
                path, ','.join(frame.columns)))
        for row in frame.itertuples(index=False):
            self.cache[(row.a_lat, row.a_lon, row.b_lat, row.b_lon)] = (
                row.distance_m, row.duration_s)
        LOGGER.info('loaded %d cached routes from %s', len(frame), path)

    @exclusive
    def save_cache(self, path=None):
        '''
        Write the in-memory cache, sorted by key so reruns give identical files.
        '''
        path = path or self.cache_path
        if not path:
            return
        rows = [key + value for key, value in sorted(self.cache.items())]
        pd.DataFrame(rows, columns=CACHE_COLUMNS).to_csv(path, index=False)

    def close(self):
        self.save_cache()
        self.client.close()


def make_router(config):
    '''
    Build the router a RouterConfig asks for.

    Args:
        config (RouterConfig): see aamdemandlibrary.config
    Returns:
        RouterInterface
    Raises:
        ConfigurationError
    '''
    synthetic = SyntheticRouter(
        model=SyntheticRoadModel(config.circuity_factor, config.avg_speed_mph),
        earth=config.earth
    )
    if config.mode == 'synthetic':
        return synthetic
    if config.mode not in ROUTER_MODES:
        raise ConfigurationError('router mode %r is not one of %s' % (
            config.mode, ', '.join(ROUTER_MODES)))
    return OsrmRouter(
        base_url=config.base_url,
        timeout=config.timeout_s,
        retries=config.retries,
        backoff=config.backoff_s,
        max_in_flight=config.max_in_flight,
        cache_path=config.cache_path,
        fallback=synthetic if config.mode == 'remote_with_fallback' else None
    )


def ground_route(a, b, config, router=None):
    '''
    Driving distance and time between two points.

    Args:
        a (GeoPoint): origin
        b (GeoPoint): destination
        config (RouterConfig): router settings
        router (RouterInterface): an already built router for config (optional)
    Returns:
        GroundLeg
    Raises:
        RoutingError: remote routing failed and mode is "remote"
    '''
    if router is not None:
        return router.ground_route(a, b)
    with make_router(config) as tmp:
        return tmp.ground_route(a, b)
