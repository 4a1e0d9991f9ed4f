'''
Geographic primitives: great circle distance, population centroids and
census tract to hub airport assignment.

:license: MIT, see LICENSE for more details.
'''
import math
from collections import namedtuple
from aamdemandlibrary.exceptions import InvalidInputError, ConfigurationError

EARTH_RADIUS_MI = 3958.8
EARTH_RADIUS_KM = 6371.0
MI_PER_KM = 0.621371

def _finite(value, name):
    '''
    Convert a value to a float, rejecting anything that is not a finite number
    '''
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InvalidInputError('%s must be a number, got %r' % (name, value))
    if not math.isfinite(value):
        raise InvalidInputError('%s must be finite, got %r' % (name, value))
    return value


class GeoPoint(namedtuple('GeoPoint', 'lat_deg lon_deg')):
    '''
    A point on the earth in decimal degrees.

    Args:
        lat_deg (float): latitude, -90 to 90
        lon_deg (float): longitude, -180 to 180
    Raises:
        InvalidInputError
    '''
    __slots__ = ()

    def __new__(cls, lat_deg, lon_deg):
        lat_deg = _finite(lat_deg, 'latitude')
        lon_deg = _finite(lon_deg, 'longitude')
        if not -90.0 <= lat_deg <= 90.0:
            raise InvalidInputError('latitude %r is outside [-90, 90]' % lat_deg)
        if not -180.0 <= lon_deg <= 180.0:
            raise InvalidInputError('longitude %r is outside [-180, 180]' % lon_deg)
        return super(GeoPoint, cls).__new__(cls, lat_deg, lon_deg)


class EarthModel(namedtuple('EarthModel', 'radius_mi')):
    '''
    Spherical earth used by the haversine distance.

    Args:
        radius_mi (float): earth radius in miles (default=3958.8)
    '''
    __slots__ = ()

    def __new__(cls, radius_mi=EARTH_RADIUS_MI):
        radius_mi = _finite(radius_mi, 'radius_mi')
        if radius_mi <= 0:
            raise InvalidInputError('radius_mi must be positive, got %r' % radius_mi)
        return super(EarthModel, cls).__new__(cls, radius_mi)

    @classmethod
    def from_km(cls, radius_km=EARTH_RADIUS_KM):
        '''Build the model from a radius given in kilometres'''
        return cls(_finite(radius_km, 'radius_km') * MI_PER_KM)

EARTH = EarthModel()


class CensusTract(namedtuple('CensusTract', 'tract_id centroid median_hourly_wage_usd')):
    '''
    A census tract reduced to its population centroid and median hourly wage.
    '''
    __slots__ = ()

    def __new__(cls, tract_id, centroid, median_hourly_wage_usd):
        if not tract_id:
            raise InvalidInputError('tract_id must not be empty')
        wage = _finite(median_hourly_wage_usd, 'median_hourly_wage_usd')
        if wage < 0:
            raise InvalidInputError('median_hourly_wage_usd must be >= 0, got %r' % wage)
        return super(CensusTract, cls).__new__(cls, str(tract_id), centroid, wage)


class HubAirport(namedtuple(
        'HubAirport', 'code location depart_processing_h arrive_processing_h')):
    '''
    An airport used as the AAM access point of the tracts nearest to it.

    Args:
        code (str): airport code, unique within a dataset
        location (GeoPoint): airport reference point
        depart_processing_h (float): hours spent at the airport before departure
        arrive_processing_h (float): hours spent at the airport after arrival
    '''
    __slots__ = ()

    def __new__(cls, code, location, depart_processing_h, arrive_processing_h):
        if not code:
            raise InvalidInputError('hub code must not be empty')
        depart = _finite(depart_processing_h, 'depart_processing_h')
        arrive = _finite(arrive_processing_h, 'arrive_processing_h')
        if depart < 0 or arrive < 0:
            raise InvalidInputError('processing times must be >= 0 (hub %s)' % code)
        return super(HubAirport, cls).__new__(cls, str(code), location, depart, arrive)


def haversine_distance(a, b, earth=EARTH):
    '''
    Great circle distance between two points.

    Args:
        a (GeoPoint): first point
        b (GeoPoint): second point
        earth (EarthModel): sphere to measure on
    Returns:
        float. miles (in the units of earth.radius_mi)
    Raises:
        InvalidInputError
    '''
    lat1 = math.radians(_finite(a[0], 'latitude'))
    lat2 = math.radians(_finite(b[0], 'latitude'))
    dlat = lat2 - lat1
    dlon = math.radians(_finite(b[1], 'longitude') - _finite(a[1], 'longitude'))
    hav = math.sin(dlat / 2.0)**2 + math.cos(lat1) * math.cos(lat2) * math.sin(dlon / 2.0)**2
    # rounding can push hav a hair outside [0, 1] for antipodal points
    hav = min(1.0, max(0.0, hav))
    return 2.0 * earth.radius_mi * math.asin(math.sqrt(hav))


def nearest_hub(tract, hubs, earth=EARTH):
    '''
    Assign a census tract to the closest hub airport.

    Ties go to the lexicographically smallest code so the result does not depend
    on the order of the hub list.

    Args:
        tract (CensusTract): the tract to assign
        hubs (iterable(HubAirport)): candidate hubs
        earth (EarthModel): sphere to measure on
    Returns:
        HubAirport
    Raises:
        ConfigurationError: no hubs were given
    '''
    best, best_key = None, None
    for hub in hubs:
        key = (haversine_distance(tract.centroid, hub.location, earth), hub.code)
        if best_key is None or key < best_key:
            best, best_key = hub, key
    if best is None:
        raise ConfigurationError('cannot assign tract %s: the hub list is empty' % tract.tract_id)
    return best
