'''
Handle the actual communication with an OSRM routing server (route service, driving profile)

:license: MIT, see LICENSE for more details.
'''
import logging
import threading
import requests
from requests.adapters import HTTPAdapter
from urllib3.util.retry import Retry
from aamdemandlibrary.exceptions import RoutingError

LOGGER = logging.getLogger(__name__)

DEMO_BASE_URL = 'https://router.project-osrm.org'

ERROR_DESCRIPTIONS = {
    'InvalidUrl': 'URL string is invalid',
    'InvalidService': 'Service name is invalid',
    'InvalidVersion': 'Version is not found',
    'InvalidOptions': 'Options are invalid',
    'InvalidQuery': 'The query string is syntactically malformed',
    'InvalidValue': 'The successfully parsed query parameters are invalid',
    'NoSegment': 'One of the supplied input coordinates could not snap to street segment',
    'TooBig': 'The request size violates one of the service specific request size restrictions',
    'NoRoute': 'No route found',
    'NoTable': 'No route found (table)',
    'NotImplemented': 'This request is not supported'
}


class OsrmHTTP(object):
    '''
    Handles low level communication with an OSRM server over HTTP.

    Kwargs:
        base_url (str): server root, e.g. "http://localhost:5000" (default=public demo)
        profile (str): routing profile (default="driving")
        timeout (float): seconds to wait for each response (default=10)
        retries (int): retries on connection errors and 429/5xx responses (default=2)
        backoff (float): exponential backoff factor between retries in seconds (default=0.5)
        max_in_flight (int): maximum concurrent requests (default=4)
    '''
    def __init__(self, **kwargs):
        self.base_url = (kwargs.get('base_url') or DEMO_BASE_URL).rstrip('/')
        self.profile = kwargs.get('profile', 'driving')
        self.timeout = kwargs.get('timeout', 10.0)
        self.in_flight = threading.BoundedSemaphore(kwargs.get('max_in_flight', 4))
        retry = Retry(
            total=kwargs.get('retries', 2),
            backoff_factor=kwargs.get('backoff', 0.5),
            status_forcelist=(429, 500, 502, 503, 504),
            allowed_methods=('GET',),
            raise_on_status=False
        )
        self.session = requests.Session()
        self.session.mount('http://', HTTPAdapter(max_retries=retry))
        self.session.mount('https://', HTTPAdapter(max_retries=retry))

    def __del__(self):
        try:
            self.close()
        except Exception:  # pylint: disable=broad-except
            pass

    def close(self):
        '''
        Close the http session
        '''
        self.session.close()

    def url(self, a, b):
        '''
        The route request url for two points (coordinates go lon,lat)
        '''
        return '%s/route/v1/%s/%r,%r;%r,%r' % (
            self.base_url, self.profile, a.lon_deg, a.lat_deg, b.lon_deg, b.lat_deg
        )

    def interact(self, a, b):
        '''
        Request the driving route between two points.

        params:
            a: origin (GeoPoint)
            b: destination (GeoPoint)
        returns:
            (float, float): driving distance in meters, duration in seconds
        raises:
            RoutingError
        '''
        url = self.url(a, b)
        LOGGER.debug('OSRM route request %s', url)
        try:
            with self.in_flight:
                rsp = self.session.get(
                    url, params={'overview': 'false', 'steps': 'false'}, timeout=self.timeout
                )
            body = rsp.json()
        except requests.RequestException as exc:
            raise RoutingError('OSRM request %s failed: %s' % (url, exc), cause=exc)
        except ValueError as exc:
            raise RoutingError('OSRM response for %s is not JSON' % url, cause=exc)
        if not isinstance(body, dict):
            raise RoutingError('OSRM response for %s is not an object' % url)
        code = body.get('code')
        if code != 'Ok':
            detail = body.get('message') or ERROR_DESCRIPTIONS.get(code, 'missing description')
            raise RoutingError('OSRM request %s generated error "%s" (%s)' % (url, code, detail))
        try:
            route = body['routes'][0]
            return float(route['distance']), float(route['duration'])
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise RoutingError('OSRM response for %s has no usable route' % url, cause=exc)
