'''
Common interface for all ground routers of the aamdemandlibrary

:license: MIT, see LICENSE for more details.
'''
from abc import ABCMeta, abstractmethod
from functools import wraps
from collections import namedtuple
from threading import RLock
from aamdemandlibrary.exceptions import RoutingError

REMOTE, SYNTHETIC = 'REMOTE', 'SYNTHETIC'
SOURCES = (REMOTE, SYNTHETIC)


class GroundLeg(namedtuple('GroundLeg', 'distance_mi time_h source')):
    '''
    A driving leg between two points.

    Args:
        distance_mi (float): driving miles
        time_h (float): driving hours, zero exactly when distance_mi is zero
        source (str): "REMOTE" or "SYNTHETIC"
    '''
    __slots__ = ()

    def __new__(cls, distance_mi, time_h, source=SYNTHETIC):
        distance_mi, time_h = float(distance_mi), float(time_h)
        if source not in SOURCES:
            raise ValueError('unknown route source %r' % source)
        if distance_mi < 0 or time_h < 0:
            raise RoutingError('negative route (%r mi, %r h)' % (distance_mi, time_h))
        if (distance_mi == 0) != (time_h == 0):
            raise RoutingError('inconsistent route (%r mi, %r h)' % (distance_mi, time_h))
        return super(GroundLeg, cls).__new__(cls, distance_mi, time_h, source)


def exclusive(func):
    '''Hold the router lock for the function call'''
    @wraps(func)
    def wrapper(self, *args, **kwargs):
        with self.lock:
            return func(self, *args, **kwargs)
    return wrapper


class RouterInterface(metaclass=ABCMeta):
    '''Abstract class for a ground router implementation of the aamdemandlibrary'''

    source = SYNTHETIC

    def init_common(self, **kwargs):
        '''Setup properties of all routers of the aamdemandlibrary'''
        self.lock = kwargs.get('lock', RLock())

    @abstractmethod
    def route(self, a, b):
        '''
        Route between two distinct points.

        Args:
            a (GeoPoint): origin
            b (GeoPoint): destination
        Returns:
            GroundLeg
        Raises:
            RoutingError
        '''
        pass

    def close(self):
        '''
        Release any resources held by the router (nothing by default).
        '''
        pass

    def ground_route(self, a, b):
        '''
        Driving distance and time from a to b; identical points give a zero leg.

        Args:
            a (GeoPoint): origin
            b (GeoPoint): destination
        Returns:
            GroundLeg
        Raises:
            RoutingError
        '''
        if tuple(a) == tuple(b):
            return GroundLeg(0.0, 0.0, self.source)
        return self.route(a, b)

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
