'''
Tests of the geographic primitives.
'''
import math
import numpy as np
import pytest
from aamdemandlibrary.exceptions import InvalidInputError, ConfigurationError
from aamdemandlibrary.geo import GeoPoint, EarthModel, CensusTract, HubAirport, EARTH
from aamdemandlibrary.geo import haversine_distance, nearest_hub


def cosine_distance(a, b, radius):
    '''spherical law of cosines'''
    lat1, lat2 = math.radians(a[0]), math.radians(b[0])
    dlon = math.radians(b[1] - a[1])
    cosc = math.sin(lat1) * math.sin(lat2) + math.cos(lat1) * math.cos(lat2) * math.cos(dlon)
    return radius * math.acos(min(1.0, max(-1.0, cosc)))


def test_haversine_matches_law_of_cosines():
    rng = np.random.default_rng(7)
    lats = rng.uniform(-89.0, 89.0, size=(1000, 2))
    lons = rng.uniform(-180.0, 180.0, size=(1000, 2))
    checked = 0
    for (lat1, lat2), (lon1, lon2) in zip(lats, lons):
        a, b = GeoPoint(lat1, lon1), GeoPoint(lat2, lon2)
        expected = cosine_distance(a, b, EARTH.radius_mi)
        angle = expected / EARTH.radius_mi
        if angle < 1e-3 or angle > math.pi - 1e-3:
            continue
        assert haversine_distance(a, b) == pytest.approx(expected, rel=1e-6)
        checked += 1
    assert checked > 990


@pytest.mark.parametrize('a, b', [((0.0, 0.0), (0.0, 180.0)), ((90.0, 0.0), (-90.0, 0.0))])
def test_antipodal_is_half_circumference(a, b):
    distance = haversine_distance(GeoPoint(*a), GeoPoint(*b))
    assert distance == pytest.approx(math.pi * EARTH.radius_mi, abs=1e-9)


def test_zero_and_symmetric():
    a, b = GeoPoint(36.1245, -86.6782), GeoPoint(35.0424, -89.9767)
    assert haversine_distance(a, a) == 0.0
    assert haversine_distance(a, b) == haversine_distance(b, a)
    # Nashville to Memphis is close to 200 miles
    assert 190.0 < haversine_distance(a, b) < 205.0


def test_earth_model_units():
    assert EarthModel().radius_mi == 3958.8
    assert EarthModel.from_km(6371.0).radius_mi == pytest.approx(3958.75, abs=0.01)
    small = EarthModel(1.0)
    assert haversine_distance(GeoPoint(0, 0), GeoPoint(0, 90), small) == pytest.approx(math.pi / 2)
    with pytest.raises(InvalidInputError):
        EarthModel(0.0)


@pytest.mark.parametrize('lat, lon', [(91.0, 0.0), (0.0, -181.0), (float('nan'), 0.0),
                                      ('north', 0.0)])
def test_invalid_point(lat, lon):
    with pytest.raises(InvalidInputError):
        GeoPoint(lat, lon)


def test_tract_and_hub_validation():
    with pytest.raises(InvalidInputError):
        CensusTract('1', GeoPoint(0, 0), -1.0)
    with pytest.raises(InvalidInputError):
        HubAirport('X', GeoPoint(0, 0), -0.5, 0.25)


def test_nearest_hub():
    tract = CensusTract('47157000200', GeoPoint(35.1495, -90.049), 22.4)
    hubs = [
        HubAirport('BNA', GeoPoint(36.1245, -86.6782), 0.5, 0.25),
        HubAirport('MEM', GeoPoint(35.0424, -89.9767), 0.5, 0.25)
    ]
    assert nearest_hub(tract, hubs).code == 'MEM'
    assert nearest_hub(tract, list(reversed(hubs))).code == 'MEM'


def test_nearest_hub_tie_goes_to_smallest_code():
    tract = CensusTract('t', GeoPoint(0.0, 0.0), 20.0)
    hubs = [HubAirport('ZZZ', GeoPoint(0.0, 1.0), 0.5, 0.25),
            HubAirport('AAA', GeoPoint(0.0, -1.0), 0.5, 0.25)]
    assert nearest_hub(tract, hubs).code == 'AAA'


def test_nearest_hub_needs_hubs():
    with pytest.raises(ConfigurationError):
        nearest_hub(CensusTract('t', GeoPoint(0, 0), 20.0), [])


def random_points(rng, count):
    return [GeoPoint(lat, lon) for lat, lon in zip(rng.uniform(-89.0, 89.0, count),
                                                   rng.uniform(-180.0, 180.0, count))]


def test_triangle_inequality():
    rng = np.random.default_rng(3)
    points = random_points(rng, 3000)
    for a, b, c in zip(points[0::3], points[1::3], points[2::3]):
        direct = haversine_distance(a, c)
        assert direct <= (haversine_distance(a, b) + haversine_distance(b, c)) * (1.0 + 1e-9)


def test_nearest_hub_ignores_hub_order():
    rng = np.random.default_rng(8)
    hubs = [HubAirport('H%02d' % num, point, 0.5, 0.25)
            for num, point in enumerate(random_points(rng, 12))]
    for num, point in enumerate(random_points(rng, 50)):
        tract = CensusTract('t%d' % num, point, 20.0)
        expected = nearest_hub(tract, hubs)
        for _ in range(5):
            order = [hubs[i] for i in rng.permutation(len(hubs))]
            assert nearest_hub(tract, order) == expected
