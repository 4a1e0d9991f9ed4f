'''
Reproducible synthetic scenario: a Tennessee sized region with hub airports, tracts
clustered around them, trip demand between random tract pairs, noiseless fare and
block time samples and the reference economic parameters.

:license: MIT, see LICENSE for more details.
'''
import logging
import math
import os
from collections import namedtuple, OrderedDict
import numpy as np
from aamdemandlibrary import ingest
from aamdemandlibrary.geo import GeoPoint, CensusTract, HubAirport

LOGGER = logging.getLogger(__name__)

LAT_RANGE = (35.0, 36.6)
LON_RANGE = (-90.0, -82.0)

HUB_SITES = (
    ('BNA', 36.1245, -86.6782),
    ('CHA', 35.0353, -85.2038),
    ('CSV', 35.9513, -85.0850),
    ('MEM', 35.0424, -89.9767),
    ('MKL', 35.5999, -88.9156),
    ('TRI', 36.4752, -82.4074),
    ('TYS', 35.8110, -83.9940)
)

# fare = FARE_COEF * sqrt(d): per mile fare falls with distance
FARE_COEF = 20.0
FARE_DISTANCES = (25.0, 49.0, 100.0, 144.0, 225.0, 324.0, 400.0, 484.0, 625.0, 900.0)
# block = BLOCK_INTERCEPT_H + BLOCK_H_PER_MI * d
BLOCK_INTERCEPT_H = 0.5
BLOCK_H_PER_MI = 0.002
BLOCK_DISTANCES = (50.0, 100.0, 150.0, 200.0, 300.0, 400.0, 500.0, 650.0, 800.0, 1000.0)

REFERENCE_PARAMS = ingest.EconomicParams(0.655, 1.25e7, 1.2e-8, 1.0e-10)

Scenario = namedtuple('Scenario', 'tracts hubs trips fares blocktimes params')


def reference_fares():
    '''Noiseless fare samples'''
    return [ingest.FareSample(d, FARE_COEF * math.sqrt(d)) for d in FARE_DISTANCES]


def reference_blocktimes():
    '''Noiseless block time samples'''
    return [ingest.BlockTimeSample(d, round(BLOCK_INTERCEPT_H + BLOCK_H_PER_MI * d, 6))
            for d in BLOCK_DISTANCES]


def generate_scenario(seed=0, n_tracts=200, n_trips=1000, depart_h=0.5, arrive_h=0.25):
    '''
    Build a synthetic scenario.

    Args:
        seed (int): random seed; the same seed always gives the same scenario
        n_tracts (int): number of census tracts
        n_trips (int): number of trip records
        depart_h (float): departure processing hours of every hub
        arrive_h (float): arrival processing hours of every hub
    Returns:
        Scenario
    '''
    rng = np.random.default_rng(seed)
    hubs = OrderedDict(
        (code, HubAirport(code, GeoPoint(lat, lon), depart_h, arrive_h))
        for code, lat, lon in HUB_SITES
    )
    sites = rng.integers(0, len(HUB_SITES), size=n_tracts)
    dlat = rng.uniform(-0.2, 0.2, size=n_tracts)
    dlon = rng.uniform(-0.25, 0.25, size=n_tracts)
    wages = rng.uniform(15.0, 45.0, size=n_tracts)
    tracts = OrderedDict()
    for num in range(n_tracts):
        _, lat, lon = HUB_SITES[sites[num]]
        tract_id = '47%03d%06d' % (sites[num] + 1, num)
        tracts[tract_id] = CensusTract(
            tract_id,
            GeoPoint(round(float(np.clip(lat + dlat[num], *LAT_RANGE)), 6),
                     round(float(np.clip(lon + dlon[num], *LON_RANGE)), 6)),
            round(float(wages[num]), 2)
        )
    ids = list(tracts)
    pairs = rng.integers(0, n_tracts, size=(n_trips, 2))
    counts = rng.integers(1, 21, size=n_trips)
    ages = rng.choice(ingest.AGE_BANDS, size=n_trips, p=[0.23, 0.53, 0.22, 0.02])
    earnings = rng.choice(ingest.EARNING_BANDS, size=n_trips, p=[0.23, 0.32, 0.43, 0.02])
    industries = rng.choice(ingest.INDUSTRIES, size=n_trips, p=[0.17, 0.21, 0.60, 0.02])
    trips = [
        ingest.TripDemand(ids[pairs[num, 0]], ids[pairs[num, 1]], int(counts[num]),
                          str(ages[num]), str(earnings[num]), str(industries[num]))
        for num in range(n_trips)
    ]
    return Scenario(tracts, hubs, trips, reference_fares(), reference_blocktimes(),
                    REFERENCE_PARAMS)


def write_scenario(out_dir, scenario):
    '''
    Write a scenario as the input files of a run.

    Returns:
        dict(str: str). tracts, hubs, trips, fares, blocktimes and params paths
    '''
    if not os.path.isdir(out_dir):
        os.makedirs(out_dir)
    paths = {name: os.path.join(out_dir, name + ext) for name, ext in (
        ('tracts', '.csv'), ('hubs', '.csv'), ('trips', '.csv'), ('fares', '.csv'),
        ('blocktimes', '.csv'), ('params', '.txt'))}
    ingest.write_tracts(scenario.tracts, paths['tracts'])
    ingest.write_hubs(scenario.hubs, paths['hubs'])
    ingest.write_trips(scenario.trips, paths['trips'])
    ingest.write_fare_samples(scenario.fares, paths['fares'])
    ingest.write_blocktime_samples(scenario.blocktimes, paths['blocktimes'])
    ingest.write_params(scenario.params, paths['params'])
    LOGGER.info('wrote scenario with %d tracts and %d trips to %s',
                len(scenario.tracts), len(scenario.trips), out_dir)
    return paths
