'''
Read and validate the input datasets.

Every loader checks the header against its schema, converts each row to a typed
record and reports the first bad row by its 1-based data row number. Every
loader has a matching writer so loaded tables can be written back unchanged.

:license: MIT, see LICENSE for more details.
'''
import configparser
import logging
import math
import os
from collections import namedtuple
import pandas as pd
from aamdemandlibrary.exceptions import IngestError, MissingFileError, InvalidInputError
from aamdemandlibrary.geo import GeoPoint, CensusTract, HubAirport
from aamdemandlibrary.calibrate import average_values

LOGGER = logging.getLogger(__name__)

AGE_BANDS = ('LE29', 'A30_54', 'GE55', 'UNKNOWN')
EARNING_BANDS = ('LE1250', 'E1251_3333', 'GT3333', 'UNKNOWN')
INDUSTRIES = ('GOODS', 'TRADE_TRANSPORT_UTIL', 'OTHER_SERVICES', 'UNKNOWN')

TRACT_COLUMNS = ['tract_id', 'lat', 'lon', 'median_hourly_wage']
HUB_COLUMNS = ['code', 'lat', 'lon']
HUB_DWELL_COLUMNS = ['depart_h', 'arrive_h']
TRIP_COLUMNS = ['origin', 'dest', 'count']
TRIP_BAND_COLUMNS = ['age', 'earning', 'industry']
FARE_COLUMNS = ['distance_mi', 'fare_usd']
BLOCKTIME_COLUMNS = ['distance_mi', 'block_h']
PARAM_KEYS = (
    'mileage_rate_usd_per_mi', 'vsl_usd', 'ground_fatalities_per_mi', 'air_fatalities_per_mi'
)
PARAM_OVERRIDES = ('logit_scale', 'min_block_h', 'depart_h', 'arrive_h')

TripDemand = namedtuple(
    'TripDemand', 'origin_tract_id dest_tract_id trip_count age_band earning_band industry'
)
FareSample = namedtuple('FareSample', 'distance_mi fare_usd')
BlockTimeSample = namedtuple('BlockTimeSample', 'distance_mi block_h')
EconomicParams = namedtuple(
    'EconomicParams',
    'mileage_rate_usd_per_mi vsl_usd ground_fatalities_per_mi air_fatalities_per_mi'
)


def per_hundred_million_miles(rate):
    '''
    Convert a fatality rate per 100 million vehicle miles to a rate per mile.
    '''
    return float(rate) / 1.0e8


def _read_frame(path, required, optional=()):
    '''
    Read a csv file as strings and check its header.

    Args:
        path (str): the file to read
        required (list(str)): columns that must lead the header, in order
        optional (list(str)): columns that may follow, all or none
    Returns:
        pandas.DataFrame
    Raises:
        MissingFileError, IngestError
    '''
    if not os.path.isfile(path):
        raise MissingFileError('%s: file does not exist' % path)
    try:
        frame = pd.read_csv(
            path, dtype=str, keep_default_na=False, encoding='utf-8', skipinitialspace=True
        )
    except pd.errors.EmptyDataError:
        raise IngestError('%s: file is empty, expected header %s' % (path, ','.join(required)))
    except (pd.errors.ParserError, UnicodeDecodeError) as exc:
        raise IngestError('%s: %s' % (path, exc))
    header = [str(col).strip() for col in frame.columns]
    if header != list(required) and header != list(required) + list(optional):
        expected = ','.join(required)
        if optional:
            expected += '[,%s]' % ','.join(optional)
        raise IngestError('%s: header %s does not match %s' % (path, ','.join(header), expected))
    frame.columns = header
    return frame


def _rows(path, frame):
    '''Yield (row number, row dict) with the row number counted from 1 after the header'''
    for num, row in enumerate(frame.to_dict('records'), start=1):
        yield num, row


def _number(path, num, row, key, positive=False, non_negative=False):
    '''Parse one numeric cell'''
    text = row[key].strip()
    try:
        value = float(text)
    except ValueError:
        raise IngestError('%s: row %d: %s=%r is not a number' % (path, num, key, text))
    if not math.isfinite(value):
        raise IngestError('%s: row %d: %s=%r is not finite' % (path, num, key, text))
    if positive and value <= 0:
        raise IngestError('%s: row %d: %s=%r must be positive' % (path, num, key, text))
    if non_negative and value < 0:
        raise IngestError('%s: row %d: %s=%r must not be negative' % (path, num, key, text))
    return value


def _point(path, num, row):
    lat = _number(path, num, row, 'lat')
    lon = _number(path, num, row, 'lon')
    try:
        return GeoPoint(lat, lon)
    except InvalidInputError as exc:
        raise IngestError('%s: row %d: %s' % (path, num, exc))


def load_tracts(path):
    '''
    Load census tracts (tract_id,lat,lon,median_hourly_wage).

    Args:
        path (str): csv file
    Returns:
        dict(str: CensusTract). keyed by tract_id, in file order
    Raises:
        MissingFileError, IngestError
    '''
    frame = _read_frame(path, TRACT_COLUMNS)
    tracts = {}
    for num, row in _rows(path, frame):
        tract_id = row['tract_id'].strip()
        if not tract_id:
            raise IngestError('%s: row %d: empty tract_id' % (path, num))
        if tract_id in tracts:
            raise IngestError('%s: row %d: duplicate tract_id %s' % (path, num, tract_id))
        wage = _number(path, num, row, 'median_hourly_wage', non_negative=True)
        tracts[tract_id] = CensusTract(tract_id, _point(path, num, row), wage)
    LOGGER.info('loaded %d tracts from %s', len(tracts), path)
    return tracts


def load_hubs(path, depart_h=0.5, arrive_h=0.25):
    '''
    Load hub airports (code,lat,lon[,depart_h,arrive_h]).

    Args:
        path (str): csv file
        depart_h (float): departure processing hours used when the column is absent
        arrive_h (float): arrival processing hours used when the column is absent
    Returns:
        dict(str: HubAirport). keyed by code, in file order
    Raises:
        MissingFileError, IngestError
    '''
    frame = _read_frame(path, HUB_COLUMNS, HUB_DWELL_COLUMNS)
    has_dwell = 'depart_h' in frame.columns
    hubs = {}
    for num, row in _rows(path, frame):
        code = row['code'].strip()
        if not code:
            raise IngestError('%s: row %d: empty code' % (path, num))
        if code in hubs:
            raise IngestError('%s: row %d: duplicate code %s' % (path, num, code))
        dep, arr = depart_h, arrive_h
        if has_dwell:
            # a blank cell takes the default as well
            if row['depart_h'].strip():
                dep = _number(path, num, row, 'depart_h', non_negative=True)
            if row['arrive_h'].strip():
                arr = _number(path, num, row, 'arrive_h', non_negative=True)
        try:
            hubs[code] = HubAirport(code, _point(path, num, row), dep, arr)
        except InvalidInputError as exc:
            raise IngestError('%s: row %d: %s' % (path, num, exc))
    LOGGER.info('loaded %d hubs from %s', len(hubs), path)
    return hubs


def _band(path, num, row, key, allowed):
    if key not in row:
        return 'UNKNOWN'
    token = row[key].strip() or 'UNKNOWN'
    if token not in allowed:
        raise IngestError('%s: row %d: %s=%r is not one of %s' % (
            path, num, key, token, ', '.join(allowed)))
    return token


def load_trips(path, tracts):
    '''
    Load origin-destination trip demand (origin,dest,count[,age,earning,industry]).

    Args:
        path (str): csv file
        tracts (dict): the tract table the ids must resolve against
    Returns:
        list(TripDemand)
    Raises:
        MissingFileError, IngestError
    '''
    frame = _read_frame(path, TRIP_COLUMNS, TRIP_BAND_COLUMNS)
    trips = []
    for num, row in _rows(path, frame):
        origin, dest = row['origin'].strip(), row['dest'].strip()
        for tract_id in (origin, dest):
            if tract_id not in tracts:
                raise IngestError('%s: row %d: unknown tract id %r' % (path, num, tract_id))
        text = row['count'].strip()
        try:
            count = int(text)
        except ValueError:
            raise IngestError('%s: row %d: count=%r is not an integer' % (path, num, text))
        if count <= 0:
            raise IngestError('%s: row %d: count=%d must be positive' % (path, num, count))
        trips.append(TripDemand(
            origin, dest, count,
            _band(path, num, row, 'age', AGE_BANDS),
            _band(path, num, row, 'earning', EARNING_BANDS),
            _band(path, num, row, 'industry', INDUSTRIES)
        ))
    LOGGER.info('loaded %d trip records from %s', len(trips), path)
    return trips


def load_fare_samples(path):
    '''
    Load airfare samples (distance_mi,fare_usd).

    Returns:
        list(FareSample)
    '''
    frame = _read_frame(path, FARE_COLUMNS)
    samples = [
        FareSample(
            _number(path, num, row, 'distance_mi', positive=True),
            _number(path, num, row, 'fare_usd', positive=True)
        ) for num, row in _rows(path, frame)
    ]
    LOGGER.info('loaded %d fare samples from %s', len(samples), path)
    return samples


def load_blocktime_samples(path):
    '''
    Load block time samples (distance_mi,block_h).

    Returns:
        list(BlockTimeSample)
    '''
    frame = _read_frame(path, BLOCKTIME_COLUMNS)
    samples = [
        BlockTimeSample(
            _number(path, num, row, 'distance_mi', positive=True),
            _number(path, num, row, 'block_h', positive=True)
        ) for num, row in _rows(path, frame)
    ]
    LOGGER.info('loaded %d block time samples from %s', len(samples), path)
    return samples


def load_params(path):
    '''
    Load the economic parameters from a flat key=value document.

    The four EconomicParams keys are required. vsl_usd may list several yearly
    values separated by commas; they are averaged. The keys in PARAM_OVERRIDES
    may also be given and are returned separately.

    Args:
        path (str): the params file
    Returns:
        (EconomicParams, dict(str: float))
    Raises:
        MissingFileError, IngestError
    '''
    if not os.path.isfile(path):
        raise MissingFileError('%s: file does not exist' % path)
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#', ';'))
    with open(path, encoding='utf-8') as pfile:
        text = pfile.read()
    try:
        parser.read_string('[params]\n' + text, source=path)
    except configparser.Error as exc:
        raise IngestError('%s: %s' % (path, exc))
    values = dict(parser['params'])
    for key in values:
        if key not in PARAM_KEYS and key not in PARAM_OVERRIDES:
            raise IngestError('%s: unknown key %r' % (path, key))
    for key in PARAM_KEYS:
        if key not in values:
            raise IngestError('%s: missing required key %r' % (path, key))

    def number(key, text):
        try:
            value = float(text)
        except ValueError:
            raise IngestError('%s: %s=%r is not a number' % (path, key, text))
        if not math.isfinite(value) or value < 0:
            raise IngestError('%s: %s=%r must be finite and >= 0' % (path, key, text))
        return value

    vsl = average_values([number('vsl_usd', tok) for tok in values['vsl_usd'].split(',')])
    params = EconomicParams(
        number('mileage_rate_usd_per_mi', values['mileage_rate_usd_per_mi']),
        vsl,
        number('ground_fatalities_per_mi', values['ground_fatalities_per_mi']),
        number('air_fatalities_per_mi', values['air_fatalities_per_mi'])
    )
    if params.vsl_usd <= 0:
        raise IngestError('%s: vsl_usd must be positive' % path)
    if params.mileage_rate_usd_per_mi <= 0:
        raise IngestError('%s: mileage_rate_usd_per_mi must be positive' % path)
    overrides = {key: number(key, values[key]) for key in PARAM_OVERRIDES if key in values}
    return params, overrides


def _write_frame(rows, columns, path):
    pd.DataFrame(rows, columns=columns).to_csv(path, index=False, encoding='utf-8')


def write_tracts(tracts, path):
    '''Write a tract table in the load_tracts schema'''
    _write_frame(
        [(t.tract_id, t.centroid.lat_deg, t.centroid.lon_deg, t.median_hourly_wage_usd)
         for t in tracts.values()],
        TRACT_COLUMNS, path
    )


def write_hubs(hubs, path):
    '''Write a hub table in the load_hubs schema, dwell columns included'''
    _write_frame(
        [(h.code, h.location.lat_deg, h.location.lon_deg,
          h.depart_processing_h, h.arrive_processing_h) for h in hubs.values()],
        HUB_COLUMNS + HUB_DWELL_COLUMNS, path
    )


def write_trips(trips, path):
    '''Write trip demand in the load_trips schema, band columns included'''
    _write_frame(
        [(t.origin_tract_id, t.dest_tract_id, t.trip_count, t.age_band, t.earning_band,
          t.industry) for t in trips],
        TRIP_COLUMNS + TRIP_BAND_COLUMNS, path
    )


def write_fare_samples(samples, path):
    '''Write fare samples in the load_fare_samples schema'''
    _write_frame([tuple(s) for s in samples], FARE_COLUMNS, path)


def write_blocktime_samples(samples, path):
    '''Write block time samples in the load_blocktime_samples schema'''
    _write_frame([tuple(s) for s in samples], BLOCKTIME_COLUMNS, path)


def write_params(params, path, overrides=None):
    '''Write a params file load_params reads back to the same values'''
    with open(path, 'w', encoding='utf-8') as pfile:
        for key in PARAM_KEYS:
            pfile.write('%s = %r\n' % (key, getattr(params, key)))
        for key, value in sorted((overrides or {}).items()):
            pfile.write('%s = %r\n' % (key, float(value)))
