'''
Calibrate, evaluate every trip, and reduce the evaluations to the mean table,
the demographic share table and the distance curves.

:license: MIT, see LICENSE for more details.
'''
import hashlib
import json
import logging
import math
import os
from collections import namedtuple, OrderedDict
from concurrent.futures import ThreadPoolExecutor
import numpy as np
import pandas as pd
from scipy.special import expit
from aamdemandlibrary import ingest
from aamdemandlibrary.calibrate import fit_fare_model, fit_blocktime_model, load_models
from aamdemandlibrary.calibrate import predict_fare, predict_block
from aamdemandlibrary.choice import GROUND, AAM, AAM_INFEASIBLE, UAM, RAM, OUT_OF_RANGE
from aamdemandlibrary.choice import THRESHOLD, SAMPLE
from aamdemandlibrary.choice import ChoiceResult, gct, trip_wage, p_aam, p_ground
from aamdemandlibrary.choice import classify_range, decide, air_share_of_gct
from aamdemandlibrary.exceptions import AamDemandError, InvalidInputError, IngestError
from aamdemandlibrary.exceptions import MissingFileError
from aamdemandlibrary.geo import GeoPoint, HubAirport, haversine_distance, nearest_hub
from aamdemandlibrary.models import AamItinerary, air_segment, evaluate_ground, evaluate_aam
from aamdemandlibrary.models import ground_cost, trip_risk
from aamdemandlibrary.router import SyntheticRoadModel

LOGGER = logging.getLogger(__name__)

NON_AAM_LABEL, AAM_LABEL = 'Non-AAM', 'AAM'

# (label, evals column) in the published row order; GCT rows are magnitudes
MEAN_ROWS = (
    ('GCT by Air Transportation ($)', 'gct_air_segment_usd'),
    ('GCT by Ground Transportation ($)', 'gct_ground_segment_usd'),
    ('Time in Ground Transportation (hours)', 'aam_ground_time_h'),
    ('Distance by Ground Transportation (miles)', 'aam_ground_distance_mi'),
    ('Distance by Air Transportation (miles)', 'air_distance_mi'),
    ('Time in Air Transportation (hours)', 'block_h'),
    ('Distance between OD (miles)', 'ground_distance_mi'),
    ('Ground Transportation time between OD (hours)', 'ground_time_h')
)

SHARE_FEATURES = (
    ('age', ingest.AGE_BANDS),
    ('earning', ingest.EARNING_BANDS),
    ('industry', ingest.INDUSTRIES)
)

EVAL_COLUMNS = [
    'trip_index', 'origin', 'dest', 'count', 'age', 'earning', 'industry',
    'od_great_circle_mi', 'ground_distance_mi', 'ground_time_h', 'ground_source',
    'origin_hub', 'dest_hub', 'air_distance_mi',
    'access_distance_mi', 'access_time_h', 'egress_distance_mi', 'egress_time_h',
    'aam_ground_distance_mi', 'aam_ground_time_h',
    'fare_usd', 'block_h', 'dwell_h', 'wage_usd_per_h',
    'ground_monetary_usd', 'ground_risk_usd', 'gct_ground_usd',
    'aam_monetary_usd', 'aam_time_h', 'aam_risk_usd', 'gct_aam_usd',
    'gct_air_segment_usd', 'gct_ground_segment_usd',
    'p_aam', 'chosen', 'range_class', 'air_share', 'extrapolated'
]

CURVE_COLUMNS = [
    'distance_mi', 'gct_ground_usd', 'gct_aam_usd', 'p_aam', 'p_ground_minus_p_aam',
    'air_share', 'risk_ground_usd', 'risk_aam_usd', 'fare_usd', 'fare_per_mile_usd',
    'block_h', 'range_class', 'feasible', 'extrapolated'
]


class TripEvaluation(namedtuple('TripEvaluation', [
        'index', 'trip', 'ground_leg', 'ground_eval', 'aam_eval', 'gct_ground', 'gct_aam',
        'gct_air_segment', 'gct_ground_segment', 'choice', 'od_great_circle_mi',
        'itinerary', 'air'])):
    '''
    Everything computed for one trip record.

    aam_eval, gct_aam, gct_air_segment, gct_ground_segment and air are None when
    the trip is AAM_INFEASIBLE (both ends assigned to the same hub).
    '''
    __slots__ = ()

    @property
    def feasible(self):
        '''True when an AAM alternative exists'''
        return self.aam_eval is not None


class Context(namedtuple('Context', [
        'tracts', 'hubs', 'fare', 'blocktime', 'params', 'router', 'config', 'assignments'])):
    '''
    Shared, read only inputs of an evaluation run.

    assignments maps each tract id to its nearest HubAirport.
    '''
    __slots__ = ()


MeanTable = namedtuple('MeanTable', 'frame trip_counts')
ShareTable = namedtuple('ShareTable', 'frame')
CurveBundle = namedtuple('CurveBundle', 'frame crossing_distance_mi upward_crossings')


def make_context(tracts, hubs, fare, blocktime, params, router, config):
    '''
    Build an evaluation context, assigning every tract to its nearest hub once.

    Args:
        tracts (dict): tract id -> CensusTract
        hubs (dict): code -> HubAirport
        fare (FareModel): fitted fare model
        blocktime (BlockTimeModel): fitted block time model
        params (EconomicParams): economic parameters
        router (RouterInterface): ground router
        config (RunConfig): run settings
    Returns:
        Context
    Raises:
        ConfigurationError: tracts were given but the hub list is empty
    '''
    hub_list = list(hubs.values())
    assignments = {
        tract_id: nearest_hub(tract, hub_list, config.earth)
        for tract_id, tract in tracts.items()
    }
    return Context(tracts, hubs, fare, blocktime, params, router, config, assignments)


def calibrate_models(fares_path, blocktimes_path, config):
    '''
    Load the calibration samples and fit both models.

    Returns:
        (FareModel, BlockTimeModel)
    '''
    fare = fit_fare_model(ingest.load_fare_samples(fares_path))
    blocktime = fit_blocktime_model(
        ingest.load_blocktime_samples(blocktimes_path),
        degree=config.blocktime_degree, min_block_h=config.min_block_h
    )
    return fare, blocktime


def _trip_rng(rule, index):
    '''Per trip stream for the sample rule, derived from (run seed, trip index)'''
    if rule.kind != SAMPLE:
        return None
    return np.random.default_rng([rule.seed, index])


def _eligible(range_class, config):
    if not config.range_filter:
        return True
    return (range_class == UAM and config.include_uam) or (range_class == RAM and config.include_ram)


def _evaluate(index, trip, context):
    config, params, router = context.config, context.params, context.router
    try:
        origin = context.tracts[trip.origin_tract_id]
        dest = context.tracts[trip.dest_tract_id]
    except KeyError as exc:
        raise InvalidInputError('unknown tract id %s' % exc)
    wage = trip_wage(origin, dest)
    od_mi = haversine_distance(origin.centroid, dest.centroid, config.earth)
    ground_leg = router.ground_route(origin.centroid, dest.centroid)
    ground_eval = evaluate_ground(ground_leg, params)
    gct_ground = gct(ground_eval.monetary_usd, wage, ground_eval.time_h, ground_eval.risk_usd)

    o_hub, d_hub = context.assignments[origin.tract_id], context.assignments[dest.tract_id]
    air_mi = 0.0 if o_hub.code == d_hub.code else haversine_distance(
        o_hub.location, d_hub.location, config.earth)
    itinerary = AamItinerary(
        router.ground_route(origin.centroid, o_hub.location), air_mi,
        router.ground_route(d_hub.location, dest.centroid), o_hub, d_hub
    )
    if not itinerary.feasible:
        return TripEvaluation(
            index, trip, ground_leg, ground_eval, None, gct_ground, None, None, None,
            ChoiceResult(0.0, GROUND, AAM_INFEASIBLE, 0.0), od_mi, itinerary, None
        )

    aam_eval = evaluate_aam(itinerary, context.fare, context.blocktime, params)
    gct_aam = gct(aam_eval.monetary_usd, wage, aam_eval.time_h, aam_eval.risk_usd)
    air = air_segment(itinerary, context.fare, context.blocktime, params)
    # dwell and air risk belong to the air segment, the access legs to ground
    gct_air = gct(air.fare_usd, wage, air.dwell_h + air.block_h, air.risk_usd)
    gct_legs = gct(
        ground_cost(itinerary.origin_leg, params) + ground_cost(itinerary.dest_leg, params),
        wage, itinerary.ground_time_h,
        trip_risk(GROUND, itinerary.ground_distance_mi, params)
    )
    prob = p_aam(gct_ground.gct_usd, gct_aam.gct_usd, config.logit_scale)
    range_class = classify_range(air_mi)
    rule = config.decision_rule
    if _eligible(range_class, config):
        chosen = decide(prob, rule, _trip_rng(rule, index))
    else:
        chosen, range_class = GROUND, OUT_OF_RANGE
    choice = ChoiceResult(
        prob, chosen, range_class, air_share_of_gct(gct_air.gct_usd, gct_aam.gct_usd)
    )
    return TripEvaluation(
        index, trip, ground_leg, ground_eval, aam_eval, gct_ground, gct_aam, gct_air,
        gct_legs, choice, od_mi, itinerary, air
    )


def evaluate_trip(trip, context, index=0):
    '''
    Evaluate the ground and AAM alternatives of one trip and the resulting choice.

    Args:
        trip (TripDemand): the trip record
        context (Context): run inputs, see make_context
        index (int): position of the trip in its file; seeds the sample rule
    Returns:
        TripEvaluation
    Raises:
        AamDemandError: any failure, prefixed with the trip index and tract pair
    '''
    try:
        return _evaluate(index, trip, context)
    except AamDemandError as exc:
        raise type(exc)('trip %d (%s -> %s): %s' % (
            index, trip.origin_tract_id, trip.dest_tract_id, exc)) from exc


def _evaluate_chunk(chunk, context):
    return [evaluate_trip(trip, context, index) for index, trip in chunk]


def evaluate_all(trips, context):
    '''
    Evaluate every trip, on config.workers threads, keeping input order.

    Args:
        trips (list(TripDemand)): trip records
        context (Context): run inputs
    Returns:
        list(TripEvaluation)
    '''
    indexed = list(enumerate(trips))
    workers = context.config.workers
    if workers <= 1 or len(indexed) < 2:
        evals = _evaluate_chunk(indexed, context)
    else:
        size = max(1, int(math.ceil(len(indexed) / float(workers * 4))))
        chunks = [indexed[i:i + size] for i in range(0, len(indexed), size)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            evals = [ev for part in pool.map(lambda c: _evaluate_chunk(c, context), chunks)
                     for ev in part]
    extrapolated = sum(1 for ev in evals if ev.feasible and ev.aam_eval.extrapolated)
    if extrapolated:
        LOGGER.warning('%d of %d trips use fare or block time outside the calibration range',
                       extrapolated, len(evals))
    LOGGER.info('evaluated %d trips (%d chose AAM)', len(evals),
                sum(1 for ev in evals if ev.choice.chosen == AAM))
    return evals


# one hub pair's flight; fare, block_h and risk_usd are NaN when there is none
Flight = namedtuple('Flight', [
    'air_mi', 'fare_usd', 'block_h', 'depart_h', 'arrive_h', 'risk_usd', 'range_class',
    'eligible', 'extrapolated'
])


def _label(exc, trips, index):
    trip = trips[index]
    return type(exc)('trip %d (%s -> %s): %s' % (
        index, trip.origin_tract_id, trip.dest_tract_id, exc))


def _distinct(keys):
    '''
    Returns:
        (list((key, index of its first trip)), numpy.ndarray). the distinct keys in
        first seen order and, per trip, the position of its key in that list
    '''
    slots, first, positions = {}, [], []
    for index, key in enumerate(keys):
        slot = slots.get(key)
        if slot is None:
            slot = slots[key] = len(first)
            first.append((key, index))
        positions.append(slot)
    return first, np.asarray(positions, dtype=np.intp)


def _route_pairs(pairs, trips, context):
    '''GroundLeg of every (a, b, first trip index), on config.workers threads, in order'''
    def one(pair):
        a, b, index = pair
        try:
            return context.router.ground_route(a, b)
        except AamDemandError as exc:
            raise _label(exc, trips, index) from exc

    workers = context.config.workers
    if workers <= 1 or len(pairs) < 2:
        return [one(pair) for pair in pairs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, pairs))


def _flight(o_hub, d_hub, context):
    config, params = context.config, context.params
    air_mi = 0.0 if o_hub.code == d_hub.code else haversine_distance(
        o_hub.location, d_hub.location, config.earth)
    if not air_mi > 0:
        nan = float('nan')
        return Flight(air_mi, nan, nan, o_hub.depart_processing_h, d_hub.arrive_processing_h,
                      nan, AAM_INFEASIBLE, False, False)
    range_class = classify_range(air_mi)
    eligible = _eligible(range_class, config)
    return Flight(
        air_mi, predict_fare(context.fare, air_mi), predict_block(context.blocktime, air_mi),
        o_hub.depart_processing_h, d_hub.arrive_processing_h,
        trip_risk(AAM, air_mi, params), range_class if eligible else OUT_OF_RANGE, eligible,
        not (context.fare.covers(air_mi) and context.blocktime.covers(air_mi))
    )


def evaluate_frame(trips, context):
    '''
    Evaluate every trip straight into the evals.csv table.

    Every distinct tract pair and access leg is routed once (on config.workers
    threads) and every hub pair's flight is priced once; costs, probabilities and
    choices are then computed a column at a time. The rows equal
    evaluations_frame(evaluate_all(trips, context)).

    Args:
        trips (list(TripDemand)): trip records
        context (Context): run inputs
    Returns:
        pandas.DataFrame. EVAL_COLUMNS, one row per trip in input order
    Raises:
        AamDemandError: prefixed with the index and tract pair of the failing trip
    '''
    if not trips:
        return pd.DataFrame([], columns=EVAL_COLUMNS)
    config, params, tracts, hubs_of = (
        context.config, context.params, context.tracts, context.assignments)
    for index, trip in enumerate(trips):
        for tract_id in (trip.origin_tract_id, trip.dest_tract_id):
            if tract_id not in tracts:
                raise _label(InvalidInputError('unknown tract id %r' % tract_id), trips, index)

    od, od_pos = _distinct((t.origin_tract_id, t.dest_tract_id) for t in trips)
    access, access_pos = _distinct(t.origin_tract_id for t in trips)
    egress, egress_pos = _distinct(t.dest_tract_id for t in trips)
    legs = _route_pairs(
        [(tracts[o].centroid, tracts[d].centroid, i) for (o, d), i in od]
        + [(tracts[o].centroid, hubs_of[o].location, i) for o, i in access]
        + [(hubs_of[d].location, tracts[d].centroid, i) for d, i in egress],
        trips, context
    )
    od_legs, legs = legs[:len(od)], legs[len(od):]
    access_legs, egress_legs = legs[:len(access)], legs[len(access):]

    hub_by_code = {hub.code: hub for hub in hubs_of.values()}
    flights, flight_pos = _distinct(
        (hubs_of[t.origin_tract_id].code, hubs_of[t.dest_tract_id].code) for t in trips)
    flight_rows = []
    for (o_code, d_code), index in flights:
        try:
            flight_rows.append(_flight(hub_by_code[o_code], hub_by_code[d_code], context))
        except AamDemandError as exc:
            raise _label(exc, trips, index) from exc
    flight = Flight(*[np.array(col)[flight_pos] for col in zip(*flight_rows)])

    od_mi = np.array([haversine_distance(tracts[o].centroid, tracts[d].centroid, config.earth)
                      for (o, d), _ in od])[od_pos]
    ground_mi = np.array([leg.distance_mi for leg in od_legs])[od_pos]
    ground_h = np.array([leg.time_h for leg in od_legs])[od_pos]
    o_mi = np.array([leg.distance_mi for leg in access_legs])[access_pos]
    o_h = np.array([leg.time_h for leg in access_legs])[access_pos]
    e_mi = np.array([leg.distance_mi for leg in egress_legs])[egress_pos]
    e_h = np.array([leg.time_h for leg in egress_legs])[egress_pos]
    wage = (np.array([tracts[t.origin_tract_id].median_hourly_wage_usd for t in trips])
            + np.array([tracts[t.dest_tract_id].median_hourly_wage_usd for t in trips])) / 2.0

    # same operation order as the per trip functions, so the floats agree
    rate, vsl = params.mileage_rate_usd_per_mi, params.vsl_usd
    ground_cost_usd = rate * ground_mi
    ground_risk_usd = vsl * params.ground_fatalities_per_mi * ground_mi
    gct_ground = -(ground_cost_usd + wage * ground_h + ground_risk_usd)
    legs_mi, legs_h = o_mi + e_mi, o_h + e_h
    legs_risk = vsl * params.ground_fatalities_per_mi * legs_mi
    aam_cost_usd = rate * o_mi + flight.fare_usd + rate * e_mi
    aam_h = o_h + flight.depart_h + flight.block_h + flight.arrive_h + e_h
    aam_risk_usd = legs_risk + flight.risk_usd
    gct_aam = -(aam_cost_usd + wage * aam_h + aam_risk_usd)
    dwell_h = flight.depart_h + flight.arrive_h
    gct_air = -(flight.fare_usd + wage * (dwell_h + flight.block_h) + flight.risk_usd)
    gct_legs = -(rate * o_mi + rate * e_mi + wage * legs_h + legs_risk)

    feasible = flight.range_class != AAM_INFEASIBLE
    bad = ~np.isfinite(gct_ground) | (feasible & ~np.isfinite(gct_aam))
    if bad.any():
        index = int(np.flatnonzero(bad)[0])
        raise _label(InvalidInputError('generalized cost is not finite'), trips, index)

    prob = np.where(feasible, expit(config.logit_scale * (gct_aam - gct_ground)), 0.0)
    magnitude = np.where(feasible & (gct_aam != 0), np.abs(gct_aam), 1.0)
    share = np.where(feasible & (gct_aam != 0),
                     np.clip(np.abs(gct_air) / magnitude, 0.0, 1.0), 0.0)
    chosen = np.full(len(trips), GROUND, dtype=object)
    rule = config.decision_rule
    eligible = flight.eligible.astype(bool)
    if rule.kind == THRESHOLD:
        chosen[eligible & (prob > rule.tau)] = AAM
    else:
        for index in np.flatnonzero(eligible):
            if _trip_rng(rule, int(index)).random() < prob[index]:
                chosen[index] = AAM

    frame = pd.DataFrame(OrderedDict([
        ('trip_index', np.arange(len(trips))),
        ('origin', [t.origin_tract_id for t in trips]),
        ('dest', [t.dest_tract_id for t in trips]),
        ('count', [t.trip_count for t in trips]),
        ('age', [t.age_band for t in trips]),
        ('earning', [t.earning_band for t in trips]),
        ('industry', [t.industry for t in trips]),
        ('od_great_circle_mi', od_mi),
        ('ground_distance_mi', ground_mi),
        ('ground_time_h', ground_h),
        ('ground_source', np.array([leg.source for leg in od_legs], dtype=object)[od_pos]),
        ('origin_hub', [hubs_of[t.origin_tract_id].code for t in trips]),
        ('dest_hub', [hubs_of[t.dest_tract_id].code for t in trips]),
        ('air_distance_mi', flight.air_mi),
        ('access_distance_mi', o_mi),
        ('access_time_h', o_h),
        ('egress_distance_mi', e_mi),
        ('egress_time_h', e_h),
        ('aam_ground_distance_mi', legs_mi),
        ('aam_ground_time_h', legs_h),
        ('fare_usd', flight.fare_usd),
        ('block_h', flight.block_h),
        ('dwell_h', dwell_h),
        ('wage_usd_per_h', wage),
        ('ground_monetary_usd', ground_cost_usd),
        ('ground_risk_usd', ground_risk_usd),
        ('gct_ground_usd', gct_ground),
        ('aam_monetary_usd', aam_cost_usd),
        ('aam_time_h', aam_h),
        ('aam_risk_usd', aam_risk_usd),
        ('gct_aam_usd', gct_aam),
        ('gct_air_segment_usd', gct_air),
        ('gct_ground_segment_usd', np.where(feasible, gct_legs, np.nan)),
        ('p_aam', prob),
        ('chosen', chosen),
        ('range_class', flight.range_class),
        ('air_share', share),
        ('extrapolated', flight.extrapolated.astype(bool))
    ]))
    extrapolated = int(frame['extrapolated'].sum())
    if extrapolated:
        LOGGER.warning('%d of %d trips use fare or block time outside the calibration range',
                       extrapolated, len(frame))
    LOGGER.info('evaluated %d trips (%d chose AAM)', len(frame), int((chosen == AAM).sum()))
    return frame


def _eval_row(ev):
    trip, it, choice = ev.trip, ev.itinerary, ev.choice
    row = [
        ev.index, trip.origin_tract_id, trip.dest_tract_id, trip.trip_count,
        trip.age_band, trip.earning_band, trip.industry,
        ev.od_great_circle_mi, ev.ground_leg.distance_mi, ev.ground_leg.time_h,
        ev.ground_leg.source, it.origin_hub.code, it.dest_hub.code, it.air_distance_mi,
        it.origin_leg.distance_mi, it.origin_leg.time_h,
        it.dest_leg.distance_mi, it.dest_leg.time_h,
        it.ground_distance_mi, it.ground_time_h
    ]
    if ev.feasible:
        row += [ev.air.fare_usd, ev.air.block_h, ev.air.dwell_h]
    else:
        row += [None, None, it.dwell_h]
    row += [
        ev.gct_ground.wage_usd_per_h, ev.ground_eval.monetary_usd, ev.ground_eval.risk_usd,
        ev.gct_ground.gct_usd
    ]
    if ev.feasible:
        row += [
            ev.aam_eval.monetary_usd, ev.aam_eval.time_h, ev.aam_eval.risk_usd,
            ev.gct_aam.gct_usd, ev.gct_air_segment.gct_usd, ev.gct_ground_segment.gct_usd
        ]
    else:
        row += [None] * 6
    row += [
        choice.p_aam, choice.chosen, choice.range_class, choice.air_share_of_gct,
        bool(ev.feasible and ev.aam_eval.extrapolated)
    ]
    return row


def evaluations_frame(evals):
    '''
    One row per TripEvaluation in the evals.csv schema.

    Returns:
        pandas.DataFrame
    '''
    return pd.DataFrame([_eval_row(ev) for ev in evals], columns=EVAL_COLUMNS)


def write_evaluations(evals, path):
    '''Write evaluations (list or frame) as evals.csv'''
    frame = evals if isinstance(evals, pd.DataFrame) else evaluations_frame(evals)
    frame.to_csv(path, index=False, encoding='utf-8')


def read_evaluations(path):
    '''
    Read an evals.csv written by write_evaluations.

    Raises:
        MissingFileError, IngestError
    '''
    if not os.path.isfile(path):
        raise MissingFileError('%s: file does not exist' % path)
    try:
        frame = pd.read_csv(path, keep_default_na=True, dtype={
            'origin': str, 'dest': str, 'origin_hub': str, 'dest_hub': str})
    except (pd.errors.EmptyDataError, pd.errors.ParserError) as exc:
        raise IngestError('%s: %s' % (path, exc))
    missing = [col for col in EVAL_COLUMNS if col not in frame.columns]
    if missing:
        raise IngestError('%s: missing columns %s' % (path, ','.join(missing)))
    bad = ~frame['chosen'].isin([GROUND, AAM])
    if bad.any():
        raise IngestError('%s: row %d: chosen=%r is not GROUND or AAM' % (
            path, int(np.flatnonzero(bad.values)[0]) + 1, frame['chosen'][bad].iloc[0]))
    return frame


def _as_frame(evals):
    return evals if isinstance(evals, pd.DataFrame) else evaluations_frame(evals)


def _weighted_mean(values, weights):
    mask = values.notna().values
    total = float(weights.values[mask].sum())
    if total <= 0:
        return float('nan')
    return float(np.dot(values.values[mask].astype(float), weights.values[mask]) / total)


def aggregate_means(evals):
    '''
    Trip count weighted means of the AAM and ground quantities, split by chosen mode.

    Infeasible trips have no air segment and are left out of the rows that need one.
    A mode nobody chose has an all NaN column.

    Args:
        evals (list(TripEvaluation) or pandas.DataFrame): evaluations
    Returns:
        MeanTable. frame indexed by row label with columns "Non-AAM" and "AAM";
        trip_counts maps each column to its total trip count
    '''
    frame = _as_frame(evals)
    columns = {NON_AAM_LABEL: GROUND, AAM_LABEL: AAM}
    table, counts = {}, {}
    for label, mode in columns.items():
        part = frame[frame['chosen'] == mode]
        weights = part['count'].astype(float)
        counts[label] = int(weights.sum())
        values = []
        for _, column in MEAN_ROWS:
            series = part[column].astype(float)
            if column.startswith('gct_'):
                series = series.abs()
            values.append(_weighted_mean(series, weights))
        table[label] = values
    result = pd.DataFrame(table, index=[label for label, _ in MEAN_ROWS],
                          columns=[NON_AAM_LABEL, AAM_LABEL])
    result.index.name = 'quantity'
    return MeanTable(result, counts)


def _shares(part, feature, bands):
    weights = part.groupby(part[feature])['count'].sum()
    known = [band for band in bands if band != 'UNKNOWN']
    total = float(weights.sum())
    known_total = float(sum(weights.get(band, 0) for band in known))
    shares = {}
    for band in known:
        shares[band] = 100.0 * weights.get(band, 0) / known_total if known_total else float('nan')
    shares['UNKNOWN'] = 100.0 * weights.get('UNKNOWN', 0) / total if total else float('nan')
    return shares


def demographic_shares(evals):
    '''
    Percentage of trips per band of each demographic feature, for all trips and for
    AAM trips.

    The known bands of a feature sum to 100; the UNKNOWN row is the percentage of
    all trips of the column whose band is unknown.

    Returns:
        ShareTable. frame columns feature, band, all_trips_pct, aam_trips_pct
    '''
    frame = _as_frame(evals)
    aam = frame[frame['chosen'] == AAM]
    rows = []
    for feature, bands in SHARE_FEATURES:
        every = _shares(frame, feature, bands)
        chosen = _shares(aam, feature, bands)
        rows.extend((feature, band, every[band], chosen[band]) for band in bands)
    return ShareTable(pd.DataFrame(
        rows, columns=['feature', 'band', 'all_trips_pct', 'aam_trips_pct']))


def parse_grid(text):
    '''
    Parse a distance grid, "start:stop:step" (stop included) or a comma list.

    Raises:
        InvalidInputError
    '''
    try:
        if ':' in text:
            start, stop, step = (float(tok) for tok in text.split(':'))
        else:
            grid = [float(tok) for tok in text.split(',') if tok.strip()]
    except ValueError:
        raise InvalidInputError('grid %r is not start:stop:step or a list of numbers' % text)
    if ':' in text:
        if not step > 0 or not stop >= start or not math.isfinite(stop):
            raise InvalidInputError('grid %r needs step > 0 and stop >= start' % text)
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        grid = [start + step * i for i in range(count)]
    if not grid or any(not math.isfinite(d) or d < 0 for d in grid):
        raise InvalidInputError('grid %r must hold finite distances >= 0' % text)
    return grid


def _curve_row(distance_mi, context):
    config, params = context.config, context.params
    curve = config.curves
    road = SyntheticRoadModel(config.circuity_factor, config.avg_speed_mph)
    leg = evaluate_ground(road.leg(config.circuity_factor * distance_mi), params)
    gct_ground = gct(leg.monetary_usd, curve.wage_usd_per_h, leg.time_h, leg.risk_usd)
    if distance_mi <= 0:
        return [distance_mi, gct_ground.gct_usd, None, 0.0, 1.0, 0.0, leg.risk_usd, None,
                None, None, None, AAM_INFEASIBLE, False, False]
    here = GeoPoint(0.0, 0.0)
    it = AamItinerary(
        road.leg(curve.access_leg_mi), distance_mi, road.leg(curve.egress_leg_mi),
        HubAirport('ORIGIN', here, config.depart_h, config.arrive_h),
        HubAirport('DEST', here, config.depart_h, config.arrive_h)
    )
    aam = evaluate_aam(it, context.fare, context.blocktime, params)
    gct_aam = gct(aam.monetary_usd, curve.wage_usd_per_h, aam.time_h, aam.risk_usd)
    air = air_segment(it, context.fare, context.blocktime, params)
    gct_air = gct(air.fare_usd, curve.wage_usd_per_h, air.dwell_h + air.block_h, air.risk_usd)
    prob = p_aam(gct_ground.gct_usd, gct_aam.gct_usd, config.logit_scale)
    return [
        distance_mi, gct_ground.gct_usd, gct_aam.gct_usd, prob,
        p_ground(gct_ground.gct_usd, gct_aam.gct_usd, config.logit_scale) - prob,
        air_share_of_gct(gct_air.gct_usd, gct_aam.gct_usd), leg.risk_usd, aam.risk_usd,
        predict_fare(context.fare, distance_mi), context.fare.fare_per_mile(distance_mi),
        predict_block(context.blocktime, distance_mi), classify_range(distance_mi), True,
        aam.extrapolated
    ]


def emit_curves(context, distance_grid):
    '''
    GCT, choice probability and air share of a canonical trip at each grid distance.

    The canonical trip drives circuity_factor times the distance, or flies the
    distance between two hubs with the configured access and egress legs and dwell
    times. Distance 0 is an infeasible row.

    Args:
        context (Context): fitted models, params and config (tracts and router unused)
        distance_grid (list(float)): great circle miles
    Returns:
        CurveBundle. crossing_distance_mi is the first distance where p_aam rises
        above 0.5 (None when it never does)
    '''
    frame = pd.DataFrame([_curve_row(float(d), context) for d in distance_grid],
                         columns=CURVE_COLUMNS)
    crossing, crossings = None, 0
    above = None
    for distance, prob, feasible in zip(frame['distance_mi'], frame['p_aam'], frame['feasible']):
        if not feasible:
            continue
        now = prob > 0.5
        if above is False and now:
            crossings += 1
            if crossing is None:
                crossing = float(distance)
        elif above is None and now:
            # already favored at the first feasible distance
            crossing = float(distance)
        above = now
    LOGGER.info('curves: %d distances, p_aam crosses 0.5 at %s mi', len(frame), crossing)
    return CurveBundle(frame, crossing, crossings)


def write_curves(bundle, path):
    '''Write the curve rows as csv'''
    bundle.frame.to_csv(path, index=False, encoding='utf-8')


def write_mean_table(table, path):
    '''Write a MeanTable as csv'''
    table.frame.to_csv(path, encoding='utf-8')


def write_share_table(table, path):
    '''Write a ShareTable as csv'''
    table.frame.to_csv(path, index=False, encoding='utf-8')


def file_digest(path):
    '''sha256 of a file, for run metadata'''
    digest = hashlib.sha256()
    with open(path, 'rb') as dfile:
        for block in iter(lambda: dfile.read(65536), b''):
            digest.update(block)
    return digest.hexdigest()


def metadata_path(out_path):
    '''Where the run metadata of an output file goes'''
    return out_path + '.meta.json'


def write_metadata(out_path, doc):
    '''
    Write run metadata next to an output file; keys sorted, no timestamps, so
    identical runs give identical files.
    '''
    with open(metadata_path(out_path), 'w', encoding='utf-8') as mfile:
        json.dump(doc, mfile, indent=2, sort_keys=True, default=str)
        mfile.write('\n')


def load_context(paths, config, router):
    '''
    Load every input of an evaluate run.

    Args:
        paths (dict): tracts, hubs, models and params file paths
        config (RunConfig): run settings; params file overrides are applied to it
        router (RouterInterface): ground router
    Returns:
        (Context, list(TripDemand)) when paths has "trips", else (Context, None)
    '''
    params, overrides = ingest.load_params(paths['params'])
    config.apply_overrides(overrides)
    fare, blocktime = load_models(paths['models'])
    if 'min_block_h' in overrides:
        blocktime = blocktime._replace(min_block_h=config.min_block_h)
    tracts = ingest.load_tracts(paths['tracts']) if paths.get('tracts') else {}
    hubs = ingest.load_hubs(paths['hubs'], config.depart_h, config.arrive_h) \
        if paths.get('hubs') else {}
    trips = ingest.load_trips(paths['trips'], tracts) if paths.get('trips') else None
    return make_context(tracts, hubs, fare, blocktime, params, router, config), trips
