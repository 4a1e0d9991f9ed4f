'''
Per-mode monetary cost, door to door time and monetized risk of a trip.

:license: MIT, see LICENSE for more details.
'''
from collections import namedtuple
from aamdemandlibrary.calibrate import predict_fare, predict_block
from aamdemandlibrary.choice import GROUND, AAM
from aamdemandlibrary.exceptions import InfeasibleError, InvalidInputError

ModeEvaluation = namedtuple('ModeEvaluation', 'mode monetary_usd time_h risk_usd extrapolated')

# air segment of an AAM trip: the flight plus the time spent at both airports
AirSegment = namedtuple('AirSegment', 'fare_usd dwell_h block_h risk_usd')


class AamItinerary(namedtuple(
        'AamItinerary', 'origin_leg air_distance_mi dest_leg origin_hub dest_hub')):
    '''
    Centroid to origin hub by road, hub to hub by air, destination hub to centroid by road.

    Args:
        origin_leg (GroundLeg): centroid to origin hub
        air_distance_mi (float): great circle miles between the hubs
        dest_leg (GroundLeg): destination hub to centroid
        origin_hub (HubAirport): departure hub
        dest_hub (HubAirport): arrival hub
    '''
    __slots__ = ()

    @property
    def feasible(self):
        '''False when both ends share a hub'''
        return self.air_distance_mi > 0

    @property
    def ground_distance_mi(self):
        '''Road miles of both access legs'''
        return self.origin_leg.distance_mi + self.dest_leg.distance_mi

    @property
    def ground_time_h(self):
        '''Road hours of both access legs'''
        return self.origin_leg.time_h + self.dest_leg.time_h

    @property
    def dwell_h(self):
        '''Hours spent at the two airports'''
        return self.origin_hub.depart_processing_h + self.dest_hub.arrive_processing_h


def _require_flight(it):
    if not it.feasible:
        raise InfeasibleError('no flight between %s and %s (air distance %r mi)' % (
            it.origin_hub.code, it.dest_hub.code, it.air_distance_mi))


def ground_cost(leg, params):
    '''
    Driving cost of a leg at the standard mileage rate.
    '''
    return params.mileage_rate_usd_per_mi * leg.distance_mi


def ground_time(leg):
    '''
    Door to door driving hours of a leg.
    '''
    return leg.time_h


def aam_cost(it, fare, params):
    '''
    Monetary cost of an AAM trip: both access legs plus the airfare.

    Raises:
        InfeasibleError: the itinerary has no flight
    '''
    _require_flight(it)
    return (ground_cost(it.origin_leg, params) + predict_fare(fare, it.air_distance_mi)
            + ground_cost(it.dest_leg, params))


def aam_time(it, blocktime):
    '''
    Door to door hours of an AAM trip: legs, airport processing and block time.

    Raises:
        InfeasibleError: the itinerary has no flight
    '''
    _require_flight(it)
    return (it.origin_leg.time_h + it.origin_hub.depart_processing_h
            + predict_block(blocktime, it.air_distance_mi)
            + it.dest_hub.arrive_processing_h + it.dest_leg.time_h)


def fatalities_per_mi(mode, params):
    '''Fatality rate per mile of a mode'''
    if mode == GROUND:
        return params.ground_fatalities_per_mi
    if mode == AAM:
        return params.air_fatalities_per_mi
    raise InvalidInputError('unknown mode %r' % (mode,))


def trip_risk(mode, total_distance_mi, params):
    '''
    Monetized risk of travelling a distance by one mode: VSL * fatalities per mile * miles.
    '''
    if not total_distance_mi >= 0:
        raise InvalidInputError('distance must be >= 0, got %r' % total_distance_mi)
    return params.vsl_usd * fatalities_per_mi(mode, params) * total_distance_mi


def itinerary_risk(it, params):
    '''
    Monetized risk of an AAM trip: ground rate on the access legs, air rate on the flight.
    '''
    return (trip_risk(GROUND, it.ground_distance_mi, params)
            + trip_risk(AAM, it.air_distance_mi, params))


def air_segment(it, fare, blocktime, params):
    '''
    The flight part of an AAM trip, airport processing included.

    Returns:
        AirSegment
    Raises:
        InfeasibleError: the itinerary has no flight
    '''
    _require_flight(it)
    return AirSegment(
        predict_fare(fare, it.air_distance_mi),
        it.dwell_h,
        predict_block(blocktime, it.air_distance_mi),
        trip_risk(AAM, it.air_distance_mi, params)
    )


def evaluate_ground(leg, params):
    '''
    ModeEvaluation of the all road trip.
    '''
    return ModeEvaluation(
        GROUND, ground_cost(leg, params), ground_time(leg),
        trip_risk(GROUND, leg.distance_mi, params), False
    )


def evaluate_aam(it, fare, blocktime, params):
    '''
    ModeEvaluation of the AAM trip; extrapolated is set when the flight distance is
    outside either calibration domain.

    Raises:
        InfeasibleError: the itinerary has no flight
    '''
    return ModeEvaluation(
        AAM, aam_cost(it, fare, params), aam_time(it, blocktime), itinerary_risk(it, params),
        not (fare.covers(it.air_distance_mi) and blocktime.covers(it.air_distance_mi))
    )
