'''
Generalized cost of trip, logit mode choice and AAM range classes.

:license: MIT, see LICENSE for more details.
'''
import math
from collections import namedtuple
import numpy as np
from scipy.special import expit
from aamdemandlibrary.exceptions import InvalidInputError
from aamdemandlibrary.geo import MI_PER_KM

GROUND, AAM = 'GROUND', 'AAM'
MODES = (GROUND, AAM)
UAM, RAM, OUT_OF_RANGE, AAM_INFEASIBLE = 'UAM', 'RAM', 'OUT_OF_RANGE', 'AAM_INFEASIBLE'
RANGE_CLASSES = (UAM, RAM, OUT_OF_RANGE, AAM_INFEASIBLE)

UAM_MAX_KM = 150.0
RAM_MAX_KM = 800.0
UAM_MAX_MI = UAM_MAX_KM * MI_PER_KM
RAM_MAX_MI = RAM_MAX_KM * MI_PER_KM

THRESHOLD, SAMPLE = 'THRESHOLD', 'SAMPLE'


class GctResult(namedtuple(
        'GctResult', 'gct_usd monetary_usd opportunity_usd risk_usd wage_usd_per_h')):
    '''
    Generalized cost of trip, -(monetary + wage*time + risk), with its parts.
    '''
    __slots__ = ()

    @property
    def components(self):
        '''(monetary_usd, opportunity_usd, risk_usd)'''
        return (self.monetary_usd, self.opportunity_usd, self.risk_usd)

ChoiceResult = namedtuple('ChoiceResult', 'p_aam chosen range_class air_share_of_gct')
UtilitySample = namedtuple('UtilitySample', 'u_ground u_aam epsilon_ground epsilon_aam')


class DecisionRule(namedtuple('DecisionRule', 'kind tau seed')):
    '''
    How a choice probability becomes a chosen mode.

    THRESHOLD picks AAM when p > tau, SAMPLE draws u ~ U(0,1) and picks AAM when u < p.
    '''
    __slots__ = ()

    @classmethod
    def threshold(cls, tau=0.5):
        '''Deterministic rule'''
        return cls(THRESHOLD, float(tau), None)

    @classmethod
    def sample(cls, seed=0):
        '''Random rule reproducible from seed'''
        return cls(SAMPLE, None, int(seed))


def _non_negative(value, name):
    value = float(value)
    if not math.isfinite(value) or value < 0:
        raise InvalidInputError('%s must be finite and >= 0, got %r' % (name, value))
    return value


def gct(c_usd, wage_usd_per_h, t_h, r_usd):
    '''
    Generalized cost of trip.

    Args:
        c_usd (float): monetary cost of the trip
        wage_usd_per_h (float): value of time
        t_h (float): door to door hours
        r_usd (float): monetized risk
    Returns:
        GctResult. gct_usd <= 0
    Raises:
        InvalidInputError: an input is negative or not finite
    '''
    c_usd = _non_negative(c_usd, 'monetary cost')
    wage = _non_negative(wage_usd_per_h, 'wage')
    t_h = _non_negative(t_h, 'time')
    r_usd = _non_negative(r_usd, 'risk')
    opportunity = wage * t_h
    return GctResult(-(c_usd + opportunity + r_usd), c_usd, opportunity, r_usd, wage)


def trip_wage(origin, dest):
    '''
    Value of time of a trip: the mean of the two tracts' median hourly wages.
    '''
    return (origin.median_hourly_wage_usd + dest.median_hourly_wage_usd) / 2.0


def p_aam(gct_ground, gct_aam, scale=1.0):
    '''
    Logit probability of choosing AAM, 1 / (1 + exp(scale*(gct_ground - gct_aam))).

    Saturates to 0 or 1 instead of overflowing.

    Args:
        gct_ground (float): GCT of the ground trip
        gct_aam (float): GCT of the AAM trip
        scale (float): positive multiplier on the exponent (default=1)
    Returns:
        float
    '''
    if not scale > 0:
        raise InvalidInputError('logit scale must be positive, got %r' % scale)
    return float(expit(scale * (gct_aam - gct_ground)))


def p_ground(gct_ground, gct_aam, scale=1.0):
    '''
    Logit probability of choosing ground, the mirror of p_aam.
    '''
    if not scale > 0:
        raise InvalidInputError('logit scale must be positive, got %r' % scale)
    return float(expit(scale * (gct_ground - gct_aam)))


def classify_range(air_distance_mi):
    '''
    AAM range class of a flight.

    Returns:
        str. "UAM" below 150 km, "RAM" from 150 to 800 km, "OUT_OF_RANGE" beyond
    '''
    if air_distance_mi < UAM_MAX_MI:
        return UAM
    if air_distance_mi <= RAM_MAX_MI:
        return RAM
    return OUT_OF_RANGE


def decide(p, rule=DecisionRule.threshold(), rng=None):
    '''
    Turn a probability of choosing AAM into a chosen mode.

    Args:
        p (float): probability of AAM
        rule (DecisionRule): threshold or sample
        rng (numpy.random.Generator): stream for the sample rule (default=seeded from rule.seed)
    Returns:
        str. "GROUND" or "AAM"
    '''
    if rule.kind == THRESHOLD:
        return AAM if p > rule.tau else GROUND
    if rng is None:
        rng = np.random.default_rng(rule.seed)
    return AAM if rng.random() < p else GROUND


def sample_utilities(gct_ground, gct_aam, seed, scale=1.0):
    '''
    One random utility draw per mode with standard Gumbel errors.

    Args:
        gct_ground (float): GCT of the ground trip
        gct_aam (float): GCT of the AAM trip
        seed (int or numpy.random.Generator): stream to draw from
        scale (float): multiplier on the systematic part (default=1)
    Returns:
        UtilitySample
    '''
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    eps_g, eps_a = rng.gumbel(0.0, 1.0, size=2)
    return UtilitySample(
        scale * gct_ground + eps_g, scale * gct_aam + eps_a, float(eps_g), float(eps_a)
    )


def aam_win_rate(gct_ground, gct_aam, draws, seed, scale=1.0):
    '''
    Share of Gumbel utility draws in which AAM beats ground; converges to p_aam.
    '''
    rng = np.random.default_rng(seed)
    eps = rng.gumbel(0.0, 1.0, size=(int(draws), 2))
    wins = scale * gct_aam + eps[:, 1] > scale * gct_ground + eps[:, 0]
    return float(np.mean(wins))


def air_share_of_gct(gct_air_segment, gct_total):
    '''
    |GCT of the air segment| / |GCT of the whole AAM trip|, 0 when the trip costs nothing.
    '''
    if gct_total == 0:
        return 0.0
    return min(1.0, max(0.0, abs(gct_air_segment) / abs(gct_total)))
