'''
Fit the airfare and block time regressions from samples by ordinary least squares.

The airfare model is a power law in cost per mile (linear in log-log space), the
block time model is a polynomial in miles. Both are solved through a QR
decomposition of the (column scaled) design matrix rather than the normal
equations.

:license: MIT, see LICENSE for more details.
'''
import json
import logging
import math
from collections import namedtuple
import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.linalg import solve_triangular
from aamdemandlibrary.exceptions import CalibrationError, InvalidInputError

LOGGER = logging.getLogger(__name__)

DEFAULT_BLOCKTIME_DEGREE = 2
DEFAULT_MIN_BLOCK_H = 0.25


class PolynomialModel(namedtuple(
        'PolynomialModel', 'coefficients degree domain_min_mi domain_max_mi')):
    '''
    A polynomial c0 + c1*x + ... + ck*x**k fitted over [domain_min_mi, domain_max_mi].
    '''
    __slots__ = ()

    def __call__(self, x):
        return float(npoly.polyval(float(x), self.coefficients))

    def covers(self, x):
        '''True when x lies inside the fitted sample range'''
        return self.domain_min_mi <= x <= self.domain_max_mi


class FareModel(namedtuple('FareModel', 'log_intercept log_slope domain_min_mi domain_max_mi')):
    '''
    Airfare per mile as a*d**b, stored as ln(a) and b.
    '''
    __slots__ = ()

    def covers(self, distance_mi):
        '''True when distance_mi lies inside the fitted sample range'''
        return self.domain_min_mi <= distance_mi <= self.domain_max_mi

    def fare_per_mile(self, distance_mi):
        '''Fare per mile at a given distance'''
        return math.exp(self.log_intercept) * distance_mi ** self.log_slope


class BlockTimeModel(namedtuple('BlockTimeModel', 'poly min_block_h')):
    '''
    Block time hours as a polynomial of miles, never below min_block_h.
    '''
    __slots__ = ()

    def covers(self, distance_mi):
        '''True when distance_mi lies inside the fitted sample range'''
        return self.poly.covers(distance_mi)


def fit_polynomial(xs, ys, degree):
    '''
    Least squares polynomial fit.

    Args:
        xs (list(float)): sample abscissas
        ys (list(float)): sample ordinates
        degree (int): polynomial degree k >= 0
    Returns:
        PolynomialModel. coefficients constant term first
    Raises:
        CalibrationError: too few samples, too few distinct xs, or a rank deficient design
    '''
    if int(degree) != degree or degree < 0:
        raise CalibrationError('degree must be a non-negative integer, got %r' % degree)
    degree = int(degree)
    xarr = np.asarray(xs, dtype=float)
    yarr = np.asarray(ys, dtype=float)
    if xarr.ndim != 1 or xarr.shape != yarr.shape:
        raise CalibrationError('xs and ys must be equal length sequences')
    if not (np.all(np.isfinite(xarr)) and np.all(np.isfinite(yarr))):
        raise CalibrationError('samples must be finite')
    if len(xarr) < degree + 1:
        raise CalibrationError(
            'a degree %d fit needs at least %d samples, got %d' % (degree, degree + 1, len(xarr))
        )
    distinct = len(np.unique(xarr))
    if distinct < degree + 1:
        raise CalibrationError(
            'a degree %d fit needs at least %d distinct x values, got %d' % (
                degree, degree + 1, distinct)
        )

    design = np.vander(xarr, degree + 1, increasing=True)
    # equilibrate the columns; x**k spans many orders of magnitude
    scale = np.sqrt((design * design).sum(axis=0))
    scale[scale == 0] = 1.0
    qmat, rmat = np.linalg.qr(design / scale, mode='reduced')
    diag = np.abs(np.diag(rmat))
    if diag.min() <= np.finfo(float).eps * diag.max() * len(xarr):
        raise CalibrationError('the degree %d design matrix is rank deficient' % degree)
    coefs = solve_triangular(rmat, qmat.T.dot(yarr)) / scale
    if not np.all(np.isfinite(coefs)):
        raise CalibrationError('the fit produced non-finite coefficients')
    return PolynomialModel(
        tuple(float(c) for c in coefs), degree, float(xarr.min()), float(xarr.max())
    )


def fit_fare_model(samples):
    '''
    Fit ln(fare/distance) = ln(a) + b*ln(distance).

    Args:
        samples (list(FareSample)): airport pair distances and fares
    Returns:
        FareModel
    Raises:
        CalibrationError
    '''
    dist = np.array([s.distance_mi for s in samples], dtype=float)
    fare = np.array([s.fare_usd for s in samples], dtype=float)
    if len(dist) < 2:
        raise CalibrationError('the fare model needs at least 2 samples, got %d' % len(dist))
    if np.any(dist <= 0) or np.any(fare <= 0):
        raise CalibrationError('fare samples must have positive distance and fare')
    if len(np.unique(dist)) < 2:
        raise CalibrationError('the fare model needs at least 2 distinct distances')
    poly = fit_polynomial(np.log(dist), np.log(fare / dist), 1)
    model = FareModel(poly.coefficients[0], poly.coefficients[1], float(dist.min()), float(dist.max()))
    LOGGER.info(
        'fare model: %.4g * d^%.4f per mile over %g-%g mi (%d samples)',
        math.exp(model.log_intercept), model.log_slope, model.domain_min_mi,
        model.domain_max_mi, len(dist)
    )
    return model


def fit_blocktime_model(samples, degree=DEFAULT_BLOCKTIME_DEGREE, min_block_h=DEFAULT_MIN_BLOCK_H):
    '''
    Fit block hours as a polynomial of miles.

    Args:
        samples (list(BlockTimeSample)): distances and block times
        degree (int): polynomial degree (default=2)
        min_block_h (float): lower clamp applied to predictions (default=0.25)
    Returns:
        BlockTimeModel
    Raises:
        CalibrationError
    '''
    poly = fit_polynomial(
        [s.distance_mi for s in samples], [s.block_h for s in samples], degree
    )
    LOGGER.info('block time model: coefficients %r over %g-%g mi', poly.coefficients,
                poly.domain_min_mi, poly.domain_max_mi)
    return BlockTimeModel(poly, float(min_block_h))


def average_values(values):
    '''
    Arithmetic mean (used to combine yearly VSL figures).

    Raises:
        CalibrationError: the list is empty
    '''
    values = [float(v) for v in values]
    if not values:
        raise CalibrationError('cannot average an empty list')
    return math.fsum(values) / len(values)


def _check_distance(distance_mi):
    try:
        distance_mi = float(distance_mi)
    except (TypeError, ValueError):
        raise InvalidInputError('distance must be a number, got %r' % (distance_mi,))
    if not math.isfinite(distance_mi) or distance_mi <= 0:
        raise InvalidInputError('distance must be positive and finite, got %r' % distance_mi)
    return distance_mi


def predict_fare(model, distance_mi):
    '''
    Total fare (not per mile) for a flight of distance_mi.

    Raises:
        InvalidInputError: non-positive distance
    '''
    distance_mi = _check_distance(distance_mi)
    return model.fare_per_mile(distance_mi) * distance_mi


def predict_block(model, distance_mi):
    '''
    Block hours for a flight of distance_mi, clamped below by model.min_block_h.

    Raises:
        InvalidInputError: non-positive distance
    '''
    distance_mi = _check_distance(distance_mi)
    return max(model.poly(distance_mi), model.min_block_h)


def save_models(path, fare, blocktime):
    '''
    Write the fitted models to a JSON model file.
    '''
    doc = {
        'fare': {
            'log_intercept': fare.log_intercept,
            'log_slope': fare.log_slope,
            'domain_min_mi': fare.domain_min_mi,
            'domain_max_mi': fare.domain_max_mi
        },
        'blocktime': {
            'coefficients': list(blocktime.poly.coefficients),
            'degree': blocktime.poly.degree,
            'domain_min_mi': blocktime.poly.domain_min_mi,
            'domain_max_mi': blocktime.poly.domain_max_mi,
            'min_block_h': blocktime.min_block_h
        }
    }
    with open(path, 'w', encoding='utf-8') as mfile:
        json.dump(doc, mfile, indent=2, sort_keys=True)
        mfile.write('\n')


def load_models(path):
    '''
    Read a JSON model file written by save_models.

    Returns:
        (FareModel, BlockTimeModel)
    Raises:
        CalibrationError: the document is malformed
        IOError: the file can not be read
    '''
    with open(path, encoding='utf-8') as mfile:
        try:
            doc = json.load(mfile)
        except ValueError as exc:
            raise CalibrationError('%s: not a model file (%s)' % (path, exc))
    try:
        fdoc, bdoc = doc['fare'], doc['blocktime']
        fare = FareModel(
            float(fdoc['log_intercept']), float(fdoc['log_slope']),
            float(fdoc['domain_min_mi']), float(fdoc['domain_max_mi'])
        )
        coefs = tuple(float(c) for c in bdoc['coefficients'])
        degree = int(bdoc['degree'])
        if len(coefs) != degree + 1:
            raise CalibrationError('%s: %d coefficients for degree %d' % (path, len(coefs), degree))
        poly = PolynomialModel(
            coefs, degree, float(bdoc['domain_min_mi']), float(bdoc['domain_max_mi'])
        )
        blocktime = BlockTimeModel(poly, float(bdoc.get('min_block_h', DEFAULT_MIN_BLOCK_H)))
    except (KeyError, TypeError, ValueError) as exc:
        raise CalibrationError('%s: malformed model file (%r)' % (path, exc))
    values = list(fare) + list(coefs) + [blocktime.min_block_h]
    if not all(math.isfinite(v) for v in values):
        raise CalibrationError('%s: model values must be finite' % path)
    return fare, blocktime
