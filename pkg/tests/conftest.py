'''
Shared fixtures: the bundled data files, fitted reference models and contexts.
'''
import os
import pytest
import aamdemandlibrary
from aamdemandlibrary import ingest
from aamdemandlibrary.config import RunConfig
from aamdemandlibrary.pipeline import calibrate_models, make_context
from aamdemandlibrary.router import make_router
from aamdemandlibrary.scenario import generate_scenario

DATA_DIR = os.path.join(os.path.dirname(aamdemandlibrary.__file__), 'data')


def data_path(name):
    '''Path of a bundled data file'''
    return os.path.join(DATA_DIR, name)


@pytest.fixture
def config():
    return RunConfig()


@pytest.fixture
def models(config):
    return calibrate_models(data_path('fares.csv'), data_path('blocktimes.csv'), config)


@pytest.fixture
def params():
    return ingest.load_params(data_path('params.txt'))[0]


@pytest.fixture
def tracts():
    return ingest.load_tracts(data_path('tracts.csv'))


@pytest.fixture
def hubs():
    return ingest.load_hubs(data_path('hubs.csv'))


@pytest.fixture
def context(tracts, hubs, models, params, config):
    fare, blocktime = models
    return make_context(tracts, hubs, fare, blocktime, params, make_router(config.router), config)


@pytest.fixture(scope='module')
def scenario():
    return generate_scenario(seed=0)


def scenario_context(scen, config):
    '''Context over a generated scenario with models fitted from its samples'''
    from aamdemandlibrary.calibrate import fit_fare_model, fit_blocktime_model
    return make_context(
        scen.tracts, scen.hubs, fit_fare_model(scen.fares),
        fit_blocktime_model(scen.blocktimes, config.blocktime_degree, config.min_block_h),
        scen.params, make_router(config.router), config
    )
