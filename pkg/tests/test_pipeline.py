'''
Tests of trip evaluation, the mean and share tables and the distance curves.
'''
import math
import time
import numpy as np
import pandas as pd
import pytest
from aamdemandlibrary import pipeline
from aamdemandlibrary.choice import GROUND, AAM, UAM, RAM, OUT_OF_RANGE, AAM_INFEASIBLE
from aamdemandlibrary.choice import RAM_MAX_MI
from aamdemandlibrary.config import RunConfig
from aamdemandlibrary.exceptions import InvalidInputError
from aamdemandlibrary.geo import GeoPoint, CensusTract, HubAirport, EARTH
from aamdemandlibrary.ingest import TripDemand, load_trips
from aamdemandlibrary.router import make_router
from conftest import data_path, scenario_context


def cosine_distance(a, b):
    lat1, lat2 = math.radians(a.lat_deg), math.radians(b.lat_deg)
    dlon = math.radians(b.lon_deg - a.lon_deg)
    return EARTH.radius_mi * math.acos(
        math.sin(lat1) * math.sin(lat2) + math.cos(lat1) * math.cos(lat2) * math.cos(dlon))


def trip(origin, dest, count=1, age='UNKNOWN', earning='UNKNOWN', industry='UNKNOWN'):
    return TripDemand(origin, dest, count, age, earning, industry)


def test_memphis_to_knoxville_by_hand(context, tracts, hubs):
    '''every step recomputed with the law of cosines and the generating formulas'''
    ev = pipeline.evaluate_trip(trip('47157000200', '47093000300', 12), context)
    origin, dest = tracts['47157000200'], tracts['47093000300']
    mem, tys = hubs['MEM'], hubs['TYS']
    wage = (22.4 + 26.1) / 2.0
    road = 1.2 * cosine_distance(origin.centroid, dest.centroid)
    ground_gct = -(0.655 * road + wage * road / 45.0 + 0.15 * road)
    access = 1.2 * cosine_distance(origin.centroid, mem.location)
    egress = 1.2 * cosine_distance(tys.location, dest.centroid)
    air = cosine_distance(mem.location, tys.location)
    fare = 20.0 * math.sqrt(air)
    block = 0.5 + 0.002 * air
    legs = access + egress
    air_gct = -(fare + wage * (0.75 + block) + 0.00125 * air)
    legs_gct = -(0.655 * legs + wage * legs / 45.0 + 0.15 * legs)
    aam_gct = air_gct + legs_gct
    prob = 1.0 / (1.0 + math.exp(ground_gct - aam_gct))

    assert ev.itinerary.origin_hub.code == 'MEM' and ev.itinerary.dest_hub.code == 'TYS'
    assert ev.ground_leg.distance_mi == pytest.approx(road, rel=1e-9)
    assert ev.itinerary.air_distance_mi == pytest.approx(air, rel=1e-9)
    assert ev.itinerary.ground_distance_mi == pytest.approx(legs, rel=1e-9)
    assert ev.air.fare_usd == pytest.approx(fare, rel=1e-9)
    assert ev.air.block_h == pytest.approx(block, rel=1e-9)
    assert ev.gct_ground.wage_usd_per_h == wage
    assert ev.gct_ground.gct_usd == pytest.approx(ground_gct, rel=1e-9)
    assert ev.gct_aam.gct_usd == pytest.approx(aam_gct, rel=1e-9)
    assert ev.gct_air_segment.gct_usd == pytest.approx(air_gct, rel=1e-9)
    assert ev.gct_ground_segment.gct_usd == pytest.approx(legs_gct, rel=1e-9)
    assert ev.choice.p_aam == pytest.approx(prob, abs=1e-9)
    assert ev.choice.range_class == RAM
    assert ev.choice.chosen == (AAM if prob > 0.5 else GROUND)
    assert ev.choice.air_share_of_gct == pytest.approx(air_gct / aam_gct, rel=1e-9)


def test_same_tract_trip(context):
    ev = pipeline.evaluate_trip(trip('47065000400', '47065000400'), context)
    assert ev.ground_leg.distance_mi == 0.0 and ev.ground_leg.time_h == 0.0
    assert ev.gct_ground.gct_usd == 0.0
    assert ev.choice == (0.0, GROUND, AAM_INFEASIBLE, 0.0)
    assert not ev.feasible and ev.gct_aam is None


def test_same_hub_trip(context):
    ev = pipeline.evaluate_trip(trip('47037000100', '47037000600'), context)
    assert ev.itinerary.origin_hub.code == ev.itinerary.dest_hub.code == 'BNA'
    assert ev.choice.range_class == AAM_INFEASIBLE
    assert ev.choice.chosen == GROUND
    assert ev.ground_leg.distance_mi > 0


def two_hub_context(config, hub_lon, models, params):
    '''Two tracts on top of two hubs on the 35th parallel'''
    fare, blocktime = models
    tracts = {
        'west': CensusTract('west', GeoPoint(35.0, -90.0), 30.0),
        'east': CensusTract('east', GeoPoint(35.0, hub_lon), 30.0)
    }
    hubs = {
        'W': HubAirport('W', GeoPoint(35.0, -90.0), 0.5, 0.25),
        'E': HubAirport('E', GeoPoint(35.0, hub_lon), 0.5, 0.25)
    }
    return pipeline.make_context(tracts, hubs, fare, blocktime, params,
                                 make_router(config.router), config)


def test_ram_trip_evaluated_normally(models, params):
    # 600 km apart
    lon = -90.0 + 600.0 / (111.195 * math.cos(math.radians(35.0)))
    ctx = two_hub_context(RunConfig(), lon, models, params)
    ev = pipeline.evaluate_trip(trip('west', 'east'), ctx)
    assert ev.choice.range_class == RAM
    assert ev.choice.chosen == AAM
    assert ev.choice.p_aam > 0.5


def test_out_of_range_trip_goes_by_ground(models, params):
    ctx = two_hub_context(RunConfig(), -80.0, models, params)
    ev = pipeline.evaluate_trip(trip('west', 'east'), ctx)
    assert ev.itinerary.air_distance_mi > RAM_MAX_MI
    assert ev.choice.range_class == OUT_OF_RANGE
    assert ev.choice.p_aam > 0.5
    assert ev.choice.chosen == GROUND
    unfiltered = two_hub_context(RunConfig(range_filter=False), -80.0, models, params)
    assert pipeline.evaluate_trip(trip('west', 'east'), unfiltered).choice.chosen == AAM


def test_excluded_class_goes_by_ground(models, params):
    ctx = two_hub_context(RunConfig(include_ram=False), -85.0, models, params)
    ev = pipeline.evaluate_trip(trip('west', 'east'), ctx)
    assert ev.itinerary.air_distance_mi < RAM_MAX_MI
    assert ev.choice.range_class == OUT_OF_RANGE
    assert ev.choice.chosen == GROUND
    assert ev.choice.p_aam > 0.5
    row = pipeline.evaluate_frame([trip('west', 'east')], ctx).iloc[0]
    assert (row['range_class'], row['chosen']) == (OUT_OF_RANGE, GROUND)
    kept = two_hub_context(RunConfig(), -85.0, models, params)
    assert pipeline.evaluate_trip(trip('west', 'east'), kept).choice.range_class == RAM


def test_uam_trip(models, params):
    ctx = two_hub_context(RunConfig(), -89.0, models, params)
    assert pipeline.evaluate_trip(trip('west', 'east'), ctx).choice.range_class == UAM


def test_unknown_tract_names_the_trip(context):
    with pytest.raises(InvalidInputError, match=r'trip 7 \(nowhere -> 47037000100\)'):
        pipeline.evaluate_trip(trip('nowhere', '47037000100'), context, index=7)


def test_evaluate_all_empty(context):
    assert pipeline.evaluate_all([], context) == []


def test_evaluate_all_bundled(context, tracts):
    trips = load_trips(data_path('trips.csv'), tracts)
    evals = pipeline.evaluate_all(trips, context)
    assert [ev.index for ev in evals] == list(range(len(trips)))
    assert [ev.trip for ev in evals] == trips


def test_workers_and_reruns_agree(scenario):
    trips = scenario.trips[:400]
    results = []
    for workers in (1, 8, 8):
        config = RunConfig(workers=workers, decision='sample', seed=4)
        results.append(pipeline.evaluate_all(trips, scenario_context(scenario, config)))
    assert results[0] == results[1] == results[2]
    other = pipeline.evaluate_all(
        trips, scenario_context(scenario, RunConfig(decision='sample', seed=5)))
    assert [ev.choice.p_aam for ev in other] == [ev.choice.p_aam for ev in results[0]]


def test_ten_thousand_trips_keep_order():
    from aamdemandlibrary.scenario import generate_scenario
    scen = generate_scenario(seed=1, n_trips=10000)
    evals = pipeline.evaluate_all(scen.trips, scenario_context(scen, RunConfig(workers=4)))
    assert [ev.trip for ev in evals] == scen.trips


def test_evals_file_is_reproducible(tmp_path, scenario):
    paths = []
    for run in range(2):
        evals = pipeline.evaluate_all(
            scenario.trips[:200], scenario_context(scenario, RunConfig(workers=1 + 3 * run)))
        path = tmp_path / ('evals%d.csv' % run)
        pipeline.write_evaluations(evals, str(path))
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    frame = pipeline.read_evaluations(str(paths[0]))
    assert list(frame.columns) == pipeline.EVAL_COLUMNS
    assert len(frame) == 200


@pytest.mark.parametrize('settings', [
    {},
    {'decision': 'sample', 'seed': 9},
    {'include_uam': False},
    {'range_filter': False, 'logit_scale': 0.05},
])
def test_frame_matches_trip_by_trip(scenario, settings):
    trips = scenario.trips[:300]
    ctx = scenario_context(scenario, RunConfig(**settings))
    fast = pipeline.evaluate_frame(trips, ctx)
    slow = pipeline.evaluations_frame(pipeline.evaluate_all(trips, ctx))
    assert list(fast.columns) == pipeline.EVAL_COLUMNS
    assert fast['chosen'].tolist() == slow['chosen'].tolist()
    assert fast['range_class'].tolist() == slow['range_class'].tolist()
    pd.testing.assert_frame_equal(fast, slow, check_dtype=False, rtol=1e-12)


def test_frame_of_bundled_trips(context, tracts):
    trips = load_trips(data_path('trips.csv'), tracts)
    fast = pipeline.evaluate_frame(trips, context)
    slow = pipeline.evaluations_frame(pipeline.evaluate_all(trips, context))
    pd.testing.assert_frame_equal(fast, slow, check_dtype=False, rtol=1e-12)
    assert fast['range_class'].tolist()[1:3] == [AAM_INFEASIBLE, AAM_INFEASIBLE]
    assert fast['gct_aam_usd'][1:3].isna().all()


def test_frame_of_no_trips(context):
    frame = pipeline.evaluate_frame([], context)
    assert list(frame.columns) == pipeline.EVAL_COLUMNS and frame.empty


def test_frame_names_the_failing_trip(context):
    trips = [trip('47037000100', '47037000600'), trip('47037000100', 'nowhere')]
    with pytest.raises(InvalidInputError, match=r'trip 1 \(47037000100 -> nowhere\)'):
        pipeline.evaluate_frame(trips, context)


def test_hundred_thousand_trips(tmp_path):
    from aamdemandlibrary.scenario import generate_scenario
    scen = generate_scenario(seed=2, n_trips=100000)
    paths = []
    for workers in (1, 4):
        ctx = scenario_context(scen, RunConfig(workers=workers))
        path = tmp_path / ('evals%d.csv' % workers)
        start = time.perf_counter()
        frame = pipeline.evaluate_frame(scen.trips, ctx)
        pipeline.write_evaluations(frame, str(path))
        assert time.perf_counter() - start < 10.0
        assert frame['trip_index'].tolist() == list(range(100000))
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


def mini_frame(rows):
    columns = ['chosen', 'count'] + [column for _, column in pipeline.MEAN_ROWS]
    return pd.DataFrame(rows, columns=columns)


def test_aggregate_means_by_hand():
    frame = mini_frame([
        (AAM, 1, -300.0, -20.0, 0.4, 18.0, 100.0, 0.7, 130.0, 2.9),
        (AAM, 3, -500.0, -40.0, 0.8, 36.0, 200.0, 0.9, 250.0, 5.5),
        (GROUND, 2, -250.0, -30.0, 0.6, 24.0, 80.0, 0.66, 100.0, 2.2),
        (GROUND, 2, np.nan, np.nan, 0.2, 10.0, 0.0, np.nan, 5.0, 0.1),
    ])
    table = pipeline.aggregate_means(frame)
    assert list(table.frame.index) == [label for label, _ in pipeline.MEAN_ROWS]
    aam = table.frame['AAM']
    assert aam['GCT by Air Transportation ($)'] == pytest.approx(450.0)
    assert aam['Distance by Air Transportation (miles)'] == pytest.approx(175.0)
    assert aam['Distance between OD (miles)'] == pytest.approx(220.0)
    ground = table.frame['Non-AAM']
    assert ground['GCT by Air Transportation ($)'] == pytest.approx(250.0)
    assert ground['Time in Air Transportation (hours)'] == pytest.approx(0.66)
    assert ground['Distance between OD (miles)'] == pytest.approx(52.5)
    assert table.trip_counts == {'Non-AAM': 4, 'AAM': 4}


def test_aggregate_means_without_aam():
    frame = mini_frame([(GROUND, 2, -250.0, -30.0, 0.6, 24.0, 80.0, 0.66, 100.0, 2.2)])
    table = pipeline.aggregate_means(frame)
    assert table.frame['AAM'].isna().all()
    assert table.trip_counts['AAM'] == 0


def share_frame(rows):
    return pd.DataFrame(rows, columns=['chosen', 'count', 'age', 'earning', 'industry'])


def test_demographic_shares_by_hand():
    frame = share_frame([
        (GROUND, 1, 'LE29', 'GT3333', 'GOODS'),
        (AAM, 3, 'A30_54', 'GT3333', 'UNKNOWN'),
    ])
    table = pipeline.demographic_shares(frame).frame.set_index(['feature', 'band'])
    assert table.loc[('age', 'LE29'), 'all_trips_pct'] == pytest.approx(25.0)
    assert table.loc[('age', 'A30_54'), 'all_trips_pct'] == pytest.approx(75.0)
    assert table.loc[('age', 'A30_54'), 'aam_trips_pct'] == pytest.approx(100.0)
    assert table.loc[('industry', 'GOODS'), 'all_trips_pct'] == pytest.approx(100.0)
    assert table.loc[('industry', 'UNKNOWN'), 'all_trips_pct'] == pytest.approx(75.0)


def test_demographic_shares_sum_to_one_hundred(scenario):
    evals = pipeline.evaluate_all(scenario.trips, scenario_context(scenario, RunConfig()))
    table = pipeline.demographic_shares(evals).frame
    known = table[table['band'] != 'UNKNOWN']
    for column in ('all_trips_pct', 'aam_trips_pct'):
        sums = known.groupby('feature')[column].sum()
        assert np.allclose(sums.values, 100.0, atol=1e-9)


def test_scenario_directionality(scenario):
    evals = pipeline.evaluate_all(scenario.trips, scenario_context(scenario, RunConfig()))
    table = pipeline.aggregate_means(evals)
    assert sum(table.trip_counts.values()) == sum(t.trip_count for t in scenario.trips)
    assert table.trip_counts['AAM'] > 0
    means = table.frame
    assert means.loc['Distance between OD (miles)', 'AAM'] > \
        means.loc['Distance between OD (miles)', 'Non-AAM']
    assert means.loc['Time in Air Transportation (hours)', 'AAM'] > \
        means.loc['Time in Air Transportation (hours)', 'Non-AAM']


def test_scenario_air_share_and_risk(scenario, context):
    crossing = pipeline.emit_curves(
        context, pipeline.parse_grid('10:800:10')).crossing_distance_mi
    evals = pipeline.evaluate_all(scenario.trips, scenario_context(scenario, RunConfig()))
    beyond = [ev for ev in evals if ev.choice.chosen == AAM
              and ev.itinerary.air_distance_mi > crossing]
    assert beyond
    assert all(ev.choice.air_share_of_gct > 0.70 for ev in beyond)
    for ev in evals:
        if ev.feasible and ev.itinerary.air_distance_mi <= RAM_MAX_MI:
            assert ev.air.risk_usd < 0.01 * ev.air.fare_usd
            assert ev.aam_eval.risk_usd < ev.aam_eval.monetary_usd
        assert ev.ground_eval.risk_usd <= ev.ground_eval.monetary_usd


def test_parse_grid():
    assert pipeline.parse_grid('10:50:10') == [10.0, 20.0, 30.0, 40.0, 50.0]
    assert len(pipeline.parse_grid('10:800:10')) == 80
    assert pipeline.parse_grid('0, 25,100') == [0.0, 25.0, 100.0]
    for bad in ('10:5:1', '1:2:0', 'a:b:c', '-5', ''):
        with pytest.raises(InvalidInputError):
            pipeline.parse_grid(bad)


def test_curves_cross_once(context):
    bundles = [pipeline.emit_curves(context, pipeline.parse_grid('10:800:10'))
               for _ in range(5)]
    first = bundles[0]
    assert first.upward_crossings == 1
    assert 150.0 <= first.crossing_distance_mi <= 260.0
    assert all(b.crossing_distance_mi == first.crossing_distance_mi for b in bundles)
    frame = first.frame
    assert list(frame.columns) == pipeline.CURVE_COLUMNS
    tail = frame[frame['distance_mi'] >= 40.0]['p_aam'].values
    assert np.all(np.diff(tail) >= 0)
    beyond = frame[frame['distance_mi'] >= first.crossing_distance_mi]
    assert (beyond['air_share'] > 0.70).all()
    assert np.allclose(frame['p_ground_minus_p_aam'], 1.0 - 2.0 * frame['p_aam'])


def test_curve_at_zero_is_infeasible(context):
    row = pipeline.emit_curves(context, [0.0]).frame.iloc[0]
    assert not row['feasible']
    assert row['range_class'] == AAM_INFEASIBLE
    assert row['p_aam'] == 0.0
