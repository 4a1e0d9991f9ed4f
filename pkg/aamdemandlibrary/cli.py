'''
Command line interface: calibrate, evaluate, report, curves and synth.

:license: MIT, see LICENSE for more details.
'''
import argparse
import logging
import logging.config
import os
import sys
import yaml
from aamdemandlibrary import pipeline, scenario
from aamdemandlibrary.calibrate import save_models
from aamdemandlibrary.config import load_config
from aamdemandlibrary.exceptions import AamDemandError, MissingFileError, RoutingError
from aamdemandlibrary.router import make_router

LOGGER = logging.getLogger(__name__)

LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


def setup_logging(level, path=None):
    '''
    Configure the root logger from a logging yaml file or from a level alone.
    '''
    if path:
        if not os.path.isfile(path):
            raise MissingFileError('%s: file does not exist' % path)
        with open(path, 'rt', encoding='utf-8') as lfile:
            logging.config.dictConfig(yaml.safe_load(lfile.read()))
        if level is not None:
            logging.root.setLevel(getattr(logging, level))
    else:
        logging.basicConfig(
            level=getattr(logging, level or 'WARNING'),
            format='%(asctime)s %(levelname)s %(name)s: %(message)s'
        )


def _require(*paths):
    for path in paths:
        if path and not os.path.isfile(path):
            raise MissingFileError('%s: file does not exist' % path)


def cmd_calibrate(args):
    '''Fit the fare and block time models and write the model file'''
    config = load_config(args.config)
    fare, blocktime = pipeline.calibrate_models(args.fares, args.blocktimes, config)
    save_models(args.out, fare, blocktime)
    pipeline.write_metadata(args.out, {
        'command': 'calibrate',
        'inputs': {'fares': pipeline.file_digest(args.fares),
                   'blocktimes': pipeline.file_digest(args.blocktimes)},
        'config': config.as_dict()
    })


def cmd_evaluate(args):
    '''Evaluate every trip and write evals.csv'''
    _require(args.trips, args.tracts, args.hubs, args.models, args.params, args.config)
    config = load_config(args.config)
    if args.workers is not None:
        config.workers = args.workers
    if args.seed is not None:
        config.seed = args.seed
    config.validate()
    with make_router(config.router) as router:
        context, trips = pipeline.load_context({
            'trips': args.trips, 'tracts': args.tracts, 'hubs': args.hubs,
            'models': args.models, 'params': args.params
        }, config, router)
        evals = pipeline.evaluate_frame(trips, context)
    pipeline.write_evaluations(evals, args.out)
    pipeline.write_metadata(args.out, {
        'command': 'evaluate',
        'trips': len(evals),
        'models_sha256': pipeline.file_digest(args.models),
        'params_sha256': pipeline.file_digest(args.params),
        'config': config.as_dict()
    })


def cmd_report(args):
    '''Write the mean table and the demographic share table'''
    frame = pipeline.read_evaluations(args.evals)
    if not os.path.isdir(args.out_dir):
        os.makedirs(args.out_dir)
    means = pipeline.aggregate_means(frame)
    shares = pipeline.demographic_shares(frame)
    means_path = os.path.join(args.out_dir, 'means.csv')
    pipeline.write_mean_table(means, means_path)
    pipeline.write_share_table(shares, os.path.join(args.out_dir, 'shares.csv'))
    pipeline.write_metadata(means_path, {
        'command': 'report',
        'evals_sha256': pipeline.file_digest(args.evals),
        'trip_counts': means.trip_counts
    })


def cmd_curves(args):
    '''Write the distance curves'''
    _require(args.models, args.params, args.config)
    config = load_config(args.config)
    context, _ = pipeline.load_context(
        {'models': args.models, 'params': args.params}, config, None)
    bundle = pipeline.emit_curves(context, pipeline.parse_grid(args.grid))
    pipeline.write_curves(bundle, args.out)
    pipeline.write_metadata(args.out, {
        'command': 'curves',
        'grid': args.grid,
        'crossing_distance_mi': bundle.crossing_distance_mi,
        'upward_crossings': bundle.upward_crossings,
        'models_sha256': pipeline.file_digest(args.models),
        'config': config.as_dict()
    })


def cmd_synth(args):
    '''Write a synthetic scenario'''
    scen = scenario.generate_scenario(seed=args.seed, n_tracts=args.tracts,
                                      n_trips=args.trips)
    scenario.write_scenario(args.out_dir, scen)


def build_parser():
    '''
    The argument parser of the aamdemand command.
    '''
    parser = argparse.ArgumentParser(
        prog='aamdemand', description='AAM versus ground mode choice demand model')
    parser.add_argument('-l', '--log-level', type=str.upper, choices=LOG_LEVELS,
                        default=None, help='logging level (default WARNING)')
    parser.add_argument('--log-config', default=None,
                        help='logging yaml file passed to logging.config.dictConfig')
    sub = parser.add_subparsers(dest='command')
    sub.required = True

    cal = sub.add_parser('calibrate', help='fit the fare and block time models')
    cal.add_argument('--fares', required=True)
    cal.add_argument('--blocktimes', required=True)
    cal.add_argument('--config', default=None)
    cal.add_argument('--out', required=True)
    cal.set_defaults(func=cmd_calibrate)

    ev = sub.add_parser('evaluate', help='evaluate every trip record')
    ev.add_argument('--trips', required=True)
    ev.add_argument('--tracts', required=True)
    ev.add_argument('--hubs', required=True)
    ev.add_argument('--models', required=True)
    ev.add_argument('--params', required=True)
    ev.add_argument('--config', default=None)
    ev.add_argument('--workers', type=int, default=None, help='overrides [run] workers')
    ev.add_argument('--seed', type=int, default=None, help='overrides [run] seed')
    ev.add_argument('--out', required=True)
    ev.set_defaults(func=cmd_evaluate)

    rep = sub.add_parser('report', help='mean and demographic share tables')
    rep.add_argument('--evals', required=True)
    rep.add_argument('--out-dir', required=True)
    rep.set_defaults(func=cmd_report)

    cur = sub.add_parser('curves', help='GCT, probability and air share by distance')
    cur.add_argument('--models', required=True)
    cur.add_argument('--params', required=True)
    cur.add_argument('--config', default=None)
    cur.add_argument('--grid', default='10:800:10', help='start:stop:step or a,b,c miles')
    cur.add_argument('--out', required=True)
    cur.set_defaults(func=cmd_curves)

    syn = sub.add_parser('synth', help='write a synthetic scenario')
    syn.add_argument('--out-dir', required=True)
    syn.add_argument('--seed', type=int, default=0)
    syn.add_argument('--tracts', type=int, default=200)
    syn.add_argument('--trips', type=int, default=1000)
    syn.set_defaults(func=cmd_synth)
    return parser


def main(argv=None):
    '''
    Run a command.

    Returns:
        int. 0 success, 1 invalid input, 2 file or routing failure
    '''
    args = build_parser().parse_args(argv)
    try:
        setup_logging(args.log_level, args.log_config)
        LOGGER.info('aamdemand %s', ' '.join(sys.argv[1:] if argv is None else argv))
        args.func(args)
    except (MissingFileError, RoutingError, OSError) as exc:
        LOGGER.error('%s', exc)
        sys.stderr.write('error: %s\n' % exc)
        return EXIT_IO
    except AamDemandError as exc:
        LOGGER.error('%s', exc)
        sys.stderr.write('error: %s\n' % exc)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
