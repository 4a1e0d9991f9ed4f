#!/usr/bin/env python
'''
Command line entry point of the aamdemandlibrary.

    aamdemand.py synth --out-dir scen
    aamdemand.py calibrate --fares scen/fares.csv --blocktimes scen/blocktimes.csv --out models.json
    aamdemand.py evaluate --trips scen/trips.csv --tracts scen/tracts.csv --hubs scen/hubs.csv
        --models models.json --params scen/params.txt --out evals.csv
    aamdemand.py report --evals evals.csv --out-dir report
    aamdemand.py curves --models models.json --params scen/params.txt --out curves.csv

:license: MIT, see LICENSE for more details.
'''
import sys
from aamdemandlibrary.cli import main

if __name__ == '__main__':
    sys.exit(main())
