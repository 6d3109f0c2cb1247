"""
Scans a 2D slice ρ(s, t) = B0 + s·B1 + t·B2 of state space and writes the region of every grid point as CSV.

Usage:
    python manage.py slice --p 3 --grid 201
    python manage.py slice --p 3 --grid 41 --s-range -0.5 0.5 --output slice.csv
    python manage.py slice --p 3 --directions ./directions.json

Notes:
- Defaults: B0 = I/p, B1 toward the strange state, B2 toward the first non-simulable phase-point operator.
- `--directions` reads {"B0": matrix, "B1": matrix, "B2": matrix}; B1 and B2 must be Hermitian and traceless.
- CSV columns: `s,t,class,min_facet,min_eig`, numbers with 12 significant digits.
"""

import json
import logging
import pathlib
from argparse import ArgumentParser

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from contextuality_app.lib import classify, mub_phase
from contextuality_app.lib.run_config import RunConfigError, add_run_config_arguments, build_run_config, write_output

log = logging.getLogger(__name__)


def load_directions(path: pathlib.Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Reads B0, B1 and B2 from a JSON file.

    Called by: handle()
    """
    try:
        data = json.loads(path.read_text(encoding='utf-8'))
        return tuple(mub_phase.operator_from_json(data[key]) for key in ('B0', 'B1', 'B2'))  # type: ignore[return-value]
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise RunConfigError(f'malformed directions file ``{path}``: {exc}') from exc


class Command(BaseCommand):
    """
    Writes a slice scan as CSV.
    """

    help = 'Classifies every point of a 2D state-space slice and writes CSV'

    def add_arguments(self, parser: ArgumentParser) -> None:
        """
        Adds command-line arguments.

        Called by: Django management command runner
        """
        add_run_config_arguments(parser, ('p', 'grid', 'output', 'tolerance'))
        parser.add_argument('--s-range', type=float, nargs=2, default=None, metavar=('MIN', 'MAX'), help='range of s')
        parser.add_argument('--t-range', type=float, nargs=2, default=None, metavar=('MIN', 'MAX'), help='range of t')
        parser.add_argument('--directions', type=str, default=None, help='JSON file with B0, B1, B2')

    def handle(self, *args: object, **options: object) -> None:
        """
        Executes the command.

        Called by: Django management command runner
        """
        try:
            cfg = build_run_config(options, default_format='csv')
            directions_option = options.get('directions')
            if directions_option:
                base, first, second = load_directions(pathlib.Path(str(directions_option)))
            else:
                base, first, second = classify.default_slice(cfg.p)
            grid = classify.SliceGrid(
                resolution=cfg.grid,
                s_range=tuple(options.get('s_range') or (-1.0, 1.0)),  # type: ignore[arg-type]
                t_range=tuple(options.get('t_range') or (-1.0, 1.0)),  # type: ignore[arg-type]
            )
            points = classify.slice_scan(base, first, second, grid, cfg.tolerance)
        except (RunConfigError, classify.StateValidationError, mub_phase.StrangeStateError) as exc:
            raise CommandError(str(exc), returncode=2) from exc

        text = classify.slice_to_csv(points)
        if cfg.output is None:
            self.stdout.write(text, ending='')
        else:
            try:
                write_output(cfg.output, text)
            except RunConfigError as exc:
                raise CommandError(str(exc), returncode=2) from exc
            counts = classify.region_counts(points)
            self.stdout.write(self.style.SUCCESS(f'Wrote {len(points)} points ({counts}) to: {cfg.output}'))

        ## end def handle()

    ## end class Command()
