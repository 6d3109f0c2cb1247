"""
Classifies a single-qudit state against P_STAB, P_SIM and the noncontextuality inequalities.

Usage:
    python manage.py classify --p 3 --state strange
    python manage.py classify --p 2 --state mixed --format csv
    python manage.py classify --p 3 --state ./rho.json

Notes:
- `--state` is a name (`strange`, `tstate`, `mixed`), a path to a JSON matrix, or inline JSON.
- A JSON matrix is row-major, entries either numbers or [re, im] pairs.
- Malformed or non-Hermitian/non-unit-trace input exits with code 2.
"""

import json
import logging
import pathlib
from argparse import ArgumentParser

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from contextuality_app.lib import classify, mub_phase
from contextuality_app.lib.run_config import (
    RunConfigError,
    add_run_config_arguments,
    build_run_config,
    dump_json,
    write_output,
)

log = logging.getLogger(__name__)

NAMED_STATES: tuple[str, ...] = ('strange', 'tstate', 'mixed')


def named_state(name: str, p: int) -> np.ndarray:
    """
    Returns one of the reference states.

    Called by: load_state()
    """
    if name == 'mixed':
        return mub_phase.maximally_mixed(p)
    if name == 'tstate':
        if p != 2:
            raise RunConfigError('the T state is a qubit state; use --p 2')
        return mub_phase.t_state()
    if p == 2:
        raise RunConfigError('the strange state needs odd p')
    return mub_phase.strange_state(p)


def load_state(state_option: str, p: int) -> np.ndarray:
    """
    Resolves `--state` to a matrix: a named state, a JSON file, or inline JSON.

    Called by: handle()
    """
    if state_option in NAMED_STATES:
        return named_state(state_option, p)
    if state_option.lstrip().startswith('['):
        text = state_option
    else:
        try:
            text = pathlib.Path(state_option).read_text(encoding='utf-8')
        except OSError as exc:
            raise RunConfigError(f'could not read state file ``{state_option}``: {exc}') from exc
    try:
        return mub_phase.operator_from_json(json.loads(text))
    except (json.JSONDecodeError, ValueError) as exc:
        raise RunConfigError(f'malformed state matrix: {exc}') from exc


def classification_csv(result: classify.Classification) -> str:
    """
    Called by: handle()
    """
    return (
        'class,min_facet,min_eig\n'
        f'{result.state_class.value},{result.min_facet:.12g},{result.min_eigenvalue:.12g}\n'
    )


class Command(BaseCommand):
    """
    Classifies one state.
    """

    help = 'Classifies a state as InPstab, BoundRegion, Contextual or NonState'

    def add_arguments(self, parser: ArgumentParser) -> None:
        """
        Adds command-line arguments.

        Called by: Django management command runner
        """
        add_run_config_arguments(parser, ('p', 'format', 'output', 'tolerance'))
        parser.add_argument('--state', type=str, required=True, help='strange, tstate, mixed, a JSON file, or inline JSON')

    def handle(self, *args: object, **options: object) -> None:
        """
        Executes the command.

        Called by: Django management command runner
        """
        try:
            cfg = build_run_config(options)
            if cfg.format == 'dimacs':
                raise RunConfigError('classification exports as json or csv')
            rho = classify.validate_density(load_state(str(options['state']), cfg.p), cfg.p)
        except (RunConfigError, classify.StateValidationError, mub_phase.StrangeStateError) as exc:
            raise CommandError(str(exc), returncode=2) from exc

        result = classify.classify_state(rho, cfg.tolerance)
        if cfg.format == 'csv':
            text = classification_csv(result)
        else:
            text = dump_json({'p': cfg.p, 'state': str(options['state']), **result.to_dict()})

        if cfg.output is None:
            self.stdout.write(text, ending='')
        else:
            try:
                write_output(cfg.output, text)
            except RunConfigError as exc:
                raise CommandError(str(exc), returncode=2) from exc
            self.stdout.write(self.style.SUCCESS(f'Wrote classification to: {cfg.output}'))

        ## end def handle()

    ## end class Command()
