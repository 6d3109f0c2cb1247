"""
Dumps operators or the witness projector set as JSON.

Usage:
    python manage.py dump_ops --p 3 --kind facets
    python manage.py dump_ops --p 2 --kind all --output ops_p2.json
    python manage.py dump_ops --p 3 --kind projectors --facet 0

Notes:
- Matrices are row-major nested lists of [re, im] pairs.
- `--kind projectors` writes JSON lines, one record per witness projector (tag, coordinates, basis id).
"""

import json
import logging
from argparse import ArgumentParser

from django.core.management.base import BaseCommand, CommandError

from contextuality_app.lib import mub_phase, stab2, weyl
from contextuality_app.lib.run_config import (
    RunConfigError,
    add_run_config_arguments,
    build_run_config,
    dump_json,
    write_output,
)

log = logging.getLogger(__name__)

KINDS: tuple[str, ...] = ('mub', 'facets', 'displacements', 'all', 'projectors')


def operator_payload(p: int, kind: str) -> dict[str, object]:
    """
    Collects the requested operator families.

    Called by: handle()
    """
    payload: dict[str, object] = {'p': p}
    if kind in ('mub', 'all'):
        payload['mub'] = [
            {'j': j, 'q': q, 'matrix': mub_phase.operator_to_json(mub_phase.mub_projector(mub_phase.MubIndex(j, q, p)))}
            for j in range(1, p + 2)
            for q in range(p)
        ]
    if kind in ('facets', 'all'):
        payload['facets'] = [
            {'index': facet.index, 'r': list(facet.r), 'matrix': mub_phase.operator_to_json(mub_phase.a_operator(facet))}
            for facet in mub_phase.facet_family(p)
        ]
    if kind in ('displacements', 'all'):
        payload['displacements'] = [
            {'x': x, 'z': z, 'matrix': mub_phase.operator_to_json(weyl.displacement_matrix(weyl.Displacement(x, z, p)))}
            for x in range(p)
            for z in range(p)
        ]
    return payload


def projector_lines(facet: mub_phase.FacetVector) -> str:
    """
    One JSON record per witness projector, in stable vertex order.

    Called by: handle()
    """
    lines = []
    for index, projector in enumerate(stab2.witness_set(facet)):
        record = dict(projector.to_record(), id=index, basis=stab2.basis_id(projector).to_json())
        lines.append(json.dumps(record, sort_keys=True))
    return '\n'.join(lines) + '\n'


class Command(BaseCommand):
    """
    Dumps operators as JSON.
    """

    help = 'Dumps MUB projectors, facet operators, displacements, or the witness projector set'

    def add_arguments(self, parser: ArgumentParser) -> None:
        """
        Adds command-line arguments.

        Called by: Django management command runner
        """
        add_run_config_arguments(parser, ('p', 'facet', 'output'))
        parser.add_argument('--kind', type=str, default='all', help=f'one of: {", ".join(KINDS)}')

    def handle(self, *args: object, **options: object) -> None:
        """
        Executes the command.

        Called by: Django management command runner
        """
        kind = str(options.get('kind') or 'all')
        try:
            cfg = build_run_config(options)
            if kind not in KINDS:
                raise RunConfigError(f'kind must be one of {", ".join(KINDS)}, got ``{kind}``')
        except RunConfigError as exc:
            raise CommandError(str(exc), returncode=2) from exc

        if kind == 'projectors':
            facet_index = cfg.facet if cfg.facet is not None else 0
            text = projector_lines(mub_phase.facet_family(cfg.p)[facet_index])
        else:
            text = dump_json(operator_payload(cfg.p, kind))

        if cfg.output is None:
            self.stdout.write(text, ending='')
        else:
            try:
                write_output(cfg.output, text)
            except RunConfigError as exc:
                raise CommandError(str(exc), returncode=2) from exc
            self.stdout.write(self.style.SUCCESS(f'Wrote {kind} to: {cfg.output}'))

        ## end def handle()

    ## end class Command()
