"""
Builds the exclusivity graph Γ^r of the two-qudit witness set and exports it.

Usage:
    python manage.py graph --p 2 --facet 0 --format dimacs
    python manage.py graph --p 3 --facet all --backend both --output ./graphs/

Notes:
- With a single facet and no `--output`, the graph is written to stdout.
- With `--output`, one file per facet is written into that directory: `gamma_p{p}_facet{index}.{dimacs|json}`.
- A backend mismatch exits with code 2 and a summary of the disagreeing pairs.
"""

import logging
import pathlib
from argparse import ArgumentParser

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from contextuality_app.lib import mub_phase, witnessgraph
from contextuality_app.lib.facet_runner import run_per_facet
from contextuality_app.lib.run_config import RunConfig, RunConfigError, add_run_config_arguments, build_run_config

log = logging.getLogger(__name__)


def graph_filename(p: int, facet_index: int, fmt: str) -> str:
    """
    Returns the per-facet file name.

    Called by: handle()
    """
    return f'gamma_p{p}_facet{facet_index}.{fmt}'


def build_graphs(cfg: RunConfig) -> list[witnessgraph.ExclusivityGraph]:
    """
    Builds one graph per requested facet, in facet order.

    Called by: handle()
    """
    family = mub_phase.facet_family(cfg.p)
    facets = [family[index] for index in cfg.facet_indices()]
    tolerance: float = settings.CONTEXTUALITY_ORTHOGONALITY_TOLERANCE
    return run_per_facet(lambda facet: witnessgraph.build_graph(cfg.p, facet, cfg.backend, tolerance), facets, cfg.threads)


class Command(BaseCommand):
    """
    Builds and exports exclusivity graphs.
    """

    help = 'Builds the exclusivity graph of the witness projector set for one or all facets'

    def add_arguments(self, parser: ArgumentParser) -> None:
        """
        Adds command-line arguments.

        Called by: Django management command runner
        """
        add_run_config_arguments(parser, ('p', 'facet', 'backend', 'format', 'output', 'threads'))

    def handle(self, *args: object, **options: object) -> None:
        """
        Executes the command.

        Called by: Django management command runner
        """
        try:
            cfg = build_run_config(options, default_format='dimacs')
            if cfg.format == 'csv':
                raise RunConfigError('graphs export as dimacs or json')
            if cfg.output is None and len(cfg.facet_indices()) > 1:
                raise RunConfigError('--output directory is required when exporting more than one facet')
        except RunConfigError as exc:
            raise CommandError(str(exc), returncode=2) from exc

        try:
            graphs = build_graphs(cfg)
        except witnessgraph.BackendMismatchError as exc:
            raise CommandError(f'backend mismatch: {exc}', returncode=2) from exc

        if cfg.output is None:
            self.stdout.write(witnessgraph.export_graph(graphs[0], cfg.format).decode('utf-8'), ending='')
            return

        for graph in graphs:
            index = graph.facet.index if graph.facet is not None and graph.facet.index is not None else 0
            path: pathlib.Path = cfg.output / graph_filename(cfg.p, index, cfg.format)
            try:
                witnessgraph.write_graph(graph, path, cfg.format)
            except witnessgraph.GraphExportError as exc:
                raise CommandError(str(exc), returncode=2) from exc
            self.stdout.write(self.style.SUCCESS(f'Wrote {graph.n} vertices, {graph.edge_count()} edges to: {path}'))

        ## end def handle()

    ## end class Command()
