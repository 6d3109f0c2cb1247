"""
Computes the independence number α(Γ^r) per facet, with a witness independent set and the sandwich certificate.

Usage:
    python manage.py alpha --p 2
    python manage.py alpha --p 3 --facet 0 --output alpha_p3.json
    python manage.py alpha --graph external.dimacs --partition external_partition.json

Notes:
- For odd p the solver is seeded with a phase-space independent set (disable with `--no-hint`).
- A solver timeout writes the certificate with `is_exact: false` and exits with code 3.
- `--graph` solves an external DIMACS (or exported JSON) graph; without `--partition` a greedy clique partition is used.
"""

import logging
import pathlib
from argparse import ArgumentParser

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from contextuality_app.lib import mis, mub_phase, witnessgraph
from contextuality_app.lib.facet_runner import run_per_facet
from contextuality_app.lib.run_config import (
    RunConfig,
    RunConfigError,
    add_run_config_arguments,
    build_run_config,
    dump_json,
    write_output,
)

log = logging.getLogger(__name__)


def phase_space_hint(g: witnessgraph.ExclusivityGraph) -> tuple[int, ...] | None:
    """
    Returns a p³-element phase-space independent set for odd p, else None.

    Called by: solve_facet()
    """
    if g.p is None or g.p == 2 or g.facet is None:
        return None
    family = mub_phase.facet_family(g.p)
    u = next(point for point in family if point.r != g.facet.r)
    return mis.phase_space_independent_set(g, u, family[0]).vertices


def solve_facet(cfg: RunConfig, facet: mub_phase.FacetVector, use_hint: bool) -> dict[str, object]:
    """
    Builds, solves and certifies one facet.

    Called by: handle()
    """
    tolerance: float = settings.CONTEXTUALITY_ORTHOGONALITY_TOLERANCE
    g = witnessgraph.build_graph(cfg.p, facet, cfg.backend, tolerance)
    hint = phase_space_hint(g) if use_hint else None
    result = mis.max_independent_set(g, timeout=cfg.timeout, lower_bound_hint=hint)
    certificate = mis.sandwich_certificate(g, result.size)
    return {
        'facet': facet.index,
        'r': list(facet.r),
        'vertices': g.n,
        'edges': g.edge_count(),
        'classes': len(g.partition),
        'alpha': result.size,
        'is_exact': result.is_exact,
        'independent_set': list(result.vertices),
        'independent_set_labels': [g.vertex_labels[v] for v in result.vertices],
        'certificate': certificate.to_dict(),
    }


def solve_external(
    graph_path: pathlib.Path, partition_path: pathlib.Path | None, timeout: float | None
) -> dict[str, object]:
    """
    Solves an imported graph.

    Called by: handle()
    """
    text = graph_path.read_text(encoding='utf-8')
    if graph_path.suffix == '.json':
        g = witnessgraph.import_json(text)
    else:
        partition_text = partition_path.read_text(encoding='utf-8') if partition_path is not None else None
        g = witnessgraph.import_dimacs(text, partition_text)
    result = mis.max_independent_set(g, timeout=timeout)
    return {
        'graph': str(graph_path),
        'vertices': g.n,
        'edges': g.edge_count(),
        'classes': len(g.partition),
        'alpha': result.size,
        'is_exact': result.is_exact,
        'independent_set': list(result.vertices),
    }


class Command(BaseCommand):
    """
    Computes α per facet and emits certificate JSON.
    """

    help = 'Computes the exact independence number of the exclusivity graph(s) with a sandwich certificate'

    def add_arguments(self, parser: ArgumentParser) -> None:
        """
        Adds command-line arguments.

        Called by: Django management command runner
        """
        add_run_config_arguments(parser, ('p', 'facet', 'backend', 'output', 'threads', 'timeout'))
        parser.add_argument('--graph', type=str, help='external DIMACS or JSON graph to solve instead')
        parser.add_argument('--partition', type=str, help='partition sidecar JSON for an external DIMACS graph')
        parser.add_argument('--no-hint', action='store_true', help='do not seed the solver with a phase-space set')

    def handle(self, *args: object, **options: object) -> None:
        """
        Executes the command.

        Called by: Django management command runner
        """
        graph_option = options.get('graph')
        try:
            if graph_option:
                ## an external graph needs no p
                cfg = build_run_config({**options, 'p': options.get('p') or 2})
            else:
                cfg = build_run_config(options)
        except RunConfigError as exc:
            raise CommandError(str(exc), returncode=2) from exc

        if graph_option:
            partition_option = options.get('partition')
            try:
                payload: dict[str, object] = solve_external(
                    pathlib.Path(str(graph_option)),
                    pathlib.Path(str(partition_option)) if partition_option else None,
                    cfg.timeout,
                )
            except (OSError, witnessgraph.GraphImportError, mis.SolverInputError) as exc:
                raise CommandError(f'could not solve ``{graph_option}``: {exc}', returncode=2) from exc
            all_exact = bool(payload['is_exact'])
        else:
            family = mub_phase.facet_family(cfg.p)
            facets = [family[index] for index in cfg.facet_indices()]
            use_hint = not options.get('no_hint')
            try:
                rows = run_per_facet(lambda facet: solve_facet(cfg, facet, use_hint), facets, cfg.threads)
            except witnessgraph.BackendMismatchError as exc:
                raise CommandError(f'backend mismatch: {exc}', returncode=2) from exc
            all_exact = all(row['is_exact'] for row in rows)
            payload = {'p': cfg.p, 'backend': cfg.backend, 'all_exact': all_exact, 'facets': rows}

        text = dump_json(payload)
        if cfg.output is None:
            self.stdout.write(text, ending='')
        else:
            try:
                write_output(cfg.output, text)
            except RunConfigError as exc:
                raise CommandError(str(exc), returncode=2) from exc
            self.stdout.write(self.style.SUCCESS(f'Wrote certificate to: {cfg.output}'))

        if not all_exact:
            raise CommandError('solver timed out; the reported alpha is a lower bound only', returncode=3)

        ## end def handle()

    ## end class Command()
