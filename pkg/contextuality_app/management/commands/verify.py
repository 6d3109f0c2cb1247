"""
Runs the acceptance suite and writes a machine-readable pass/fail report.

Usage:
    python manage.py verify
    python manage.py verify --p 2 --criteria bijection --criteria solver_exactness
    python manage.py verify --p 3 --criteria bijection --inject-wrong-facet

Notes:
- Primes default to 2 and 3; repeat `--p` to choose.
- Exits 0 when every selected criterion passes, 1 naming the first failing criterion otherwise.
- `--inject-wrong-facet` pairs each witness with the next facet, a negative control the bijection check must fail.
"""

import logging
import pathlib
from argparse import ArgumentParser

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from contextuality_app.lib import acceptance
from contextuality_app.lib.run_config import RunConfigError, build_run_config, dump_json, write_output

log = logging.getLogger(__name__)


def build_options(options: dict[str, object]) -> acceptance.AcceptanceOptions:
    """
    Validates each requested prime and collects the shared settings from the first one's run config.

    Called by: handle()
    """
    primes_option = options.get('p') or [2, 3]
    configs = [build_run_config({**options, 'p': p}) for p in primes_option]  # type: ignore[union-attr]
    primes = tuple(sorted({cfg.p for cfg in configs}))
    shared = configs[0]
    return acceptance.AcceptanceOptions(
        primes=primes,
        trials=shared.trials,
        seed=shared.seed,
        grid=shared.grid,
        threads=shared.threads,
        timeout=shared.timeout,
        inject_wrong_facet=bool(options.get('inject_wrong_facet')),
        orthogonality_tolerance=settings.CONTEXTUALITY_ORTHOGONALITY_TOLERANCE,
    )


class Command(BaseCommand):
    """
    Runs the acceptance suite.
    """

    help = 'Runs the acceptance criteria and reports pass/fail per criterion'

    def add_arguments(self, parser: ArgumentParser) -> None:
        """
        Adds command-line arguments.

        Called by: Django management command runner
        """
        parser.add_argument('--config', type=str, help='key=value run-config file')
        parser.add_argument('--p', type=int, action='append', help='prime to verify (repeatable; default 2 and 3)')
        parser.add_argument('--criteria', type=str, action='append', help='criterion name (repeatable; default all)')
        parser.add_argument('--trials', type=int, default=None, help='random trials for the bijection check')
        parser.add_argument('--seed', type=int, default=None, help='random seed')
        parser.add_argument('--grid', type=int, default=None, help='slice grid resolution per axis')
        parser.add_argument('--threads', type=int, default=None, help='worker threads for per-facet work')
        parser.add_argument('--timeout', type=str, default=None, help='solver timeout in seconds, or "none"')
        parser.add_argument('--output', type=str, default=None, help='report file (default stdout)')
        parser.add_argument('--inject-wrong-facet', action='store_true', help='negative control for the bijection check')

    def handle(self, *args: object, **options: object) -> None:
        """
        Executes the command.

        Called by: Django management command runner
        """
        try:
            suite_options = build_options(options)
            names = options.get('criteria') or None
            if names is not None:
                unknown = [name for name in names if name not in acceptance.CRITERIA]  # type: ignore[union-attr]
                if unknown:
                    raise RunConfigError(f'unknown criteria: {", ".join(unknown)}')
        except RunConfigError as exc:
            raise CommandError(str(exc), returncode=2) from exc

        results = acceptance.run_acceptance(suite_options, names)  # type: ignore[arg-type]
        failures = [result.name for result in results if result.passed is False]
        report = {
            'primes': list(suite_options.primes),
            'seed': suite_options.seed,
            'passed': not failures,
            'first_failure': failures[0] if failures else None,
            'criteria': [result.to_dict() for result in results],
        }
        text = dump_json(report)
        output = options.get('output')
        if output:
            try:
                write_output(pathlib.Path(str(output)), text)
            except RunConfigError as exc:
                raise CommandError(str(exc), returncode=2) from exc
            self.stdout.write(f'Wrote report to: {output}')
        else:
            self.stdout.write(text, ending='')

        for result in results:
            if result.passed is None:
                style = self.style.WARNING
            else:
                style = self.style.SUCCESS if result.passed else self.style.ERROR
            self.stderr.write(style(f'{result.name}: {result.status}'))

        if failures:
            raise CommandError(f'criterion ``{failures[0]}`` failed', returncode=1)

        ## end def handle()

    ## end class Command()
