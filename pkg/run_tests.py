"""
Runs tests for the stabilizer-contextuality project.

Usage examples:
    (all) uv run ./run_tests.py -v
    (app) uv run ./run_tests.py -v contextuality_app
    (file) uv run ./run_tests.py -v contextuality_app.tests.test_mis
    (class) uv run ./run_tests.py -v contextuality_app.tests.test_mis.MaxIndependentSetTest
    (method) uv run ./run_tests.py -v contextuality_app.tests.test_mis.MaxIndependentSetTest.test_qubit_graph_alpha_is_eight

Notes:
- On GitHub Actions the hermetic `config.settings_ci_tests` is used; locally, `config.settings` (which reads the optional `.env`).
- The qutrit graph suites build 240-vertex graphs for several facets; run a single module while iterating.
"""

import argparse
import os
import sys
from pathlib import Path

import django
from django.conf import settings  # type: ignore
from django.test.utils import get_runner  # type: ignore


def choose_settings_module() -> str:
    """
    Picks the settings module and exports it as DJANGO_SETTINGS_MODULE.

    Called by: main()
    """
    is_running_on_github: bool = os.environ.get('GITHUB_ACTIONS', '').lower() == 'true'
    settings_module = 'config.settings_ci_tests' if is_running_on_github else 'config.settings'
    os.environ['DJANGO_SETTINGS_MODULE'] = settings_module
    return settings_module


def parse_args() -> argparse.Namespace:
    """
    Called by: main()
    """
    parser = argparse.ArgumentParser(description='Run stabilizer-contextuality tests')
    parser.add_argument(
        '-v',
        '--verbose',
        action='store_true',
        help='Increase verbosity (equivalent to unittest verbosity=2)',
    )
    parser.add_argument(
        'targets',
        nargs='*',
        help=(
            'Optional dotted test targets to run, e.g. '
            '(app) `contextuality_app` or '
            '(module) `contextuality_app.tests.test_stab2` or '
            '(class/method) dotted paths under contextuality_app.tests'
        ),
    )
    return parser.parse_args()


def main() -> None:
    """
    Discovers and runs the `contextuality_app/tests/` suites through Django's DiscoverRunner.
    """
    ## set settings as early as possible --------------------------------
    settings_module = choose_settings_module()
    args = parse_args()
    ## run from the project root so `contextuality_app` and `config` import
    project_root = Path(__file__).parent
    sys.path.insert(0, str(project_root))
    os.chdir(project_root)
    print(
        f'DJANGO_SETTINGS_MODULE={settings_module} (GITHUB_ACTIONS={os.environ.get("GITHUB_ACTIONS", "")})',
        flush=True,
    )
    ## initialize Django and use Django's test runner -----------------
    django.setup()
    TestRunner = get_runner(settings)
    test_runner = TestRunner(verbosity=2 if args.verbose else 1, interactive=False)
    failures = test_runner.run_tests(list(args.targets))
    sys.exit(0 if failures == 0 else 1)


if __name__ == '__main__':
    main()
