import logging
import pathlib
import tempfile

from django.test import SimpleTestCase as TestCase
from django.test.utils import override_settings

from contextuality_app.lib.run_config import RunConfigError, build_run_config, dump_json, read_config_file

log = logging.getLogger(__name__)


class BuildRunConfigTest(TestCase):
    """
    Checks option merging and validation.
    """

    @override_settings(CONTEXTUALITY_TOLERANCE=1e-8, CONTEXTUALITY_DEFAULT_SEED=20140612, CONTEXTUALITY_DEFAULT_THREADS=1)
    def test_defaults_from_settings(self):
        """
        Checks that absent options fall back to settings.
        """
        cfg = build_run_config({'p': 3, 'facet': None, 'seed': None})
        self.assertEqual(3, cfg.p)
        self.assertIsNone(cfg.facet)
        self.assertEqual(list(range(9)), cfg.facet_indices())
        self.assertEqual('numeric', cfg.backend)
        self.assertEqual('json', cfg.format)
        self.assertEqual(1e-8, cfg.tolerance)
        self.assertEqual(20140612, cfg.seed)
        self.assertEqual(1, cfg.threads)
        self.assertIsNone(cfg.output)

    @override_settings(CONTEXTUALITY_SOLVER_TIMEOUT_SECONDS={'2': None, '3': None, '5': 3600.0})
    def test_timeout_defaults_per_prime(self):
        """
        Checks no timeout at p ≤ 3 and one hour at p=5.
        """
        self.assertIsNone(build_run_config({'p': 3}).timeout)
        self.assertEqual(3600.0, build_run_config({'p': 5}).timeout)
        self.assertIsNone(build_run_config({'p': 5, 'timeout': 'none'}).timeout)
        self.assertEqual(2.5, build_run_config({'p': 5, 'timeout': '2.5'}).timeout)

    def test_non_prime_rejected(self):
        """
        Checks that p=4 fails with "p must be prime".
        """
        with self.assertRaises(RunConfigError) as context:
            build_run_config({'p': 4})
        self.assertIn('p must be prime', str(context.exception))

    def test_unsupported_prime_rejected(self):
        """
        Checks that a prime outside 2, 3, 5, 7 is refused.
        """
        with self.assertRaises(RunConfigError) as context:
            build_run_config({'p': 11})
        self.assertIn('p must be one of 2, 3, 5, 7', str(context.exception))
        self.assertEqual(7, build_run_config({'p': 7}).p)

    def test_missing_p_rejected(self):
        """
        Checks that p is required.
        """
        with self.assertRaises(RunConfigError):
            build_run_config({})

    def test_facet_range(self):
        """
        Checks that the facet index must lie inside the family.
        """
        self.assertEqual([7], build_run_config({'p': 2, 'facet': '7'}).facet_indices())
        self.assertIsNone(build_run_config({'p': 2, 'facet': 'all'}).facet)
        with self.assertRaises(RunConfigError):
            build_run_config({'p': 2, 'facet': 8})
        with self.assertRaises(RunConfigError):
            build_run_config({'p': 3, 'facet': 'first'})

    def test_enumerated_values(self):
        """
        Checks backend, format, tolerance and threads validation.
        """
        for options in (
            {'p': 3, 'backend': 'exact'},
            {'p': 3, 'format': 'xml'},
            {'p': 3, 'tolerance': 0},
            {'p': 3, 'threads': 0},
            {'p': 3, 'timeout': '-1'},
            {'p': 3, 'grid': 1},
        ):
            with self.assertRaises(RunConfigError, msg=str(options)):
                build_run_config(options)

    def test_config_file_precedence(self):
        """
        Checks that flags override the config file, which overrides settings.
        """
        with tempfile.TemporaryDirectory() as temp_dir:
            path = pathlib.Path(temp_dir) / 'run.env'
            path.write_text('# qutrit run\np=3\nSEED=7\nbackend=both\n')
            cfg = build_run_config({'config': str(path), 'seed': 11, 'backend': None})
        self.assertEqual(3, cfg.p)
        self.assertEqual(11, cfg.seed)
        self.assertEqual('both', cfg.backend)

    def test_config_file_errors(self):
        """
        Checks that a missing file and unknown keys are rejected.
        """
        with self.assertRaises(RunConfigError):
            read_config_file('/nonexistent/run.env')
        with tempfile.TemporaryDirectory() as temp_dir:
            path = pathlib.Path(temp_dir) / 'run.env'
            path.write_text('p=3\ncolour=blue\n')
            with self.assertRaises(RunConfigError) as context:
                read_config_file(path)
            self.assertIn('colour', str(context.exception))

    def test_dump_json(self):
        """
        Checks sorted keys, two-space indent and a trailing newline.
        """
        self.assertEqual('{\n  "a": 1,\n  "b": [\n    2\n  ]\n}\n', dump_json({'b': [2], 'a': 1}))
