import logging
import threading
import time

from django.test import SimpleTestCase as TestCase

from contextuality_app.lib.facet_runner import run_per_facet

log = logging.getLogger(__name__)


class RunPerFacetTest(TestCase):
    """
    Checks per-facet fan-out.
    """

    def test_inline_keeps_order(self):
        """
        Checks that threads=1 runs in the caller's thread, in order.
        """
        seen = []

        def record(item: int) -> int:
            seen.append((item, threading.current_thread() is threading.main_thread()))
            return item * item

        self.assertEqual([0, 1, 4, 9], run_per_facet(record, [0, 1, 2, 3]))
        self.assertEqual([(0, True), (1, True), (2, True), (3, True)], seen)

    def test_threads_return_input_order(self):
        """
        Checks that results come back in input order even when later items finish first.
        """

        def slow_for_small(item: int) -> str:
            time.sleep(0.02 * (4 - item))
            return f'facet-{item}'

        results = run_per_facet(slow_for_small, [0, 1, 2, 3], threads=4)
        self.assertEqual(['facet-0', 'facet-1', 'facet-2', 'facet-3'], results)

    def test_threads_run_off_main_thread(self):
        """
        Checks that workers run in worker threads.
        """
        flags = run_per_facet(lambda _: threading.current_thread() is threading.main_thread(), [0, 1, 2], threads=2)
        self.assertEqual([False, False, False], flags)

    def test_invalid_thread_count(self):
        """
        Checks that threads must be positive.
        """
        with self.assertRaises(ValueError):
            run_per_facet(lambda item: item, [1], threads=0)

    def test_worker_error_propagates(self):
        """
        Checks that a worker exception reaches the caller with its own type.
        """

        def fail_on_two(item: int) -> int:
            if item == 2:
                raise RuntimeError('facet 2 failed')
            return item

        with self.assertLogs('contextuality_app.lib.facet_runner', level='ERROR'):
            with self.assertRaises(RuntimeError) as context:
                run_per_facet(fail_on_two, [1, 2, 3], threads=2)
        self.assertEqual('facet 2 failed', str(context.exception))
