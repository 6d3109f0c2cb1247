"""
Pytest wiring: configures Django the same way `run_tests.py` does, so the suites can be collected by pytest.
"""

import os

import django

os.environ.setdefault(
    'DJANGO_SETTINGS_MODULE',
    'config.settings_ci_tests' if os.environ.get('GITHUB_ACTIONS', '').lower() == 'true' else 'config.settings',
)
django.setup()
