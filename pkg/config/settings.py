"""
Django settings for the stabilizer-contextuality project.

There is no web surface; Django supplies settings, logging configuration, the management-command CLI and the test runner.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/
"""

import json
import logging
import os
import pathlib

from dotenv import load_dotenv

## load envars ------------------------------------------------------
"""
The `.env` is optional: commands run out of the box on the defaults below.
"""
dotenv_path = pathlib.Path(__file__).resolve().parent.parent.parent / '.env'
if dotenv_path.exists():
    load_dotenv(str(dotenv_path), override=True)


log = logging.getLogger(__name__)


## django project settings ------------------------------------------

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR: pathlib.Path = pathlib.Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY: str = os.environ.get('SECRET_KEY', 'stabilizer-contextuality-local')

DEBUG: bool = json.loads(os.environ.get('DEBUG_JSON', 'false'))

ALLOWED_HOSTS: list[str] = []

# Application definition

INSTALLED_APPS: list[str] = [
    'contextuality_app',
]

## no models; SimpleTestCase suites never touch a database
DATABASES: dict[str, object] = {}

LANGUAGE_CODE: str = 'en-us'
TIME_ZONE: str = 'America/New_York'
USE_I18N: bool = False
USE_TZ: bool = False

DEFAULT_AUTO_FIELD: str = 'django.db.models.BigAutoField'

TEST_RUNNER: str = 'django.test.runner.DiscoverRunner'

## logging ----------------------------------------------------------

LOG_PATH: str = os.environ.get('LOG_PATH', '')
LOG_LEVEL: str = os.environ.get('LOG_LEVEL', 'INFO')  # add LOG_LEVEL=DEBUG to the .env file to see debug messages

## reminder:
## "Each 'logger' will pass messages above its log-level to its associated 'handlers',
## ...which will then output messages above the handler's own log-level."
LOGGING: dict[str, object] = {
    'version': 1,
    'disable_existing_loggers': True,
    'formatters': {
        'standard': {
            'format': '[%(asctime)s] %(levelname)s [%(module)s-%(funcName)s()::%(lineno)d] %(message)s',
            'datefmt': '%d/%b/%Y %H:%M:%S',
        },
    },
    'handlers': {
        'console': {
            'level': LOG_LEVEL,
            'class': 'logging.StreamHandler',  # stderr, so command output on stdout stays clean
            'formatter': 'standard',
        },
    },
    'loggers': {
        'contextuality_app': {
            'handlers': ['console'],
            'level': 'DEBUG',  # messages above this will get sent to the handler
            'propagate': False,
        },
    },
}
if LOG_PATH:
    LOGGING['handlers']['logfile'] = {  # type: ignore[index]
        'level': LOG_LEVEL,
        'class': 'logging.FileHandler',  # note: configure server to use system's log-rotate to avoid permissions issues
        'filename': LOG_PATH,
        'formatter': 'standard',
    }
    LOGGING['loggers']['contextuality_app']['handlers'] = ['logfile']  # type: ignore[index]


## app-level settings -----------------------------------------------

## classification tolerance: facet values below -tolerance count as negative
CONTEXTUALITY_TOLERANCE: float = float(os.environ.get('CONTEXTUALITY_TOLERANCE', '1e-8'))

## numeric backend: |<psi|phi>| below this counts as orthogonal
CONTEXTUALITY_ORTHOGONALITY_TOLERANCE: float = float(os.environ.get('CONTEXTUALITY_ORTHOGONALITY_TOLERANCE', '1e-7'))

CONTEXTUALITY_DEFAULT_SEED: int = int(os.environ.get('CONTEXTUALITY_DEFAULT_SEED', '20140612'))

CONTEXTUALITY_DEFAULT_THREADS: int = int(os.environ.get('CONTEXTUALITY_DEFAULT_THREADS', '1'))

## solver timeouts keyed by p; null means no limit
CONTEXTUALITY_SOLVER_TIMEOUT_SECONDS: dict[str, float | None] = json.loads(
    os.environ.get('CONTEXTUALITY_SOLVER_TIMEOUT_SECONDS_JSON', '{"2": null, "3": null, "5": 3600}')
)

CONTEXTUALITY_BIJECTION_TRIALS: int = int(os.environ.get('CONTEXTUALITY_BIJECTION_TRIALS', '1000'))
