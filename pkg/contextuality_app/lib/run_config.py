"""
Assembles a RunConfig for the management commands.

Precedence: command-line flags > run-config file (key=value lines) > Django settings defaults.

Called by:
    - contextuality_app.management.commands.*
"""

import json
import logging
import pathlib
from argparse import ArgumentParser
from dataclasses import dataclass

from django.conf import settings
from dotenv import dotenv_values

from contextuality_app.lib.ffield import SUPPORTED_PRIMES, FieldError, require_prime
from contextuality_app.lib.mub_phase import facet_family
from contextuality_app.lib.witnessgraph import BACKENDS

log = logging.getLogger(__name__)

FORMATS: tuple[str, ...] = ('json', 'csv', 'dimacs')

## keys a run-config file may set
CONFIG_KEYS: tuple[str, ...] = (
    'p',
    'facet',
    'backend',
    'output',
    'format',
    'tolerance',
    'seed',
    'threads',
    'timeout',
    'trials',
    'grid',
)


class RunConfigError(Exception):
    """
    Represents an invalid option value or run-config file (usage error, exit code 2).
    """


@dataclass(frozen=True)
class RunConfig:
    """
    `facet` None means every facet of the family.
    """

    p: int
    facet: int | None
    backend: str
    output: pathlib.Path | None
    format: str
    tolerance: float
    seed: int
    threads: int
    timeout: float | None
    trials: int
    grid: int

    def facet_indices(self) -> list[int]:
        if self.facet is None:
            return list(range(len(facet_family(self.p))))
        return [self.facet]


def read_config_file(path: str | pathlib.Path) -> dict[str, str]:
    """
    Parses key=value lines (comments and quoting as python-dotenv reads them); keys are case-insensitive.
    """
    config_path = pathlib.Path(path)
    if not config_path.is_file():
        raise RunConfigError(f'config file ``{config_path}`` not found')
    values = {key.lower(): value for key, value in dotenv_values(config_path).items() if value is not None}
    unknown = sorted(set(values) - set(CONFIG_KEYS))
    if unknown:
        raise RunConfigError(f'unknown config key(s) in ``{config_path}``: {", ".join(unknown)}')
    log.debug(f'config file values, ``{values}``')
    return values


def default_timeout(p: int) -> float | None:
    timeouts: dict[str, float | None] = settings.CONTEXTUALITY_SOLVER_TIMEOUT_SECONDS
    return timeouts.get(str(p))


def _coerce(key: str, raw: object, cast: type) -> object:
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise RunConfigError(f'invalid value for {key}: ``{raw}``') from exc


def _parse_timeout(raw: object) -> float | None:
    if raw is None or (isinstance(raw, str) and raw.strip().lower() in ('', 'none', 'null')):
        return None
    timeout = _coerce('timeout', raw, float)
    if timeout <= 0:  # type: ignore[operator]
        raise RunConfigError(f'timeout must be positive, got ``{raw}``')
    return timeout  # type: ignore[return-value]


def build_run_config(options: dict[str, object], default_format: str = 'json') -> RunConfig:
    """
    Merges command options over the `--config` file over settings.

    Options with value None count as absent.
    """
    file_values: dict[str, object] = {}
    config_path = options.get('config')
    if config_path:
        file_values = dict(read_config_file(str(config_path)))
    merged: dict[str, object] = dict(file_values)
    merged.update({key: value for key, value in options.items() if key in CONFIG_KEYS and value is not None})

    if 'p' not in merged:
        raise RunConfigError('p is required (--p or the config file)')
    try:
        p = require_prime(_coerce('p', merged['p'], int))  # type: ignore[arg-type]
    except FieldError as exc:
        raise RunConfigError(f'p must be prime, got ``{merged["p"]}``') from exc
    if p not in SUPPORTED_PRIMES:
        raise RunConfigError(f'p must be one of {", ".join(str(q) for q in SUPPORTED_PRIMES)}, got ``{p}``')

    raw_facet = merged.get('facet', 'all')
    if str(raw_facet).lower() == 'all':
        facet = None
    else:
        facet = _coerce('facet', raw_facet, int)
        family_size = len(facet_family(p))
        if not 0 <= facet < family_size:  # type: ignore[operator]
            raise RunConfigError(f'facet index must be in 0..{family_size - 1} or "all", got ``{raw_facet}``')

    backend = str(merged.get('backend', 'numeric'))
    if backend not in BACKENDS:
        raise RunConfigError(f'backend must be one of {", ".join(BACKENDS)}, got ``{backend}``')
    output_format = str(merged.get('format', default_format))
    if output_format not in FORMATS:
        raise RunConfigError(f'format must be one of {", ".join(FORMATS)}, got ``{output_format}``')

    tolerance = _coerce('tolerance', merged.get('tolerance', settings.CONTEXTUALITY_TOLERANCE), float)
    if not 0 < tolerance < 1:  # type: ignore[operator]
        raise RunConfigError(f'tolerance must be in (0, 1), got ``{tolerance}``')
    threads = _coerce('threads', merged.get('threads', settings.CONTEXTUALITY_DEFAULT_THREADS), int)
    if threads < 1:  # type: ignore[operator]
        raise RunConfigError(f'threads must be at least 1, got ``{threads}``')
    trials = _coerce('trials', merged.get('trials', settings.CONTEXTUALITY_BIJECTION_TRIALS), int)
    if trials < 1:  # type: ignore[operator]
        raise RunConfigError(f'trials must be at least 1, got ``{trials}``')
    grid = _coerce('grid', merged.get('grid', 201), int)
    if grid < 2:  # type: ignore[operator]
        raise RunConfigError(f'grid must be at least 2, got ``{grid}``')

    output = merged.get('output')
    cfg = RunConfig(
        p=p,
        facet=facet,  # type: ignore[arg-type]
        backend=backend,
        output=pathlib.Path(str(output)) if output else None,
        format=output_format,
        tolerance=tolerance,  # type: ignore[arg-type]
        seed=_coerce('seed', merged.get('seed', settings.CONTEXTUALITY_DEFAULT_SEED), int),  # type: ignore[arg-type]
        threads=threads,  # type: ignore[arg-type]
        timeout=_parse_timeout(merged['timeout']) if 'timeout' in merged else default_timeout(p),
        trials=trials,  # type: ignore[arg-type]
        grid=grid,  # type: ignore[arg-type]
    )
    log.debug(f'run config, ``{cfg}``')
    return cfg


## argument help, shared by the commands that accept each option
ARGUMENT_HELP: dict[str, tuple[type, str]] = {
    'p': (int, 'prime dimension (2, 3, 5 or 7)'),
    'facet': (str, 'facet index into the family, or "all"'),
    'backend': (str, 'orthogonality backend: symbolic, numeric or both'),
    'output': (str, 'output file (or directory, for per-facet graph files)'),
    'format': (str, 'output format: json, csv or dimacs'),
    'tolerance': (float, 'classification tolerance'),
    'seed': (int, 'random seed'),
    'threads': (int, 'worker threads for per-facet work'),
    'timeout': (str, 'solver timeout in seconds, or "none"'),
    'trials': (int, 'random trials for the bijection check'),
    'grid': (int, 'slice grid resolution per axis'),
}


def add_run_config_arguments(parser: ArgumentParser, names: tuple[str, ...]) -> None:
    """
    Adds `--config` plus the named options; every default is None so the config file and settings can fill in.

    Called by: management commands' add_arguments()
    """
    parser.add_argument('--config', type=str, help='key=value run-config file')
    for name in names:
        cast, help_text = ARGUMENT_HELP[name]
        parser.add_argument(f'--{name}', type=cast, default=None, help=help_text)


def dump_json(payload: object) -> str:
    """
    Deterministic JSON text for command output.
    """
    return json.dumps(payload, sort_keys=True, indent=2) + '\n'


def write_output(path: pathlib.Path, text: str) -> pathlib.Path:
    """
    Writes command output to `path`, creating parent directories.

    Raises RunConfigError naming the path when the write fails.
    """
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
    except OSError as exc:
        raise RunConfigError(f'could not write ``{path}``: {exc}') from exc
    log.debug(f'wrote ``{len(text)}`` characters to ``{path}``')
    return path
