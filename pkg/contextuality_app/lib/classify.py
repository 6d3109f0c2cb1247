"""
Witness values on states, region classification, slice scans and the witness/facet bijection check.

Called by:
    - contextuality_app.lib.acceptance
    - contextuality_app.management.commands.classify
    - contextuality_app.management.commands.slice
"""

import csv
import enum
import io
import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from contextuality_app.lib.mub_phase import (
    DEFAULT_TOLERANCE,
    FacetVector,
    a_operator,
    facet_family,
    facet_values,
    maximally_mixed,
    pstab_minimum,
    strange_state,
    t_state,
)
from contextuality_app.lib.witnessgraph import sigma_operator

log = logging.getLogger(__name__)

HERMITIAN_TOLERANCE = 1e-9
TRACE_TOLERANCE = 1e-9
BIJECTION_TOLERANCE = 1e-8


class StateValidationError(Exception):
    """
    Represents a matrix that is not a trace-one Hermitian operator of the expected dimension.
    """


class StateClass(enum.Enum):
    IN_PSTAB = 'InPstab'
    BOUND_REGION = 'BoundRegion'
    CONTEXTUAL = 'Contextual'
    NON_STATE = 'NonState'


def hermitian_residual(matrix: np.ndarray) -> float:
    return float(np.linalg.norm(matrix - matrix.conj().T))


def validate_density(rho: np.ndarray, p: int | None = None) -> np.ndarray:
    """
    Checks shape, Hermiticity and unit trace; positivity is not required.
    """
    rho = np.asarray(rho, dtype=np.complex128)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise StateValidationError(f'expected a square matrix, got shape ``{rho.shape}``')
    if p is not None and rho.shape[0] != p:
        raise StateValidationError(f'expected dimension {p}, got ``{rho.shape[0]}``')
    if hermitian_residual(rho) > HERMITIAN_TOLERANCE:
        raise StateValidationError(f'matrix is not Hermitian (residual ``{hermitian_residual(rho):.3e}``)')
    trace = complex(np.trace(rho))
    if abs(trace - 1.0) > TRACE_TOLERANCE:
        raise StateValidationError(f'trace is ``{trace.real:.12g}``, expected 1')
    return rho


def witness_value(r: FacetVector, rho: np.ndarray, sigma: np.ndarray) -> float:
    """
    Tr[Σ^r (ρ ⊗ σ)], which equals p³ - Tr(A^r ρ) for every unit-trace σ.
    """
    p = r.p
    for name, matrix in (('rho', rho), ('sigma', sigma)):
        if np.shape(matrix) != (p, p):
            raise StateValidationError(f'{name} has shape ``{np.shape(matrix)}``, expected ({p}, {p})')
    return float(np.trace(sigma_operator(r).matrix @ np.kron(rho, sigma)).real)


@dataclass(frozen=True)
class Classification:
    state_class: StateClass
    facet_values: tuple[float, ...]
    min_facet: float
    argmin_facet: FacetVector
    min_eigenvalue: float
    pstab_min: float
    boundary_ambiguous: bool

    def to_dict(self) -> dict[str, object]:
        return {
            'class': self.state_class.value,
            'facet_values': [float(f'{value:.12g}') for value in self.facet_values],
            'min_facet': float(f'{self.min_facet:.12g}'),
            'argmin_facet': list(self.argmin_facet.r),
            'min_eig': float(f'{self.min_eigenvalue:.12g}'),
            'pstab_min': float(f'{self.pstab_min:.12g}'),
            'boundary_ambiguous': self.boundary_ambiguous,
        }


def classify_state(rho: np.ndarray, tolerance: float = DEFAULT_TOLERANCE) -> Classification:
    """
    Assigns exactly one region:
    - NonState: some eigenvalue below -tolerance.
    - Contextual: some facet value below -tolerance.
    - InPstab: every Tr(A^q ρ) >= -tolerance.
    - BoundRegion: otherwise.

    Facet values in [-tolerance, 0) are flagged boundary_ambiguous rather than Contextual.
    """
    rho = validate_density(rho)
    p = rho.shape[0]
    values = facet_values(rho, p)
    position = int(np.argmin(values))
    min_facet = float(values[position])
    min_eigenvalue = float(np.linalg.eigvalsh(rho)[0])
    pstab_min = pstab_minimum(rho)
    if min_eigenvalue < -tolerance:
        state_class = StateClass.NON_STATE
    elif min_facet < -tolerance:
        state_class = StateClass.CONTEXTUAL
    elif pstab_min >= -tolerance:
        state_class = StateClass.IN_PSTAB
    else:
        state_class = StateClass.BOUND_REGION
    return Classification(
        state_class=state_class,
        facet_values=tuple(float(value) for value in values),
        min_facet=min_facet,
        argmin_facet=facet_family(p)[position],
        min_eigenvalue=min_eigenvalue,
        pstab_min=pstab_min,
        boundary_ambiguous=-tolerance <= min_facet < 0,
    )


## slice scans -----------------------------------------------------


@dataclass(frozen=True)
class SliceGrid:
    resolution: int = 201
    s_range: tuple[float, float] = (-1.0, 1.0)
    t_range: tuple[float, float] = (-1.0, 1.0)

    def __post_init__(self) -> None:
        if self.resolution < 2:
            raise StateValidationError(f'grid resolution must be at least 2, got ``{self.resolution}``')


@dataclass(frozen=True)
class SlicePoint:
    s: float
    t: float
    state_class: StateClass
    min_facet: float
    min_eigenvalue: float
    pstab_min: float


def first_generic_point(p: int) -> FacetVector:
    """
    The first q in product order that is not a simulable facet.
    """
    family = {r.r for r in facet_family(p)}
    for q in itertools.product(range(p), repeat=p + 1):
        if q not in family:
            return FacetVector.generic(q, p)
    raise StateValidationError(f'every q is simulable at p={p}')


def default_slice(p: int = 3) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    B0 = I/p, B1 = strange - I/p, B2 = I/p - A^q for the first non-simulable q (at p=2, the T state replaces
    the strange state and the first facet operator replaces A^q).

    B1 points at the lowest eigenvector of A^0, the most negative value any facet reaches on a state.

    On the default [-1, 1]² grid at p=3 this shows all four regions: (0, 0) is InPstab, (0, 0.15) is BoundRegion,
    (0.5, 0) is Contextual and (-1, 0) is NonState.
    """
    base = maximally_mixed(p)
    if p == 2:
        return base, t_state() - base, base - a_operator(facet_family(p)[0])
    toward_strange = strange_state(p) - base
    toward_generic = base - a_operator(first_generic_point(p))
    return base, toward_strange, toward_generic


def _check_direction(name: str, direction: np.ndarray, p: int) -> None:
    if np.shape(direction) != (p, p):
        raise StateValidationError(f'{name} has shape ``{np.shape(direction)}``, expected ({p}, {p})')
    if hermitian_residual(direction) > HERMITIAN_TOLERANCE:
        raise StateValidationError(f'{name} is not Hermitian')
    if abs(np.trace(direction)) > TRACE_TOLERANCE:
        raise StateValidationError(f'{name} is not traceless')


def slice_scan(
    base: np.ndarray,
    first: np.ndarray,
    second: np.ndarray,
    grid: SliceGrid,
    tolerance: float = DEFAULT_TOLERANCE,
) -> list[SlicePoint]:
    """
    Classifies ρ(s, t) = B0 + s·B1 + t·B2 over the grid, s outer and t inner.
    """
    base = validate_density(base)
    p = base.shape[0]
    _check_direction('B1', first, p)
    _check_direction('B2', second, p)
    points = []
    for s in np.linspace(*grid.s_range, grid.resolution):
        for t in np.linspace(*grid.t_range, grid.resolution):
            rho = base + s * first + t * second
            result = classify_state(rho, tolerance)
            points.append(
                SlicePoint(
                    s=float(s),
                    t=float(t),
                    state_class=result.state_class,
                    min_facet=result.min_facet,
                    min_eigenvalue=result.min_eigenvalue,
                    pstab_min=result.pstab_min,
                )
            )
    log.info(f'slice scan: ``{len(points)}`` points, classes ``{region_counts(points)}``')
    return points


def region_counts(points: list[SlicePoint]) -> dict[str, int]:
    counts = {state_class.value: 0 for state_class in StateClass}
    for point in points:
        counts[point.state_class.value] += 1
    return counts


def slice_to_csv(points: list[SlicePoint]) -> str:
    """
    `s,t,class,min_facet,min_eig` rows, numbers with 12 significant digits.
    """
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(['s', 't', 'class', 'min_facet', 'min_eig'])
    for point in points:
        writer.writerow(
            [
                f'{point.s:.12g}',
                f'{point.t:.12g}',
                point.state_class.value,
                f'{point.min_facet:.12g}',
                f'{point.min_eigenvalue:.12g}',
            ]
        )
    return buffer.getvalue()


## random states and the bijection check ---------------------------


def random_density_matrix(p: int, rng: np.random.Generator) -> np.ndarray:
    """
    Hilbert-Schmidt sample: G G† / Tr(G G†) with G complex Ginibre.
    """
    ginibre = rng.standard_normal((p, p)) + 1j * rng.standard_normal((p, p))
    wishart = ginibre @ ginibre.conj().T
    return wishart / np.trace(wishart).real


def random_pure_state(p: int, rng: np.random.Generator) -> np.ndarray:
    vector = rng.standard_normal(p) + 1j * rng.standard_normal(p)
    vector /= np.linalg.norm(vector)
    return np.outer(vector, vector.conj())


@dataclass
class BijectionReport:
    p: int
    trials: int
    seed: int
    sign_mismatches: int = 0
    max_residual: float = 0.0
    max_sigma_spread: float = 0.0
    first_failure: dict[str, object] | None = None
    facet_pairs: list[tuple[int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.sign_mismatches == 0 and self.max_residual < BIJECTION_TOLERANCE

    def to_dict(self) -> dict[str, object]:
        return {
            'p': self.p,
            'trials': self.trials,
            'seed': self.seed,
            'sign_mismatches': self.sign_mismatches,
            'max_residual': float(f'{self.max_residual:.6e}'),
            'max_sigma_spread': float(f'{self.max_sigma_spread:.6e}'),
            'passed': self.passed,
            'first_failure': self.first_failure,
            'facet_pairs': [list(pair) for pair in self.facet_pairs],
        }


def verify_bijection(
    p: int, trials: int, seed: int, facet_pairs: list[tuple[int, int]] | None = None
) -> BijectionReport:
    """
    For random (ρ, σ), checks sign(witness - p³) = sign(-Tr(A^r ρ)) and |witness - (p³ - Tr(A^r ρ))| < 1e-8.

    `facet_pairs` maps each witness facet index to the facet index it is compared with; the identity
    pairing is the real check and any other pairing is a negative control.
    """
    family = facet_family(p)
    pairs = facet_pairs if facet_pairs is not None else [(index, index) for index in range(len(family))]
    report = BijectionReport(p=p, trials=trials, seed=seed, facet_pairs=list(pairs))
    rng = np.random.default_rng(seed)
    mixed = maximally_mixed(p)
    for trial in range(trials):
        rho = random_density_matrix(p, rng)
        sigma = random_pure_state(p, rng)
        for witness_index, facet_index in pairs:
            value = witness_value(family[witness_index], rho, sigma)
            facet_value = float(np.trace(a_operator(family[facet_index]) @ rho).real)
            residual = abs(value - (p**3 - facet_value))
            spread = abs(value - witness_value(family[witness_index], rho, mixed))
            report.max_residual = max(report.max_residual, residual)
            report.max_sigma_spread = max(report.max_sigma_spread, spread)
            mismatch = np.sign(value - p**3) != np.sign(-facet_value)
            if mismatch:
                report.sign_mismatches += 1
            if (mismatch or residual >= BIJECTION_TOLERANCE) and report.first_failure is None:
                report.first_failure = {'trial': trial, 'witness_facet': witness_index, 'facet': facet_index, 'seed': seed}
    log.info(
        f'bijection p={p}: ``{trials}`` trials, ``{report.sign_mismatches}`` sign mismatches, '
        f'max residual ``{report.max_residual:.3e}``'
    )
    return report
