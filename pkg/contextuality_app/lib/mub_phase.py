"""
Single-qudit mutually unbiased bases, phase-point (facet) operators and the two polytopes they cut out.

- P_STAB: Tr(ρ A^q) >= 0 for every q in Z_p^(p+1).
- P_SIM: Tr(ρ A^r) >= 0 for r in the simulable facet family only.

Values are stored raw as Tr(ρ A^r), never divided by p, so "negative" means exactly min_r Tr(ρ A^r) < 0.

Called by:
    - contextuality_app.lib.stab2
    - contextuality_app.lib.witnessgraph
    - contextuality_app.lib.mis
    - contextuality_app.lib.classify
    - contextuality_app.management.commands.dump_ops
"""

import enum
import functools
import itertools
import logging
from dataclasses import dataclass

import numpy as np

from contextuality_app.lib.ffield import require_prime
from contextuality_app.lib.weyl import ComplexMatrix, Displacement, displacement_matrix, omega

log = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-9
DEFAULT_TOLERANCE = 1e-8


class MubConstructionError(Exception):
    """
    Represents a projector that failed its rank-1 check; each listed displacement has p distinct eigenvalues.
    """


class StrangeStateError(Exception):
    """
    Represents a facet operator whose lowest eigenspace is not one-dimensional.
    """


class UnsupportedDimensionError(Exception):
    """
    Represents a request outside the dimensions the construction covers (e.g. the Wigner function at p=2).
    """


@dataclass(frozen=True, slots=True)
class MubIndex:
    """
    Basis j in {1, ..., p+1} and level q in Z_p.

    Basis j is the eigenbasis of the j-th operator in [D_{0,1}, D_{1,0}, D_{1,1}, ..., D_{1,p-1}].
    """

    j: int
    q: int
    p: int

    def __post_init__(self) -> None:
        require_prime(self.p)
        if not 1 <= self.j <= self.p + 1:
            raise ValueError(f'basis index ``{self.j}`` outside 1..{self.p + 1}')
        if not 0 <= self.q < self.p:
            raise ValueError(f'level ``{self.q}`` not reduced modulo {self.p}')


class FacetKind(enum.Enum):
    GENERIC = 'generic'
    SIMULABLE = 'simulable'


@dataclass(frozen=True, slots=True)
class FacetVector:
    """
    Labels the operator A^r = -I + Σ_j Π_j^{r_j}.

    Simulable members also carry their position `index` in facet_family(p).
    """

    r: tuple[int, ...]
    p: int
    kind: FacetKind = FacetKind.GENERIC
    index: int | None = None

    def __post_init__(self) -> None:
        require_prime(self.p)
        if len(self.r) != self.p + 1:
            raise ValueError(f'facet vector ``{self.r}`` must have {self.p + 1} entries')
        if any(not 0 <= entry < self.p for entry in self.r):
            raise ValueError(f'facet vector ``{self.r}`` not reduced modulo {self.p}')

    @classmethod
    def generic(cls, r: tuple[int, ...] | list[int], p: int) -> 'FacetVector':
        return cls(tuple(int(entry) % p for entry in r), p)

    def label(self) -> str:
        return ''.join(str(entry) for entry in self.r)


def basis_displacement(j: int, p: int) -> Displacement:
    """
    Returns the operator whose eigenbasis is basis j.
    """
    if j == 1:
        return Displacement(0, 1, p)
    if j == 2:
        return Displacement(1, 0, p)
    return Displacement(1, j - 2, p)


def _frozen(matrix: np.ndarray) -> ComplexMatrix:
    matrix = np.array(matrix, dtype=np.complex128)
    matrix.flags.writeable = False
    return matrix


@functools.lru_cache(maxsize=None)
def _projector_cached(j: int, q: int, p: int) -> ComplexMatrix:
    """
    Spectral projector (1/p) Σ_m (ω^{-q} D)^m; exact since D^p = I.
    """
    operator = omega(p) ** (-q) * displacement_matrix(basis_displacement(j, p))
    projector = np.zeros((p, p), dtype=np.complex128)
    power = np.eye(p, dtype=np.complex128)
    for _ in range(p):
        projector += power
        power = power @ operator
    projector /= p
    rank_residual = np.linalg.norm(projector @ projector - projector)
    trace = np.trace(projector).real
    if rank_residual > RANK_TOLERANCE or abs(trace - 1.0) > RANK_TOLERANCE:
        raise MubConstructionError(
            f'basis {j} level {q} at p={p}: trace ``{trace}``, idempotency residual ``{rank_residual}``'
        )
    ## symmetrize away rounding so Hermiticity holds to machine precision
    return _frozen((projector + projector.conj().T) / 2)


def mub_projector(m: MubIndex) -> ComplexMatrix:
    """
    Returns the rank-1 projector onto the eigenvector of the j-th listed operator with eigenvalue ω^q.
    """
    return _projector_cached(m.j, m.q, m.p)


@functools.lru_cache(maxsize=None)
def _vector_cached(j: int, q: int, p: int) -> np.ndarray:
    projector = _projector_cached(j, q, p)
    column = projector[:, int(np.argmax(np.linalg.norm(projector, axis=0)))]
    vector = column / np.linalg.norm(column)
    pivot = vector[int(np.argmax(np.abs(vector) > RANK_TOLERANCE))]
    vector = vector * (abs(pivot) / pivot)
    vector.flags.writeable = False
    return vector


def mub_vector(m: MubIndex) -> np.ndarray:
    """
    Returns the basis vector with its first nonzero amplitude real and positive.
    """
    return _vector_cached(m.j, m.q, m.p)


@functools.lru_cache(maxsize=None)
def projector_table(p: int) -> np.ndarray:
    """
    Array of shape (p+1, p, p, p) with table[j-1, q] = Π_j^q.
    """
    require_prime(p)
    table = np.stack([np.stack([_projector_cached(j, q, p) for q in range(p)]) for j in range(1, p + 2)])
    table.flags.writeable = False
    return table


@functools.lru_cache(maxsize=None)
def _a_operator_cached(r: tuple[int, ...], p: int) -> ComplexMatrix:
    operator = -np.eye(p, dtype=np.complex128)
    for j, level in enumerate(r, start=1):
        operator = operator + _projector_cached(j, level, p)
    return _frozen(operator)


def a_operator(r: FacetVector) -> ComplexMatrix:
    """
    Returns A^r = -I + Σ_j Π_j^{r_j}; Hermitian with unit trace.
    """
    return _a_operator_cached(r.r, r.p)


def facet_direction_vectors(p: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """
    Returns (a, b) with a = [1, 0, 1, 2, ..., p-1] and b = -[0, 1, 1, ..., 1] modulo p.
    """
    a = (1, 0) + tuple(range(1, p))
    b = (0,) + tuple((-1) % p for _ in range(p))
    return a, b


@functools.lru_cache(maxsize=None)
def facet_family(p: int) -> tuple[FacetVector, ...]:
    """
    Lists the simulable facets: all of Z_2^3 for p=2, otherwise r = x·a + z·b at index x·p + z.
    """
    require_prime(p)
    if p == 2:
        vectors = [tuple(r) for r in itertools.product(range(2), repeat=3)]
    else:
        a, b = facet_direction_vectors(p)
        vectors = [tuple((x * a_j + z * b_j) % p for a_j, b_j in zip(a, b)) for x in range(p) for z in range(p)]
    return tuple(FacetVector(r, p, FacetKind.SIMULABLE, index) for index, r in enumerate(vectors))


def facet_for_displacement(u: Displacement) -> FacetVector:
    """
    Returns the family member equal to D_u A^0 D_u† (odd p).
    """
    if u.p == 2:
        raise UnsupportedDimensionError('facet displacement labels cover odd p only')
    return facet_family(u.p)[u.x * u.p + u.z]


def displaced_facet(u: Displacement) -> ComplexMatrix:
    """
    Returns D_u A^0 D_u†.
    """
    d = displacement_matrix(u)
    return d @ a_operator(facet_family(u.p)[0]) @ d.conj().T


def facet_values(rho: np.ndarray, p: int) -> np.ndarray:
    """
    Returns Tr(ρ A^r) for every r in facet_family(p), in family order.
    """
    return np.array([np.trace(rho @ a_operator(r)).real for r in facet_family(p)])


@dataclass(frozen=True)
class PolytopeCheck:
    inside: bool
    min_value: float
    argmin: FacetVector
    values: tuple[float, ...]


def in_psim(rho: np.ndarray, tolerance: float = DEFAULT_TOLERANCE) -> PolytopeCheck:
    """
    Checks Tr(ρ A^r) >= -tolerance over the simulable family; returns the minimizing facet and value.
    """
    p = rho.shape[0]
    values = facet_values(rho, p)
    position = int(np.argmin(values))
    min_value = float(values[position])
    return PolytopeCheck(
        inside=min_value >= -tolerance,
        min_value=min_value,
        argmin=facet_family(p)[position],
        values=tuple(float(value) for value in values),
    )


def basis_overlap_table(rho: np.ndarray) -> np.ndarray:
    """
    T[j-1, s] = Tr(ρ Π_j^s).
    """
    p = rho.shape[0]
    return np.einsum('ab,jsba->js', rho, projector_table(p)).real


def pstab_minimum(rho: np.ndarray) -> float:
    """
    Returns min over all q of Tr(ρ A^q).

    Tr(ρ A^q) = -1 + Σ_j T[j, q_j], and the q_j are independent, so the minimum is taken per basis.
    """
    table = basis_overlap_table(rho)
    return float(-np.trace(rho).real + table.min(axis=1).sum())


def pstab_values(rho: np.ndarray) -> np.ndarray:
    """
    Returns Tr(ρ A^q) for every q in Z_p^(p+1), in itertools.product order (p^(p+1) values).
    """
    p = rho.shape[0]
    table = basis_overlap_table(rho)
    total = np.zeros(1)
    for row in table:
        total = np.add.outer(total, row).reshape(-1)
    return total - np.trace(rho).real


def in_pstab(rho: np.ndarray, tolerance: float = DEFAULT_TOLERANCE) -> bool:
    """
    Checks Tr(ρ A^q) >= -tolerance for every q in Z_p^(p+1).
    """
    return pstab_minimum(rho) >= -tolerance


def wigner(rho: np.ndarray, u: FacetVector) -> float:
    """
    Returns the raw discrete Wigner value Tr(ρ A^u) for a simulable facet u (odd p).
    """
    if u.p == 2:
        raise UnsupportedDimensionError('the discrete Wigner function is used for odd p only')
    if u.kind is not FacetKind.SIMULABLE:
        raise UnsupportedDimensionError(f'``{u.label()}`` is not a simulable facet')
    return float(np.trace(rho @ a_operator(u)).real)


def lowest_eigenstate(r: FacetVector) -> tuple[np.ndarray, float, int]:
    """
    Returns (projector onto a lowest eigenvector of A^r, lowest eigenvalue, its multiplicity).
    """
    eigenvalues, eigenvectors = np.linalg.eigh(a_operator(r))
    lowest = float(eigenvalues[0])
    multiplicity = int(np.sum(np.abs(eigenvalues - lowest) < RANK_TOLERANCE))
    vector = eigenvectors[:, 0]
    return np.outer(vector, vector.conj()), lowest, multiplicity


def strange_state(p: int) -> np.ndarray:
    """
    Returns the projector onto the -1 eigenvector of A^0 (odd p).
    """
    require_prime(p)
    if p == 2:
        raise UnsupportedDimensionError('the strange state is defined for odd p; use t_state() at p=2')
    projector, lowest, multiplicity = lowest_eigenstate(facet_family(p)[0])
    if abs(lowest + 1.0) > RANK_TOLERANCE or multiplicity != 1:
        raise StrangeStateError(f'lowest eigenvalue of A^0 at p={p} is ``{lowest}`` with multiplicity ``{multiplicity}``')
    return projector


def t_state() -> np.ndarray:
    """
    Returns the qubit state with Bloch vector -(1, 1, 1)/√3, antiparallel to the A^(0,0,0) direction.
    """
    x_matrix = displacement_matrix(Displacement(1, 0, 2))
    y_matrix = displacement_matrix(Displacement(1, 1, 2))
    z_matrix = displacement_matrix(Displacement(0, 1, 2))
    return (np.eye(2) - (x_matrix + y_matrix + z_matrix) / np.sqrt(3)) / 2


def maximally_mixed(p: int) -> np.ndarray:
    return np.eye(require_prime(p), dtype=np.complex128) / p


## json codec ------------------------------------------------------


def operator_to_json(matrix: np.ndarray) -> list[list[list[float]]]:
    """
    Row-major nested list of [re, im] pairs.
    """
    return [[[float(entry.real), float(entry.imag)] for entry in row] for row in np.asarray(matrix, dtype=np.complex128)]


def operator_from_json(data: object) -> np.ndarray:
    """
    Parses a row-major matrix of [re, im] pairs (plain real numbers are accepted as entries).

    Raises ValueError on malformed input.
    """
    if not isinstance(data, list) or not data or not all(isinstance(row, list) for row in data):
        raise ValueError('matrix must be a non-empty list of rows')
    size = len(data)
    matrix = np.zeros((size, size), dtype=np.complex128)
    for i, row in enumerate(data):
        if len(row) != size:
            raise ValueError(f'row {i} has ``{len(row)}`` entries, expected {size}')
        for k, entry in enumerate(row):
            if isinstance(entry, (int, float)) and not isinstance(entry, bool):
                matrix[i, k] = float(entry)
            elif isinstance(entry, list) and len(entry) == 2 and all(isinstance(part, (int, float)) for part in entry):
                matrix[i, k] = complex(entry[0], entry[1])
            else:
                raise ValueError(f'entry ({i}, {k}) is not a number or an [re, im] pair: ``{entry!r}``')
    return matrix
