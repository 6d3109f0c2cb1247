"""
Numeric Weyl-Heisenberg displacements, symplectic (Clifford) unitaries and Jamiołkowski states.

Phase convention: D_{x,z} = ω^{2⁻¹xz} X^x Z^z for odd p; for p=2 the phase is i^{xz}, so that
D_{1,1} is exactly the Pauli Y.

Called by:
    - contextuality_app.lib.mub_phase
    - contextuality_app.lib.stab2
"""

import functools
import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from contextuality_app.lib.ffield import SympMatrix, inv_mod, require_prime, sl2_elements

log = logging.getLogger(__name__)

UNITARY_TOLERANCE = 1e-9

ComplexMatrix = npt.NDArray[np.complex128]


class UnsupportedBackendError(Exception):
    """
    Represents a request the numeric Clifford formula cannot serve (the U_F formula needs odd p).
    """


@dataclass(frozen=True, slots=True)
class Displacement:
    """
    Index (x, z) of the displacement operator D_{x,z} on one qudit of prime dimension p.
    """

    x: int
    z: int
    p: int

    def __post_init__(self) -> None:
        require_prime(self.p)
        if not (0 <= self.x < self.p and 0 <= self.z < self.p):
            raise ValueError(f'displacement ``({self.x}, {self.z})`` not reduced modulo {self.p}')

    @classmethod
    def of(cls, x: int, z: int, p: int) -> 'Displacement':
        return cls(x % p, z % p, p)


def omega(p: int) -> complex:
    return complex(np.exp(2j * np.pi / p))


def _frozen(matrix: np.ndarray) -> ComplexMatrix:
    matrix = np.asarray(matrix, dtype=np.complex128)
    matrix.flags.writeable = False
    return matrix


@functools.lru_cache(maxsize=None)
def shift_matrix(p: int) -> ComplexMatrix:
    """
    X|j> = |j+1>.
    """
    return _frozen(np.roll(np.eye(p, dtype=np.complex128), 1, axis=0))


@functools.lru_cache(maxsize=None)
def clock_matrix(p: int) -> ComplexMatrix:
    """
    Z|j> = ω^j |j>.
    """
    return _frozen(np.diag(omega(p) ** np.arange(p)))


def displacement_phase(x: int, z: int, p: int) -> complex:
    if p == 2:
        return 1j ** ((x * z) % 4)
    exponent = (inv_mod(2, p) * x * z) % p
    return omega(p) ** exponent


@functools.lru_cache(maxsize=None)
def _displacement_cached(x: int, z: int, p: int) -> ComplexMatrix:
    x_power = np.linalg.matrix_power(shift_matrix(p), x)
    z_power = np.linalg.matrix_power(clock_matrix(p), z)
    return _frozen(displacement_phase(x, z, p) * (x_power @ z_power))


def displacement_matrix(d: Displacement) -> ComplexMatrix:
    """
    Returns D_{x,z} as a dense p x p matrix.
    """
    return _displacement_cached(d.x, d.z, d.p)


def symplectic_form(u: Displacement, v: Displacement) -> int:
    """
    σ(u, v) with D_u D_v = ω^{σ(u,v)} D_v D_u.
    """
    return (u.z * v.x - u.x * v.z) % u.p


def unitarity_residual(matrix: np.ndarray) -> float:
    identity = np.eye(matrix.shape[0])
    return float(np.linalg.norm(matrix.conj().T @ matrix - identity))


def equal_up_to_phase(first: np.ndarray, second: np.ndarray, tolerance: float = UNITARY_TOLERANCE) -> bool:
    """
    Checks ||first - e^{iφ} second|| < tolerance for the best phase φ.
    """
    inner = np.vdot(second, first)
    if abs(inner) < tolerance:
        return bool(np.linalg.norm(first) < tolerance and np.linalg.norm(second) < tolerance)
    phase = inner / abs(inner)
    return bool(np.linalg.norm(first - phase * second) < tolerance)


@functools.lru_cache(maxsize=None)
def _symplectic_unitary_cached(alpha: int, beta: int, gamma: int, eps: int, p: int) -> ComplexMatrix:
    ## τ = ω^{2⁻¹}, so τ^m = ω^{2⁻¹ m mod p}
    half = inv_mod(2, p)
    w = omega(p)
    if beta != 0:
        beta_inv = inv_mod(beta, p)
        j = np.arange(p).reshape(-1, 1)
        k = np.arange(p).reshape(1, -1)
        exponent = (half * beta_inv * (alpha * k * k - 2 * j * k + eps * j * j)) % p
        matrix = w**exponent / np.sqrt(p)
    else:
        matrix = np.zeros((p, p), dtype=np.complex128)
        for k in range(p):
            matrix[(alpha * k) % p, k] = w ** ((half * alpha * gamma * k * k) % p)
    return _frozen(matrix)


def symplectic_unitary(matrix: SympMatrix) -> ComplexMatrix:
    """
    Returns U_F for odd p, satisfying U_F D_{x,z} U_F† = D_{F(x,z)}.
    """
    if matrix.p == 2:
        raise UnsupportedBackendError('U_F formula needs odd p; use clifford_rep_qubit() for p=2')
    return _symplectic_unitary_cached(*matrix.as_tuple(), matrix.p)


def _canonical_key(matrix: np.ndarray) -> tuple[float, ...]:
    """
    Removes the global phase (first non-negligible entry made real positive) and rounds.
    """
    flat = matrix.reshape(-1)
    pivot = flat[np.argmax(np.abs(flat) > 1e-9)]
    normalized = flat * (abs(pivot) / pivot)
    rounded = np.round(np.concatenate([normalized.real, normalized.imag]), 8)
    return tuple(float(value) + 0.0 for value in rounded)


def single_qubit_clifford_group() -> list[ComplexMatrix]:
    """
    Generates the 24 single-qubit Cliffords modulo phase by breadth-first closure over {H, S}.
    """
    hadamard = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
    phase_gate = np.array([[1, 0], [0, 1j]], dtype=np.complex128)
    generators = (hadamard, phase_gate)
    identity = np.eye(2, dtype=np.complex128)
    seen = {_canonical_key(identity)}
    ordered = [identity]
    frontier = [identity]
    while frontier:
        next_frontier = []
        for element in frontier:
            for generator in generators:
                candidate = generator @ element
                key = _canonical_key(candidate)
                if key not in seen:
                    seen.add(key)
                    ordered.append(candidate)
                    next_frontier.append(candidate)
        frontier = next_frontier
    log.debug(f'single-qubit clifford group size, ``{len(ordered)}``')
    return ordered


def satisfies_covariance(unitary: np.ndarray, matrix: SympMatrix, tolerance: float = UNITARY_TOLERANCE) -> bool:
    """
    Checks U D_{x,z} U† ∝ D_{F(x,z)} on every displacement.
    """
    p = matrix.p
    for x in range(p):
        for z in range(p):
            conjugated = unitary @ _displacement_cached(x, z, p) @ unitary.conj().T
            target = _displacement_cached(*matrix.apply(x, z), p)
            if not equal_up_to_phase(conjugated, target, tolerance):
                return False
    return True


@functools.lru_cache(maxsize=1)
def _qubit_table() -> tuple[tuple[SympMatrix, ComplexMatrix], ...]:
    group = single_qubit_clifford_group()
    table = []
    for matrix in sl2_elements(2):
        found = next((unitary for unitary in group if satisfies_covariance(unitary, matrix)), None)
        if found is None:
            raise UnsupportedBackendError(f'no qubit Clifford realises {matrix.as_tuple()}')
        table.append((matrix, _frozen(found)))
    return tuple(table)


def clifford_rep_qubit() -> list[ComplexMatrix]:
    """
    Returns one unitary per element of SL(2, Z_2), in sl2_elements(2) order, found by search.
    """
    return [unitary for _, unitary in _qubit_table()]


def clifford_unitary(matrix: SympMatrix) -> ComplexMatrix:
    """
    Dispatches to the U_F formula (odd p) or the searched qubit representative (p=2).
    """
    if matrix.p == 2:
        return dict(_qubit_table())[matrix]
    return symplectic_unitary(matrix)


def max_entangled_state(p: int) -> npt.NDArray[np.complex128]:
    return np.eye(p, dtype=np.complex128).reshape(-1) / np.sqrt(p)


def jamiolkowski_state(x: int, z: int, matrix: SympMatrix) -> npt.NDArray[np.complex128]:
    """
    Returns (D_{x,z} U_F ⊗ I)|Φ>, with |Φ> = Σ_j |jj>/√p, as a length-p² vector.
    """
    p = matrix.p
    operator = _displacement_cached(x % p, z % p, p) @ clifford_unitary(matrix)
    ## (M ⊗ I)|Φ> has amplitude M[i, j]/√p on |i j>
    return operator.reshape(-1) / np.sqrt(p)
