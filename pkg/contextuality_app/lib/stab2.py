"""
The two-qudit witness projector set {Π}^r and pairwise orthogonality between its members.

Separable members are Π_j^s ⊗ |k><k| with s != r_j. Entangled members are the Jamiołkowski states
(D_{x,z} U_F ⊗ I)|Φ>, stored in coset coordinates F = F_b C_{α,γ}.

Two orthogonality backends:
- symbolic: closed-form predicates over (b, α, γ, x, z) and the basis/coset correspondence (odd p).
- numeric: |<ψ|φ>| below a tolerance, from explicit state vectors (any p).

Called by:
    - contextuality_app.lib.witnessgraph
"""

import functools
import logging
from dataclasses import dataclass

import numpy as np

from contextuality_app.lib.ffield import (
    INF,
    BpElement,
    CosetLabel,
    SympMatrix,
    bp_elements,
    compose,
    coset_labels,
    coset_rep,
    coset_sort_key,
    label_to_json,
)
from contextuality_app.lib.mub_phase import FacetVector, MubIndex, mub_projector, mub_vector
from contextuality_app.lib.weyl import clifford_unitary, jamiolkowski_state

log = logging.getLogger(__name__)

NUMERIC_ORTHOGONALITY_TOLERANCE = 1e-7
MATCH_TOLERANCE = 1e-9


class CosetMapError(Exception):
    """
    Represents a failure to match a basis projector to exactly one coset state U_{F_b}|m>.
    """


@dataclass(frozen=True, slots=True)
class SepProjector:
    """
    Π_j^s ⊗ |k><k|.
    """

    j: int
    s: int
    k: int
    p: int

    tag = 'sep'

    def sort_key(self) -> tuple[int, ...]:
        return (0, self.j, self.s, self.k)

    def to_record(self) -> dict[str, object]:
        return {'tag': self.tag, 'j': self.j, 's': self.s, 'k': self.k}


@dataclass(frozen=True, slots=True)
class EntProjector:
    """
    (D_{x,z} U_F ⊗ I)|Φ> with F = F_b C_{α,γ}.
    """

    b: CosetLabel
    alpha: int
    gamma: int
    x: int
    z: int
    p: int

    tag = 'ent'

    @property
    def element(self) -> BpElement:
        return BpElement(self.alpha, self.gamma, self.p)

    @property
    def matrix(self) -> SympMatrix:
        return compose(self.b, self.element)

    def sort_key(self) -> tuple[int, ...]:
        return (1, coset_sort_key(self.b, self.p), self.alpha, self.gamma, self.x, self.z)

    def to_record(self) -> dict[str, object]:
        return {
            'tag': self.tag,
            'b': label_to_json(self.b),
            'alpha': self.alpha,
            'gamma': self.gamma,
            'x': self.x,
            'z': self.z,
        }


StabProjector = SepProjector | EntProjector


@dataclass(frozen=True, slots=True)
class SepBasis:
    j: int

    def to_json(self) -> list[object]:
        return ['sep', self.j]


@dataclass(frozen=True, slots=True)
class EntBasis:
    b: CosetLabel
    alpha: int
    gamma: int

    def to_json(self) -> list[object]:
        return ['ent', label_to_json(self.b), self.alpha, self.gamma]


BasisId = SepBasis | EntBasis


def basis_id(projector: StabProjector) -> BasisId:
    """
    Separable members group by j; entangled members group by F (all p² displacements of one F).
    """
    if isinstance(projector, SepProjector):
        return SepBasis(projector.j)
    return EntBasis(projector.b, projector.alpha, projector.gamma)


def witness_set(r: FacetVector) -> list[StabProjector]:
    """
    Lists {Π}^r in stable order: separable by (j, s, k), then entangled by (b, α, γ, x, z).

    p(p²-1) separable plus (p³-p)p² entangled members.
    """
    p = r.p
    members: list[StabProjector] = []
    for j in range(1, p + 2):
        for s in range(p):
            if s == r.r[j - 1]:
                continue
            for k in range(p):
                members.append(SepProjector(j, s, k, p))
    for b in coset_labels(p):
        for element in bp_elements(p):
            for x in range(p):
                for z in range(p):
                    members.append(EntProjector(b, element.alpha, element.gamma, x, z, p))
    log.debug(f'witness set for facet ``{r.label()}``, ``{len(members)}`` members')
    return members


## numeric backend -------------------------------------------------


def projector_vector(projector: StabProjector) -> np.ndarray:
    """
    Returns the length-p² state vector whose projector is `projector`.
    """
    p = projector.p
    if isinstance(projector, SepProjector):
        second = np.zeros(p, dtype=np.complex128)
        second[projector.k] = 1.0
        return np.kron(mub_vector(MubIndex(projector.j, projector.s, p)), second)
    return jamiolkowski_state(projector.x, projector.z, projector.matrix)


def projector_matrix(projector: StabProjector) -> np.ndarray:
    if isinstance(projector, SepProjector):
        second = np.zeros((projector.p, projector.p), dtype=np.complex128)
        second[projector.k, projector.k] = 1.0
        return np.kron(mub_projector(MubIndex(projector.j, projector.s, projector.p)), second)
    vector = projector_vector(projector)
    return np.outer(vector, vector.conj())


def orth_numeric(a: StabProjector, b: StabProjector, tolerance: float = NUMERIC_ORTHOGONALITY_TOLERANCE) -> bool:
    return bool(abs(np.vdot(projector_vector(a), projector_vector(b))) < tolerance)


## basis/coset correspondence --------------------------------------


@dataclass(frozen=True)
class CosetMap:
    """
    Π_j^q equals the projector onto U_{F_b}|m> for (b, m) = levels[(j, q)], with b = basis_to_coset[j].
    """

    p: int
    basis_to_coset: dict[int, CosetLabel]
    levels: dict[tuple[int, int], tuple[CosetLabel, int]]

    def coset_of(self, j: int) -> CosetLabel:
        return self.basis_to_coset[j]

    def level_of(self, j: int, q: int) -> int:
        return self.levels[(j, q)][1]


@functools.lru_cache(maxsize=None)
def mub_coset_map(p: int) -> CosetMap:
    """
    Matches every basis projector Π_j^q against the coset states U_{F_b}|m> by Frobenius distance.

    Raises CosetMapError unless each (j, q) matches exactly one (b, m) and each basis j lands in a single coset.
    """
    candidates: list[tuple[CosetLabel, int, np.ndarray]] = []
    for b in coset_labels(p):
        unitary = clifford_unitary(coset_rep(b, p))
        for m in range(p):
            column = unitary[:, m]
            candidates.append((b, m, np.outer(column, column.conj())))
    levels: dict[tuple[int, int], tuple[CosetLabel, int]] = {}
    basis_to_coset: dict[int, CosetLabel] = {}
    for j in range(1, p + 2):
        for q in range(p):
            target = mub_projector(MubIndex(j, q, p))
            matches = [(b, m) for b, m, candidate in candidates if np.linalg.norm(candidate - target) < MATCH_TOLERANCE]
            if len(matches) != 1:
                raise CosetMapError(f'basis {j} level {q} at p={p} matched ``{len(matches)}`` coset states')
            b, m = matches[0]
            if basis_to_coset.setdefault(j, b) != b:
                raise CosetMapError(f'basis {j} at p={p} spans cosets ``{basis_to_coset[j]!r}`` and ``{b!r}``')
            levels[(j, q)] = (b, m)
    if len(set(basis_to_coset.values())) != p + 1:
        raise CosetMapError(f'basis-to-coset assignment at p={p} is not a bijection: ``{basis_to_coset}``')
    log.debug(f'coset map at p={p}, ``{basis_to_coset}``')
    return CosetMap(p, basis_to_coset, levels)


## symbolic backend ------------------------------------------------


def orth_sep_sep(a: SepProjector, b: SepProjector) -> bool:
    """
    Orthogonal iff the first factors are (same basis, different level) or the second factors are (k differs).
    """
    first_orthogonal = a.j == b.j and a.s != b.s
    return first_orthogonal or a.k != b.k


def orth_ent_ent(a: EntProjector, b: EntProjector) -> bool:
    """
    With F = F_a⁻¹ F_b and Δ = F_a⁻¹ (x_b - x_a, z_b - z_a), the pair is nonorthogonal iff
    - Tr F != 2 (overlap squared 1/p²), or
    - F = I and Δ = 0, or
    - Tr F = 2, F != I and Δ lies on the fixed line of F: β Δz = (1-α) Δx when β != 0, Δx = 0 when β = 0.
    """
    p = a.p
    f_a_inverse = a.matrix.inverse()
    relative = f_a_inverse @ b.matrix
    delta_x, delta_z = f_a_inverse.apply(b.x - a.x, b.z - a.z)
    if relative.trace() != 2 % p:
        return False
    if relative.is_identity():
        return (delta_x, delta_z) != (0, 0)
    if relative.beta != 0:
        nonorthogonal = (relative.beta * delta_z - (1 - relative.alpha) * delta_x) % p == 0
    else:
        nonorthogonal = delta_x == 0
    return not nonorthogonal


def orth_ent_sep(e: EntProjector, s: SepProjector, coset_map: CosetMap) -> bool:
    """
    Different cosets are unbiased, hence nonorthogonal. In the same coset, with m the coset level of (j, s)
    and l the second-factor index:
    - b != ∞: nonorthogonal iff x - b·z = m - α·l
    - b = ∞: nonorthogonal iff z = α·l - m
    """
    p = e.p
    if coset_map.coset_of(s.j) != e.b:
        return False
    m = coset_map.level_of(s.j, s.s)
    if e.b is INF:
        nonorthogonal = (e.z - (e.alpha * s.k - m)) % p == 0
    else:
        nonorthogonal = (e.x - int(e.b) * e.z - (m - e.alpha * s.k)) % p == 0
    return not nonorthogonal


def orth_symbolic(a: StabProjector, b: StabProjector, coset_map: CosetMap) -> bool:
    if isinstance(a, SepProjector) and isinstance(b, SepProjector):
        return orth_sep_sep(a, b)
    if isinstance(a, EntProjector) and isinstance(b, EntProjector):
        return orth_ent_ent(a, b)
    if isinstance(a, EntProjector):
        return orth_ent_sep(a, b, coset_map)  # type: ignore[arg-type]
    return orth_ent_sep(b, a, coset_map)  # type: ignore[arg-type]
