"""
Exact maximum independent sets over a clique partition, the phase-space lower bound, and the sandwich certificate.

Any independent set meets each partition class at most once, so the search branches class by class:
take one candidate of the chosen class, or leave the class empty. The bound is
(vertices chosen) + (open classes that still hold a compatible candidate).

Called by:
    - contextuality_app.lib.acceptance
    - contextuality_app.management.commands.alpha
"""

import itertools
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from contextuality_app.lib.mub_phase import FacetKind, FacetVector, a_operator, lowest_eigenstate, maximally_mixed
from contextuality_app.lib.stab2 import projector_matrix
from contextuality_app.lib.witnessgraph import ExclusivityGraph, sigma_operator

log = logging.getLogger(__name__)

PHASE_SPACE_TOLERANCE = 1e-8
CERTIFICATE_TOLERANCE = 1e-8
TIMEOUT_CHECK_INTERVAL = 1024


class PhaseSpaceError(Exception):
    """
    Represents an invalid phase-space point request (u = r, p=2, or u, v outside the facet family).
    """


class SolverInputError(Exception):
    """
    Represents a graph whose partition is not a disjoint cover by cliques.
    """


class _SolverTimeout(Exception):
    pass


@dataclass(frozen=True)
class IndependentSet:
    vertices: tuple[int, ...]
    is_exact: bool = True
    phase_point: tuple[FacetVector, FacetVector] | None = None
    nodes_explored: int = 0

    @property
    def size(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> dict[str, object]:
        payload: dict[str, object] = {
            'size': self.size,
            'vertices': list(self.vertices),
            'is_exact': self.is_exact,
            'nodes_explored': self.nodes_explored,
        }
        if self.phase_point is not None:
            payload['phase_point'] = {'u': list(self.phase_point[0].r), 'v': list(self.phase_point[1].r)}
        return payload


def _class_masks(g: ExclusivityGraph) -> list[int]:
    """
    Validates the partition and returns one bitset per class.
    """
    masks = []
    covered = 0
    for index, members in enumerate(g.partition):
        mask = 0
        for v in members:
            if not 0 <= v < g.n or mask >> v & 1 or covered >> v & 1:
                raise SolverInputError(f'partition class {index} repeats or misplaces vertex ``{v}``')
            mask |= 1 << v
        if not g.is_clique(members):
            raise SolverInputError(f'partition class {index} is not a clique')
        covered |= mask
        masks.append(mask)
    if covered != (1 << g.n) - 1:
        raise SolverInputError('partition does not cover every vertex')
    return masks


def _bits(mask: int) -> list[int]:
    found = []
    while mask:
        low = mask & -mask
        found.append(low.bit_length() - 1)
        mask ^= low
    return found


@dataclass
class _Search:
    adjacency: list[int]
    masks: list[int]
    deadline: float | None
    best: list[int] = field(default_factory=list)
    nodes: int = 0

    def run(self, chosen: list[int], allowed: int, open_classes: list[int]) -> None:
        self.nodes += 1
        if self.deadline is not None and self.nodes % TIMEOUT_CHECK_INTERVAL == 0 and time.monotonic() > self.deadline:
            raise _SolverTimeout
        live = [(self.masks[c] & allowed, c) for c in open_classes]
        live = [(candidates, c) for candidates, c in live if candidates]
        if len(chosen) + len(live) <= len(self.best):
            return
        if not live:
            self.best = list(chosen)
            log.debug(f'incumbent ``{len(self.best)}`` after ``{self.nodes}`` nodes')
            return
        ## fewest candidates first; ties go to the lowest class id
        candidates, branch_class = min(live, key=lambda item: (item[0].bit_count(), item[1]))
        remaining = [c for _, c in live if c != branch_class]
        for v in _bits(candidates):
            chosen.append(v)
            self.run(chosen, allowed & ~self.adjacency[v] & ~self.masks[branch_class], remaining)
            chosen.pop()
        self.run(chosen, allowed & ~self.masks[branch_class], remaining)


def max_independent_set(
    g: ExclusivityGraph, timeout: float | None = None, lower_bound_hint: list[int] | tuple[int, ...] | None = None
) -> IndependentSet:
    """
    Returns a maximum independent set of g by branch and bound over its partition classes.

    `lower_bound_hint` must be independent in g; it seeds the incumbent. On timeout the best set found is
    returned with is_exact False.
    """
    masks = _class_masks(g)
    deadline = time.monotonic() + timeout if timeout is not None else None
    search = _Search(adjacency=g.adjacency, masks=masks, deadline=deadline)
    if lower_bound_hint is not None:
        if not g.is_independent(lower_bound_hint):
            raise SolverInputError('lower-bound hint is not an independent set')
        search.best = sorted(lower_bound_hint)
    start = time.monotonic()
    is_exact = True
    try:
        search.run([], (1 << g.n) - 1, list(range(len(masks))))
    except _SolverTimeout:
        is_exact = False
        log.warning(f'solver timed out after ``{timeout}``s; best lower bound ``{len(search.best)}``')
    log.info(
        f'independence number ``{len(search.best)}`` (exact={is_exact}) on ``{g.n}`` vertices, '
        f'``{search.nodes}`` nodes, ``{time.monotonic() - start:.2f}``s'
    )
    return IndependentSet(vertices=tuple(sorted(search.best)), is_exact=is_exact, nodes_explored=search.nodes)


def exhaustive_independence_number(g: ExclusivityGraph) -> int:
    """
    Enumerates every independent set by include/exclude recursion, without bounding.
    """

    def extend(v: int, allowed: int) -> int:
        if v == g.n:
            return 0
        best = extend(v + 1, allowed)
        if allowed >> v & 1:
            best = max(best, 1 + extend(v + 1, allowed & ~g.adjacency[v]))
        return best

    return extend(0, (1 << g.n) - 1)


def per_basis_exhaustive(g: ExclusivityGraph) -> int:
    """
    Tries every per-class choice (one member or none) and keeps the largest independent choice.
    """
    options = [[None, *members] for members in g.partition]
    best = 0
    for choice in itertools.product(*options):
        picked = [v for v in choice if v is not None]
        if len(picked) > best and g.is_independent(picked):
            best = len(picked)
    return best


## phase space -----------------------------------------------------


def phase_space_values(g: ExclusivityGraph, u: FacetVector, v: FacetVector) -> np.ndarray:
    """
    W_Π(u, v) = Tr(Π A^u ⊗ A^v) for every vertex of a built witness graph.
    """
    if g.projectors is None or g.facet is None or g.p is None:
        raise PhaseSpaceError('phase-space values need a graph built from witness projectors')
    if g.p == 2:
        raise PhaseSpaceError('phase-space points cover odd p only')
    for point in (u, v):
        if point.kind is not FacetKind.SIMULABLE or point.p != g.p:
            raise PhaseSpaceError(f'``{point.label()}`` is not in the facet family for p={g.p}')
    product = np.kron(a_operator(u), a_operator(v))
    return np.array([np.trace(projector_matrix(projector) @ product).real for projector in g.projectors])


def phase_space_count(g: ExclusivityGraph, u: FacetVector, v: FacetVector) -> int:
    """
    Σ_Π W_Π(u, v); p³ when u != r and p³ - p when u = r.
    """
    return int(round(float(phase_space_values(g, u, v).sum())))


def phase_space_independent_set(g: ExclusivityGraph, u: FacetVector, v: FacetVector) -> IndependentSet:
    """
    Returns the p³ witness projectors with W_Π(u, v) = 1, checked independent in g.
    """
    if g.facet is not None and u.r == g.facet.r:
        raise PhaseSpaceError(
            f'u equals r; the count is p³ - δ(r-u) and the set need not be independent (u=``{u.label()}``)'
        )
    values = phase_space_values(g, u, v)
    off_grid = np.abs(values * (values - 1.0)) > PHASE_SPACE_TOLERANCE
    if off_grid.any():
        raise PhaseSpaceError(f'``{int(off_grid.sum())}`` phase-space values outside {{0, 1}}')
    vertices = tuple(int(index) for index in np.flatnonzero(values > 0.5))
    if len(vertices) != g.p**3:
        raise PhaseSpaceError(f'expected ``{g.p**3}`` projectors with W=1, found ``{len(vertices)}``')
    if not g.is_independent(vertices):
        raise PhaseSpaceError('phase-space set is not independent')
    return IndependentSet(vertices=vertices, phase_point=(u, v))


## sandwich certificate --------------------------------------------


@dataclass(frozen=True)
class SandwichCertificate:
    """
    α <= quantum value <= ϑ <= α* <= clique cover; certified when the quantum value meets the cover.
    """

    alpha: int
    quantum_value_lower: float
    clique_cover_upper: int
    theta_lower: float
    theta_upper: float
    alphastar_lower: float
    alphastar_upper: float
    certified: bool

    def to_dict(self) -> dict[str, object]:
        return {
            'alpha': self.alpha,
            'quantum_value_lower': round(self.quantum_value_lower, 12),
            'clique_cover_upper': self.clique_cover_upper,
            'theta': [round(self.theta_lower, 12), round(self.theta_upper, 12)],
            'alphastar': [round(self.alphastar_lower, 12), round(self.alphastar_upper, 12)],
            'certified': self.certified,
        }


def sandwich_certificate(g: ExclusivityGraph, alpha: int) -> SandwichCertificate:
    """
    The quantum value comes from ρ ⊗ I/p with ρ a lowest eigenstate of A^r, which reaches p³ - λ_min(A^r).
    """
    if g.facet is None or g.p is None:
        raise SolverInputError('the sandwich certificate needs a witness graph with a facet')
    p = g.p
    state, _, _ = lowest_eigenstate(g.facet)
    quantum_value = float(np.trace(sigma_operator(g.facet).matrix @ np.kron(state, maximally_mixed(p))).real)
    cover = len(g.partition)
    if alpha > quantum_value + CERTIFICATE_TOLERANCE:
        raise SolverInputError(f'alpha ``{alpha}`` exceeds the quantum value ``{quantum_value}``')
    certified = abs(quantum_value - cover) < CERTIFICATE_TOLERANCE
    lower = float(cover) if certified else quantum_value
    log.debug(f'sandwich p={p}: alpha={alpha} quantum={quantum_value} cover={cover} certified={certified}')
    return SandwichCertificate(
        alpha=alpha,
        quantum_value_lower=quantum_value,
        clique_cover_upper=cover,
        theta_lower=lower,
        theta_upper=float(cover),
        alphastar_lower=lower,
        alphastar_upper=float(cover),
        certified=certified,
    )
