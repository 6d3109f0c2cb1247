"""
The acceptance suite run by the `verify` command.

Each criterion runs for the primes it covers among those requested and reports pass/fail with details.

Called by:
    - contextuality_app.management.commands.verify
"""

import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from contextuality_app.lib import classify, mis, mub_phase, witnessgraph
from contextuality_app.lib.facet_runner import run_per_facet
from contextuality_app.lib.stab2 import NUMERIC_ORTHOGONALITY_TOLERANCE

log = logging.getLogger(__name__)

SOLVER_SUBGRAPH_COUNT = 100
SOLVER_SUBGRAPH_MAX_VERTICES = 20
POLYTOPE_SAMPLE_COUNT = 1000


@dataclass
class AcceptanceOptions:
    primes: tuple[int, ...] = (2, 3)
    trials: int = 1000
    seed: int = 20140612
    grid: int = 201
    threads: int = 1
    timeout: float | None = None
    inject_wrong_facet: bool = False
    orthogonality_tolerance: float = NUMERIC_ORTHOGONALITY_TOLERANCE


@dataclass
class CriterionResult:
    name: str
    passed: bool | None
    details: dict[str, object] = field(default_factory=dict)

    @property
    def status(self) -> str:
        if self.passed is None:
            return 'skipped'
        return 'pass' if self.passed else 'fail'

    def to_dict(self) -> dict[str, object]:
        return {'name': self.name, 'status': self.status, 'details': self.details}


def _graph_and_alpha(p: int, facet: mub_phase.FacetVector, options: AcceptanceOptions) -> dict[str, object]:
    """
    Builds Γ^r numerically and solves it; odd p seeds the solver with a phase-space set.

    Called by: qubit_graph(), qutrit_graph()
    """
    g = witnessgraph.build_graph(p, facet, 'numeric', options.orthogonality_tolerance)
    hint = None
    if p != 2:
        family = mub_phase.facet_family(p)
        u = next(point for point in family if point.r != facet.r)
        hint = mis.phase_space_independent_set(g, u, family[0]).vertices
    result = mis.max_independent_set(g, timeout=options.timeout, lower_bound_hint=hint)
    return {
        'facet': facet.index,
        'vertices': g.n,
        'classes': len(g.partition),
        'alpha': result.size,
        'exact': result.is_exact,
        'independent': g.is_independent(result.vertices),
    }


def _graph_criterion(p: int, options: AcceptanceOptions) -> tuple[bool, dict[str, object]]:
    family = mub_phase.facet_family(p)
    rows = run_per_facet(lambda facet: _graph_and_alpha(p, facet, options), family, options.threads)
    expected_vertices = p * (p**2 - 1) + p**2 * (p**3 - p)
    passed = all(
        row['vertices'] == expected_vertices
        and row['classes'] == p**3 + 1
        and row['alpha'] == p**3
        and row['exact']
        and row['independent']
        for row in rows
    )
    return passed, {'p': p, 'facets': rows}


def qubit_graph(options: AcceptanceOptions) -> tuple[bool, dict[str, object]]:
    """
    30 vertices and α = 8 on all 8 facets; the per-basis brute force agrees on facet 0.
    """
    passed, details = _graph_criterion(2, options)
    first_facet_graph = witnessgraph.build_graph(2, mub_phase.facet_family(2)[0], tolerance=options.orthogonality_tolerance)
    brute = mis.per_basis_exhaustive(first_facet_graph)
    details['per_basis_exhaustive_facet_0'] = brute
    return passed and brute == 8, details


def qutrit_graph(options: AcceptanceOptions) -> tuple[bool, dict[str, object]]:
    """
    240 vertices, 28 classes and α = 27 on all 9 facets.
    """
    return _graph_criterion(3, options)


def sandwich(options: AcceptanceOptions) -> tuple[bool, dict[str, object]]:
    details: dict[str, object] = {}
    passed = True
    for p in options.primes:
        facet = mub_phase.facet_family(p)[0]
        g = witnessgraph.build_graph(p, facet, tolerance=options.orthogonality_tolerance)
        certificate = mis.sandwich_certificate(g, alpha=p**3)
        details[str(p)] = certificate.to_dict()
        if p == 2:
            expected = 8 + (math.sqrt(3) - 1) / 2
            passed &= abs(certificate.quantum_value_lower - expected) < 1e-8
            passed &= certificate.clique_cover_upper == 9 and not certificate.certified
        else:
            passed &= abs(certificate.quantum_value_lower - (p**3 + 1)) < 1e-8
            passed &= certificate.clique_cover_upper == p**3 + 1 and certificate.certified
    return bool(passed), details


def operator_identity(options: AcceptanceOptions) -> tuple[bool, dict[str, object]]:
    details: dict[str, object] = {}
    for p in options.primes:
        residuals = []
        for facet in mub_phase.facet_family(p):
            try:
                residuals.append(witnessgraph.sigma_operator(facet).residual)
            except witnessgraph.WitnessConstructionError as exc:
                return False, {'p': p, 'facet': facet.index, 'error': str(exc)}
        details[str(p)] = {'max_residual': float(f'{max(residuals):.3e}')}
    return True, details


def wrong_facet_pairs(p: int) -> list[tuple[int, int]]:
    """
    Pairs each witness facet with the next facet of the family (negative control).
    """
    size = len(mub_phase.facet_family(p))
    return [(index, (index + 1) % size) for index in range(size)]


def bijection(options: AcceptanceOptions) -> tuple[bool, dict[str, object]]:
    details: dict[str, object] = {}
    passed = True
    for p in options.primes:
        pairs = wrong_facet_pairs(p) if options.inject_wrong_facet else None
        report = classify.verify_bijection(p, options.trials, options.seed, facet_pairs=pairs)
        details[str(p)] = report.to_dict()
        passed &= report.passed
    return bool(passed), details


def backend_equivalence(options: AcceptanceOptions) -> tuple[bool, dict[str, object]]:
    """
    Symbolic and numeric orthogonality agree on every vertex pair at p=3.
    """
    facet = mub_phase.facet_family(3)[0]
    try:
        g = witnessgraph.build_graph(3, facet, 'both', options.orthogonality_tolerance)
    except witnessgraph.BackendMismatchError as exc:
        return False, {'disagreements': len(exc.mismatches), 'error': str(exc)}
    pairs = g.n * (g.n - 1) // 2
    return True, {'pairs': pairs, 'disagreements': 0, 'edges': g.edge_count()}


def phase_space(options: AcceptanceOptions) -> tuple[bool, dict[str, object]]:
    """
    Every u != r gives p³ pairwise nonorthogonal projectors with W=1; u = r gives p³ - p.
    """
    p = 3
    family = mub_phase.facet_family(p)
    r = family[0]
    g = witnessgraph.build_graph(p, r, tolerance=options.orthogonality_tolerance)
    sizes = set()
    for u in family:
        for v in family:
            if u.r == r.r:
                continue
            try:
                sizes.add(mis.phase_space_independent_set(g, u, v).size)
            except mis.PhaseSpaceError as exc:
                return False, {'u': list(u.r), 'v': list(v.r), 'error': str(exc)}
    diagonal = {mis.phase_space_count(g, r, v) for v in family}
    passed = sizes == {p**3} and diagonal == {p**3 - p}
    return passed, {'sizes_u_ne_r': sorted(sizes), 'counts_u_eq_r': sorted(diagonal)}


def polytope_geometry(options: AcceptanceOptions) -> tuple[bool, dict[str, object]]:
    """
    P_SIM = P_STAB on random qubit states; the qutrit slice holds a bound-region point.
    """
    details: dict[str, object] = {}
    passed = True
    if 2 in options.primes:
        rng = np.random.default_rng(options.seed)
        disagreements = 0
        for _ in range(POLYTOPE_SAMPLE_COUNT):
            rho = classify.random_density_matrix(2, rng)
            if mub_phase.in_psim(rho).inside != mub_phase.in_pstab(rho):
                disagreements += 1
        details['qubit_disagreements'] = disagreements
        passed &= disagreements == 0
    if 3 in options.primes:
        points = classify.slice_scan(*classify.default_slice(3), classify.SliceGrid(resolution=options.grid))
        counts = classify.region_counts(points)
        details['qutrit_slice_counts'] = counts
        passed &= all(count > 0 for count in counts.values())
    return bool(passed), details


def solver_exactness(options: AcceptanceOptions) -> tuple[bool, dict[str, object]]:
    """
    Branch and bound equals exhaustive enumeration on random induced subgraphs of the qubit graph.
    """
    g = witnessgraph.build_graph(2, mub_phase.facet_family(2)[0], tolerance=options.orthogonality_tolerance)
    rng = np.random.default_rng(options.seed)
    failures = []
    for trial in range(SOLVER_SUBGRAPH_COUNT):
        size = int(rng.integers(1, SOLVER_SUBGRAPH_MAX_VERTICES + 1))
        vertices = sorted(int(v) for v in rng.choice(g.n, size=size, replace=False))
        sub = witnessgraph.induced_subgraph(g, vertices)
        solved = mis.max_independent_set(sub).size
        brute = mis.exhaustive_independence_number(sub)
        if solved != brute:
            failures.append({'trial': trial, 'vertices': vertices, 'solver': solved, 'exhaustive': brute})
    return not failures, {'subgraphs': SOLVER_SUBGRAPH_COUNT, 'failures': failures[:5]}


## name -> (primes covered, check)
CRITERIA: dict[str, tuple[tuple[int, ...], Callable[[AcceptanceOptions], tuple[bool, dict[str, object]]]]] = {
    'qubit_graph': ((2,), qubit_graph),
    'qutrit_graph': ((3,), qutrit_graph),
    'sandwich': ((2, 3), sandwich),
    'operator_identity': ((2, 3), operator_identity),
    'bijection': ((2, 3), bijection),
    'backend_equivalence': ((3,), backend_equivalence),
    'phase_space': ((3,), phase_space),
    'polytope_geometry': ((2, 3), polytope_geometry),
    'solver_exactness': ((2,), solver_exactness),
}


def run_acceptance(options: AcceptanceOptions, names: list[str] | None = None) -> list[CriterionResult]:
    """
    Runs the named criteria (all by default) in suite order.
    """
    selected = names or list(CRITERIA)
    unknown = [name for name in selected if name not in CRITERIA]
    if unknown:
        raise ValueError(f'unknown criteria: {", ".join(unknown)}')
    results = []
    for name in CRITERIA:
        if name not in selected:
            continue
        covered, check = CRITERIA[name]
        primes = tuple(p for p in options.primes if p in covered)
        if not primes:
            results.append(CriterionResult(name, None, {'reason': f'covers p in {list(covered)}'}))
            continue
        start = time.monotonic()
        scoped = AcceptanceOptions(**{**options.__dict__, 'primes': primes})
        passed, details = check(scoped)
        log.info(f'criterion ``{name}``: passed={passed} in ``{time.monotonic() - start:.2f}``s')
        results.append(CriterionResult(name, bool(passed), details))
    return results
