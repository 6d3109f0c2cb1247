"""
Exclusivity graphs of witness projector sets, the witness operator Σ^r, and graph import/export.

Adjacency is orthogonality (compatibility): independent sets are families of mutually nonorthogonal projectors.
Adjacency rows are python ints used as bitsets.

Called by:
    - contextuality_app.lib.mis
    - contextuality_app.lib.acceptance
    - contextuality_app.management.commands.graph
    - contextuality_app.management.commands.alpha
"""

import functools
import json
import logging
import pathlib
import time
from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from contextuality_app.lib.mub_phase import FacetVector, MubIndex, a_operator, mub_projector, mub_vector
from contextuality_app.lib.stab2 import (
    NUMERIC_ORTHOGONALITY_TOLERANCE,
    StabProjector,
    basis_id,
    mub_coset_map,
    orth_symbolic,
    projector_matrix,
    projector_vector,
    witness_set,
)

log = logging.getLogger(__name__)

BACKENDS: tuple[str, ...] = ('symbolic', 'numeric', 'both')
WITNESS_RESIDUAL_TOLERANCE = 1e-8
MISMATCH_SAMPLE_SIZE = 10


class BackendMismatchError(Exception):
    """
    Represents symbolic and numeric orthogonality decisions that disagree on at least one pair.
    """

    def __init__(self, message: str, mismatches: list[tuple[int, int, bool, bool]]) -> None:
        super().__init__(message)
        self.mismatches = mismatches


class WitnessConstructionError(Exception):
    """
    Represents a witness operator whose projector sum misses the closed form.
    """


class GraphExportError(Exception):
    """
    Represents a failure to write a graph file.
    """


class GraphImportError(Exception):
    """
    Represents a malformed DIMACS, JSON or partition-sidecar input.
    """


@dataclass
class ExclusivityGraph:
    """
    Vertices in stable order, bitset adjacency, and a clique partition (the bases).

    Imported graphs carry no projectors and no facet.
    """

    p: int | None
    facet: FacetVector | None
    vertex_labels: list[str]
    adjacency: list[int]
    partition: list[list[int]]
    projectors: list[StabProjector] | None = None
    backend: str = 'numeric'
    records: list[dict[str, object]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.adjacency)

    def is_adjacent(self, u: int, v: int) -> bool:
        return bool(self.adjacency[u] >> v & 1)

    def neighbors(self, v: int) -> list[int]:
        row = self.adjacency[v]
        return [u for u in range(self.n) if row >> u & 1]

    def degrees(self) -> list[int]:
        return [row.bit_count() for row in self.adjacency]

    def edges(self) -> list[tuple[int, int]]:
        """
        Edges (u, v) with u < v, sorted.
        """
        return [(u, v) for u in range(self.n) for v in range(u + 1, self.n) if self.adjacency[u] >> v & 1]

    def edge_count(self) -> int:
        return sum(self.degrees()) // 2

    def is_clique(self, vertices: list[int]) -> bool:
        return all(self.is_adjacent(u, v) for i, u in enumerate(vertices) for v in vertices[i + 1 :])

    def is_independent(self, vertices: list[int] | tuple[int, ...]) -> bool:
        mask = 0
        for v in vertices:
            mask |= 1 << v
        return all(not self.adjacency[v] & mask for v in vertices)

    def check_structure(self) -> None:
        """
        Raises ValueError unless adjacency is symmetric and irreflexive and every partition class is a clique.
        """
        for u in range(self.n):
            if self.adjacency[u] >> u & 1:
                raise ValueError(f'self-loop at vertex {u}')
            for v in self.neighbors(u):
                if not self.adjacency[v] >> u & 1:
                    raise ValueError(f'asymmetric edge ({u}, {v})')
        for index, members in enumerate(self.partition):
            if not self.is_clique(members):
                raise ValueError(f'partition class {index} is not a clique')

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges())
        return graph


## building --------------------------------------------------------


def _numeric_adjacency(projectors: list[StabProjector], tolerance: float) -> list[int]:
    vectors = np.array([projector_vector(projector) for projector in projectors])
    overlaps = np.abs(vectors.conj() @ vectors.T)
    orthogonal = overlaps < tolerance
    np.fill_diagonal(orthogonal, False)
    return _rows_to_bitsets(orthogonal)


def _rows_to_bitsets(matrix: np.ndarray) -> list[int]:
    rows = []
    for row in matrix:
        bits = 0
        for v in np.flatnonzero(row):
            bits |= 1 << int(v)
        rows.append(bits)
    return rows


def _symbolic_adjacency(projectors: list[StabProjector]) -> list[int]:
    coset_map = mub_coset_map(projectors[0].p)
    n = len(projectors)
    rows = [0] * n
    for u in range(n):
        for v in range(u + 1, n):
            if orth_symbolic(projectors[u], projectors[v], coset_map):
                rows[u] |= 1 << v
                rows[v] |= 1 << u
    return rows


def _mismatches(first: list[int], second: list[int]) -> list[tuple[int, int, bool, bool]]:
    found = []
    for u, (row_a, row_b) in enumerate(zip(first, second)):
        diff = row_a ^ row_b
        for v in range(u + 1, len(first)):
            if diff >> v & 1:
                found.append((u, v, bool(row_a >> v & 1), bool(row_b >> v & 1)))
    return found


def basis_partition(projectors: list[StabProjector]) -> list[list[int]]:
    """
    Groups vertex ids by basis id, in order of first appearance.
    """
    classes: dict[object, list[int]] = {}
    for index, projector in enumerate(projectors):
        classes.setdefault(basis_id(projector), []).append(index)
    return list(classes.values())


def vertex_label(projector: StabProjector) -> str:
    record = projector.to_record()
    return ':'.join(str(value) for value in record.values())


def build_graph(
    p: int, r: FacetVector, backend: str = 'numeric', tolerance: float = NUMERIC_ORTHOGONALITY_TOLERANCE
) -> ExclusivityGraph:
    """
    Builds Γ^r from {Π}^r.

    The symbolic predicates hold for odd p; at p=2 every backend resolves to numeric.
    With backend 'both', raises BackendMismatchError listing the disagreeing pairs.
    """
    if backend not in BACKENDS:
        raise ValueError(f'unknown backend ``{backend}``')
    if r.p != p:
        raise ValueError(f'facet ``{r.label()}`` belongs to p={r.p}, not p={p}')
    if p == 2 and backend != 'numeric':
        log.warning(f'backend ``{backend}`` falls back to numeric at p=2')
        backend = 'numeric'
    start = time.monotonic()
    projectors = witness_set(r)
    if backend == 'numeric':
        adjacency = _numeric_adjacency(projectors, tolerance)
    elif backend == 'symbolic':
        adjacency = _symbolic_adjacency(projectors)
    else:
        adjacency = _symbolic_adjacency(projectors)
        numeric = _numeric_adjacency(projectors, tolerance)
        mismatches = _mismatches(adjacency, numeric)
        if mismatches:
            sample = '; '.join(
                f'({vertex_label(projectors[u])}, {vertex_label(projectors[v])}) symbolic={sym} numeric={num}'
                for u, v, sym, num in mismatches[:MISMATCH_SAMPLE_SIZE]
            )
            raise BackendMismatchError(
                f'{len(mismatches)} pair(s) disagree at p={p}, facet ``{r.label()}``: {sample}', mismatches
            )
    graph = ExclusivityGraph(
        p=p,
        facet=r,
        vertex_labels=[vertex_label(projector) for projector in projectors],
        adjacency=adjacency,
        partition=basis_partition(projectors),
        projectors=projectors,
        backend=backend,
        records=[dict(projector.to_record(), basis=basis_id(projector).to_json()) for projector in projectors],
    )
    log.info(
        f'built graph p={p} facet ``{r.label()}`` backend ``{backend}``: '
        f'``{graph.n}`` vertices, ``{graph.edge_count()}`` edges, ``{len(graph.partition)}`` classes, '
        f'``{time.monotonic() - start:.2f}``s'
    )
    return graph


## witness operator ------------------------------------------------


@dataclass(frozen=True)
class WitnessOperator:
    matrix: np.ndarray
    facet: FacetVector
    residual: float


def witness_closed_form(r: FacetVector) -> np.ndarray:
    """
    (p³ I - A^r) ⊗ I.
    """
    p = r.p
    return np.kron(p**3 * np.eye(p) - a_operator(r), np.eye(p))


@functools.lru_cache(maxsize=None)
def sigma_operator(r: FacetVector) -> WitnessOperator:
    """
    Sums the witness projectors and checks the result against (p³ I - A^r) ⊗ I.
    """
    total = np.zeros((r.p**2, r.p**2), dtype=np.complex128)
    for projector in witness_set(r):
        total += projector_matrix(projector)
    residual = float(np.linalg.norm(total - witness_closed_form(r)))
    if residual > WITNESS_RESIDUAL_TOLERANCE:
        raise WitnessConstructionError(f'witness sum for facet ``{r.label()}`` misses the closed form by ``{residual}``')
    total.flags.writeable = False
    return WitnessOperator(matrix=total, facet=r, residual=residual)


@dataclass(frozen=True)
class SingleQuditWitness:
    graph: ExclusivityGraph
    operator: np.ndarray


def single_qudit_witness(p: int, r: FacetVector) -> SingleQuditWitness:
    """
    The one-qudit analogue: projectors Π_j^{s != r_j}, summing to p I - A^r.

    One projector per basis is mutually nonorthogonal, so α = p+1, while the largest quantum value
    p - λ_min(A^r) never exceeds p+1.
    """
    members = [MubIndex(j, s, p) for j in range(1, p + 2) for s in range(p) if s != r.r[j - 1]]
    vectors = np.array([mub_vector(member) for member in members])
    orthogonal = np.abs(vectors.conj() @ vectors.T) < NUMERIC_ORTHOGONALITY_TOLERANCE
    np.fill_diagonal(orthogonal, False)
    classes: dict[int, list[int]] = {}
    for index, member in enumerate(members):
        classes.setdefault(member.j, []).append(index)
    graph = ExclusivityGraph(
        p=p,
        facet=r,
        vertex_labels=[f'mub:{member.j}:{member.q}' for member in members],
        adjacency=_rows_to_bitsets(orthogonal),
        partition=list(classes.values()),
    )
    operator = sum((mub_projector(member) for member in members), np.zeros((p, p), dtype=np.complex128))
    return SingleQuditWitness(graph=graph, operator=operator)


## export / import -------------------------------------------------


def export_dimacs(g: ExclusivityGraph) -> bytes:
    """
    DIMACS undirected graph: comment lines, `p edge N M`, then 1-indexed `e u v` lines in stable order.
    """
    edges = g.edges()
    lines = []
    if g.facet is not None:
        lines.append(f'c exclusivity graph p={g.p} facet={g.facet.label()} backend={g.backend}')
    lines.append(f'c partition classes {len(g.partition)}')
    lines.append(f'p edge {g.n} {len(edges)}')
    lines.extend(f'e {u + 1} {v + 1}' for u, v in edges)
    return ('\n'.join(lines) + '\n').encode('utf-8')


def export_json(g: ExclusivityGraph) -> bytes:
    """
    JSON with 0-based vertex ids: {vertices: [...], edges: [[u, v], ...], partition: [[...], ...]}.
    """
    vertices = []
    for index, label in enumerate(g.vertex_labels):
        record = dict(g.records[index]) if g.records else {}
        record.update({'id': index, 'label': label})
        vertices.append(record)
    payload = {
        'p': g.p,
        'facet': list(g.facet.r) if g.facet is not None else None,
        'backend': g.backend,
        'vertices': vertices,
        'edges': [list(edge) for edge in g.edges()],
        'partition': g.partition,
    }
    return (json.dumps(payload, sort_keys=True, indent=2) + '\n').encode('utf-8')


def export_graph(g: ExclusivityGraph, fmt: str) -> bytes:
    if fmt == 'dimacs':
        return export_dimacs(g)
    if fmt == 'json':
        return export_json(g)
    raise GraphExportError(f'unsupported graph format ``{fmt}``')


def write_graph(g: ExclusivityGraph, path: pathlib.Path, fmt: str) -> pathlib.Path:
    payload = export_graph(g, fmt)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(payload)
    except OSError as exc:
        raise GraphExportError(f'could not write graph to ``{path}``: {exc}') from exc
    log.debug(f'wrote ``{len(payload)}`` bytes to ``{path}``')
    return path


def _adjacency_from_edges(n: int, edges: list[tuple[int, int]]) -> list[int]:
    rows = [0] * n
    for u, v in edges:
        if u == v:
            raise GraphImportError(f'self-loop at vertex {u}')
        if not (0 <= u < n and 0 <= v < n):
            raise GraphImportError(f'edge ({u}, {v}) outside 0..{n - 1}')
        rows[u] |= 1 << v
        rows[v] |= 1 << u
    return rows


def parse_partition(raw: str, n: int) -> list[list[int]]:
    """
    Reads a partition sidecar: a JSON list of 0-based vertex-id lists covering every vertex exactly once.
    """
    try:
        data = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise GraphImportError(f'partition sidecar is not valid JSON: {exc}') from exc
    if isinstance(data, dict):
        data = data.get('partition')
    if not isinstance(data, list) or not all(isinstance(members, list) for members in data):
        raise GraphImportError('partition must be a list of vertex-id lists')
    seen = sorted(int(v) for members in data for v in members)
    if seen != list(range(n)):
        raise GraphImportError(f'partition does not cover vertices 0..{n - 1} exactly once')
    return [[int(v) for v in members] for members in data]


def greedy_clique_partition(adjacency: list[int]) -> list[list[int]]:
    """
    Assigns each vertex, in id order, to the first class it is fully adjacent to.
    """
    classes: list[list[int]] = []
    masks: list[int] = []
    for v, row in enumerate(adjacency):
        for index, mask in enumerate(masks):
            if mask & row == mask:
                classes[index].append(v)
                masks[index] |= 1 << v
                break
        else:
            classes.append([v])
            masks.append(1 << v)
    return classes


def import_dimacs(text: str, partition_json: str | None = None) -> ExclusivityGraph:
    """
    Parses a DIMACS edge file; without a partition sidecar a greedy clique partition is used.
    """
    n: int | None = None
    declared_edges = 0
    edges: list[tuple[int, int]] = []
    for line_number, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0] == 'c':
            continue
        try:
            if parts[0] == 'p':
                if len(parts) != 4 or parts[1] not in ('edge', 'col'):
                    raise GraphImportError(f'line {line_number}: malformed problem line ``{line}``')
                n, declared_edges = int(parts[2]), int(parts[3])
            elif parts[0] == 'e':
                edges.append((int(parts[1]) - 1, int(parts[2]) - 1))
            else:
                raise GraphImportError(f'line {line_number}: unknown record ``{parts[0]}``')
        except (ValueError, IndexError) as exc:
            raise GraphImportError(f'line {line_number}: ``{line}``') from exc
    if n is None:
        raise GraphImportError('missing `p edge N M` line')
    if declared_edges != len(edges):
        log.warning(f'declared ``{declared_edges}`` edges, found ``{len(edges)}``')
    adjacency = _adjacency_from_edges(n, edges)
    partition = parse_partition(partition_json, n) if partition_json is not None else greedy_clique_partition(adjacency)
    return ExclusivityGraph(
        p=None,
        facet=None,
        vertex_labels=[str(v) for v in range(n)],
        adjacency=adjacency,
        partition=partition,
        backend='imported',
    )


def import_json(text: str) -> ExclusivityGraph:
    """
    Parses the JSON written by export_json().
    """
    try:
        data = json.loads(text)
        vertices = data['vertices']
        n = len(vertices)
        edges = [(int(u), int(v)) for u, v in data['edges']]
        partition = parse_partition(json.dumps(data['partition']), n)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise GraphImportError(f'malformed graph JSON: {exc}') from exc
    p = data.get('p')
    facet = FacetVector.generic(data['facet'], p) if p is not None and data.get('facet') is not None else None
    return ExclusivityGraph(
        p=p,
        facet=facet,
        vertex_labels=[str(vertex.get('label', index)) for index, vertex in enumerate(vertices)],
        adjacency=_adjacency_from_edges(n, edges),
        partition=partition,
        backend=str(data.get('backend', 'imported')),
        records=[{key: value for key, value in vertex.items() if key not in ('id', 'label')} for vertex in vertices],
    )


def induced_subgraph(g: ExclusivityGraph, vertices: list[int]) -> ExclusivityGraph:
    """
    Restricts g to `vertices` (renumbered in the given order); partition classes are restricted and empties dropped.
    """
    position = {v: index for index, v in enumerate(vertices)}
    adjacency = []
    for v in vertices:
        row = 0
        for u in vertices:
            if g.adjacency[v] >> u & 1:
                row |= 1 << position[u]
        adjacency.append(row)
    partition = [[position[v] for v in members if v in position] for members in g.partition]
    return ExclusivityGraph(
        p=g.p,
        facet=g.facet,
        vertex_labels=[g.vertex_labels[v] for v in vertices],
        adjacency=adjacency,
        partition=[members for members in partition if members],
        projectors=[g.projectors[v] for v in vertices] if g.projectors is not None else None,
        backend=g.backend,
        records=[g.records[v] for v in vertices] if g.records else [],
    )


def canonical_hash(g: ExclusivityGraph, iterations: int = 3) -> str:
    """
    Weisfeiler-Lehman hash; equal for isomorphic graphs.
    """
    return nx.weisfeiler_lehman_graph_hash(g.to_networkx(), iterations=iterations)
