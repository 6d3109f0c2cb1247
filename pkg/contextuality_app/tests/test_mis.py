import logging
import math

import numpy as np
from django.test import SimpleTestCase as TestCase

from contextuality_app.lib.mis import (
    PhaseSpaceError,
    SolverInputError,
    exhaustive_independence_number,
    max_independent_set,
    per_basis_exhaustive,
    phase_space_count,
    phase_space_independent_set,
    phase_space_values,
    sandwich_certificate,
)
from contextuality_app.lib.mub_phase import facet_family
from contextuality_app.lib.witnessgraph import ExclusivityGraph, build_graph, induced_subgraph, single_qudit_witness

log = logging.getLogger(__name__)


def path_graph(n: int) -> ExclusivityGraph:
    """
    Path 0-1-...-(n-1), partitioned into singletons.
    """
    adjacency = [0] * n
    for v in range(n - 1):
        adjacency[v] |= 1 << (v + 1)
        adjacency[v + 1] |= 1 << v
    return ExclusivityGraph(
        p=None,
        facet=None,
        vertex_labels=[str(v) for v in range(n)],
        adjacency=adjacency,
        partition=[[v] for v in range(n)],
    )


class MaxIndependentSetTest(TestCase):
    """
    Checks the branch-and-bound solver.
    """

    @classmethod
    def setUpClass(cls) -> None:
        super().setUpClass()
        cls.qubit_graph = build_graph(2, facet_family(2)[0])

    def test_qubit_graph_alpha_is_eight(self):
        """
        Checks α = 8 on every qubit facet, with an independent witness set.
        """
        for facet in facet_family(2):
            g = build_graph(2, facet)
            result = max_independent_set(g)
            self.assertEqual(8, result.size)
            self.assertTrue(result.is_exact)
            self.assertTrue(g.is_independent(result.vertices))

    def test_per_basis_brute_force_agrees(self):
        """
        Checks the per-class brute force on the qubit graph.
        """
        self.assertEqual(8, per_basis_exhaustive(self.qubit_graph))

    def test_qutrit_graph_alpha_is_twenty_seven(self):
        """
        Checks α = 27 on one qutrit facet, seeded with a phase-space set.
        """
        family = facet_family(3)
        g = build_graph(3, family[4])
        hint = phase_space_independent_set(g, family[0], family[0]).vertices
        result = max_independent_set(g, lower_bound_hint=hint)
        self.assertEqual(27, result.size)
        self.assertTrue(result.is_exact)

    def test_single_clique(self):
        """
        Checks α = 1 on a single basis class.
        """
        members = self.qubit_graph.partition[-1]
        sub = induced_subgraph(self.qubit_graph, members)
        self.assertEqual(1, max_independent_set(sub).size)

    def test_matches_exhaustive_on_random_subgraphs(self):
        """
        Checks solver size against exhaustive enumeration on random induced subgraphs of ≤ 20 vertices.
        """
        rng = np.random.default_rng(20140612)
        for _ in range(40):
            size = int(rng.integers(1, 21))
            vertices = sorted(int(v) for v in rng.choice(self.qubit_graph.n, size=size, replace=False))
            sub = induced_subgraph(self.qubit_graph, vertices)
            self.assertEqual(exhaustive_independence_number(sub), max_independent_set(sub).size, f'vertices={vertices}')

    def test_path_graph(self):
        """
        Checks α(P_7) = 4 with singleton classes.
        """
        g = path_graph(7)
        result = max_independent_set(g)
        self.assertEqual(4, result.size)
        self.assertEqual((0, 2, 4, 6), result.vertices)

    def test_rejects_bad_partition_and_hint(self):
        """
        Checks that a non-clique class, a missing vertex and a dependent hint are refused.
        """
        g = path_graph(3)
        g.partition = [[0, 2], [1]]
        with self.assertRaises(SolverInputError):
            max_independent_set(g)
        g.partition = [[0], [1]]
        with self.assertRaises(SolverInputError):
            max_independent_set(g)
        with self.assertRaises(SolverInputError):
            max_independent_set(path_graph(3), lower_bound_hint=[0, 1])

    def test_single_qudit_witness_alpha(self):
        """
        Checks α = p+1 for the one-qudit witness graph, with quantum maximum p - λ_min(A^r) <= p+1.
        """
        for p in (2, 3):
            facet = facet_family(p)[0]
            witness = single_qudit_witness(p, facet)
            self.assertEqual(p + 1, max_independent_set(witness.graph).size)
            self.assertLessEqual(np.linalg.eigvalsh(witness.operator)[-1], p + 1 + 1e-9)


class PhaseSpaceTest(TestCase):
    """
    Checks the phase-space construction of p³-element independent sets.
    """

    @classmethod
    def setUpClass(cls) -> None:
        super().setUpClass()
        cls.family = facet_family(3)
        cls.graph = build_graph(3, cls.family[0])

    def test_independent_set_for_every_point(self):
        """
        Checks 27 pairwise-nonorthogonal projectors for every u != r and every v.
        """
        for u in self.family[1:]:
            for v in self.family:
                result = phase_space_independent_set(self.graph, u, v)
                self.assertEqual(27, result.size)
                self.assertTrue(self.graph.is_independent(result.vertices))
                self.assertEqual((u, v), result.phase_point)

    def test_counts(self):
        """
        Checks Σ_Π W_Π(u, v) = p³ for u != r and p³ - p for u = r.
        """
        self.assertEqual(27, phase_space_count(self.graph, self.family[3], self.family[5]))
        self.assertEqual(24, phase_space_count(self.graph, self.family[0], self.family[5]))

    def test_values_are_zero_or_one(self):
        """
        Checks that every W_Π(u, v) is 0 or 1.
        """
        values = phase_space_values(self.graph, self.family[1], self.family[7])
        self.assertTrue(np.allclose(values * (values - 1), 0))

    def test_u_equal_r_rejected(self):
        """
        Checks that u = r is refused.
        """
        with self.assertRaises(PhaseSpaceError):
            phase_space_independent_set(self.graph, self.family[0], self.family[1])

    def test_qubit_rejected(self):
        """
        Checks that p=2 is refused.
        """
        family = facet_family(2)
        with self.assertRaises(PhaseSpaceError):
            phase_space_values(build_graph(2, family[0]), family[1], family[1])


class SandwichCertificateTest(TestCase):
    """
    Checks α <= quantum value <= ϑ <= α* <= clique cover.
    """

    def test_qutrit_certified(self):
        """
        Checks ϑ = α* = 28 certified at p=3.
        """
        certificate = sandwich_certificate(build_graph(3, facet_family(3)[0]), alpha=27)
        self.assertTrue(certificate.certified)
        self.assertAlmostEqual(28.0, certificate.quantum_value_lower, places=8)
        self.assertEqual(28, certificate.clique_cover_upper)
        self.assertEqual(28.0, certificate.theta_lower)
        self.assertEqual(28.0, certificate.alphastar_upper)

    def test_qubit_interval(self):
        """
        Checks the interval [8 + (√3-1)/2, 9] at p=2.
        """
        certificate = sandwich_certificate(build_graph(2, facet_family(2)[0]), alpha=8)
        self.assertFalse(certificate.certified)
        self.assertAlmostEqual(8 + (math.sqrt(3) - 1) / 2, certificate.quantum_value_lower, places=8)
        self.assertEqual(9, certificate.clique_cover_upper)
        self.assertLess(certificate.alpha, certificate.theta_lower)
        payload = certificate.to_dict()
        self.assertEqual([round(certificate.theta_lower, 12), 9.0], payload['theta'])

    def test_alpha_above_quantum_value_rejected(self):
        """
        Checks that an α above the achievable quantum value is refused.
        """
        with self.assertRaises(SolverInputError):
            sandwich_certificate(build_graph(2, facet_family(2)[0]), alpha=9)
