import logging

import numpy as np
from django.test import SimpleTestCase as TestCase

from contextuality_app.lib.ffield import INF, coset_labels
from contextuality_app.lib.mub_phase import facet_family
from contextuality_app.lib.stab2 import (
    EntBasis,
    EntProjector,
    SepBasis,
    SepProjector,
    basis_id,
    mub_coset_map,
    orth_ent_ent,
    orth_ent_sep,
    orth_numeric,
    orth_sep_sep,
    orth_symbolic,
    projector_matrix,
    projector_vector,
    witness_set,
)

log = logging.getLogger(__name__)


class WitnessSetTest(TestCase):
    """
    Checks the two-qudit witness projector set.
    """

    def test_sizes(self):
        """
        Checks 6 + 24 = 30 members at p=2 and 24 + 216 = 240 at p=3.
        """
        for p, separable, entangled in ((2, 6, 24), (3, 24, 216)):
            members = witness_set(facet_family(p)[0])
            self.assertEqual(separable, sum(isinstance(m, SepProjector) for m in members))
            self.assertEqual(entangled, sum(isinstance(m, EntProjector) for m in members))

    def test_stable_order(self):
        """
        Checks separable members first, each block sorted by its key.
        """
        members = witness_set(facet_family(3)[4])
        keys = [member.sort_key() for member in members]
        self.assertEqual(sorted(keys), keys)
        self.assertIsInstance(members[0], SepProjector)
        self.assertIsInstance(members[-1], EntProjector)
        self.assertIs(INF, members[-1].b)

    def test_omits_facet_levels(self):
        """
        Checks that no separable member uses level r_j in basis j.
        """
        facet = facet_family(3)[5]
        for member in witness_set(facet):
            if isinstance(member, SepProjector):
                self.assertNotEqual(facet.r[member.j - 1], member.s)

    def test_entangled_bases_resolve_identity(self):
        """
        Checks that each entangled basis class sums to the identity on C^p ⊗ C^p.
        """
        p = 3
        classes: dict[object, np.ndarray] = {}
        for member in witness_set(facet_family(p)[0]):
            if isinstance(member, EntProjector):
                key = basis_id(member)
                classes[key] = classes.get(key, 0) + projector_matrix(member)
        self.assertEqual(24, len(classes))
        for total in classes.values():
            self.assertLess(np.linalg.norm(total - np.eye(p**2)), 1e-9)

    def test_basis_ids(self):
        """
        Checks the basis grouping keys and their JSON form.
        """
        self.assertEqual(SepBasis(2), basis_id(SepProjector(2, 1, 0, 3)))
        self.assertEqual(EntBasis(INF, 2, 1), basis_id(EntProjector(INF, 2, 1, 0, 1, 3)))
        self.assertEqual(['ent', 'inf', 2, 1], EntBasis(INF, 2, 1).to_json())
        self.assertEqual(['sep', 2], SepBasis(2).to_json())

    def test_vectors_are_normalized(self):
        """
        Checks unit norm for every witness vector at p=2.
        """
        for member in witness_set(facet_family(2)[3]):
            self.assertAlmostEqual(1.0, float(np.linalg.norm(projector_vector(member))), places=9)


class CosetMapTest(TestCase):
    """
    Checks the basis ↔ coset correspondence.
    """

    def test_known_assignments(self):
        """
        Checks j=1 ↔ b=0 with Π_1^0 = |0><0| at level 0, and j=2 ↔ b=∞.
        """
        for p in (3, 5):
            coset_map = mub_coset_map(p)
            self.assertEqual(0, coset_map.coset_of(1))
            self.assertEqual(0, coset_map.level_of(1, 0))
            self.assertIs(INF, coset_map.coset_of(2))

    def test_bijection(self):
        """
        Checks that the p+1 bases land on the p+1 cosets, with p levels each.
        """
        p = 3
        coset_map = mub_coset_map(p)
        self.assertEqual(set(coset_labels(p)), set(coset_map.basis_to_coset.values()))
        for j in range(1, p + 2):
            self.assertEqual(set(range(p)), {coset_map.level_of(j, q) for q in range(p)})


class OrthogonalityTest(TestCase):
    """
    Checks the closed-form orthogonality predicates against numeric overlaps.
    """

    def test_sep_sep_examples(self):
        """
        Checks identical, same-basis and different-k pairs.
        """
        a = SepProjector(1, 0, 0, 3)
        self.assertFalse(orth_sep_sep(a, a))
        self.assertTrue(orth_sep_sep(a, SepProjector(1, 1, 0, 3)))
        self.assertTrue(orth_sep_sep(a, SepProjector(2, 1, 1, 3)))
        self.assertFalse(orth_sep_sep(a, SepProjector(2, 1, 0, 3)))

    def test_ent_ent_examples(self):
        """
        Checks identical states and different displacements of one F.
        """
        a = EntProjector(1, 2, 1, 0, 0, 3)
        self.assertFalse(orth_ent_ent(a, a))
        self.assertTrue(orth_ent_ent(a, EntProjector(1, 2, 1, 1, 2, 3)))

    def test_ent_sep_examples(self):
        """
        Checks |Φ> against |0>|0> (same coset, matching level) and against a basis of another coset.
        """
        p = 3
        coset_map = mub_coset_map(p)
        phi = EntProjector(0, 1, 0, 0, 0, p)
        self.assertFalse(orth_ent_sep(phi, SepProjector(1, 0, 0, p), coset_map))
        self.assertTrue(orth_ent_sep(phi, SepProjector(1, 1, 0, p), coset_map))
        self.assertFalse(orth_ent_sep(phi, SepProjector(2, 1, 2, p), coset_map))

    def test_ent_ent_matches_numeric(self):
        """
        Checks the entangled-entangled predicate on all 216² ordered pairs at p=3.
        """
        members = [m for m in witness_set(facet_family(3)[0]) if isinstance(m, EntProjector)]
        vectors = np.array([projector_vector(m) for m in members])
        orthogonal = np.abs(vectors.conj() @ vectors.T) < 1e-7
        for u, first in enumerate(members):
            for v, second in enumerate(members):
                self.assertEqual(bool(orthogonal[u, v]), orth_ent_ent(first, second), f'{first} vs {second}')

    def test_ent_sep_matches_numeric(self):
        """
        Checks the full 216 x 24 entangled-separable table at p=3.
        """
        p = 3
        coset_map = mub_coset_map(p)
        members = witness_set(facet_family(p)[0])
        separable = [m for m in members if isinstance(m, SepProjector)]
        entangled = [m for m in members if isinstance(m, EntProjector)]
        for e in entangled:
            for s in separable:
                self.assertEqual(orth_numeric(e, s), orth_ent_sep(e, s, coset_map), f'{e} vs {s}')
                self.assertEqual(orth_symbolic(s, e, coset_map), orth_symbolic(e, s, coset_map))

    def test_symbolic_matches_numeric_at_five(self):
        """
        Checks a strided sample of p=5 pairs.
        """
        p = 5
        coset_map = mub_coset_map(p)
        members = witness_set(facet_family(p)[0])
        anchors = members[:: p**2][:40]
        for anchor in anchors:
            for other in members[::7]:
                expected = orth_numeric(anchor, other)
                self.assertEqual(expected, orth_symbolic(anchor, other, coset_map), f'{anchor} vs {other}')
