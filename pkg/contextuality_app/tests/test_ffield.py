import logging

# from django.test import TestCase                  # TestCase requires db
from django.test import SimpleTestCase as TestCase  # SimpleTestCase does not require db

from contextuality_app.lib.ffield import (
    INF,
    BpElement,
    FieldError,
    FpElement,
    SympMatrix,
    bp_elements,
    compose,
    coset_decompose,
    coset_labels,
    coset_rep,
    fp_inv,
    label_from_json,
    label_to_json,
    require_prime,
    sl2_elements,
    symp_conjugate,
)

log = logging.getLogger(__name__)
TestCase.maxDiff = 1000


class FieldArithmeticTest(TestCase):
    """
    Checks Z_p arithmetic and prime validation.
    """

    def test_fp_inv_examples(self):
        """
        Checks that fp_inv() returns the known inverses.
        """
        self.assertEqual(1, fp_inv(FpElement(1, 5)).value)
        self.assertEqual(3, fp_inv(FpElement(2, 5)).value)
        self.assertEqual(4, fp_inv(FpElement(2, 7)).value)

    def test_fp_inv_of_zero_raises(self):
        """
        Checks that zero has no inverse.
        """
        with self.assertRaises(FieldError):
            fp_inv(FpElement(0, 7))

    def test_fp_inv_is_inverse_for_every_unit(self):
        """
        Checks that a * a^-1 == 1 for every unit at p = 2, 3, 5, 7.
        """
        for p in (2, 3, 5, 7):
            for value in range(1, p):
                a = FpElement(value, p)
                self.assertEqual(1, (a * fp_inv(a)).value, f'p={p}, a={value}')

    def test_element_arithmetic_wraps(self):
        """
        Checks that +, -, *, / and negation reduce modulo p.
        """
        a, b = FpElement(4, 5), FpElement(3, 5)
        self.assertEqual(2, (a + b).value)
        self.assertEqual(1, (a - b).value)
        self.assertEqual(2, (a * b).value)
        self.assertEqual(3, (a / b).value)  # 4 * 3^-1 = 4 * 2 = 8 = 3
        self.assertEqual(1, (-a).value)

    def test_mixed_moduli_rejected(self):
        """
        Checks that elements of different fields do not combine.
        """
        with self.assertRaises(FieldError):
            FpElement(1, 3) + FpElement(1, 5)

    def test_require_prime(self):
        """
        Checks that composites, 1, 0 and booleans are rejected with "p must be prime".
        """
        self.assertEqual(7, require_prime(7))
        for bad in (4, 1, 0, 9, True):
            with self.assertRaises(FieldError) as context:
                require_prime(bad)
            self.assertIn('p must be prime', str(context.exception))


class SymplecticGroupTest(TestCase):
    """
    Checks SL(2, Z_p), the BP subgroup and its cosets.
    """

    def test_group_orders(self):
        """
        Checks |SL(2, Z_p)| = p(p²-1) and |BP| = p(p-1).
        """
        for p in (2, 3, 5):
            self.assertEqual(p * (p**2 - 1), len(sl2_elements(p)))
            self.assertEqual(p * (p - 1), len(bp_elements(p)))

    def test_determinant_enforced(self):
        """
        Checks that a determinant other than 1 is rejected.
        """
        with self.assertRaises(FieldError):
            SympMatrix(1, 1, 1, 1, 3)

    def test_coset_rep_examples(self):
        """
        Checks F_0 = I, F_1 = (1 1; 0 1) and F_∞ = (2 1; -1 0).
        """
        self.assertTrue(coset_rep(0, 3).is_identity())
        self.assertEqual((1, 1, 0, 1), coset_rep(1, 3).as_tuple())
        self.assertEqual((2, 1, 2, 0), coset_rep(INF, 3).as_tuple())
        self.assertEqual((2, 1, 4, 0), coset_rep(INF, 5).as_tuple())

    def test_decompose_identity_and_infinity_rep(self):
        """
        Checks the decomposition of I and of F_∞ itself.
        """
        b, element = coset_decompose(SympMatrix.identity(3))
        self.assertEqual(0, b)
        self.assertTrue(element.matrix.is_identity())
        b, element = coset_decompose(coset_rep(INF, 3))
        self.assertIs(INF, b)
        self.assertTrue(element.matrix.is_identity())

    def test_decompose_recomposes_every_element(self):
        """
        Checks coset_rep(b) · C == F over all of SL(2, Z_p), p = 3, 5.
        """
        for p in (3, 5):
            for matrix in sl2_elements(p):
                b, element = coset_decompose(matrix)
                self.assertEqual(matrix, compose(b, element))

    def test_cosets_partition_the_group(self):
        """
        Checks that the p+1 cosets have p(p-1) members each and cover SL(2, Z_3).
        """
        p = 3
        members = {b: 0 for b in coset_labels(p)}
        for matrix in sl2_elements(p):
            b, _ = coset_decompose(matrix)
            members[b] += 1
        self.assertEqual({b: p * (p - 1) for b in coset_labels(p)}, members)

    def test_symp_conjugate_examples(self):
        """
        Checks C^-1 F_b C for the identity and two hand-computed cases.
        """
        self.assertEqual(coset_rep(2, 5), symp_conjugate(BpElement(1, 0, 5), coset_rep(2, 5)))
        self.assertEqual((2, 1, 2, 0), symp_conjugate(BpElement(1, 1, 3), coset_rep(1, 3)).as_tuple())
        self.assertEqual((1, 4, 0, 1), symp_conjugate(BpElement(2, 0, 5), coset_rep(1, 5)).as_tuple())

    def test_inverse(self):
        """
        Checks F · F^-1 = I over SL(2, Z_3).
        """
        for matrix in sl2_elements(3):
            self.assertTrue((matrix @ matrix.inverse()).is_identity())

    def test_bp_rejects_zero_alpha(self):
        """
        Checks that C_{0,γ} is not a BP element.
        """
        with self.assertRaises(FieldError):
            BpElement(0, 1, 3)

    def test_label_json(self):
        """
        Checks the JSON form of coset labels.
        """
        self.assertEqual('inf', label_to_json(INF))
        self.assertEqual(2, label_to_json(2))
        self.assertIs(INF, label_from_json('inf'))
        self.assertEqual(1, label_from_json(1))
