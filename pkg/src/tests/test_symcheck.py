import unittest
import sys
import os

import sympy

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from symbolic.errors import UnknownRealization
from symbolic.expr import Expr
from symcheck.eom import MODELS, dirac_squared_residual, eom_set
from symcheck.ledger import (all_identities, check_sns_ops_vanish, heat_kernel, laplace_solutions, ledger_coverage,
                             solution_transport_check, spinor_from_laplace, transport_suite,
                             verify_dirac_ledger, verify_quadratic_ledger, verify_schrodinger_ledger)


class TestEquationsOfMotion(unittest.TestCase):

    def test_models(self):
        for model in MODELS:
            with self.subTest(model=model):
                self.assertTrue(eom_set(model).names)

    def test_unknown_model(self):
        with self.assertRaises(UnknownRealization):
            eom_set('klein-gordon')

    def test_dirac_squares_to_laplace(self):
        self.assertTrue(dirac_squared_residual().is_zero())

    def test_heat_kernel_solves_schrodinger(self):
        self.assertTrue(eom_set('schrodinger').annihilates(heat_kernel()))

    def test_non_solution_rejected(self):
        self.assertFalse(eom_set('schrodinger').annihilates(Expr.symbol('r') ** 2))

    def test_spinors_from_laplace_solutions(self):
        dirac = eom_set('dirac')
        for i, f in enumerate(laplace_solutions()):
            with self.subTest(solution=i):
                self.assertTrue(eom_set('laplace').annihilates(f))
                self.assertTrue(dirac.annihilates(spinor_from_laplace(f)))


class TestSymmetryLedger(unittest.TestCase):
    """Operator identities [eom, generator] = cofactor * eom"""

    def test_schrodinger_ledger(self):
        report = verify_schrodinger_ledger()
        self.assertTrue(report.passed, report.to_text())

    def test_dirac_ledger(self):
        report = verify_dirac_ledger()
        self.assertTrue(report.passed, report.to_text())

    def test_quadratic_ledger(self):
        report = verify_quadratic_ledger()
        self.assertTrue(report.passed, report.to_text())

    def test_coverage(self):
        report = ledger_coverage()
        self.assertTrue(report.passed, report.to_text())

    def test_identity_ids_are_unique_per_realization(self):
        seen = set()
        for identity in all_identities():
            key = (identity.realization, identity.identity_id)
            with self.subTest(identity=identity.identity_id):
                self.assertNotIn(key, seen)
            seen.add(key)

    def test_corrections_vanish_at_half(self):
        for identity in all_identities():
            if identity.correction is None:
                continue
            with self.subTest(identity=identity.identity_id):
                self.assertTrue(identity.correction.substitute({'x': sympy.Rational(1, 2)}).is_zero())


class TestSolutionTransport(unittest.TestCase):

    def test_transport_suite(self):
        report = transport_suite()
        self.assertTrue(report.passed, report.to_text())
        self.assertGreater(len(report.entries), 10)

    def test_plain_solutions(self):
        report = solution_transport_check('schrodinger')
        self.assertTrue(report.passed, report.to_text())


class TestPoissonImageOfEquations(unittest.TestCase):

    def test_operators_vanish(self):
        report = check_sns_ops_vanish()
        self.assertTrue(report.passed, report.to_text())
        self.assertEqual([e.identity_id for e in report.entries], ['S', "S'", "Sbar'", "S''"])

    def test_wrong_mass_image_is_detected(self):
        report = check_sns_ops_vanish(m0_image=2)
        self.assertFalse(report.passed)
        self.assertEqual(report.first_failure().identity_id, 'S')


if __name__ == '__main__':
    unittest.main()
