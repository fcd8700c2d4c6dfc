import unittest
import json
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from symbolic.errors import SignatureMismatch, UnknownForm
from twopoint.appendix import CASES, appendixA_pde_residuals
from twopoint.covariance import (SUPERFIELD_FORMS, check_form, component_extract, covariance_check,
                                 derived_spinor_check, negative_controls, realization_frame,
                                 spinor_covariance_suite)
from twopoint.forms import derived_constants, form_names, load_form, swap_points
from algebra.realizations import load_realization


class TestFormRegistry(unittest.TestCase):

    def test_every_form_builds(self):
        for name in form_names():
            with self.subTest(form=name):
                form = load_form(name)
                self.assertEqual(form.name, name)
                json.dumps(form.to_json())

    def test_unknown_form(self):
        with self.assertRaises(UnknownForm):
            load_form('prop9.9')

    def test_swap_is_an_involution(self):
        form = load_form('prop21_case_ii')
        twice = swap_points(swap_points(form))
        for a in range(2):
            for b in range(2):
                with self.subTest(entry=(a, b)):
                    self.assertEqual(twice.body[a][b], form.body[a][b])

    def test_frames(self):
        self.assertEqual(realization_frame(load_realization('sch1zeta')), 'zeta+')
        self.assertEqual(realization_frame(load_realization('se32')), 'zeta-')
        self.assertEqual(realization_frame(load_realization('s2tilde')), 'mass')


class TestCovariance(unittest.TestCase):
    """Exact and numeric covariance of the registered two-point forms"""

    def test_superfield_forms(self):
        for name in SUPERFIELD_FORMS:
            with self.subTest(form=name):
                report = check_form(name)
                self.assertTrue(report.passed, report.to_text())

    def test_repeated_checks_are_independent(self):
        first = check_form('scalar_f')
        first.entries.clear()
        second = check_form('scalar_f')
        self.assertTrue(second.entries)
        self.assertTrue(second.passed, second.to_text())

    def test_spinor_suite(self):
        report = spinor_covariance_suite()
        self.assertTrue(report.passed, report.to_text())

    def test_numeric_bessel_form(self):
        report = check_form('prop53_case_ii', 'numeric', seed=42, tol=1e-9)
        self.assertTrue(report.passed, report.to_text())
        self.assertEqual(report.to_json()['mode'], 'numeric')

    def test_frame_mismatch(self):
        with self.assertRaises(SignatureMismatch):
            covariance_check('s2tilde', load_form('prop22'))

    def test_unknown_mode(self):
        with self.assertRaises(ValueError):
            covariance_check('sch1zeta', load_form('scalar_f'), mode='approximate')

    def test_single_generator(self):
        report = covariance_check('osp22', load_form('prop53_case_i'), labels=['X_0'])
        self.assertEqual([e.identity_id for e in report.entries], ['X_0'])
        self.assertTrue(report.passed)

    def test_negative_controls(self):
        report = negative_controls()
        self.assertTrue(report.passed, report.to_text())


class TestComponents(unittest.TestCase):

    def test_superfield_component_keys(self):
        components = component_extract(load_form('st2'))
        self.assertEqual(len(components), 18)
        for key in ('f1f2', 'phi1phibar2', 'g1g2', 'phi1phibar1', 'phi2phibar2'):
            with self.subTest(component=key):
                self.assertIn(key, components)

    def test_spinor_component_keys(self):
        components = component_extract(load_form('prop21_case_ii'))
        self.assertEqual(sorted(components), ['phi1phi2', 'phi1psi2', 'psi1phi2', 'psi1psi2'])
        self.assertTrue(components['psi1psi2'].is_zero())

    def test_derived_spinor(self):
        report = derived_spinor_check()
        self.assertTrue(report.passed, report.to_text())

    def test_derived_constants_at_x_two(self):
        constants = derived_constants()
        psi0 = constants['psi0'].eval_numeric({'x_1': 2})[()]
        phi0 = constants['phi0'].eval_numeric({'x_1': 2})[()]
        self.assertAlmostEqual(abs(psi0 + 128), 0, places=9)
        self.assertAlmostEqual(abs(phi0 - 8), 0, places=9)


class TestResidualSystems(unittest.TestCase):

    def test_every_case(self):
        for case in sorted(CASES):
            with self.subTest(case=case):
                report = appendixA_pde_residuals(case)
                self.assertTrue(report.passed, report.to_text())
                self.assertTrue(report.entries)

    def test_unknown_case(self):
        with self.assertRaises(KeyError):
            appendixA_pde_residuals('A9')


if __name__ == '__main__':
    unittest.main()
