import unittest
import json
import sys
import os
from unittest.mock import patch

import sympy

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from algebra.grading import audit_gradings, cdim_and_grade
from algebra.realizations import (EXPECTED_DIMENSIONS, load_realization, parse_window,
                                  realization_names)
from algebra.roots import CARTAN_LABELS, root_data, roots_frame
from algebra.tables import (closure_report, dimension_audit, express, load_golden, param_dependence,
                            structure_constants, table_jacobi, window_stability, window_stability_report)
from symbolic.errors import UnknownLabel, UnknownRealization

half = sympy.Rational(1, 2)


class TestRealizations(unittest.TestCase):
    """Registry of differential realizations"""

    def test_dimension_audit(self):
        report = dimension_audit()
        self.assertTrue(report.passed, report.to_text())

    def test_expected_dimensions(self):
        for name, expected in EXPECTED_DIMENSIONS.items():
            with self.subTest(realization=name):
                self.assertEqual(len(load_realization(name)), expected)

    def test_unknown_realization(self):
        with self.assertRaises(UnknownRealization):
            load_realization('so(3)')

    def test_unknown_label(self):
        with self.assertRaises(UnknownLabel):
            load_realization('sch1').generator('Q_7')

    def test_infinite_family_outside_window(self):
        sv = load_realization('sv')
        self.assertNotIn('X_5', sv.labels())
        self.assertIn('X_5', sv)

    def test_parse_window(self):
        window = parse_window('-1..1')
        self.assertEqual(window['integer'], (-1, 1))
        self.assertEqual(window['half'], (-half, half))
        with self.assertRaises(ValueError):
            parse_window('3')

    def test_registry_names(self):
        for name in ('sch1', 'sv', 'svext', 'se32', 's2tilde', 's2', 'osp22', 's1tilde', 'sns2diff'):
            with self.subTest(name=name):
                self.assertIn(name, realization_names())


class TestStructureConstants(unittest.TestCase):
    """Brackets decomposed over the generator basis and compared with the golden tables"""

    def test_virasoro_bracket(self):
        self.assertEqual(express(load_realization('sv'), 'X_1', 'X_-1'), {'X_0': 2})

    def test_y_y_bracket(self):
        combo = express(load_realization('sv'), 'Y_1/2', 'Y_-1/2')
        self.assertEqual({k: sympy.simplify(v) for k, v in combo.items()}, {'M_0': 1})

    def test_finite_closures(self):
        for name in ('sch1', 'se32', 'sgal', 's2tilde', 's2', 'osp22', 's1tilde', 'conf3spinor'):
            with self.subTest(realization=name):
                report = closure_report(name)
                self.assertTrue(report.passed, report.to_text())

    def test_infinite_closures(self):
        for name in ('sv', 'svext'):
            with self.subTest(realization=name):
                report = closure_report(name)
                self.assertTrue(report.passed, report.to_text())

    def test_closure_reports_are_rebuilt(self):
        first = closure_report('sch1')
        first.entries.clear()
        second = closure_report('sch1', parse_window(None))
        self.assertEqual(len(second.entries), 21)
        self.assertTrue(second.passed, second.to_text())

    def test_jacobi_on_the_computed_table(self):
        table = structure_constants(load_realization('s2tilde'))
        self.assertEqual(table_jacobi(table), [])

    def test_sch1_constants_do_not_depend_on_x(self):
        self.assertEqual(param_dependence('sch1', ('x',)), [])

    def test_entries_survive_a_larger_window(self):
        for name in ('sv', 'svext'):
            with self.subTest(algebra=name):
                self.assertEqual(window_stability(name), [])

    def test_window_report_names_changed_pairs(self):
        with patch('algebra.tables.window_stability', return_value=[('X_1', 'X_-1')]):
            report = window_stability_report(('sv',))
        self.assertFalse(report.passed)
        self.assertEqual(report.entries[0].residual, '[X_1, X_-1]')

    def test_table_rendering(self):
        table = structure_constants(load_realization('sch1'))
        data = json.loads(table.render('json'))
        self.assertEqual(data['realization'], 'sch1')
        self.assertEqual(len(data['entries']), 21)
        csv = table.render('csv')
        self.assertTrue(csv.startswith('left,right,result,status,residual,anchor'))

    def test_golden_tables_load(self):
        for name in ('sv', 'svext', 'se32', 's2tilde', 's2', 'sns0', 'sns1', 'sns2'):
            with self.subTest(golden=name):
                self.assertTrue(load_golden(name).anchor)


class TestRootsAndGradings(unittest.TestCase):

    def setUp(self):
        self.roots = root_data()

    def test_root_count(self):
        self.assertEqual(len(self.roots), 19 - len(CARTAN_LABELS))

    def test_parities(self):
        odd = [r for r in self.roots if r.parity]
        self.assertEqual(len(odd), 8)

    def test_roots_come_in_opposite_pairs(self):
        vectors = {r.root for r in self.roots}
        for root in vectors:
            with self.subTest(root=root):
                self.assertIn(tuple(-c for c in root), vectors)

    def test_roots_frame(self):
        frame = roots_frame()
        self.assertEqual(list(frame.columns), ['label', 'root', 'monomial', 'factor', 'parity'])
        self.assertEqual(len(frame), len(self.roots))

    def test_grading_audit(self):
        report = audit_gradings()
        self.assertTrue(report.passed, report.to_text())

    def test_table_values(self):
        self.assertEqual(cdim_and_grade(2, 'Q'), (0, 0))
        self.assertEqual(cdim_and_grade(1, 'G'), (3 * half, 1))
        with self.assertRaises(UnknownLabel):
            cdim_and_grade(1, 'N')


if __name__ == '__main__':
    unittest.main()
