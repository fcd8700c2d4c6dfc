import unittest
import sys
import os
from unittest.mock import patch

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from orchestrator.queries import bracket_query, combination_text, grade_query, parse_element, table_query
from orchestrator.suite_runner import (AGGREGATE, SUITES, SuiteRunner, SuiteSettings, normalize_suite_id,
                                       suite_names)
from poisson.element import P22, PoissonElement
from utils.config import DEFAULTS, get_setting, load_config, window_text


class TestSuiteRunner(unittest.TestCase):
    """Registered suites and their aggregation"""

    def setUp(self):
        self.runner = SuiteRunner(SuiteSettings(seed=42, tol=1e-9))

    def test_registry(self):
        names = suite_names()
        for name in ('eq1.2', 'eq1.5', 'prop2.1', 'prop3.4', 'prop4.3', 'prop5.4', 'appendixA.A5', 'twopoint'):
            with self.subTest(suite=name):
                self.assertIn(name, names)
        self.assertEqual(names[-1], AGGREGATE)

    def test_normalize(self):
        self.assertEqual(normalize_suite_id('prop:3.2'), 'prop3.2')
        self.assertEqual(normalize_suite_id(' eq1.5 '), 'eq1.5')

    def test_quick_suites_pass(self):
        for name in ('gradings', 'prop3.7', 'appendixA.A1', 'prop3.1'):
            with self.subTest(suite=name):
                report = self.runner.run(name)
                self.assertTrue(report.passed, report.to_text())

    def test_sabotage_is_part_of_prop34(self):
        report = self.runner.run('prop:3.4')
        self.assertTrue(report.passed, report.to_text())
        ids = [e.identity_id for e in report.entries]
        self.assertIn('sabotaged map rejected', ids)
        self.assertEqual(report.summary, '13 generators')

    def test_history(self):
        self.runner.run('appendixA.A2')
        self.assertEqual(self.runner.history[-1]['suite'], 'appendixA.A2')
        self.assertTrue(self.runner.history[-1]['pass'])

    def test_settings_from_config(self):
        settings = SuiteSettings.from_config({'verification': {'seed': 7}, 'property_tests': {'ideal_cases': 5}})
        self.assertEqual(settings.seed, 7)
        self.assertEqual(settings.ideal_cases, 5)
        self.assertEqual(settings.transport_cases, 30)

    def test_run_all(self):
        report = self.runner.run('all')
        self.assertTrue(report.passed, '\n'.join(f"{e.identity_id}: {e.residual}" for e in report.failures()))
        self.assertEqual(report.summary, f"{len(SUITES)} suites")
        prefixes = {e.identity_id.split(':', 1)[0] for e in report.entries}
        self.assertEqual(prefixes, set(SUITES))


class TestQueries(unittest.TestCase):

    def test_combination_text(self):
        self.assertEqual(combination_text({'M_0': 1}), 'M_0')
        self.assertEqual(combination_text({'X_0': -1, 'M_0': 2}), '(2)*M_0 - X_0')
        self.assertEqual(combination_text({}), '0')
        self.assertEqual(combination_text(None), 'outside the basis')

    def test_bracket_query_reports_operator(self):
        result = bracket_query('sch1', 'Y_1/2', 'Y_-1/2')
        self.assertEqual(result['result'], 'M_0')
        self.assertIsNotNone(result['operator'])

    def test_table_query_with_window(self):
        table = table_query('sv', '-1..1')
        self.assertTrue(table.closes())
        labels = {label for pair in table.entries for label in pair}
        self.assertNotIn('X_2', labels)

    def test_parse_element_keeps_odd_order(self):
        parsed = parse_element('theta2*theta1', 'P22')
        expected = -(PoissonElement.variable(P22, 'theta1') * PoissonElement.variable(P22, 'theta2'))
        self.assertEqual(parsed, expected)

    def test_repeated_odd_factor_vanishes(self):
        self.assertTrue(parse_element('q*theta1*theta1', 'P22').is_zero())

    def test_twisted_half_powers(self):
        result = grade_query('q*p**(1/2)*theta', 'P~21')
        self.assertEqual(result['grades']['gra'], '1')
        self.assertEqual(result['signature'], 'P~(2|1)')


class TestConfig(unittest.TestCase):

    def test_shipped_file(self):
        config = load_config()
        self.assertEqual(get_setting(config, 'verification.seed'), 42)
        self.assertEqual(window_text(config), '-2..2')
        self.assertEqual(get_setting(config, 'property_tests.ideal_cases'), 100)

    def test_environment_overrides(self):
        with patch.dict(os.environ, {'VERIFY_SEED': '7', 'API_PORT': '8080'}):
            config = load_config()
        self.assertEqual(config['verification']['seed'], 7)
        self.assertEqual(config['service']['port'], 8080)

    def test_defaults_are_not_mutated(self):
        with patch.dict(os.environ, {'VERIFY_TOL': '1e-6'}):
            load_config('/nonexistent/verification_config.yaml')
        self.assertEqual(DEFAULTS['verification']['tolerance'], 1e-9)

    def test_missing_key(self):
        self.assertEqual(get_setting({'a': {'b': 1}}, 'a.c', 'fallback'), 'fallback')


if __name__ == '__main__':
    unittest.main()
