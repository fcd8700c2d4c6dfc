import unittest
import json
import sys
import os
import tempfile
import logging
from unittest.mock import patch

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from orchestrator.queries import bracket_query, grade_query, parse_element, table_query
from orchestrator.suite_runner import SUITES, SuiteRunner, SuiteSettings, UnknownSuite
from orchestrator import verification_api
from orchestrator.verification_api import app
from symbolic.errors import NotInSpan, SignatureMismatch, UnknownLabel, UnknownRealization
from utils.config import load_config


class TestErrorHandling(unittest.TestCase):
    """Failure paths of the runner, the queries, the configuration and the service"""

    def setUp(self):
        self.app = app.test_client()
        self.app.testing = True
        # Suppress logging during tests
        logging.getLogger().setLevel(logging.CRITICAL)

    def test_runner_unknown_suite(self):
        with self.assertRaises(UnknownSuite):
            SuiteRunner(SuiteSettings()).run('prop9.9')

    def test_runner_turns_symbolic_errors_into_failures(self):
        def broken(settings):
            raise NotInSpan("bracket leaves the basis")

        with patch.dict(SUITES, {'broken': ('always fails', broken)}):
            report = SuiteRunner(SuiteSettings()).run('broken')
        self.assertFalse(report.passed)
        self.assertEqual(report.first_failure().identity_id, 'suite')
        self.assertIn('NotInSpan', report.first_failure().residual)

    def test_runner_survives_unexpected_errors(self):
        def crashing(settings):
            raise RuntimeError("boom")

        with patch.dict(SUITES, {'crashing': ('crashes', crashing)}):
            runner = SuiteRunner(SuiteSettings())
            report = runner.run('crashing')
        self.assertFalse(report.passed)
        self.assertEqual(runner.history[-1]['suite'], 'crashing')
        self.assertFalse(runner.history[-1]['pass'])

    def test_query_errors(self):
        cases = [
            (lambda: bracket_query('so(3)', 'X_0', 'X_1'), UnknownRealization),
            (lambda: bracket_query('sch1', 'X_0', 'Q_7'), UnknownLabel),
            (lambda: table_query('so(3)'), UnknownRealization),
            (lambda: parse_element('q*p', 'P33'), SignatureMismatch),
            (lambda: parse_element('q*eta', 'P22'), SignatureMismatch),
            (lambda: parse_element('q**(1/2)', 'P~22'), SignatureMismatch),
        ]
        for i, (call, error) in enumerate(cases):
            with self.subTest(case=i):
                with self.assertRaises(error):
                    call()

    def test_bad_window(self):
        with self.assertRaises(ValueError):
            table_query('sv', '3')

    def test_inhomogeneous_grade_is_reported(self):
        grades = grade_query('q + p**2', 'P22')['grades']
        self.assertIsNone(grades['gra'])
        self.assertEqual(grades['delta'], '0')

    def test_missing_config_file(self):
        config = load_config('/nonexistent/verification_config.yaml')
        self.assertEqual(config['verification']['seed'], 42)

    def test_invalid_yaml(self):
        with tempfile.NamedTemporaryFile('w', suffix='.yaml', delete=False) as handle:
            handle.write("verification: [unclosed\n")
            path = handle.name
        try:
            config = load_config(path)
        finally:
            os.unlink(path)
        self.assertEqual(config['verification']['tolerance'], 1e-9)

    def test_bad_environment_override(self):
        with patch.dict(os.environ, {'VERIFY_SEED': 'not-a-number'}):
            config = load_config('/nonexistent/verification_config.yaml')
        self.assertEqual(config['verification']['seed'], 42)

    def test_api_missing_parameters(self):
        for url in ('/bracket', '/bracket?algebra=sv&a=X_1', '/grade'):
            with self.subTest(url=url):
                response = self.app.get(url)
                self.assertEqual(response.status_code, 400)
                self.assertIn('error', json.loads(response.data))

    def test_api_unknown_label(self):
        response = self.app.get('/bracket?algebra=sch1&a=X_0&b=Q_7')
        self.assertEqual(response.status_code, 400)

    def test_api_unknown_table(self):
        response = self.app.get('/table/so3')
        self.assertEqual(response.status_code, 400)
        self.assertIn('sch1', json.loads(response.data)['algebras'])

    def test_api_suite_crash(self):
        with patch.object(verification_api.runner, 'run', side_effect=RuntimeError("boom")):
            response = self.app.get('/verify/eq1.5')
        self.assertEqual(response.status_code, 500)
        self.assertEqual(json.loads(response.data)['error'], 'boom')


if __name__ == '__main__':
    unittest.main()
