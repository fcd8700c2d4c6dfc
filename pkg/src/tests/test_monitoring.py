import unittest
from unittest.mock import patch
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from monitoring.metrics_collector import MetricsCollector
from utils.reporting import Report


class TestMetricsCollector(unittest.TestCase):
    """Prometheus bookkeeping of suite runs"""

    def setUp(self):
        self.collector = MetricsCollector()
        self.passing = Report('unit-pass', 'anchor')
        self.passing.add('a', True)
        self.failing = Report('unit-fail', 'anchor')
        self.failing.add('a', True)
        self.failing.add('b', False, 'residual')

    def test_record_passing_suite(self):
        self.collector.record_suite(self.passing, 0.25)
        status = self.collector.get_health_status('unit-pass')
        self.assertEqual(status['status'], 'healthy')
        self.assertTrue(status['last_result']['pass'])
        self.assertEqual(status['last_result']['checks'], 1)
        self.assertIsNone(status['last_result']['first_failure'])

    def test_record_failing_suite(self):
        self.collector.record_suite(self.failing, 1.0)
        result = self.collector.get_health_status('unit-fail')['last_result']
        self.assertFalse(result['pass'])
        self.assertEqual(result['first_failure'], 'b')

    def test_unknown_suite_has_no_result(self):
        self.assertIsNone(self.collector.get_health_status('never-run')['last_result'])

    def test_exposition(self):
        self.collector.record_suite(self.passing, 0.1)
        self.collector.record_bracket('sv')
        self.collector.record_request()
        text = self.collector.exposition().decode()
        for name in ('verification_suites_total', 'verification_suites_passed_total',
                     'verification_brackets_total', 'verification_last_suite_seconds',
                     'verification_requests_total'):
            with self.subTest(metric=name):
                self.assertIn(name, text)
        self.assertIn('suite="unit-pass"', text)

    def test_registry_errors_degrade_health(self):
        with patch('monitoring.metrics_collector.SUITES_RUN') as mock_counter:
            mock_counter.labels.side_effect = Exception("registry unavailable")
            self.collector.record_suite(self.passing, 0.1)
        status = self.collector.get_health_status('unit-pass')
        self.assertEqual(status['status'], 'degraded')
        self.assertEqual(status['collection_errors'], 1)
        # the outcome is still kept
        self.assertTrue(status['last_result']['pass'])

    def test_bracket_errors_are_counted(self):
        with patch('monitoring.metrics_collector.BRACKETS_COMPUTED') as mock_counter:
            mock_counter.labels.side_effect = ValueError("bad label")
            self.collector.record_bracket('sv')
        self.assertEqual(self.collector.collection_errors, 1)


if __name__ == '__main__':
    unittest.main()
