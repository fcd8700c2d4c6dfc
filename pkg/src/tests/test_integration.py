import unittest
import json
import sys
import os

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from orchestrator.verification_api import app


class TestVerificationApi(unittest.TestCase):
    """End-to-end tests of the verification service"""

    def setUp(self):
        self.app = app.test_client()
        self.app.testing = True

    def test_health_endpoint(self):
        response = self.app.get('/health')
        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertEqual(data['status'], 'healthy')
        self.assertIn('metrics', data)

    def test_suites_endpoint(self):
        response = self.app.get('/suites')
        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertIn('prop3.2', data['names'])
        self.assertIn('appendixA.A3', data['names'])
        self.assertIn('all', data['names'])
        self.assertGreater(len(data['suites']), 20)

    def test_verify_suite(self):
        response = self.app.get('/verify/eq1.5')
        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertEqual(data['suite'], 'eq1.5')
        self.assertTrue(data['pass'])
        self.assertTrue(data['entries'])

    def test_verify_alias(self):
        response = self.app.get('/verify/prop:3.2')
        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertEqual(data['suite'], 'prop3.2')
        self.assertEqual(data['summary'], '13 generators, closure pass')

    def test_verify_csv(self):
        response = self.app.get('/verify/appendixA.A1?format=csv')
        self.assertEqual(response.status_code, 200)
        self.assertTrue(response.data.decode().startswith('identity_id'))

    def test_unknown_suite(self):
        response = self.app.get('/verify/prop9.9')
        self.assertEqual(response.status_code, 404)
        self.assertIn('error', json.loads(response.data))

    def test_bracket_endpoint(self):
        response = self.app.get('/bracket?algebra=sv&a=X_1&b=X_-1')
        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertEqual(data['coefficients'], {'X_0': '2'})
        self.assertEqual(data['pair'], ['X_1', 'X_-1'])

    def test_bracket_in_mode_algebra(self):
        response = self.app.get('/bracket', query_string={'algebra': 'sns2', 'a': 'Y_1/2', 'b': 'Y_-1/2'})
        self.assertEqual(response.status_code, 200)
        self.assertEqual(json.loads(response.data)['result'], 'M_0')

    def test_table_endpoint(self):
        response = self.app.get('/table/sch1')
        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertEqual(data['realization'], 'sch1')
        self.assertTrue(data['closes'])
        self.assertEqual(len(data['entries']), 21)

    def test_grade_endpoint(self):
        response = self.app.get('/grade', query_string={'element': 'q*p*theta1', 'signature': 'P22'})
        self.assertEqual(response.status_code, 200)
        grades = json.loads(response.data)['grades']
        self.assertEqual(grades['gra'], '3/2')
        self.assertEqual(grades['delta'], '1')

    def test_roots_endpoint(self):
        response = self.app.get('/roots')
        self.assertEqual(response.status_code, 200)
        data = json.loads(response.data)
        self.assertEqual(data['algebra'], 'osp(2|4)')
        self.assertEqual(len(data['roots']), 16)

    def test_metrics_endpoint(self):
        self.app.get('/verify/eq1.5')
        response = self.app.get('/metrics')
        self.assertEqual(response.status_code, 200)
        text = response.data.decode()
        self.assertIn('verification_requests_total', text)
        self.assertIn('verification_suites_total{suite="eq1.5"}', text)


if __name__ == '__main__':
    unittest.main()
