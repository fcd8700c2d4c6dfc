import unittest
import io
import json
import sys
import os
from contextlib import redirect_stderr, redirect_stdout
from unittest.mock import patch

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

import cli
from orchestrator.suite_runner import SuiteRunner
from utils.reporting import Report


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        status = cli.run(list(argv))
    return status, out.getvalue(), err.getvalue()


class TestCommandLine(unittest.TestCase):
    """Verbs, output formats and exit codes of the command line"""

    def test_list(self):
        status, out, _ = invoke('list', '--format', 'json')
        self.assertEqual(status, 0)
        listing = json.loads(out)
        self.assertIn('prop5.3', listing['suites'])
        self.assertIn('sns2', listing['algebras'])
        self.assertIn('prop53_case_ii', listing['forms'])

    def test_verify_alias(self):
        status, out, _ = invoke('verify', 'prop:3.2')
        self.assertEqual(status, 0)
        self.assertTrue(out.startswith('prop3.2: PASS (13 generators, closure pass)'))

    def test_verify_single_form(self):
        status, out, _ = invoke('verify', 'twopoint', '--form', 'prop53_case_ii', '--numeric', '--format', 'json')
        self.assertEqual(status, 0)
        data = json.loads(out)
        self.assertEqual(data['mode'], 'numeric')
        self.assertEqual(data['algebra'], 'osp22')

    def test_verify_with_window(self):
        status, _, _ = invoke('verify', 'eq1.5', '--window=-1..1')
        self.assertEqual(status, 0)

    def test_failure_exit_code(self):
        failing = Report('prop3.4', 's2tilde as quadratic Poisson polynomials')
        failing.add('[X_0, X_1]', False, 'q*p^2', anchor='morphism')
        with patch.object(SuiteRunner, 'run', return_value=failing):
            status, _, err = invoke('verify', 'prop3.4')
        self.assertEqual(status, 1)
        self.assertIn('first failure: [X_0, X_1] (morphism)', err)

    def test_usage_errors(self):
        cases = [
            ('frobnicate',),
            ('verify', 'prop9.9'),
            ('verify', 'prop3.2', '--form', 'prop22'),
            ('verify', 'twopoint', '--form', 'nope'),
            ('bracket', 'sch1', 'X_0', 'Q_7'),
            ('bracket', 'so3', 'X_0', 'X_1'),
            ('table', 'sv', '--window', '3'),
            ('grade', 'q*eta'),
            ('verify', 'prop3.2', '--format', 'yaml'),
        ]
        for argv in cases:
            with self.subTest(argv=argv):
                status, _, _ = invoke(*argv)
                self.assertEqual(status, 2)

    def test_bracket_text(self):
        status, out, _ = invoke('bracket', 'sns2', 'Y_1/2', 'Y_-1/2')
        self.assertEqual(status, 0)
        self.assertEqual(out.strip(), 'M_0')

    def test_bracket_json_is_deterministic(self):
        first = invoke('bracket', 'sv', 'X_1', 'X_-1', '--format', 'json')
        second = invoke('bracket', 'sv', 'X_1', 'X_-1', '--format', 'json')
        self.assertEqual(first[1], second[1])
        self.assertEqual(json.loads(first[1])['coefficients'], {'X_0': '2'})

    def test_table_csv(self):
        status, out, _ = invoke('table', 'sch1', '--format', 'csv')
        self.assertEqual(status, 0)
        lines = out.strip().splitlines()
        self.assertEqual(lines[0], 'left,right,result,status,residual,anchor')
        self.assertEqual(len(lines), 22)

    def test_grade(self):
        status, out, _ = invoke('grade', 'q*p*theta1', '--signature', 'P22', '--format', 'csv')
        self.assertEqual(status, 0)
        self.assertIn('gra,3/2', out)
        self.assertIn('delta,1', out)

    def test_roots(self):
        status, out, _ = invoke('roots', '--format', 'json')
        self.assertEqual(status, 0)
        roots = json.loads(out)['roots']
        self.assertEqual(len(roots), 16)
        self.assertEqual(sum(1 for r in roots if r['parity'] == 'odd'), 8)


if __name__ == '__main__':
    unittest.main()
