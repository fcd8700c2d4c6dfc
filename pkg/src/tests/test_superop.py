import unittest
import sys
import os

import sympy

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from symbolic.errors import InhomogeneousParity
from symbolic.expr import Expr
from symbolic.registry import sym
from symbolic.superop import D, MatrixOperator, SuperOperator, mult, supercommutator


class TestSuperOperator(unittest.TestCase):
    """Normal-ordered differential operators with Grassmann coefficients"""

    def setUp(self):
        self.t = sym('t')
        self.x = sym('x')

    def test_heisenberg_relation(self):
        self.assertEqual(supercommutator(D('t'), mult(self.t)), SuperOperator.identity())

    def test_odd_anticommutator(self):
        th = mult(Expr.odd('theta1'))
        self.assertEqual(supercommutator(D('theta1'), th), SuperOperator.identity())

    def test_odd_derivatives_anticommute(self):
        self.assertEqual(D('theta1', 'theta2'), -D('theta2', 'theta1'))
        self.assertTrue(D('theta1', 'theta1').is_zero())

    def test_euler_operator_on_power(self):
        euler = SuperOperator.term(self.t, 't')
        e = Expr.power(self.t, self.x)
        self.assertEqual(euler.apply(e), e * self.x)

    def test_composition_matches_application(self):
        a = SuperOperator.term(self.t, 't') + mult(self.x)
        b = D('t')
        e = Expr.power(self.t, self.x + sympy.Rational(1, 3))
        self.assertEqual(a.compose(b).apply(e), a.apply(b.apply(e)))

    def test_parity_and_order(self):
        op = SuperOperator.term(Expr.odd('theta1'), 't')
        self.assertEqual(op.parity(), 1)
        self.assertEqual(op.order(), 1)
        self.assertEqual(D('t', 't', 'r').order(), 3)

    def test_inhomogeneous_supercommutator(self):
        with self.assertRaises(InhomogeneousParity):
            supercommutator(D('t') + D('theta1'), D('t'))

    def test_rename_moves_coordinates(self):
        op = SuperOperator.term(self.t, 'r') + SuperOperator.term(Expr.odd('theta1'), 'theta2')
        moved = op.rename({'t': 't_1', 'r': 'r_1'}, {'theta1': 'theta_1', 'theta2': 'thetabar_1'})
        expected = (SuperOperator.term(sym('t_1'), 'r_1')
                    + SuperOperator.term(Expr.odd('theta_1'), 'thetabar_1'))
        self.assertEqual(moved, expected)

    def test_substitute_parameters(self):
        op = SuperOperator.term(self.t, 't') + mult(self.x / 2)
        self.assertEqual(op.substitute({'x': 1}), SuperOperator.term(self.t, 't') + mult(sympy.Rational(1, 2)))


class TestMatrixOperator(unittest.TestCase):

    def test_scalar_embedding(self):
        m = MatrixOperator.scalar(D('t'))
        self.assertEqual(m[(0, 0)], D('t'))
        self.assertTrue(m[(0, 1)].is_zero())

    def test_matrix_supercommutator(self):
        a = MatrixOperator([[D('r'), SuperOperator.zero()], [SuperOperator.zero(), D('r')]])
        b = MatrixOperator.scalar(mult(sym('r')))
        self.assertEqual(supercommutator(a, b), MatrixOperator.scalar(SuperOperator.identity()))


if __name__ == '__main__':
    unittest.main()
