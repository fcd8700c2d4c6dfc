import unittest
import sys
import os

import mpmath
import sympy

# Add src to path for imports
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from symbolic.errors import IllegalSubstitution, OpaqueDerivative, SingularPoint
from symbolic.expr import FUNCTIONS, Expr, sample_environment
from symbolic.registry import sym


class TestGrassmannArithmetic(unittest.TestCase):
    """Sign and nilpotency rules of the odd variables"""

    def setUp(self):
        self.th1 = Expr.odd('theta1')
        self.th2 = Expr.odd('theta2')

    def test_square_vanishes(self):
        self.assertTrue((self.th1 * self.th1).is_zero())

    def test_anticommutation(self):
        self.assertEqual(self.th1 * self.th2, -(self.th2 * self.th1))

    def test_parity(self):
        self.assertEqual(self.th1.parity(), 1)
        self.assertEqual((self.th1 * self.th2).parity(), 0)
        self.assertIsNone((self.th1 + Expr.one()).parity())

    def test_left_derivative_sign(self):
        product = self.th1 * self.th2
        self.assertEqual(product.partial('theta1'), self.th2)
        self.assertEqual(product.partial('theta2'), -self.th1)

    def test_unknown_odd_variable(self):
        with self.assertRaises(IllegalSubstitution):
            Expr.odd('eta')


class TestCanonicalForm(unittest.TestCase):
    """Symbolic powers, exponentials and the zero test"""

    def setUp(self):
        self.t = sym('t')
        self.r = sym('r')
        self.x = sym('x')
        self.M = sym('M')

    def test_power_products_merge(self):
        product = Expr.power(self.t, self.x) * Expr.power(self.t, 1 - self.x)
        self.assertEqual(product, Expr.symbol('t'))

    def test_integer_power_is_plain(self):
        self.assertTrue(Expr.power(self.t, 2).is_pure_coefficient())

    def test_power_derivative(self):
        e = Expr.power(self.t, self.x)
        expected = Expr.power(self.t, self.x - 1) * self.x
        self.assertTrue((e.partial('t') - expected).is_zero())

    def test_composite_base_derivative(self):
        u = 4 * sym('zeta') * self.t + self.r ** 2
        e = Expr.power(u, -self.x)
        expected = Expr.power(u, -self.x - 1) * (-2 * self.x * self.r)
        self.assertEqual(e.partial('r'), expected)

    def test_exponential_derivative(self):
        e = Expr.exp(-self.M * self.r ** 2 / (2 * self.t))
        self.assertEqual(e.partial('r'), e * (-self.M * self.r / self.t))

    def test_exponentials_combine(self):
        a = Expr.exp(self.r / self.t)
        b = Expr.exp(-self.r / self.t)
        self.assertEqual(a * b, Expr.one())

    def test_cancellation_is_exact_zero(self):
        e = Expr.power(self.t, self.x) * Expr.odd('theta1')
        self.assertTrue((e - e).is_zero())
        self.assertEqual(len(e - e), 0)

    def test_from_sympy_roundtrip_shapes(self):
        e = Expr.from_sympy(self.t ** self.x * sympy.exp(self.r))
        self.assertEqual(e, Expr.power(self.t, self.x) * Expr.exp(self.r))


class TestSubstitution(unittest.TestCase):
    """Simultaneous substitution and its error cases"""

    def test_simultaneous_swap(self):
        e = Expr.symbol('t') - 2 * Expr.symbol('r')
        swapped = e.substitute({'t': sym('r'), 'r': sym('t')})
        self.assertEqual(swapped, Expr.symbol('r') - 2 * Expr.symbol('t'))

    def test_parameter_in_exponent(self):
        e = Expr.power(sym('t'), sym('x'))
        self.assertEqual(e.substitute({'x': 2}), Expr.symbol('t') ** 2)

    def test_odd_variable_takes_odd_value(self):
        e = Expr.odd('theta_1') * Expr.symbol('t')
        image = e.substitute({'theta_1': Expr.odd('theta_2')})
        self.assertEqual(image, Expr.odd('theta_2') * Expr.symbol('t'))

    def test_odd_variable_rejects_even_value(self):
        with self.assertRaises(IllegalSubstitution):
            Expr.odd('theta1').substitute({'theta1': Expr.symbol('t')})

    def test_singular_base(self):
        with self.assertRaises(SingularPoint):
            Expr.power(sym('t'), sym('x')).substitute({'t': 0})

    def test_unknown_name(self):
        with self.assertRaises(IllegalSubstitution):
            Expr.one().substitute({'omega': 1})


class TestFormalFunctions(unittest.TestCase):
    """Derivative rules and numeric evaluators of the formal functions"""

    def setUp(self):
        self.v = sym('r_1') * sym('r_2') / sym('t')
        self.env = {'M_1': 1.3, 'M_2': 0.8, 'x_1': 0.3, 'x_2': 0.7}

    def test_h1_rule(self):
        derivative = Expr.func('h1', self.v).partial('r_1')
        expected = Expr.func('h2', self.v) * (-sym('M_1') * sym('r_2') / sym('t'))
        self.assertEqual(derivative, expected)

    def test_marker_without_rewrite(self):
        derivative = Expr.func('h1', self.v).partial('r_1', rewrite=False)
        expected = Expr.func('h1', self.v, 1) * (sym('r_2') / sym('t'))
        self.assertEqual(derivative, expected)

    def test_opaque_function_strict(self):
        with self.assertRaises(OpaqueDerivative):
            Expr.func('f', sym('r') ** 2 / sym('t')).partial('r', strict=True)

    def test_bessel_evaluators_satisfy_the_rules(self):
        h1, h2 = FUNCTIONS.get('h1').numeric, FUNCTIONS.get('h2').numeric
        for v in (0.7, 1.4, 2.9):
            with self.subTest(v=v):
                lhs = h1(v, 1, self.env)
                rhs = -self.env['M_1'] * h2(v, 0, self.env)
                self.assertLess(abs(lhs - rhs), 1e-8)
                lhs = h2(v, 1, self.env)
                rhs = (self.env['M_2'] * h1(v, 0, self.env)
                       + (self.env['x_1'] - self.env['x_2']) / v * h2(v, 0, self.env))
                self.assertLess(abs(lhs - rhs), 1e-8)

    def test_unknown_function(self):
        with self.assertRaises(IllegalSubstitution):
            Expr.func('nope', sym('t'))


class TestNumerics(unittest.TestCase):

    def test_eval_numeric(self):
        values = Expr.power(sym('t'), sympy.Rational(1, 2)).eval_numeric({'t': 4})
        self.assertAlmostEqual(abs(values[()] - 2), 0, places=12)

    def test_sample_environment_ranges(self):
        env = sample_environment(['t_1', 't_2', 'M_1', 'r_2'], seed=3)
        for name, value in env.items():
            with self.subTest(name=name):
                low, high = (0.25, 1.0) if name.endswith('_2') else (1.5, 3.0)
                self.assertTrue(low <= value.real < high)

    def test_sample_environment_is_seeded(self):
        self.assertEqual(sample_environment(['t', 'r'], 11), sample_environment(['t', 'r'], 11))
        self.assertEqual(sample_environment(['t'], 5, {'t': 2})['t'], 2)

    def test_mpmath_available_for_evaluators(self):
        self.assertTrue(mpmath.besselj(0, 0) == 1)


if __name__ == '__main__':
    unittest.main()
