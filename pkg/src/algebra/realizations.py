"""
Registry of differential-operator realizations.

Every realization maps ASCII generator labels (``X_-1``, ``G1_1/2``, ``Ybar2_0``,
``V_-``) to SuperOperators, or to 2x2 MatrixOperators for the spinor action.
Infinite families are built on demand from their mode index.
"""
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple, Union

import sympy

from symbolic.errors import UnknownLabel, UnknownRealization
from symbolic.expr import Expr
from symbolic.registry import sym
from symbolic.superop import D, MatrixOperator, SuperOperator, mult
from utils.labels import make_label, parse_label

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

Operator = Union[SuperOperator, MatrixOperator]

half = sympy.Rational(1, 2)
t, r, zeta, M, Mp = (sym(n) for n in ('t', 'r', 'zeta', 'M', 'Mp'))
x, nu = sym('x'), sym('nu')
th1, th2 = Expr.odd('theta1'), Expr.odd('theta2')

DEFAULT_WINDOW = {'integer': (-2, 2), 'half': (sympy.Rational(-3, 2), sympy.Rational(3, 2)), 'exponent': (0, 2)}


def T(coeff: Any, *names: str) -> SuperOperator:
    return SuperOperator.term(coeff, *names)


@dataclass
class Family:
    """An infinite generator family; ``shift`` maps mode index to the exponent of t."""
    name: str
    build: Callable[[sympy.Rational], Operator]
    parity: int
    half: bool = False
    shift: sympy.Rational = sympy.Integer(0)
    in_table: bool = True


@dataclass
class GeneratorDef:
    label: str
    family: str
    index: Optional[sympy.Rational]
    operator: Operator
    parity: int
    cdim: Optional[sympy.Rational] = None
    grade: Optional[sympy.Rational] = None


@dataclass
class Realization:
    name: str
    anchor: str
    generators: List[GeneratorDef]
    families: Dict[str, Family] = field(default_factory=dict)
    matrix: bool = False
    coordinates: Tuple[str, ...] = ('t', 'r', 'zeta')
    closure_bindings: Dict[str, Any] = field(default_factory=dict)
    golden: Optional[str] = None

    def labels(self) -> List[str]:
        return [g.label for g in self.generators]

    def __len__(self) -> int:
        return len(self.generators)

    def __contains__(self, label: str) -> bool:
        try:
            self.generator(label)
            return True
        except UnknownLabel:
            return False

    def generator(self, label: str) -> GeneratorDef:
        for g in self.generators:
            if g.label == label:
                return g
        family, index = parse_label(label)
        fam = self.families.get(family)
        if fam is None or index is None or _is_half(index) != fam.half:
            raise UnknownLabel(f"'{label}' is not a generator of {self.name}")
        return _family_generator(fam, index)

    def operator(self, label: str) -> Operator:
        return self.generator(label).operator

    def extended(self, family: str, index: sympy.Rational) -> Optional[GeneratorDef]:
        fam = self.families.get(family)
        if fam is None or _is_half(index) != fam.half or not fam.in_table:
            return None
        return _family_generator(fam, index)

    def substitute(self, bindings: Dict[str, Any]) -> 'Realization':
        """Copy with parameters bound in every generator (families are bound lazily)."""
        if not bindings:
            return self
        generators = [GeneratorDef(g.label, g.family, g.index, g.operator.substitute(bindings),
                                   g.parity, g.cdim, g.grade) for g in self.generators]
        families = {
            name: Family(f.name, (lambda build: lambda i: build(i).substitute(bindings))(f.build),
                         f.parity, f.half, f.shift, f.in_table)
            for name, f in self.families.items()
        }
        return Realization(self.name, self.anchor, generators, families, self.matrix,
                           self.coordinates, dict(self.closure_bindings), self.golden)


def _is_half(index: sympy.Rational) -> bool:
    return sympy.Rational(index).q == 2


def _family_generator(fam: Family, index: sympy.Rational) -> GeneratorDef:
    index = sympy.Rational(index)
    return GeneratorDef(make_label(fam.name, index), fam.name, index, fam.build(index), fam.parity)


def _gen(label: str, operator: Operator, parity: int = 0) -> GeneratorDef:
    family, index = parse_label(label)
    return GeneratorDef(label, family, index, operator, parity)


def mode_indices(low: sympy.Rational, high: sympy.Rational, half_modes: bool) -> List[sympy.Rational]:
    low, high = sympy.Rational(low), sympy.Rational(high)
    start = sympy.ceiling(low - half) + half if half_modes else sympy.ceiling(low)
    out = []
    value = start
    while value <= high:
        out.append(value)
        value += 1
    return out


def mass_form(op: SuperOperator) -> SuperOperator:
    """Replace every d_zeta by multiplication with 2M (coefficients must not contain zeta)."""
    pairs = []
    for (even, odd), coeff in op.terms.items():
        counts = dict(even)
        k = counts.pop('zeta', 0)
        word = (tuple(sorted(counts.items())), odd)
        pairs.append(SuperOperator({word: coeff * (2 * M) ** k}))
    return SuperOperator.sum(pairs)


# ---- Schrödinger-Virasoro family (mass form) -------------------------------

def sv_X(n: sympy.Rational) -> SuperOperator:
    n = sympy.Rational(n)
    return (T(-t ** (n + 1), 't') + T(-(n + 1) / 2 * t ** n * r, 'r')
            + mult(-(n + 1) * x / 2 * t ** n - n * (n + 1) / 4 * M * t ** (n - 1) * r ** 2))


def sv_Y(m: sympy.Rational) -> SuperOperator:
    m = sympy.Rational(m)
    return T(-t ** (m + half), 'r') + mult(-(m + half) * M * t ** (m - half) * r)


def sv_M(n: sympy.Rational) -> SuperOperator:
    return mult(-M * t ** sympy.Rational(n))


def svext_X(n: sympy.Rational) -> SuperOperator:
    n = sympy.Rational(n)
    return sv_X(n) + mult(-(n ** 3 - n) / 8 * Mp * t ** (n - 2) * r ** 4)


def svext_Y(m: sympy.Rational) -> SuperOperator:
    m = sympy.Rational(m)
    return sv_Y(m) + mult(-(m ** 2 - sympy.Rational(1, 4)) * Mp * t ** (m - sympy.Rational(3, 2)) * r ** 3)


def svext_Z2(n: sympy.Rational) -> SuperOperator:
    n = sympy.Rational(n)
    return mult(-n * t ** (n - 1) * r ** 2)


def svext_Z1(m: sympy.Rational) -> SuperOperator:
    return mult(-2 * t ** (sympy.Rational(m) - half) * r)


def svext_Z0(n: sympy.Rational) -> SuperOperator:
    return mult(-2 * t ** sympy.Rational(n))


def _infinite(name: str, anchor: str, families: List[Family], window: Dict[str, Tuple]) -> Realization:
    generators = []
    for fam in families:
        low, high = window['half'] if fam.half else window['integer']
        for index in mode_indices(low, high, fam.half):
            generators.append(_family_generator(fam, index))
    return Realization(name, anchor, generators, {f.name: f for f in families})


def build_sv(window: Dict[str, Tuple]) -> Realization:
    realization = _infinite('sv', 'Schrödinger-Virasoro realization, central charge 0', [
        Family('X', sv_X, 0), Family('Y', sv_Y, 0, half=True), Family('M', sv_M, 0),
    ], window)
    realization.golden = 'sv'
    return realization


def build_svext(window: Dict[str, Tuple]) -> Realization:
    realization = _infinite('svext', 'first-order extension of sv by Z^(0), Z^(1), Z^(2)', [
        Family('X', svext_X, 0), Family('Y', svext_Y, 0, half=True),
        Family('Z2', svext_Z2, 0), Family('Z1', svext_Z1, 0, half=True), Family('Z0', svext_Z0, 0),
    ], window)
    realization.golden = 'svext'
    return realization


def build_sch1(window: Dict[str, Tuple]) -> Realization:
    generators = [_gen(make_label('X', n), sv_X(n)) for n in (-1, 0, 1)]
    generators += [_gen(make_label('Y', m), sv_Y(m)) for m in (-half, half)]
    generators.append(_gen('M_0', sv_M(0)))
    return Realization('sch1', 'Schrödinger algebra, mass representation', generators, golden='sv')


def build_sch1zeta(window: Dict[str, Tuple]) -> Realization:
    generators = [
        _gen('X_-1', T(-1, 't')),
        _gen('X_0', T(-t, 't') + T(-half * r, 'r') + mult(-x / 2)),
        _gen('X_1', T(-t ** 2, 't') + T(-t * r, 'r') + T(r ** 2 / 4, 'zeta') + mult(-x * t)),
        _gen('Y_-1/2', T(-1, 'r')),
        _gen('Y_1/2', T(-t, 'r') + T(half * r, 'zeta')),
        _gen('M_0', T(half, 'zeta')),
        _gen('N', T(-t, 't') + T(zeta, 'zeta') + mult(nu)),
    ]
    return Realization('sch1zeta', 'Schrödinger algebra in the dual mass coordinate, extended by N',
                       generators, golden='sch1zeta')


# ---- spinor conformal realization ----------------------------------------

E12 = [[0, 1], [0, 0]]
E21 = [[0, 0], [1, 0]]


def _matrix(scalar: SuperOperator, constant: Iterable[Iterable[Any]]) -> MatrixOperator:
    return MatrixOperator.scalar(scalar) + MatrixOperator([[mult(c) for c in row] for row in constant])


def dirac_operator() -> MatrixOperator:
    return MatrixOperator([[D('r'), D('zeta')], [D('t'), -D('r')]])


def build_conf3spinor(window: Dict[str, Tuple]) -> Realization:
    scalar = MatrixOperator.scalar
    generators = [
        _gen('X_-1', scalar(T(-1, 't'))),
        _gen('X_0', _matrix(T(-t, 't') + T(-half * r, 'r'), [[-x / 2, 0], [0, -(x + 1) / 2]])),
        _gen('X_1', _matrix(T(-t ** 2, 't') + T(-t * r, 'r') + T(r ** 2 / 4, 'zeta'),
                            [[-x * t, 0], [-r / 2, -(x + 1) * t]])),
        _gen('Y_-1/2', scalar(T(-1, 'r'))),
        _gen('Y_1/2', _matrix(T(-t, 'r') + T(half * r, 'zeta'), [[0, 0], [-half, 0]])),
        _gen('M_0', scalar(T(half, 'zeta'))),
        _gen('N', _matrix(T(-t, 't') + T(zeta, 'zeta'), [[half + nu, 0], [0, -half + nu]])),
        _gen('V_-', _matrix(T(-r, 't') + T(2 * zeta, 'r'), [[0, -1], [0, 0]])),
        _gen('V_+', _matrix(T(-t * r, 't') + T(-zeta * r, 'zeta') + T(-(r ** 2 - 4 * zeta * t) / 2, 'r'),
                            [[-(2 * x + 1) * r / 2, -t], [zeta, -(2 * x + 1) * r / 2]])),
        _gen('W', _matrix(T(-r ** 2 / 2, 't') + T(2 * zeta ** 2, 'zeta') + T(2 * zeta * r, 'r'),
                          [[2 * (x + 1) * zeta, -r], [0, 2 * x * zeta]])),
    ]
    return Realization('conf3spinor', 'conformal algebra on the Dirac-Lévy-Leblond spinor', generators,
                       matrix=True, closure_bindings={'nu': 0}, golden='conf3spinor')


# ---- (3|2)-supersymmetric realizations -----------------------------------

def s2_X(n: sympy.Rational) -> SuperOperator:
    n = sympy.Rational(n)
    return (T(-t ** (n + 1), 't') + T(-(n + 1) / 2 * t ** n * r, 'r') + T(-(n + 1) / 2 * t ** n * th1, 'theta1')
            + mult(-(n + 1) * x / 2 * t ** n) + T(-n * (n + 1) / 8 * t ** (n - 1) * r ** 2, 'zeta')
            + T(-n * (n + 1) / 4 * t ** (n - 1) * r * th1, 'theta2'))


def s2_Y(m: sympy.Rational) -> SuperOperator:
    m = sympy.Rational(m)
    c = -(m + half) / 2 * t ** (m - half)
    return T(-t ** (m + half), 'r') + T(c * r, 'zeta') + T(c * th1, 'theta2')


def s2_G1(m: sympy.Rational) -> SuperOperator:
    m = sympy.Rational(m)
    return T(-t ** (m + half), 'theta1') + T(-(m + half) / 2 * t ** (m - half) * r, 'theta2')


def s2_G2(m: sympy.Rational) -> SuperOperator:
    m = sympy.Rational(m)
    c = -(m + half) * t ** (m - half)
    return (T(-t ** (m + half) * th1, 't') + T(-t ** (m + half) * th2, 'r')
            + T(c * half * th1 * r, 'r') + T(c * half * r * th2, 'zeta')
            + T(-c * half * th1 * th2, 'theta2') + mult(c * x * th1)
            + T(-(m ** 2 - sympy.Rational(1, 4)) / 4 * t ** (m - sympy.Rational(3, 2)) * r ** 2 * th1, 'zeta'))


M0_ZETA = T(-half, 'zeta')
YBAR1 = T(-1, 'theta2')
YBAR2 = T(-th1, 'r') + T(-th2, 'zeta')
N0 = T(-th1, 'theta1') + T(-th2, 'theta2') + mult(x)
DILATION = (T(-t, 't') + T(-r, 'r') + T(-zeta, 'zeta') + T(-half * th1, 'theta1')
            + T(-half * th2, 'theta2') + mult(-x))
V_MINUS = T(-half * r, 't') + T(-zeta, 'r') + T(-half * th2, 'theta1')
V_PLUS = (T(-2 * t * r, 't') + T(-2 * zeta * r, 'zeta') + T(-(r ** 2 + 4 * zeta * t), 'r')
          + T(-r * th1, 'theta1') + T(-r * th2, 'theta2') + T(-2 * t * th2, 'theta1')
          + T(-2 * zeta * th1, 'theta2') + mult(-2 * x * r))
W_OP = (T(-2 * zeta ** 2, 'zeta') + T(-2 * zeta * r, 'r') + T(-2 * zeta * th2, 'theta2')
        + T(-r ** 2 / 2, 't') + T(-r * th2, 'theta1') + mult(-2 * x * zeta))
ZBAR1 = T(-half * zeta, 'theta2') + T(-r / 4, 'theta1')
ZBAR2 = (T(-half * zeta * th2, 'zeta') + T(-half * zeta * th1, 'r') + T(-r / 4 * th2, 'r')
         + T(-r / 4 * th1, 't') + T(-th1 * th2 / 4, 'theta1') + mult(-x / 2 * th2))


def _s2_generators() -> Dict[str, GeneratorDef]:
    gens = [_gen(make_label('X', n), s2_X(n)) for n in (-1, 0, 1)]
    gens += [_gen(make_label('Y', m), s2_Y(m)) for m in (-half, half)]
    gens.append(_gen('M_0', M0_ZETA))
    gens += [_gen(make_label('G1', m), s2_G1(m), 1) for m in (-half, half)]
    gens += [_gen(make_label('G2', m), s2_G2(m), 1) for m in (-half, half)]
    gens += [_gen('Ybar1_0', YBAR1, 1), _gen('Ybar2_0', YBAR2, 1), _gen('N_0', N0), _gen('D', DILATION),
             _gen('V_-', V_MINUS), _gen('V_+', V_PLUS), _gen('W', W_OP),
             _gen('Zbar1_0', ZBAR1, 1), _gen('Zbar2_0', ZBAR2, 1)]
    return {g.label: g for g in gens}


SE32_LABELS = ['X_-1', 'X_0', 'Y_-1/2', 'Y_1/2', 'M_0', 'G1_-1/2', 'G2_-1/2', 'Ybar1_0', 'Ybar2_0', 'D', 'V_-']
SGAL_LABELS = [l for l in SE32_LABELS if l not in ('D', 'V_-')]
S2TILDE_LABELS = ['X_-1', 'X_0', 'X_1', 'Y_-1/2', 'Y_1/2', 'M_0', 'G1_-1/2', 'G1_1/2', 'G2_-1/2', 'G2_1/2',
                  'Ybar1_0', 'Ybar2_0', 'N_0']
OSP22_LABELS = ['X_-1', 'X_0', 'X_1', 'G1_-1/2', 'G1_1/2', 'G2_-1/2', 'G2_1/2', 'N_0']


def build_s2(window: Dict[str, Tuple]) -> Realization:
    return Realization('s2', 'osp(2|4) realization on (zeta, t, r | theta1, theta2)',
                       list(_s2_generators().values()), golden='s2')


def build_se32(window: Dict[str, Tuple]) -> Realization:
    gens = _s2_generators()
    return Realization('se32', 'se(3|2) kinematic superalgebra', [gens[l] for l in SE32_LABELS], golden='se32')


def build_sgal(window: Dict[str, Tuple]) -> Realization:
    gens = _s2_generators()
    return Realization('sgal', 'super-Galilei subalgebra of se(3|2)', [gens[l] for l in SGAL_LABELS],
                       golden='se32')


def _mass_generators(labels: List[str]) -> List[GeneratorDef]:
    gens = _s2_generators()
    return [GeneratorDef(l, gens[l].family, gens[l].index, mass_form(gens[l].operator), gens[l].parity)
            for l in labels]


def build_s2tilde(window: Dict[str, Tuple]) -> Realization:
    return Realization('s2tilde', 'N=2 super-Schrödinger algebra, mass representation',
                       _mass_generators(S2TILDE_LABELS), coordinates=('t', 'r'), golden='s2tilde')


def build_osp22(window: Dict[str, Tuple]) -> Realization:
    return Realization('osp22', 'osp(2|2) subalgebra of the super-Schrödinger algebra',
                       _mass_generators(OSP22_LABELS), coordinates=('t', 'r'), golden='s2tilde')


def build_s1tilde(window: Dict[str, Tuple]) -> Realization:
    gens = {g.label: g for g in _mass_generators(S2TILDE_LABELS)}
    keep = [gens[l] for l in ('X_-1', 'X_0', 'X_1', 'Y_-1/2', 'Y_1/2', 'M_0')]
    for m in ('-1/2', '1/2'):
        op = gens[f'G1_{m}'].operator + gens[f'G2_{m}'].operator
        keep.append(_gen(f'G_{m}', op, 1))
    keep.append(_gen('Ybar_0', gens['Ybar1_0'].operator + gens['Ybar2_0'].operator, 1))
    return Realization('s1tilde', 'N=1 super-Schrödinger subalgebra', keep, coordinates=('t', 'r'),
                       golden='s1tilde')


# ---- differential realization of the N=2 Schrödinger-Neveu-Schwarz quotient

SNS2_SHIFTS = {
    'X': 1, 'Y': half, 'G1': half, 'G2': half, 'M': 0, 'N': 0, 'Ybar1': 0, 'Ybar2': 0,
    'P': -half, 'Mbar1': -half, 'Mbar2': -half, 'Q': -1,
}


def _phi(a: sympy.Rational, order: int = 0) -> sympy.Expr:
    return sympy.diff(t ** a, t, order) if order else t ** a


def sns2_operator(family: str, a: sympy.Rational) -> SuperOperator:
    """Differential image of a polynomial mode with test function t**a."""
    a = sympy.Rational(a)
    phi, dphi, ddphi = _phi(a), _phi(a, 1), _phi(a, 2)
    if family == 'X':
        op = (T(phi, 't') + T(dphi / 2 * r, 'r') + T(dphi / 2 * th1, 'theta1') + mult(x / 2 * dphi)
              + mult(M / 4 * ddphi * r ** 2) + T(ddphi / 4 * r * th1, 'theta2'))
    elif family == 'Y':
        op = T(phi, 'r') + mult(M * dphi * r) + T(dphi / 2 * th1, 'theta2')
    elif family == 'M':
        op = mult(M * phi)
    elif family == 'N':
        op = (T(phi * th1, 'theta1') + T(phi * th2, 'theta2') + mult(-phi * x)
              + mult(-M / 4 * dphi * r ** 2) + T(dphi / 4 * r * th1, 'theta2'))
    elif family == 'P':
        op = T(phi * th1, 'theta2') + mult(-2 * M * r * phi)
    elif family == 'Q':
        op = mult(M * sympy.integrate(phi, t))
    elif family == 'G2':
        op = (T(phi * th1, 't') + T(phi * th2, 'r') + T(dphi / 2 * th1 * r, 'r') + mult(dphi * x * th1)
              + mult(dphi * M * r * th2) + T(-dphi / 2 * th1 * th2, 'theta2') + mult(M / 2 * ddphi * r ** 2 * th1))
    elif family == 'G1':
        op = T(phi, 'theta1') + T(dphi / 2 * r, 'theta2')
    elif family == 'Ybar1':
        op = T(phi, 'theta2')
    elif family == 'Ybar2':
        op = T(phi * th1, 'r') + mult(2 * M * phi * th2) + mult(2 * M * dphi * r * th1)
    elif family == 'Mbar1':
        op = SuperOperator.zero()
    elif family == 'Mbar2':
        op = mult(M * phi * th1)
    else:
        raise UnknownLabel(f"'{family}' is not an sns2 family")
    return -op


SNS2_PARITY = {'G1': 1, 'G2': 1, 'Ybar1': 1, 'Ybar2': 1, 'Mbar1': 1, 'Mbar2': 1}


def build_sns2diff(window: Dict[str, Tuple]) -> Realization:
    low, high = window.get('exponent', DEFAULT_WINDOW['exponent'])
    families = []
    for name, shift in SNS2_SHIFTS.items():
        shift = sympy.Rational(shift)
        build = (lambda fam, s: lambda index: sns2_operator(fam, sympy.Rational(index) + s))(name, shift)
        # Q duplicates M and Mbar1 acts as zero; both stay addressable but outside the table basis
        families.append(Family(name, build, SNS2_PARITY.get(name, 0), half=shift.q == 2, shift=shift,
                               in_table=name not in ('Q', 'Mbar1')))
    generators = []
    for fam in families:
        if not fam.in_table:
            continue
        for a in range(int(low), int(high) + 1):
            generators.append(_family_generator(fam, a - fam.shift))
    return Realization('sns2diff', 'differential realization of sns(2) modulo the ideal R', generators,
                       {f.name: f for f in families}, coordinates=('t', 'r'))


BUILDERS: Dict[str, Callable[[Dict[str, Tuple]], Realization]] = {
    'sch1': build_sch1,
    'sch1zeta': build_sch1zeta,
    'sv': build_sv,
    'svext': build_svext,
    'conf3spinor': build_conf3spinor,
    'se32': build_se32,
    'sgal': build_sgal,
    's2tilde': build_s2tilde,
    's1tilde': build_s1tilde,
    'osp22': build_osp22,
    's2': build_s2,
    'osp24': build_s2,
    'sns2diff': build_sns2diff,
}

EXPECTED_DIMENSIONS = {'se32': 11, 'sgal': 9, 's2tilde': 13, 's1tilde': 9, 's2': 19, 'sch1': 6,
                       'sch1zeta': 7, 'conf3spinor': 10, 'osp22': 8}

_cache: Dict[Tuple[str, Tuple], Realization] = {}


def parse_window(text: Optional[str]) -> Dict[str, Tuple]:
    """``"a..b"`` sets the integer window and the matching half-integer window."""
    window = dict(DEFAULT_WINDOW)
    if not text:
        return window
    low, sep, high = text.partition('..')
    if not sep:
        raise ValueError(f"Window must look like a..b, got {text!r}")
    low, high = sympy.Rational(low), sympy.Rational(high)
    window['integer'] = (low, high)
    window['half'] = (low + half, high - half)
    window['exponent'] = (max(low, 0), high)
    return window


def load_realization(name: str, window: Optional[Dict[str, Tuple]] = None) -> Realization:
    """
    Instantiate a registered realization.

    :param name: registry name (sch1, sv, svext, conf3spinor, se32, sgal, s2tilde, s1tilde, osp22, s2, sns2diff)
    :param window: mode windows for infinite families
    :return: Realization with symbolic parameters
    """
    builder = BUILDERS.get(name)
    if builder is None:
        raise UnknownRealization(f"Unknown realization '{name}'. Known: {sorted(BUILDERS)}")
    window = window or DEFAULT_WINDOW
    key = (name, tuple(sorted((k, tuple(v)) for k, v in window.items())))
    if key not in _cache:
        realization = builder(window)
        logger.debug(f"Loaded realization {name} with {len(realization)} generators")
        _cache[key] = realization
    return _cache[key]


def realization_names() -> List[str]:
    return sorted(BUILDERS)
