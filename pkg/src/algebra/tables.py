"""
Structure constants of realizations and their comparison with the golden tables.

A bracket is decomposed over the generator basis by solving a linear system: the
operator is flattened into (matrix entry, derivative word, coefficient term) slots and
every slot numerator must vanish identically in the coordinates.
"""
import functools
import itertools
import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import sympy
import yaml

from algebra.realizations import GeneratorDef, Operator, Realization, load_realization, parse_window
from symbolic.errors import NotInSpan, SymbolicError, UnknownLabel
from symbolic.registry import sym
from symbolic.superop import MatrixOperator, SuperOperator, supercommutator
from utils.labels import make_label
from utils.reporting import Report

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), 'golden')
COEFF_LOCALS = {name: sym(name) for name in ('M', 'Mp', 'x', 'nu')}
COEFF_LOCALS.update({name: sympy.Symbol(name) for name in ('i', 'j', 'a', 'b')})

Combination = Dict[str, sympy.Expr]

MATCH, MISMATCH, NOT_IN_SPAN, CLOSED = 'match', 'mismatch', 'not-in-span', 'closed'


# ---- linear algebra over operators ------------------------------------------

def vectorize(op: Operator) -> Dict[Tuple, sympy.Expr]:
    """Flatten an operator into independent coefficient slots."""
    if isinstance(op, MatrixOperator):
        parts = [((i, j), op[i, j]) for i in range(2) for j in range(2)]
    else:
        parts = [((), op)]
    vec: Dict[Tuple, sympy.Expr] = {}
    for pos, entry in parts:
        for word, coeff in entry.terms.items():
            for key, c in coeff.terms.items():
                vec[(pos, word, key)] = c
    return vec


def decompose(target: Operator, candidates: Sequence[Tuple[str, Operator]],
              coordinates: Iterable[str] = ('t', 'r', 'zeta')) -> Optional[Combination]:
    """
    Write ``target`` as a linear combination of candidate operators.

    :param target: operator to decompose
    :param candidates: (label, operator) basis candidates
    :param coordinates: symbols the identity must hold in (parameters stay as field elements)
    :return: label -> coefficient, or None when target is outside the span
    """
    if target.is_zero():
        return {}
    if not candidates:
        return None
    unknowns = sympy.symbols(f'c0:{len(candidates)}')
    vectors = [vectorize(op) for _, op in candidates]
    goal = vectorize(target)
    keys = set(goal)
    for v in vectors:
        keys.update(v)
    coord_syms = [sym(n) for n in coordinates]
    equations = []
    for key in keys:
        expr = sum((u * v[key] for u, v in zip(unknowns, vectors) if key in v), sympy.Integer(0))
        expr -= goal.get(key, 0)
        num = sympy.expand(sympy.numer(sympy.together(expr)))
        if num == 0:
            continue
        present = [s for s in coord_syms if num.has(s)]
        if present:
            equations.extend(sympy.Poly(num, *present).coeffs())
        else:
            equations.append(num)
    solutions = sympy.linsolve(equations, list(unknowns))
    if not solutions:
        return None
    solution = next(iter(solutions))
    # free unknowns belong to dependent candidates; pin them to zero
    zero_free = {u: 0 for u in unknowns}
    result = {}
    for (label, _), value in zip(candidates, solution):
        value = sympy.cancel(sympy.sympify(value).subs(zero_free))
        if value != 0:
            result[label] = value
    return result


def combination_operator(realization: Realization, combo: Combination) -> Operator:
    # __rmul__ multiplies from the left on both operator kinds
    pieces = [realization.operator(label).__rmul__(coeff) for label, coeff in combo.items()]
    if realization.matrix:
        total = MatrixOperator.scalar(SuperOperator.zero())
        for p in pieces:
            total = total + p
        return total
    return SuperOperator.sum(pieces) if pieces else SuperOperator.zero()


def _index(g: GeneratorDef) -> sympy.Rational:
    return g.index if g.index is not None else sympy.Integer(0)


def candidate_basis(realization: Realization, a: GeneratorDef, b: GeneratorDef) -> List[Tuple[str, Operator]]:
    """Generators a bracket of ``a`` and ``b`` may land on."""
    parity = (a.parity + b.parity) % 2
    found: Dict[str, Operator] = {}
    if realization.families:
        # infinite families are graded by the mode index
        target = _index(a) + _index(b)
        for g in realization.generators:
            if g.parity == parity and (g.index is None or g.index == target):
                found[g.label] = g.operator
        for fam in realization.families.values():
            ext = realization.extended(fam.name, target)
            if ext is not None and ext.parity == parity:
                found.setdefault(ext.label, ext.operator)
    else:
        for g in realization.generators:
            if g.parity == parity:
                found[g.label] = g.operator
    return sorted(found.items())


def bracket(realization: Realization, a_label: str, b_label: str) -> Tuple[Operator, Optional[Combination]]:
    """Supercommutator of two generators and its decomposition over the basis."""
    realization = realization.substitute(realization.closure_bindings)
    a, b = realization.generator(a_label), realization.generator(b_label)
    op = supercommutator(a.operator, b.operator)
    combo = decompose(op, candidate_basis(realization, a, b), realization.coordinates)
    return op, combo


def express(realization: Realization, a_label: str, b_label: str) -> Combination:
    """Decomposition of [a, b]; raises NotInSpan when the bracket leaves the basis."""
    op, combo = bracket(realization, a_label, b_label)
    if combo is None:
        raise NotInSpan(f"[{a_label}, {b_label}] = {op.to_text()} is outside the span of {realization.name}")
    return combo


# ---- golden tables ----------------------------------------------------------

@dataclass
class GoldenTable:
    name: str
    anchor: str = ''
    complete: bool = False
    central: Optional[str] = None
    shifts: Dict[str, sympy.Rational] = field(default_factory=dict)
    rules: Dict[Tuple[str, str], Tuple[List[Dict[str, Any]], str]] = field(default_factory=dict)
    relations: Dict[Tuple[str, str], Tuple[Dict[str, str], str]] = field(default_factory=dict)

    def merge(self, other: 'GoldenTable'):
        for key, value in other.rules.items():
            self.rules.setdefault(key, value)
        for key, value in other.relations.items():
            self.relations.setdefault(key, value)
        for key, value in other.shifts.items():
            self.shifts.setdefault(key, value)

    def _from_relation(self, a: str, b: str) -> Optional[Tuple[Combination, str]]:
        entry = self.relations.get((a, b))
        if entry is None:
            return None
        result, anchor = entry
        return {label: sympy.sympify(c, locals=COEFF_LOCALS) for label, c in result.items()}, anchor

    def _from_rule(self, a: GeneratorDef, b: GeneratorDef) -> Optional[Tuple[Combination, str]]:
        entry = self.rules.get((a.family, b.family))
        if entry is None:
            return None
        results, anchor = entry
        i, j = _index(a), _index(b)
        env = {COEFF_LOCALS['i']: i, COEFF_LOCALS['j']: j,
               COEFF_LOCALS['a']: i + self.shifts.get(a.family, 0),
               COEFF_LOCALS['b']: j + self.shifts.get(b.family, 0)}
        combo: Combination = {}
        for item in results:
            coeff = sympy.sympify(str(item.get('coeff', 1)), locals=COEFF_LOCALS).subs(env)
            coeff = sympy.expand(coeff)
            if coeff == 0:
                continue
            family = item['family']
            if 'exponent' in item:
                exponent = sympy.sympify(str(item['exponent']), locals=COEFF_LOCALS).subs(env)
                index = exponent - self.shifts.get(family, 0)
            elif item.get('index') is None and 'index' in item:
                index = None
            else:
                index = sympy.sympify(str(item.get('index', 'i + j')), locals=COEFF_LOCALS).subs(env)
            label = make_label(family, index)
            combo[label] = combo.get(label, 0) + coeff
        return {k: v for k, v in combo.items() if v != 0}, anchor

    def expected(self, a: GeneratorDef, b: GeneratorDef) -> Optional[Tuple[Combination, str]]:
        """Golden value of [a, b]; reversed entries pick up the graded antisymmetry sign."""
        sign = -(-1) ** (a.parity * b.parity)
        for lookup in (lambda: self._from_relation(a.label, b.label),
                       lambda: self._reverse(self._from_relation(b.label, a.label), sign),
                       lambda: self._from_rule(a, b),
                       lambda: self._reverse(self._from_rule(b, a), sign)):
            found = lookup()
            if found is not None:
                return found
        if self.complete:
            return {}, self.anchor
        return None

    @staticmethod
    def _reverse(found: Optional[Tuple[Combination, str]], sign: int) -> Optional[Tuple[Combination, str]]:
        if found is None:
            return None
        combo, anchor = found
        return {k: sign * v for k, v in combo.items()}, anchor


_golden_cache: Dict[str, GoldenTable] = {}


def load_golden(name: str) -> GoldenTable:
    """
    Load a golden table shipped under ``algebra/golden``, following ``include`` entries.

    :param name: file stem
    :return: merged GoldenTable
    """
    if name in _golden_cache:
        return _golden_cache[name]
    path = os.path.join(GOLDEN_DIR, f'{name}.yaml')
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            data = yaml.safe_load(handle) or {}
    except FileNotFoundError:
        raise UnknownLabel(f"No golden table named '{name}'")
    except yaml.YAMLError as e:
        logger.error(f"Malformed golden table {path}: {e}")
        raise
    table = GoldenTable(name=data.get('name', name), anchor=data.get('anchor', ''),
                        complete=bool(data.get('complete', False)), central=data.get('central'),
                        shifts={k: sympy.Rational(str(v)) for k, v in (data.get('shifts') or {}).items()})
    for rule in data.get('rules') or []:
        left, right = rule['pair']
        table.rules[(str(left), str(right))] = (list(rule.get('result') or []), rule.get('anchor', table.anchor))
    for relation in data.get('relations') or []:
        left, right = relation['pair']
        result = {str(k): str(v) for k, v in (relation.get('result') or {}).items()}
        table.relations[(str(left), str(right))] = (result, relation.get('anchor', table.anchor))
    for parent in data.get('include') or []:
        table.merge(load_golden(parent))
    _golden_cache[name] = table
    logger.debug(f"Loaded golden table {name}: {len(table.rules)} rules, {len(table.relations)} relations")
    return table


# ---- tables -----------------------------------------------------------------

def _coeff_text(value: sympy.Expr) -> str:
    return sympy.sstr(sympy.factor(value) if not value.is_number else value)


@dataclass
class TableEntry:
    pair: Tuple[str, str]
    result: Optional[Combination]
    status: str = CLOSED
    residual: Optional[str] = None
    anchor: str = ''
    expected: Optional[Combination] = None

    @property
    def failed(self) -> bool:
        return self.status in (MISMATCH, NOT_IN_SPAN)

    def to_row(self) -> Dict[str, Any]:
        result = None
        if self.result is not None:
            result = [{'label': label, 'coeff': _coeff_text(c)} for label, c in sorted(self.result.items())]
        return {'pair': list(self.pair), 'result': result, 'residual': self.residual,
                'anchor': self.anchor, 'status': self.status}


@dataclass
class BracketTable:
    realization: str
    parities: Dict[str, int]
    entries: Dict[Tuple[str, str], TableEntry] = field(default_factory=dict)

    @property
    def deviations(self) -> List[TableEntry]:
        return [e for e in self.entries.values() if e.failed]

    def closes(self) -> bool:
        return not self.deviations

    def lookup(self, a: str, b: str) -> Optional[Combination]:
        if (a, b) in self.entries:
            return self.entries[(a, b)].result
        entry = self.entries.get((b, a))
        if entry is None or entry.result is None:
            return None
        sign = -(-1) ** (self.parities.get(a, 0) * self.parities.get(b, 0))
        return {k: sign * v for k, v in entry.result.items()}

    def rows(self) -> List[Dict[str, Any]]:
        return [self.entries[k].to_row() for k in sorted(self.entries)]

    def to_frame(self) -> pd.DataFrame:
        records = []
        for row in self.rows():
            result = row['result']
            text = ' + '.join(f"({r['coeff']})*{r['label']}" for r in result) if result else ('0' if result == [] else '')
            records.append({'left': row['pair'][0], 'right': row['pair'][1], 'result': text,
                            'status': row['status'], 'residual': row['residual'] or '', 'anchor': row['anchor']})
        return pd.DataFrame(records, columns=['left', 'right', 'result', 'status', 'residual', 'anchor'])

    def render(self, fmt: str = 'text') -> str:
        if fmt == 'json':
            return json.dumps({'realization': self.realization, 'entries': self.rows()}, indent=2, sort_keys=True)
        if fmt == 'csv':
            return self.to_frame().to_csv(index=False)
        lines = [f"{self.realization}: {len(self.parities)} generators, "
                 f"closure {'pass' if self.closes() else 'FAIL'}"]
        for row in self.to_frame().itertuples(index=False):
            if row.result and row.result != '0':
                lines.append(f"  [{row.left}, {row.right}] = {row.result}  ({row.status})")
            elif row.status in (MISMATCH, NOT_IN_SPAN):
                lines.append(f"  [{row.left}, {row.right}] {row.status}: {row.residual}")
        return "\n".join(lines)

    def to_report(self) -> Report:
        report = Report(f"closure:{self.realization}", summary=f"{len(self.parities)} generators")
        for key in sorted(self.entries):
            entry = self.entries[key]
            report.add(f"[{key[0]}, {key[1]}]", not entry.failed, entry.residual, entry.anchor,
                       status=entry.status)
        return report


def _pairs(realization: Realization) -> List[Tuple[GeneratorDef, GeneratorDef]]:
    gens = realization.generators
    return [(gens[i], gens[j]) for i in range(len(gens)) for j in range(i, len(gens))]


def structure_constants(realization: Realization) -> BracketTable:
    """
    Every pairwise supercommutator of the realization expressed over its generators.

    :param realization: loaded realization (closure bindings are applied here)
    :return: BracketTable; non-decomposable brackets are recorded as not-in-span
    """
    return check_closure(realization, golden=None)


def check_closure(realization: Realization, golden: Optional[GoldenTable] = None) -> BracketTable:
    """
    Compute the bracket table and compare it with a golden table.

    Pairs with a golden value are tested by direct operator comparison; everything else
    only has to close. Mismatches are data: the residual operator is printed into the entry.
    """
    bound = realization.substitute(realization.closure_bindings)
    table = BracketTable(realization.name, {g.label: g.parity for g in bound.generators})
    for a, b in _pairs(bound):
        key = (a.label, b.label)
        try:
            op = supercommutator(a.operator, b.operator)
        except SymbolicError as e:
            logger.error(f"Bracket [{a.label}, {b.label}] failed in {realization.name}: {e}")
            table.entries[key] = TableEntry(key, None, NOT_IN_SPAN, str(e))
            continue
        found = golden.expected(a, b) if golden is not None else None
        if found is not None:
            expected, anchor = found
            try:
                residual = op - combination_operator(bound, expected)
            except UnknownLabel as e:
                table.entries[key] = TableEntry(key, None, MISMATCH, f"expected generator missing: {e}",
                                                anchor, expected)
                continue
            if residual.is_zero():
                table.entries[key] = TableEntry(key, expected, MATCH, None, anchor, expected)
                continue
            combo = decompose(op, candidate_basis(bound, a, b), bound.coordinates)
            status = MISMATCH if combo is not None else NOT_IN_SPAN
            table.entries[key] = TableEntry(key, combo, status, residual.to_text(), anchor, expected)
            continue
        combo = decompose(op, candidate_basis(bound, a, b), bound.coordinates)
        if combo is None:
            table.entries[key] = TableEntry(key, None, NOT_IN_SPAN, op.to_text(), realization.anchor)
        else:
            table.entries[key] = TableEntry(key, combo, CLOSED, None, realization.anchor)
    failures = len(table.deviations)
    if failures:
        logger.warning(f"{realization.name}: {failures} bracket deviations")
    else:
        logger.info(f"{realization.name}: {len(table.entries)} brackets close")
    return table


def _window_key(window: Optional[Dict[str, Tuple]]) -> Tuple:
    return tuple(sorted((k, tuple(v)) for k, v in (window or parse_window(None)).items()))


# Tables are immutable once built; reports are rebuilt from them on every call
@functools.lru_cache(maxsize=None)
def _closure_table(name: str, window_key: Tuple) -> BracketTable:
    realization = load_realization(name, dict(window_key))
    golden = load_golden(realization.golden) if realization.golden else None
    return check_closure(realization, golden)


def closure_report(name: str, window: Optional[Dict[str, Tuple]] = None) -> Report:
    return _closure_table(name, _window_key(window)).to_report()


# ---- table-level audits -----------------------------------------------------

def _scale(combo: Combination, k: sympy.Expr) -> Combination:
    return {label: k * c for label, c in combo.items()}


def _accumulate(target: Combination, combo: Combination):
    for label, c in combo.items():
        target[label] = target.get(label, 0) + c


def table_jacobi(table: BracketTable) -> List[Tuple[str, str, str]]:
    """Graded Jacobi identity evaluated on structure constants; returns failing triples."""
    labels = sorted(table.parities)
    parity = table.parities

    def nested(a: str, b: str, c: str) -> Optional[Combination]:
        inner = table.lookup(b, c)
        if inner is None:
            return None
        out: Combination = {}
        for label, coeff in inner.items():
            outer = table.lookup(a, label)
            if outer is None:
                return None
            _accumulate(out, _scale(outer, coeff))
        return out

    failures = []
    for a, b, c in itertools.combinations_with_replacement(labels, 3):
        pa, pb, pc = parity[a], parity[b], parity[c]
        terms = [(nested(a, b, c), (-1) ** (pa * pc)), (nested(b, c, a), (-1) ** (pb * pa)),
                 (nested(c, a, b), (-1) ** (pc * pb))]
        if any(t is None for t, _ in terms):
            continue
        total: Combination = {}
        for combo, sign in terms:
            _accumulate(total, _scale(combo, sign))
        if any(sympy.simplify(v) != 0 for v in total.values()):
            failures.append((a, b, c))
    if failures:
        logger.warning(f"{table.realization}: Jacobi fails on {len(failures)} triples")
    return failures


def _table_values(table: BracketTable) -> Dict[Tuple[str, str], Optional[Dict[str, sympy.Expr]]]:
    return {k: (None if e.result is None else {l: sympy.simplify(c) for l, c in e.result.items()})
            for k, e in table.entries.items()}


def param_dependence(name: str, params: Sequence[str] = ('x',), seed: int = 42,
                     window: Optional[Dict[str, Tuple]] = None) -> List[Tuple[str, str]]:
    """
    Pairs whose structure constants change when the parameters take two random values.

    :param params: parameter or mass symbols to bind
    :return: sorted list of differing pairs (empty when the table is parameter independent)
    """
    realization = load_realization(name, window)
    rng = np.random.default_rng(seed)
    tables = []
    for _ in range(2):
        bindings = {p: sympy.Rational(int(rng.integers(2, 40)), int(rng.integers(3, 17))) for p in params}
        tables.append(_table_values(structure_constants(realization.substitute(bindings))))
    first, second = tables
    return sorted(k for k in first if first[k] != second.get(k))


@functools.lru_cache(maxsize=None)
def _window_values(name: str, window: str) -> Dict[Tuple[str, str], Optional[Dict[str, sympy.Expr]]]:
    return _table_values(structure_constants(load_realization(name, parse_window(window))))


def window_stability(name: str, small: str = '-2..2', large: str = '-3..3') -> List[Tuple[str, str]]:
    """Pairs whose entry changes when the mode window grows."""
    before = _window_values(name, small)
    after = _window_values(name, large)
    return sorted(k for k in before if k in after and before[k] != after[k])


def window_stability_report(names: Sequence[str] = ('sv', 'svext'), small: str = '-2..2',
                            large: str = '-3..3') -> Report:
    report = Report('window-stability', f"entries inside {small} are unchanged by the window {large}")
    for name in names:
        changed = window_stability(name, small, large)
        report.add(name, not changed, None if not changed else ', '.join(f"[{a}, {b}]" for a, b in changed))
    return report


def dimension_audit() -> Report:
    from algebra.realizations import EXPECTED_DIMENSIONS
    report = Report('dimension-audit', 'generator counts of the finite realizations')
    for name, expected in sorted(EXPECTED_DIMENSIONS.items()):
        found = len(load_realization(name))
        report.add(name, found == expected, None if found == expected else f"{found} != {expected}")
    return report
