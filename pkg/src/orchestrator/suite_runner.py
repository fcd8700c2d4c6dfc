import logging
import os
import time
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

from algebra.grading import audit_gradings
from algebra.realizations import load_realization, parse_window
from algebra.tables import closure_report, dimension_audit, window_stability_report
from poisson.axioms import axiom_suite
from poisson.contact import primary_field_check, tilde_transport_check, transport_check
from poisson.morphisms import (degree_one_closure_check, morphism_check, osp24_map, quadratic_image_check,
                               sabotaged_map, super_schroedinger_map)
from poisson.sns import (ideal_property_check, ideal_r_check, ns_subalgebra_check, sns2_realization_check,
                         sns_mode_table)
from symbolic.errors import SymbolicError
from symcheck.ledger import (check_sns_ops_vanish, ledger_coverage, transport_suite, verify_dirac_ledger,
                             verify_quadratic_ledger, verify_schrodinger_ledger)
from twopoint.appendix import CASES, appendixA_pde_residuals
from twopoint.covariance import (check_form, derived_spinor_check, negative_controls, spinor_covariance_suite,
                                 twopoint_suite)
from utils.config import get_setting, load_config
from utils.reporting import Report

# Configure logging
logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


class UnknownSuite(KeyError):
    """Raised for a suite id that is not registered."""


@dataclass
class SuiteSettings:
    seed: int = 42
    tol: float = 1e-9
    window: Optional[str] = None
    transport_cases: int = 30
    axiom_cases: int = 50
    ideal_cases: int = 100

    @staticmethod
    def from_config(config: Dict) -> 'SuiteSettings':
        return SuiteSettings(
            seed=int(get_setting(config, 'verification.seed', 42)),
            tol=float(get_setting(config, 'verification.tolerance', 1e-9)),
            transport_cases=int(get_setting(config, 'property_tests.transport_cases', 30)),
            axiom_cases=int(get_setting(config, 'property_tests.axiom_cases', 50)),
            ideal_cases=int(get_setting(config, 'property_tests.ideal_cases', 100)),
        )


SuiteFn = Callable[[SuiteSettings], Report]


def _combine(name: str, anchor: str, parts: List[Tuple[str, Report]], summary: str = '') -> Report:
    report = Report(name, anchor)
    for prefix, part in parts:
        report.extend(part, prefix=prefix)
    report.summary = summary
    return report


def _closure(name: str, settings: SuiteSettings) -> Report:
    window = parse_window(settings.window) if settings.window else None
    return closure_report(name, window)


def _closure_summary(name: str, report: Report) -> str:
    return f"{len(load_realization(name))} generators, closure {'pass' if report.passed else 'fail'}"


def _forms(*names: str) -> List[Tuple[str, Report]]:
    return [(name, check_form(name)) for name in names]


# ---- proposition suites ---------------------------------------------------------

def suite_eq12(settings: SuiteSettings) -> Report:
    parts = [(name, _closure(name, settings)) for name in ('sch1', 'sch1zeta', 'sv')]
    parts.append(('ledger', verify_schrodinger_ledger()))
    return _combine('eq1.2', 'Schrödinger and Schrödinger-Virasoro brackets', parts)


def suite_eq15(settings: SuiteSettings) -> Report:
    closure = _closure('svext', settings)
    return _combine('eq1.5', 'extended Schrödinger-Virasoro brackets', [('svext', closure)],
                    f"closure {'pass' if closure.passed else 'fail'}")


def suite_prop21(settings: SuiteSettings) -> Report:
    closure = _closure('conf3spinor', settings)
    parts = [('conf3spinor', closure), ('ledger', verify_dirac_ledger())]
    parts += _forms('prop21_case_i', 'prop21_case_ii', 'prop21_case_ii_exchanged')
    return _combine('prop2.1', 'covariant spinor two-point functions', parts,
                    _closure_summary('conf3spinor', closure))


def suite_prop22(settings: SuiteSettings) -> Report:
    return _combine('prop2.2', 'conformally covariant spinor two-point functions',
                    [('spinor', spinor_covariance_suite())])


def suite_prop23(settings: SuiteSettings) -> Report:
    parts = _forms('scalar_f', 'scalar_N', 'scalar_nu0')
    parts.append(('derived', derived_spinor_check()))
    return _combine('prop2.3', 'spinor two-point functions from a scalar parent', parts)


def suite_prop31(settings: SuiteSettings) -> Report:
    se32, sgal = _closure('se32', settings), _closure('sgal', settings)
    return _combine('prop3.1', 'se(3|2) and sgal', [('se32', se32), ('sgal', sgal)],
                    f"{_closure_summary('se32', se32)}; {_closure_summary('sgal', sgal)}")


def suite_prop32(settings: SuiteSettings) -> Report:
    closure = _closure('s2tilde', settings)
    return _combine('prop3.2', 'N=2 super-Schrödinger algebra',
                    [('s2tilde', closure), ('ledger', verify_quadratic_ledger())],
                    _closure_summary('s2tilde', closure))


def suite_prop33(settings: SuiteSettings) -> Report:
    closure = _closure('s2', settings)
    return _combine('prop3.3', '19-dimensional extension', [('s2', closure)], _closure_summary('s2', closure))


def suite_prop34(settings: SuiteSettings) -> Report:
    report = _combine('prop3.4', 's2tilde as quadratic Poisson polynomials',
                      [('morphism', morphism_check(super_schroedinger_map(), 's2tilde',
                                                   's2tilde as quadratic Poisson polynomials'))])
    sabotaged = morphism_check(sabotaged_map(), 's2tilde')
    report.add('sabotaged map rejected', not sabotaged.passed,
               None if not sabotaged.passed else 'sabotaged X_0 image passed')
    report.summary = f"{len(super_schroedinger_map())} generators"
    return report


def suite_prop36(settings: SuiteSettings) -> Report:
    report = _combine('prop3.6', 'osp(2|4) as quadratic Poisson polynomials',
                      [('morphism', morphism_check(osp24_map(), 's2', 'osp(2|4) as quadratic Poisson polynomials'))])
    report.summary = f"{len(osp24_map())} generators"
    return report


def suite_prop37(settings: SuiteSettings) -> Report:
    return _combine('prop3.7', 'quadratic images and degree-one closure',
                    [('image', quadratic_image_check()), ('deg1', degree_one_closure_check())])


def suite_prop41(settings: SuiteSettings) -> Report:
    parts = [(f"N={n}", tilde_transport_check(n, settings.transport_cases, settings.seed)) for n in (1, 2)]
    return _combine('prop4.1', 'tilde map from the contact algebra', parts)


def suite_prop42(settings: SuiteSettings) -> Report:
    parts = [(f"N={n}", transport_check(n, settings.transport_cases, settings.seed)) for n in (1, 2)]
    parts += [(f"primary N={n}", primary_field_check(n)) for n in (1, 2)]
    return _combine('prop4.2', 'alpha-lifts of superfunctions', parts)


def suite_prop43(settings: SuiteSettings) -> Report:
    window = parse_window(settings.window) if settings.window else None
    parts = [
        ('ideal-R', ideal_r_check(window)),
        ('sns-eom', check_sns_ops_vanish()),
        ('sns2diff', sns2_realization_check(window)),
        ('ideal', ideal_property_check(2, settings.ideal_cases, settings.seed)),
    ]
    return _combine('prop4.3', 'ideal R of sns(2) and its differential realization', parts)


def suite_prop51(settings: SuiteSettings) -> Report:
    parts = _forms('osp24', 'osp24_reduced', 'st2_const', 'st2')
    parts += [('A2', appendixA_pde_residuals('A2')), ('A5', appendixA_pde_residuals('A5'))]
    return _combine('prop5.1', 'osp(2|4) and N=2 superfield two-point functions', parts)


def suite_prop52(settings: SuiteSettings) -> Report:
    closure = _closure('s1tilde', settings)
    parts = [('s1tilde', closure)] + _forms('s1_C1', 's1_C2')
    parts.append(('A1', appendixA_pde_residuals('A1')))
    return _combine('prop5.2', 'N=1 superfield two-point functions', parts, _closure_summary('s1tilde', closure))


def suite_prop53(settings: SuiteSettings) -> Report:
    closure = _closure('osp22', settings)
    parts = [('osp22', closure)] + _forms('prop53_case_i', 'prop53_case_ii', 'prop53_case_iii')
    parts.append(('prop53_case_ii:numeric', check_form('prop53_case_ii', 'numeric', settings.seed, settings.tol)))
    parts.append(('A3', appendixA_pde_residuals('A3')))
    return _combine('prop5.3', 'osp(2|2) two-point functions', parts, _closure_summary('osp22', closure))


def suite_prop54(settings: SuiteSettings) -> Report:
    parts = _forms('se32', 'se32_d0')
    parts.append(('A4', appendixA_pde_residuals('A4')))
    return _combine('prop5.4', 'se(3|2) two-point function', parts)


# ---- cross-cutting suites --------------------------------------------------------

def suite_ledger(settings: SuiteSettings) -> Report:
    parts = [('schrodinger', verify_schrodinger_ledger()), ('dirac', verify_dirac_ledger()),
             ('quadratic', verify_quadratic_ledger()), ('coverage', ledger_coverage()),
             ('transport', transport_suite())]
    return _combine('ledger', 'symmetry identities of the equations of motion', parts)


def suite_sns(settings: SuiteSettings) -> Report:
    window = parse_window(settings.window) if settings.window else None
    parts = [(f"sns{n}", sns_mode_table(n, window).to_report()) for n in (0, 1, 2)]
    parts.append(('ns', ns_subalgebra_check(window)))
    parts.append(('ideal', ideal_property_check(2, settings.ideal_cases, settings.seed)))
    return _combine('sns', 'Schrödinger-Neveu-Schwarz mode tables', parts)


def suite_gradings(settings: SuiteSettings) -> Report:
    return _combine('gradings', 'gradings and dimensions',
                    [('fields', audit_gradings()), ('dimensions', dimension_audit())])


def suite_windows(settings: SuiteSettings) -> Report:
    return _combine('windows', 'structure constants do not depend on the mode window',
                    [('modes', window_stability_report())])


def suite_axioms(settings: SuiteSettings) -> Report:
    return axiom_suite(settings.axiom_cases, settings.seed)


def suite_twopoint(settings: SuiteSettings) -> Report:
    return twopoint_suite(settings.seed, settings.tol)


def suite_controls(settings: SuiteSettings) -> Report:
    return negative_controls()


def _appendix(case: str) -> SuiteFn:
    return lambda settings: appendixA_pde_residuals(case)


SUITES: Dict[str, Tuple[str, SuiteFn]] = {
    'eq1.2': ('sch1 and sv structure constants', suite_eq12),
    'eq1.5': ('svext structure constants', suite_eq15),
    'prop2.1': ('spinor two-point functions', suite_prop21),
    'prop2.2': ('conformal spinor two-point functions', suite_prop22),
    'prop2.3': ('scalar parent of the spinor two-point functions', suite_prop23),
    'prop3.1': ('se(3|2) and sgal closure', suite_prop31),
    'prop3.2': ('s2tilde closure and quadratic identities', suite_prop32),
    'prop3.3': ('s2 closure', suite_prop33),
    'prop3.4': ('Poisson realization of s2tilde', suite_prop34),
    'prop3.6': ('Poisson realization of osp(2|4)', suite_prop36),
    'prop3.7': ('quadratic images', suite_prop37),
    'prop4.1': ('tilde transport', suite_prop41),
    'prop4.2': ('alpha-lift transport', suite_prop42),
    'prop4.3': ('ideal R of sns(2)', suite_prop43),
    'prop5.1': ('osp(2|4) two-point function', suite_prop51),
    'prop5.2': ('N=1 two-point functions', suite_prop52),
    'prop5.3': ('osp(2|2) two-point functions', suite_prop53),
    'prop5.4': ('se(3|2) two-point function', suite_prop54),
    'ledger': ('symmetry ledger', suite_ledger),
    'sns': ('sns(N) mode tables', suite_sns),
    'gradings': ('grading audit', suite_gradings),
    'windows': ('mode-window stability of sv and svext', suite_windows),
    'axioms': ('Poisson axioms', suite_axioms),
    'twopoint': ('two-point covariance', suite_twopoint),
    'controls': ('negative controls', suite_controls),
}
SUITES.update({f"appendixA.{case}": (f"PDE residuals {case}", _appendix(case)) for case in CASES})

AGGREGATE = 'all'


def normalize_suite_id(suite_id: str) -> str:
    """``prop:3.2`` and ``prop3.2`` name the same suite."""
    suite_id = suite_id.strip()
    if suite_id.startswith('prop:'):
        return 'prop' + suite_id[len('prop:'):]
    return suite_id


def suite_names() -> List[str]:
    return sorted(SUITES) + [AGGREGATE]


class SuiteRunner:
    """Runs registered verification suites sequentially and records their outcome."""

    def __init__(self, settings: Optional[SuiteSettings] = None, config_path: Optional[str] = None):
        self.settings = settings or SuiteSettings.from_config(load_config(config_path))
        self.history: List[Dict] = []
        logger.info("SuiteRunner initialized")

    def run(self, suite_id: str) -> Report:
        """
        Run one suite.

        :param suite_id: registered id, ``prop:<n>`` alias or ``all``
        :return: Report; exceptions inside the suite become a failed entry
        :raises UnknownSuite: the id is not registered
        """
        name = normalize_suite_id(suite_id)
        if name == AGGREGATE:
            return self.run_all()
        if name not in SUITES:
            raise UnknownSuite(f"Unknown suite '{suite_id}'. Known: {', '.join(suite_names())}")
        _, fn = SUITES[name]
        started = time.time()
        try:
            report = fn(self.settings)
        except (SymbolicError, ValueError, KeyError) as e:
            report = Report(name, 'suite aborted')
            report.record_error('suite', e)
        except Exception as e:
            logger.error(f"Unexpected error in suite {name}: {e}")
            report = Report(name, 'suite aborted')
            report.record_error('suite', e)
        elapsed = time.time() - started
        self.history.append({'suite': name, 'pass': report.passed, 'seconds': round(elapsed, 3)})
        if report.passed:
            logger.info(f"Suite {name} passed ({len(report.entries)} checks, {elapsed:.2f}s)")
        else:
            first = report.first_failure()
            logger.warning(f"Suite {name} failed at {first.identity_id} ({first.anchor})")
        return report

    def run_all(self) -> Report:
        report = Report(AGGREGATE, 'union of every registered suite')
        for name in sorted(SUITES):
            report.extend(self.run(name), prefix=name)
        failed = sorted({e.identity_id.split(':', 1)[0] for e in report.failures()})
        report.summary = f"{len(SUITES)} suites" + (f", failing: {', '.join(failed)}" if failed else '')
        return report

    def describe(self) -> List[Dict[str, str]]:
        return [{'suite': name, 'description': SUITES[name][0]} for name in sorted(SUITES)]
