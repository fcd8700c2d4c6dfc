"""
Command-line front end.

    python cli.py verify prop:3.2
    python cli.py verify twopoint --form prop53_case_ii --numeric
    python cli.py table sv --window=-2..2 --format csv
    python cli.py bracket sns2 Y_1/2 Y_-1/2
    python cli.py grade "q*p*theta1" --signature P22
    python cli.py roots --format json
    python cli.py list

Exit status: 0 pass, 1 verification failure, 2 usage error.
"""
import argparse
import json
import logging
import os
import sys
from typing import List, Optional, Sequence

from orchestrator.queries import algebra_names, bracket_query, grade_query, roots_query, roots_table, table_query
from orchestrator.suite_runner import SuiteRunner, SuiteSettings, UnknownSuite, normalize_suite_id, suite_names
from symbolic.errors import SymbolicError, UnknownForm
from twopoint.covariance import covariance_check
from twopoint.forms import form_names, load_form
from utils.config import get_setting, load_config
from utils.reporting import Report

logging.basicConfig(
    level=getattr(logging, os.getenv('LOG_LEVEL', 'INFO')),
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FORMATS = ('text', 'json', 'csv')


class UsageError(Exception):
    pass


def build_parser(config: dict) -> argparse.ArgumentParser:
    seed = int(get_setting(config, 'verification.seed', 42))
    tol = float(get_setting(config, 'verification.tolerance', 1e-9))
    default_format = get_setting(config, 'output.default_format', 'text')

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--format', choices=FORMATS, default=default_format)

    parser = argparse.ArgumentParser(prog='susyschr', description='Exact verification of super-Schrödinger algebras')
    verbs = parser.add_subparsers(dest='verb', required=True)

    verify = verbs.add_parser('verify', parents=[common], help='run a verification suite')
    verify.add_argument('target', help="suite id, e.g. prop:3.2, eq1.5, appendixA.A3, twopoint or all")
    verify.add_argument('--seed', type=int, default=seed)
    verify.add_argument('--tol', type=float, default=tol)
    verify.add_argument('--window', help='mode window a..b (write --window=-2..2)')
    verify.add_argument('--form', help='single two-point form (verify twopoint only)')
    verify.add_argument('--algebra', help='realization for --form; defaults to the form\'s own')
    verify.add_argument('--numeric', action='store_true', help='numeric covariance with Bessel evaluators')

    table = verbs.add_parser('table', parents=[common], help='structure constants of an algebra')
    table.add_argument('algebra')
    table.add_argument('--window', help='mode window a..b (write --window=-2..2)')

    bracket = verbs.add_parser('bracket', parents=[common], help='bracket of two generators')
    bracket.add_argument('algebra')
    bracket.add_argument('first')
    bracket.add_argument('second')

    grade = verbs.add_parser('grade', parents=[common], help='delta, gra, deg and tildedeg of an element')
    grade.add_argument('element')
    grade.add_argument('--signature', default='P22', help='P22, P42, P~20, P~21 or P~22')

    verbs.add_parser('roots', parents=[common], help='root data of osp(2|4)')
    verbs.add_parser('list', parents=[common], help='list suites, algebras and two-point forms')
    return parser


def _emit_report(report: Report, fmt: str) -> int:
    print(report.render(fmt))
    if report.passed:
        return EXIT_PASS
    first = report.first_failure()
    print(f"first failure: {first.identity_id} ({first.anchor})", file=sys.stderr)
    return EXIT_FAIL


def _verify(args: argparse.Namespace) -> int:
    if args.form:
        if normalize_suite_id(args.target) != 'twopoint':
            raise UsageError('--form is only valid with "verify twopoint"')
        try:
            form = load_form(args.form)
        except UnknownForm as e:
            raise UsageError(str(e))
        mode = 'numeric' if args.numeric else 'exact'
        report = covariance_check(args.algebra or form.algebra, form, mode, args.seed, args.tol)
        return _emit_report(report, args.format)
    settings = SuiteSettings(seed=args.seed, tol=args.tol, window=args.window)
    try:
        report = SuiteRunner(settings).run(args.target)
    except UnknownSuite as e:
        raise UsageError(str(e).strip("'\""))
    return _emit_report(report, args.format)


def _table(args: argparse.Namespace) -> int:
    try:
        table = table_query(args.algebra, args.window)
    except ValueError as e:
        raise UsageError(str(e))
    print(table.render(args.format))
    return EXIT_PASS if table.closes() else EXIT_FAIL


def _bracket(args: argparse.Namespace) -> int:
    result = bracket_query(args.algebra, args.first, args.second)
    if args.format == 'json':
        print(json.dumps(result, indent=2, sort_keys=True))
    elif args.format == 'csv':
        print('algebra,left,right,result')
        print(f"{args.algebra},{args.first},{args.second},\"{result['result']}\"")
    else:
        print(result['result'])
    return EXIT_PASS


def _grade(args: argparse.Namespace) -> int:
    result = grade_query(args.element, args.signature)
    if args.format == 'json':
        print(json.dumps(result, indent=2, sort_keys=True))
    elif args.format == 'csv':
        print('grading,value')
        for name, value in result['grades'].items():
            print(f"{name},{value if value is not None else 'inhomogeneous'}")
    else:
        print(result['element'])
        for name, value in result['grades'].items():
            print(f"  {name}: {value if value is not None else 'inhomogeneous'}")
    return EXIT_PASS


def _roots(args: argparse.Namespace) -> int:
    if args.format == 'json':
        print(json.dumps({'algebra': 'osp(2|4)', 'roots': roots_query()}, indent=2, sort_keys=True))
    elif args.format == 'csv':
        print(roots_table().to_csv(index=False), end='')
    else:
        print(roots_table().to_string(index=False))
    return EXIT_PASS


def _list(args: argparse.Namespace) -> int:
    listing = {'suites': suite_names(), 'algebras': algebra_names(), 'forms': sorted(form_names())}
    if args.format == 'json':
        print(json.dumps(listing, indent=2, sort_keys=True))
    else:
        for key, values in listing.items():
            print(f"{key}: {', '.join(values)}")
    return EXIT_PASS


HANDLERS = {
    'verify': _verify,
    'table': _table,
    'bracket': _bracket,
    'grade': _grade,
    'roots': _roots,
    'list': _list,
}


def run(argv: Optional[Sequence[str]] = None) -> int:
    """
    Parse ``argv`` and dispatch to a verb.

    :return: exit status (0 pass, 1 failure, 2 usage error)
    """
    config = load_config()
    parser = build_parser(config)
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as e:
        return EXIT_PASS if e.code == 0 else EXIT_USAGE
    try:
        return HANDLERS[args.verb](args)
    except UsageError as e:
        parser.print_usage(sys.stderr)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SymbolicError as e:
        # unknown labels, realizations, forms and signatures are usage errors
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_USAGE


def main(argv: Optional[List[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
