"""
Command line front end.

    python3 cli.py solve A.json B.json --n 3 [--oracle]
    python3 cli.py build-rhs A.json B.json --m 2 --n 2 --k 2 --t 1/2 --r 1/2 [--raw] [--solve]
    python3 cli.py reproduce remark22|remark23|example21|all
    python3 cli.py verify lh --trials 100 --seed 7
    python3 cli.py fuzz lh-alpha2 --trials 1000 --seed 1

Exit codes: 0 ok, 1 reproduction or suite failure, 2 input error,
3 mathematical precondition failure.
"""

import argparse
import logging
import math
import sys
from fractions import Fraction
from typing import List, Optional, Tuple

import config
from construction import (
    ConstructionParams,
    build_rhs,
    build_rhs_raw,
    check_r_condition,
    check_theorem_a_condition,
    theorem_a_rhs,
)
from equation import EquationInstance, SolveMethod, solve_kronecker, solve_spectral
from errors import (
    EXIT_FAILURE,
    EXIT_INPUT,
    EXIT_OK,
    BNotPsd,
    InvalidParameters,
    InvalidSearchSpec,
    OperatorEquationError,
)
from inequalities import (
    ORACLE_TOL,
    InequalityId,
    SearchSpec,
    counterexample_search,
    replay_witness,
    run_suite,
)
from matcore import SymMatrix, check_psd, relative_error, spectral_decompose
from matrix_io import load_matrix
from report import RunReport
from reproduce import CASES, run_case

logger = logging.getLogger(__name__)

VERIFY_IDS = [i.value for i in InequalityId if i is not InequalityId.THEOREM21_R]
FUZZ_IDS = {
    'lh': InequalityId.LOEWNER_HEINZ,
    'lh-alpha2': InequalityId.LOEWNER_HEINZ,
    'furuta': InequalityId.FURUTA,
    'grand-furuta': InequalityId.GRAND_FURUTA,
    'theorem21-r': InequalityId.THEOREM21_R,
}


# Argument types

def fraction(text: str) -> float:
    """'0.5', '1/2' or '2'"""
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or fraction: {text!r}")


def dim_range(text: str) -> Tuple[int, int]:
    """'2..6' or a single '3'"""
    try:
        if '..' in text:
            low, high = (int(part) for part in text.split('..', 1))
        else:
            low = high = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"dimension range must look like 2..6, got {text!r}")
    if low < 1 or high < low:
        raise argparse.ArgumentTypeError(f"bad dimension range {text!r}")
    return low, high


def eigenvalue_list(text: str) -> List[float]:
    try:
        values = [fraction(part) for part in text.split(',') if part.strip()]
    except argparse.ArgumentTypeError:
        raise argparse.ArgumentTypeError(f"eigenvalues must be comma separated numbers, got {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("at least one eigenvalue is required")
    return values


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


# Shared pieces

def _describe_solution(report: RunReport, x: SymMatrix, residual: float, tol_scale: Optional[float]) -> None:
    psd = check_psd(x, tol_scale)
    report.add('X', x)
    report.add('X_eigenvalues', spectral_decompose(x).eigenvalues)
    report.add('residual_fro', residual)
    report.add('psd', psd)


def _params_from(args) -> ConstructionParams:
    return ConstructionParams(args.m, args.n, args.k, args.t, args.r)


# Subcommands

def cmd_solve(args, report: RunReport) -> int:
    report.add_input('A', args.a)
    report.add_input('B', args.b)
    a, b = load_matrix(args.a), load_matrix(args.b)
    inst = EquationInstance(a, args.n, b, args.tol_scale)
    solution = solve_spectral(inst)
    report.add('method', solution.method)
    _describe_solution(report, solution.x, solution.residual_fro, args.tol_scale)
    if args.oracle:
        oracle = solve_kronecker(inst)
        error = relative_error(solution.x, oracle.x)
        report.add('oracle_method', SolveMethod.KRONECKER_ORACLE)
        report.add('oracle_relative_error', error)
        report.add('oracle_agrees', error <= ORACLE_TOL)
        if error > ORACLE_TOL:
            logger.error(f"Spectral and stacked solutions differ by {error:.3e} (limit {ORACLE_TOL:.0e})")
            report.ok = False
            return EXIT_FAILURE
    logger.info(f"Solved with n = {args.n}, residual {solution.residual_fro:.3e}")
    return EXIT_OK


def cmd_build_rhs(args, report: RunReport) -> int:
    report.add_input('A', args.a)
    report.add_input('B', args.b)
    a, b = load_matrix(args.a), load_matrix(args.b)
    p = _params_from(args)
    report.add('parameters', p.to_dict())
    if not args.allow_indefinite_b:
        b_report = check_psd(b, args.tol_scale)
        if not b_report.is_psd:
            raise BNotPsd(f"B must be positive semidefinite (min eigenvalue {b_report.min_eigenvalue:.6e}); "
                          f"pass --allow-indefinite-b to build anyway")

    condition = check_r_condition(p)
    report.add('r_condition', condition)
    if not condition.valid:
        message = (f"r = {p.r} does not satisfy the r-condition (required r >= {condition.required_r}); "
                   f"the solution is not guaranteed to be positive semidefinite")
        logger.warning(f"WARNING: {message}")
        report.add('warning', message)

    if args.raw:
        base, rhs = build_rhs_raw(a, b, p)
        report.add('G', base)
    else:
        base, rhs = a, build_rhs(a, b, p)
        if p.t == 0.0 and p.k == 1:
            reduced = theorem_a_rhs(a, b, p.m, p.n, p.r)
            report.add('theorem_a_relative_error', relative_error(rhs, reduced))
            report.add('theorem_a_condition', check_theorem_a_condition(p.m, p.n, p.r))
    report.add('rhs', rhs)

    if args.solve:
        solution = solve_spectral(EquationInstance(base, p.n, rhs, args.tol_scale))
        _describe_solution(report, solution.x, solution.residual_fro, args.tol_scale)
    return EXIT_OK


def cmd_reproduce(args, report: RunReport) -> int:
    case_ids = list(CASES) if args.case == 'all' else [args.case]
    all_ok = True
    for case_id in case_ids:
        if case_id == 'example21':
            p = ConstructionParams(args.m, args.n, args.k, args.t, args.r)
            result = run_case(case_id, eigs=args.eigs, p=p)
        else:
            result = run_case(case_id)
        all_ok = all_ok and result.ok
        report.add(case_id, {**result.to_dict(), 'outputs': result.outputs})
    report.ok = all_ok
    return EXIT_OK if all_ok else EXIT_FAILURE


def cmd_verify(args, report: RunReport) -> int:
    report.seed = args.seed
    options = {'tol_scale': args.tol_scale}
    if args.alpha is not None:
        if not 0.0 <= args.alpha <= 1.0:
            raise InvalidParameters(f"alpha = {args.alpha:g} is outside [0, 1]; "
                                    "use fuzz to search outside the validity region")
        options['alpha'] = args.alpha
    if args.m is not None:
        options['m'] = args.m
    result = run_suite(InequalityId(args.inequality), args.trials, args.seed, args.dims,
                       workers=args.workers, **options)
    report.add('suite', result)
    report.ok = result.ok
    return EXIT_OK if result.ok else EXIT_FAILURE


def cmd_fuzz(args, report: RunReport) -> int:
    report.seed = args.seed
    if args.region != 'outside':
        raise InvalidSearchSpec("fuzz only searches outside the validity region; use verify for in-region runs")
    inequality_id = FUZZ_IDS[args.inequality]
    fixed = {}
    if inequality_id is InequalityId.LOEWNER_HEINZ:
        fixed['alpha'] = 2.0 if args.inequality == 'lh-alpha2' or args.alpha is None else args.alpha
    spec = SearchSpec(dims=args.dims, region=args.region, fixed=fixed, probe=args.probe)
    witness = counterexample_search(inequality_id, spec, args.trials, args.seed,
                                    workers=args.workers, tol_scale=args.tol_scale)
    report.add('inequality', inequality_id)
    report.add('trials', 1 if args.probe else args.trials)
    if witness is None:
        report.add('witness', None)
        logger.info(f"No witness for {args.inequality} in {args.trials} trials")
        return EXIT_OK
    replay = replay_witness(witness, args.tol_scale)
    report.add('witness', witness)
    report.add('replay', replay)
    report.add('replay_matches', math.isclose(replay.min_eigenvalue, witness.min_eigenvalue,
                                             rel_tol=1e-9, abs_tol=1e-15))
    return EXIT_OK


# Parser

COMMON_DEFAULTS = {
    'tol_scale': None,
    'seed': 0,
    'json': False,
    'quiet': False,
    'out': None,
    'workers': None,
}


def add_common_options(parser: argparse.ArgumentParser) -> None:
    """
    Options accepted before or after the subcommand. Defaults stay
    suppressed on both parsers; apply_common_defaults fills in the rest.
    """
    parser.add_argument('--tol-scale', type=float, default=argparse.SUPPRESS,
                        help=f"tolerance scale (default {config.DEFAULT_TOL_SCALE:g}, env OPEQ_TOL_SCALE)")
    parser.add_argument('--seed', type=int, default=argparse.SUPPRESS,
                        help="base seed for randomized commands (default 0)")
    parser.add_argument('--json', action='store_true', default=argparse.SUPPRESS,
                        help="print one JSON document instead of line records")
    parser.add_argument('--quiet', action='store_true', default=argparse.SUPPRESS,
                        help="only log warnings and errors")
    parser.add_argument('--out', default=argparse.SUPPRESS, help="also write the JSON report to this path")
    parser.add_argument('--workers', type=positive_int, default=argparse.SUPPRESS,
                        help=f"threads for verify and fuzz (default {config.DEFAULT_WORKERS})")


def apply_common_defaults(args: argparse.Namespace) -> argparse.Namespace:
    for name, value in COMMON_DEFAULTS.items():
        if not hasattr(args, name):
            setattr(args, name, value)
    return args


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    add_common_options(common)

    parser = argparse.ArgumentParser(
        prog='opeq', description="Positive semidefinite solutions of sum A^{n-j} X A^{j-1} = B")
    parser.add_argument('--version', action='version', version=f"%(prog)s {config.__version__}")
    add_common_options(parser)
    sub = parser.add_subparsers(dest='command', required=True)

    solve = sub.add_parser('solve', parents=[common], help="solve the equation for matrix files A and B")
    solve.add_argument('a')
    solve.add_argument('b')
    solve.add_argument('--n', type=positive_int, required=True, help="number of summands")
    solve.add_argument('--oracle', action='store_true', help="cross-check with the stacked Kronecker solver")
    solve.set_defaults(handler=cmd_solve)

    rhs = sub.add_parser('build-rhs', parents=[common], help="build the special right-hand side")
    rhs.add_argument('a')
    rhs.add_argument('b')
    for name in ('m', 'n', 'k'):
        rhs.add_argument(f'--{name}', type=positive_int, required=True)
    rhs.add_argument('--t', type=fraction, default=0.0)
    rhs.add_argument('--r', type=fraction, default=0.0)
    rhs.add_argument('--raw', action='store_true', help="emit the pair (G, rhs) before substituting A")
    rhs.add_argument('--solve', action='store_true', help="solve and certify X")
    rhs.add_argument('--allow-indefinite-b', action='store_true')
    rhs.set_defaults(handler=cmd_build_rhs)

    reproduce = sub.add_parser('reproduce', parents=[common], help="run a golden worked example")
    reproduce.add_argument('case', choices=sorted(CASES) + ['all'])
    reproduce.add_argument('--eigs', type=eigenvalue_list, default=[1.0, 2.0], help="example21 eigenvalues, e.g. 1,2")
    for name in ('m', 'n', 'k'):
        reproduce.add_argument(f'--{name}', type=positive_int, default=1)
    reproduce.add_argument('--t', type=fraction, default=0.0)
    reproduce.add_argument('--r', type=fraction, default=0.0)
    reproduce.set_defaults(handler=cmd_reproduce)

    verify = sub.add_parser('verify', parents=[common], help="randomized in-region suite")
    verify.add_argument('inequality', choices=VERIFY_IDS)
    verify.add_argument('--trials', type=positive_int, default=100)
    verify.add_argument('--dims', type=dim_range, default=(2, 6))
    verify.add_argument('--alpha', type=fraction, default=None, help="lh: fixed exponent in [0, 1]")
    verify.add_argument('--m', type=positive_int, default=None, help="lemma: fixed power")
    verify.set_defaults(handler=cmd_verify)

    fuzz = sub.add_parser('fuzz', parents=[common], help="search for a witness outside the validity region")
    fuzz.add_argument('inequality', choices=list(FUZZ_IDS))
    fuzz.add_argument('--trials', type=positive_int, default=1000)
    fuzz.add_argument('--dims', type=dim_range, default=(2, 2))
    fuzz.add_argument('--alpha', type=fraction, default=None, help="lh: exponent outside [0, 1] (default 2)")
    fuzz.add_argument('--probe', choices=['remark22'], default=None)
    fuzz.add_argument('--region', choices=['outside', 'inside'], default='outside')
    fuzz.set_defaults(handler=cmd_fuzz)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        apply_common_defaults(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_INPUT
    config.setup_logging(args.quiet)

    report = RunReport(args.command, argv=list(sys.argv[1:] if argv is None else argv))
    try:
        exit_code = args.handler(args, report)
    except OperatorEquationError as e:
        logger.error(f"{type(e).__name__}: {str(e)}")
        report.ok = False
        report.add('error', {'type': type(e).__name__, 'message': str(e)})
        exit_code = e.exit_code
    report.add('tol_scale', config.DEFAULT_TOL_SCALE if args.tol_scale is None else args.tol_scale)
    report.finish()

    print(report.render(args.json))
    if args.out:
        try:
            report.write(args.out)
        except OSError as e:
            logger.error(f"Could not write report to {args.out}: {e.strerror}")
            return EXIT_INPUT
    return exit_code


if __name__ == '__main__':
    sys.exit(main())
