"""
Golden reproductions of the worked examples of the special equation.

remark22   the r-condition is necessary: A = diag(1, 2), B all-ones,
           m = n = k = 2, t = r = 1/2 gives an indefinite solution.
remark23   an indefinite right-hand side that still has a positive
           definite solution because it has the special form.
example21  diagonal A with all-ones B, closed form against the pipeline.

Radicals are computed at run time. Eigenvalues quoted to four decimals are
compared with an absolute tolerance of 5e-5.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from construction import (
    ConstructionParams,
    build_rhs,
    build_rhs_raw,
    check_r_condition,
    closed_form_diagonal,
    solve_construction,
)
from equation import EquationInstance, solve_spectral
from errors import InvalidParameters
from matcore import PsdVerdict, SymMatrix, check_psd, matrix_power, spectral_decompose

logger = logging.getLogger(__name__)

EIGENVALUE_TOL = 5e-5
EXACT_TOL = 1e-12
PIPELINE_TOL = 1e-10


@dataclass(frozen=True)
class Assertion:
    name: str
    expected: object
    actual: object
    tolerance: Optional[float]
    ok: bool

    def to_dict(self) -> dict:
        return {
            'name': self.name,
            'expected': _plain(self.expected),
            'actual': _plain(self.actual),
            'tolerance': self.tolerance,
            'ok': self.ok,
        }


@dataclass
class CaseResult:
    case_id: str
    assertions: List[Assertion] = field(default_factory=list)
    outputs: Dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(a.ok for a in self.assertions)

    @property
    def failed(self) -> List[Assertion]:
        return [a for a in self.assertions if not a.ok]

    def expect_close(self, name: str, expected: Sequence[float], actual: Sequence[float], tol: float):
        expected = [float(v) for v in np.atleast_1d(expected)]
        actual = [float(v) for v in np.atleast_1d(actual)]
        ok = len(expected) == len(actual) and all(abs(e - a) <= tol for e, a in zip(expected, actual))
        self.assertions.append(Assertion(name, expected, actual, tol, ok))

    def expect_relative(self, name: str, expected, actual, tol: float):
        """Entrywise |actual - expected| <= tol * max(1, |expected|)"""
        expected = np.asarray(expected, dtype=float)
        actual = np.asarray(actual, dtype=float)
        error = float(np.max(np.abs(actual - expected) / np.maximum(np.abs(expected), 1.0)))
        self.assertions.append(Assertion(name, expected, actual, tol, error <= tol))

    def expect(self, name: str, expected, actual):
        self.assertions.append(Assertion(name, expected, actual, None, expected == actual))

    def to_dict(self) -> dict:
        return {
            'case_id': self.case_id,
            'ok': self.ok,
            'assertions': [a.to_dict() for a in self.assertions],
        }


def _plain(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def descending_eigenvalues(m: SymMatrix) -> np.ndarray:
    return spectral_decompose(m).eigenvalues[::-1].copy()


def remark22() -> CaseResult:
    result = CaseResult("remark22")
    p = ConstructionParams(2, 2, 2, 0.5, 0.5)
    a = SymMatrix.diag([1.0, 2.0])
    b = SymMatrix.ones(2)
    root2 = math.sqrt(2.0)
    off = 3.0 + 6.0 * root2
    expected_rhs = np.array([[4.0, off], [off, 16.0 * root2]])

    g, rhs = build_rhs_raw(a, b, p)
    result.expect_relative("rhs entries", expected_rhs, rhs.entries, EXACT_TOL)
    result.expect_relative("rhs trace", 4.0 + 16.0 * root2, np.trace(rhs.entries), EXACT_TOL)
    result.expect_relative("rhs det", 64.0 * root2 - off ** 2, np.linalg.det(rhs.entries), EXACT_TOL)

    solution = solve_spectral(EquationInstance(g, p.n, rhs))
    eigenvalues = descending_eigenvalues(solution.x)
    result.expect_close("X eigenvalues", [5.4007, -0.0372], eigenvalues, EIGENVALUE_TOL)
    result.expect("X verdict", PsdVerdict.INDEFINITE, check_psd(solution.x).verdict)

    quarter = 2.0 ** 0.75
    expected_x = np.array([[2.0, off / (1.0 + 2.0 * quarter)], [off / (1.0 + 2.0 * quarter), 2.0 * quarter]])
    result.expect_relative("X entries", expected_x, solution.x.entries, PIPELINE_TOL)
    closed = closed_form_diagonal([1.0, 2.0], p)
    result.expect_relative("closed form vs raw solve", closed.entries, solution.x.entries, PIPELINE_TOL)
    pipeline = solve_construction(g, b, p)
    result.expect_relative("pipeline vs raw solve", solution.x.entries, pipeline.solution.x.entries, PIPELINE_TOL)

    condition = check_r_condition(p)
    result.expect("r-condition valid", False, condition.valid)
    result.expect_close("required r", [2.0], [condition.required_r], EXACT_TOL)

    result.outputs.update({'G': g, 'rhs': rhs, 'X': solution.x, 'X_eigenvalues': eigenvalues,
                           'condition': condition, 'parameters': p.to_dict()})
    return result


def remark23() -> CaseResult:
    result = CaseResult("remark23")
    p = ConstructionParams(2, 3, 2, 0.5, 1.0)
    cube = 2.0 ** (1.0 / 3.0)
    a = SymMatrix.diag([1.0, 2.0 * cube])
    b = SymMatrix.ones(2)
    off = 3.0 * 2.0 ** 0.25 + 6.0 * 2.0 ** 0.75
    expected_y = np.array([[4.0, off], [off, 32.0]])

    y = build_rhs(a, b, p)
    result.expect_relative("Y from build_rhs", expected_y, y.entries, PIPELINE_TOL)
    result.expect_close("Y eigenvalues", [37.5589, -1.5589], descending_eigenvalues(y), EIGENVALUE_TOL)
    result.expect("Y verdict", PsdVerdict.INDEFINITE, check_psd(y).verdict)

    solution = solve_spectral(EquationInstance(a, p.n, y))
    eigenvalues = descending_eigenvalues(solution.x)
    result.expect_close("X eigenvalues", [2.9013, 0.1119], eigenvalues, EIGENVALUE_TOL)
    result.expect("X verdict", PsdVerdict.POSITIVE_DEFINITE, check_psd(solution.x).verdict)

    denom = 1.0 + 2.0 * cube + 4.0 * cube ** 2
    expected_x = np.array([[4.0 / 3.0, off / denom], [off / denom, 4.0 * cube / 3.0]])
    result.expect_relative("X entries", expected_x, solution.x.entries, PIPELINE_TOL)

    condition = check_r_condition(p)
    result.expect("r-condition valid", True, condition.valid)
    result.expect_close("required r", [0.75], [condition.required_r], EXACT_TOL)

    result.outputs.update({'A': a, 'Y': y, 'X': solution.x, 'X_eigenvalues': eigenvalues,
                           'condition': condition, 'parameters': p.to_dict()})
    return result


def example21(eigs: Sequence[float] = (1.0, 2.0), p: Optional[ConstructionParams] = None) -> CaseResult:
    """
    A = diag(eigs), B all-ones, base A^{((m-t)k+r)/n}.
    The closed form must match the solve of the built right-hand side.
    """
    if p is None:
        p = ConstructionParams(1, 1, 1, 0.0, 0.0)
    eigs = [float(v) for v in eigs]
    if not eigs:
        raise InvalidParameters("example21 needs at least one eigenvalue")
    result = CaseResult("example21")
    closed = closed_form_diagonal(eigs, p)
    a = SymMatrix.diag(eigs)
    g = matrix_power(a, p.require_base() / p.n)
    b = SymMatrix.ones(len(eigs))
    outcome = solve_construction(g, b, p)
    result.expect_relative("closed form vs pipeline", closed.entries, outcome.solution.x.entries, PIPELINE_TOL)

    if all(v == 1.0 for v in eigs):
        constant = p.k * p.m / p.n
        result.expect_relative("constant solution", np.full((len(eigs), len(eigs)), constant),
                               closed.entries, EXACT_TOL)
    if outcome.condition.valid:
        result.expect("X positive semidefinite", True, outcome.psd.is_psd)

    result.outputs.update({'eigs': eigs, 'X': closed, 'X_pipeline': outcome.solution.x,
                           'X_eigenvalues': descending_eigenvalues(closed), 'psd': outcome.psd,
                           'condition': outcome.condition, 'parameters': p.to_dict()})
    return result


CASES: Dict[str, Callable[..., CaseResult]] = {
    'remark22': remark22,
    'remark23': remark23,
    'example21': example21,
}


def run_case(case_id: str, **kwargs) -> CaseResult:
    if case_id not in CASES:
        raise InvalidParameters(f"unknown case {case_id!r}, expected one of {sorted(CASES)} or 'all'")
    result = CASES[case_id](**kwargs)
    if result.ok:
        logger.info(f"Reproduced {case_id}: {len(result.assertions)} assertions passed")
    else:
        for failure in result.failed:
            logger.error(f"{case_id}: {failure.name} expected {_plain(failure.expected)}, "
                         f"got {_plain(failure.actual)}")
    return result
