"""
Numerical checks of the operator inequalities behind the construction:
Loewner-Heinz, Furuta (both sides), Grand Furuta, the derivative identity
d/dx (A + xB)^m at 0, and the intermediate inequalities used to derive the
special right-hand side. Also hosts the randomized in-region suites and the
counterexample search outside the validity regions.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

import config
from construction import (
    ConstructionParams,
    RBranch,
    check_r_condition,
    curve_factor,
    solve_construction,
    y_curve,
)
from equation import (
    EquationInstance,
    apply_lhs,
    solve_kronecker,
    solve_spectral,
)
from errors import (
    DegenerateExponent,
    DimMismatch,
    InvalidParameters,
    InvalidSearchSpec,
    OperatorEquationError,
    RConditionInvalid,
)
from matrix_io import matrix_to_document
from matcore import (
    PsdReport,
    SymMatrix,
    check_psd,
    difference_report,
    gen_loewner_pair,
    gram_factor,
    gram_power,
    matrix_power,
    random_pd,
    random_psd,
    random_symmetric,
    relative_error,
    require_same_dim,
)

logger = logging.getLogger(__name__)

ACCEPT_TOL = 1e-8
WITNESS_TOL = 1e-6
FD_STEP = 1e-5
LEMMA_TOL = 1e-6
ORACLE_TOL = 1e-9


class InequalityId(str, Enum):
    LOEWNER_HEINZ = "lh"
    FURUTA = "furuta"
    GRAND_FURUTA = "grand-furuta"
    LEMMA = "lemma"
    PROOF_STEP = "proofstep"
    REVERSED_GRAND_FURUTA = "reversed-gf"
    THEOREM21 = "theorem21"
    THEOREM21_R = "theorem21-r"
    ORACLE = "oracle"
    TRANSFER = "transfer"


class FurutaSide(str, Enum):
    B_SIDE = "BSide"
    A_SIDE = "ASide"


@dataclass(frozen=True)
class FurutaParams:
    p: float
    q: float
    r: float

    def __post_init__(self):
        if self.p < 0 or self.q < 1 or self.r < 0:
            raise InvalidParameters(f"Furuta needs p >= 0, q >= 1, r >= 0, got {self.to_dict()}")

    @property
    def valid(self) -> bool:
        return (1 + self.r) * self.q >= self.p + self.r

    def to_dict(self) -> dict:
        return {'p': self.p, 'q': self.q, 'r': self.r}


@dataclass(frozen=True)
class GrandFurutaParams:
    t: float
    p: float
    s: float
    r: float

    def __post_init__(self):
        if not (0 <= self.t <= 1) or self.p < 1 or self.s < 1:
            raise InvalidParameters(f"Grand Furuta needs t in [0,1], p >= 1, s >= 1, got {self.to_dict()}")

    @property
    def valid(self) -> bool:
        return self.r >= self.t

    def to_dict(self) -> dict:
        return {'t': self.t, 'p': self.p, 's': self.s, 'r': self.r}


@dataclass(frozen=True)
class InequalityWitness:
    """A concrete violation found outside an inequality's validity region"""
    inequality_id: InequalityId
    parameters: dict
    a: SymMatrix
    b: SymMatrix
    min_eigenvalue: float
    scale: float
    seed: int
    trial: int

    def to_dict(self) -> dict:
        return {
            'inequality_id': self.inequality_id.value,
            'parameters': self.parameters,
            'A': matrix_to_document(self.a, "A"),
            'B': matrix_to_document(self.b, "B"),
            'min_eigenvalue': self.min_eigenvalue,
            'scale': self.scale,
            'seed': self.seed,
            'trial': self.trial,
        }


# Checks

def check_loewner_heinz(a: SymMatrix, b: SymMatrix, alpha: float,
                        tol_scale: Optional[float] = None) -> PsdReport:
    """A^alpha - B^alpha >= 0, guaranteed for A >= B >= 0 and alpha in [0, 1]"""
    require_same_dim(a, b)
    return difference_report(matrix_power(a, alpha, tol_scale), matrix_power(b, alpha, tol_scale), tol_scale)


def check_furuta(a: SymMatrix, b: SymMatrix, fp: FurutaParams,
                 side: FurutaSide = FurutaSide.B_SIDE,
                 tol_scale: Optional[float] = None) -> PsdReport:
    """
    BSide: (B^{r/2} A^p B^{r/2})^{1/q} - B^{(p+r)/q}
    ASide: A^{(p+r)/q} - (A^{r/2} B^p A^{r/2})^{1/q}
    """
    require_same_dim(a, b)
    plain = (fp.p + fp.r) / fp.q
    if side is FurutaSide.B_SIDE:
        f = matrix_power(b, 0.5 * fp.r, tol_scale).entries @ matrix_power(a, 0.5 * fp.p, tol_scale).entries
        lhs = gram_power(f, 1.0 / fp.q, tol_scale)
        rhs = matrix_power(b, plain, tol_scale)
    else:
        f = matrix_power(a, 0.5 * fp.r, tol_scale).entries @ matrix_power(b, 0.5 * fp.p, tol_scale).entries
        lhs = matrix_power(a, plain, tol_scale)
        rhs = gram_power(f, 1.0 / fp.q, tol_scale)
    return difference_report(lhs, rhs, tol_scale)


def grand_furuta_sides(a: SymMatrix, b: SymMatrix, gp: GrandFurutaParams,
                       tol_scale: Optional[float] = None) -> Tuple[SymMatrix, SymMatrix]:
    """A^{1-t+r} and {A^{r/2} (A^{-t/2} B^p A^{-t/2})^s A^{r/2}}^{(1-t+r)/((p-t)s+r)}"""
    require_same_dim(a, b)
    scale = config.DEFAULT_TOL_SCALE if tol_scale is None else tol_scale
    denom = (gp.p - gp.t) * gp.s + gp.r
    if denom <= scale:
        raise DegenerateExponent(f"(p - t) s + r must be positive, got {denom}")
    g1 = matrix_power(a, -0.5 * gp.t, tol_scale).entries @ matrix_power(b, 0.5 * gp.p, tol_scale).entries
    w = gram_factor(g1, gp.s, tol_scale)
    f = matrix_power(a, 0.5 * gp.r, tol_scale).entries @ w
    exponent = 1.0 - gp.t + gp.r
    return matrix_power(a, exponent, tol_scale), gram_power(f, exponent / denom, tol_scale)


def check_grand_furuta(a: SymMatrix, b: SymMatrix, gp: GrandFurutaParams,
                       tol_scale: Optional[float] = None) -> PsdReport:
    lhs, rhs = grand_furuta_sides(a, b, gp, tol_scale)
    return difference_report(lhs, rhs, tol_scale)


def lemma_derivative(a: SymMatrix, b: SymMatrix, m: int) -> SymMatrix:
    """d/dx (A + xB)^m at x = 0, i.e. sum_{j=1}^{m} A^{m-j} B A^{j-1}"""
    if a.dim != b.dim:
        raise DimMismatch(f"A is {a.dim}x{a.dim} but B is {b.dim}x{b.dim}")
    return apply_lhs(a, m, b)


def finite_difference_derivative(a: SymMatrix, b: SymMatrix, m: int, h: float = FD_STEP) -> SymMatrix:
    """((A + hB)^m - (A - hB)^m) / (2h)"""
    require_same_dim(a, b)
    forward = np.linalg.matrix_power(a.entries + h * b.entries, m)
    backward = np.linalg.matrix_power(a.entries - h * b.entries, m)
    return SymMatrix((forward - backward) / (2.0 * h))


def verify_proof_step(a: SymMatrix, b: SymMatrix, x: float, p: ConstructionParams,
                      tol_scale: Optional[float] = None) -> PsdReport:
    """
    (A^{r/2} (A^{-t/2} (A+xB)^m A^{-t/2})^k A^{r/2})^{1/n} >= A^{((m-t)k+r)/n}
    Only claimed when the r-condition holds.
    """
    condition = check_r_condition(p)
    if not condition.valid:
        raise RConditionInvalid(
            f"r = {p.r} does not satisfy the r-condition (required {condition.required_r})"
        )
    lhs = y_curve(a, b, p, x, tol_scale)
    rhs = matrix_power(a, p.require_base() / p.n, tol_scale)
    return difference_report(lhs, rhs, tol_scale)


def check_reversed_grand_furuta(a: SymMatrix, b: SymMatrix, x: float, p: ConstructionParams,
                                tol_scale: Optional[float] = None) -> PsdReport:
    """
    (A^{r/2} (A^{-t/2} (A+xB)^m A^{-t/2})^k A^{r/2})^{(1-t+r)/((m-t)k+r)} >= A^{1-t+r},
    the Grand Furuta inequality for A^{-1} >= (A+xB)^{-1}, inverted. Needs r >= t.
    """
    if p.r < p.t:
        raise RConditionInvalid(f"r = {p.r} must be at least t = {p.t}")
    exponent = 1.0 - p.t + p.r
    lhs = gram_power(curve_factor(a, b, p, x, tol_scale), exponent / p.require_base(), tol_scale)
    return difference_report(lhs, matrix_power(a, exponent, tol_scale), tol_scale)


def check_psd_transfer(a: SymMatrix, b: SymMatrix, n: int,
                       tol_scale: Optional[float] = None) -> PsdReport:
    """Solution of the equation with A > 0 and B >= 0 is itself positive semidefinite"""
    solution = solve_spectral(EquationInstance(a, n, b, tol_scale))
    return check_psd(solution.x, tol_scale)


# Randomized in-region suites

@dataclass
class TrialOutcome:
    passed: bool
    min_eigenvalue: float = 0.0
    scale: float = 1.0
    relative_error: Optional[float] = None
    parameters: dict = field(default_factory=dict)
    normalized_min: float = 0.0


@dataclass
class SuiteResult:
    inequality_id: InequalityId
    trials: int
    seed: int
    dims: Tuple[int, int]
    passed: int = 0
    failed: int = 0
    worst_min_eigenvalue: float = math.inf
    worst_normalized: float = math.inf
    max_relative_error: Optional[float] = None
    failures: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def to_dict(self) -> dict:
        return {
            'inequality_id': self.inequality_id.value,
            'trials': self.trials,
            'seed': self.seed,
            'dims': list(self.dims),
            'passed': self.passed,
            'failed': self.failed,
            'worst_min_eigenvalue': self.worst_min_eigenvalue if math.isfinite(self.worst_min_eigenvalue) else None,
            'worst_normalized_min_eigenvalue': self.worst_normalized if math.isfinite(self.worst_normalized) else None,
            'max_relative_error': self.max_relative_error,
            'failures': self.failures,
        }


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial, independent of how trials are scheduled"""
    return np.random.default_rng([seed, trial])


def _pair(rng: np.random.Generator, dim: int) -> Tuple[SymMatrix, SymMatrix]:
    return gen_loewner_pair(int(rng.integers(2 ** 31)), dim)


def _psd_outcome(report: PsdReport, parameters: dict) -> TrialOutcome:
    passed = report.normalized_min >= -ACCEPT_TOL
    return TrialOutcome(passed, report.min_eigenvalue, report.scale, None, parameters,
                        normalized_min=report.normalized_min)


def _sample_valid_construction(rng: np.random.Generator, max_param: int = 4) -> ConstructionParams:
    while True:
        m, n, k = (int(v) for v in rng.integers(1, max_param + 1, size=3))
        t = float(rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]))
        condition = check_r_condition(ConstructionParams(m, n, k, t, 0.0))
        if condition.branch is not RBranch.UNDEFINED:
            r = condition.required_r + abs(float(rng.normal(0.0, 0.5)))
            return ConstructionParams(m, n, k, t, r)


def _lh_trial(rng, dim, options) -> TrialOutcome:
    a, b = _pair(rng, dim)
    alpha = float(options.get('alpha', rng.uniform(0.0, 1.0)))
    return _psd_outcome(check_loewner_heinz(a, b, alpha, options.get('tol_scale')), {'alpha': alpha})


def _furuta_trial(rng, dim, options) -> TrialOutcome:
    a, b = _pair(rng, dim)
    p = float(rng.uniform(0.0, 4.0))
    r = float(rng.uniform(0.0, 3.0))
    q_min = max(1.0, (p + r) / (1.0 + r))
    fp = FurutaParams(p, q_min + float(rng.uniform(0.0, 2.0)), r)
    side = FurutaSide.B_SIDE if rng.random() < 0.5 else FurutaSide.A_SIDE
    report = check_furuta(a, b, fp, side, options.get('tol_scale'))
    return _psd_outcome(report, {**fp.to_dict(), 'side': side.value})


def _grand_furuta_trial(rng, dim, options) -> TrialOutcome:
    a, b = _pair(rng, dim)
    t = float(rng.uniform(0.0, 1.0))
    gp = GrandFurutaParams(t, float(rng.uniform(1.0, 3.0)), float(rng.uniform(1.0, 3.0)),
                           t + float(rng.uniform(0.0, 2.0)))
    return _psd_outcome(check_grand_furuta(a, b, gp, options.get('tol_scale')), gp.to_dict())


def _lemma_trial(rng, dim, options) -> TrialOutcome:
    m = int(options.get('m') or rng.integers(1, 9))
    a = random_pd(rng, dim, 0.5, 2.0)
    b = random_psd(rng, dim)
    exact = lemma_derivative(a, b, m).entries
    approx = finite_difference_derivative(a, b, m).entries
    error = float(np.linalg.norm(approx - exact) / np.linalg.norm(exact))
    return TrialOutcome(error <= LEMMA_TOL, relative_error=error, parameters={'m': m})


def _proof_step_trial(rng, dim, options) -> TrialOutcome:
    p = _sample_valid_construction(rng, 3)
    a = random_pd(rng, dim, 1.0, 3.0)
    b = random_psd(rng, dim, int(rng.integers(1, dim + 1)))
    x = float(rng.uniform(0.0, 5.0))
    report = verify_proof_step(a, b, x, p, options.get('tol_scale'))
    return _psd_outcome(report, {**p.to_dict(), 'x': x})


def _reversed_gf_trial(rng, dim, options) -> TrialOutcome:
    p = _sample_valid_construction(rng, 3)
    a = random_pd(rng, dim, 1.0, 3.0)
    b = random_psd(rng, dim, int(rng.integers(1, dim + 1)))
    x = float(rng.uniform(0.0, 5.0))
    report = check_reversed_grand_furuta(a, b, x, p, options.get('tol_scale'))
    return _psd_outcome(report, {**p.to_dict(), 'x': x})


def _theorem21_trial(rng, dim, options) -> TrialOutcome:
    p = _sample_valid_construction(rng, 4)
    a = random_pd(rng, dim, 0.5, 4.0)
    b = random_psd(rng, dim, int(rng.integers(1, dim + 1)))
    outcome = solve_construction(a, b, p, options.get('tol_scale'))
    return _psd_outcome(outcome.psd, p.to_dict())


def _oracle_trial(rng, dim, options) -> TrialOutcome:
    n = int(rng.integers(1, 7))
    a = random_pd(rng, dim, 0.5, 2.0)
    inst = EquationInstance(a, n, random_symmetric(rng, dim), options.get('tol_scale'))
    spectral = solve_spectral(inst).x
    oracle = solve_kronecker(inst).x
    error = relative_error(spectral, oracle)
    return TrialOutcome(error <= ORACLE_TOL, relative_error=error, parameters={'n': n})


def _transfer_trial(rng, dim, options) -> TrialOutcome:
    n = int(rng.integers(1, 7))
    a = random_pd(rng, dim, 0.5, 4.0)
    b = random_psd(rng, dim, int(rng.integers(1, dim + 1)))
    return _psd_outcome(check_psd_transfer(a, b, n, options.get('tol_scale')), {'n': n})


SUITE_TRIALS: Dict[InequalityId, Callable] = {
    InequalityId.LOEWNER_HEINZ: _lh_trial,
    InequalityId.FURUTA: _furuta_trial,
    InequalityId.GRAND_FURUTA: _grand_furuta_trial,
    InequalityId.LEMMA: _lemma_trial,
    InequalityId.PROOF_STEP: _proof_step_trial,
    InequalityId.REVERSED_GRAND_FURUTA: _reversed_gf_trial,
    InequalityId.THEOREM21: _theorem21_trial,
    InequalityId.ORACLE: _oracle_trial,
    InequalityId.TRANSFER: _transfer_trial,
}


def _map_trials(run_one: Callable[[int], object], trials: int, workers: int) -> list:
    if workers <= 1:
        return [run_one(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_one, range(trials)))


def run_suite(inequality_id: InequalityId, trials: int, seed: int,
              dims: Tuple[int, int] = (2, 6), workers: Optional[int] = None,
              **options) -> SuiteResult:
    """
    Randomized trials drawn inside the validity region of one check.
    Trial i always uses trial_rng(seed, i), so results do not depend on workers.
    """
    inequality_id = InequalityId(inequality_id)
    if inequality_id not in SUITE_TRIALS:
        raise InvalidSearchSpec(f"no in-region suite for {inequality_id.value}")
    if trials < 1:
        raise InvalidParameters("trials must be at least 1")
    low, high = dims
    if low < 1 or high < low:
        raise InvalidParameters(f"bad dimension range {dims}")
    trial_fn = SUITE_TRIALS[inequality_id]
    workers = config.DEFAULT_WORKERS if workers is None else workers

    def run_one(i: int) -> TrialOutcome:
        rng = trial_rng(seed, i)
        dim = int(rng.integers(low, high + 1))
        try:
            return trial_fn(rng, dim, options)
        except OperatorEquationError as e:
            logger.warning(f"{inequality_id.value} trial {i} raised {type(e).__name__}: {str(e)}")
            return TrialOutcome(False, parameters={'error': f"{type(e).__name__}: {str(e)}"})

    result = SuiteResult(inequality_id, trials, seed, (low, high))
    for i, outcome in enumerate(_map_trials(run_one, trials, workers)):
        if outcome.passed:
            result.passed += 1
        else:
            result.failed += 1
            result.failures.append({'trial': i, **outcome.parameters,
                                    'min_eigenvalue': outcome.min_eigenvalue,
                                    'relative_error': outcome.relative_error})
        if outcome.relative_error is not None:
            result.max_relative_error = max(result.max_relative_error or 0.0, outcome.relative_error)
        else:
            result.worst_min_eigenvalue = min(result.worst_min_eigenvalue, outcome.min_eigenvalue)
            result.worst_normalized = min(result.worst_normalized, outcome.normalized_min)
    logger.info(f"Suite {inequality_id.value}: {result.passed}/{trials} passed (seed {seed})")
    return result


# Counterexample search

SEARCHABLE = (
    InequalityId.LOEWNER_HEINZ,
    InequalityId.FURUTA,
    InequalityId.GRAND_FURUTA,
    InequalityId.THEOREM21_R,
)

PROBES = ("remark22",)


@dataclass(frozen=True)
class SearchSpec:
    """
    How the counterexample search samples parameters.

    region is "outside" (the real search) or "inside" (sanity runs that
    should never produce a witness). fixed pins parameters, e.g. {'alpha': 2}.
    """
    dims: Tuple[int, int] = (2, 2)
    region: str = "outside"
    fixed: Dict[str, float] = field(default_factory=dict)
    probe: Optional[str] = None

    def __post_init__(self):
        if self.region not in ("outside", "inside"):
            raise InvalidSearchSpec(f"region must be 'outside' or 'inside', got {self.region!r}")
        if self.probe is not None and self.probe not in PROBES:
            raise InvalidSearchSpec(f"unknown probe {self.probe!r}, expected one of {PROBES}")
        low, high = self.dims
        if low < 1 or high < low:
            raise InvalidSearchSpec(f"bad dimension range {self.dims}")


def _check_fixed_region(inequality_id: InequalityId, spec: SearchSpec) -> None:
    fixed = spec.fixed
    if inequality_id is InequalityId.LOEWNER_HEINZ and 'alpha' in fixed:
        inside = 0.0 <= fixed['alpha'] <= 1.0
        if inside != (spec.region == "inside"):
            raise InvalidSearchSpec(f"alpha = {fixed['alpha']} is not {spec.region} the validity region [0, 1]")


def _sample_witness_candidate(inequality_id: InequalityId, spec: SearchSpec,
                              rng: np.random.Generator, dim: int, tol_scale):
    """Return (parameters, A, B, report) for one sampled trial"""
    outside = spec.region == "outside"
    if inequality_id is InequalityId.LOEWNER_HEINZ:
        a, b = _pair(rng, dim)
        if 'alpha' in spec.fixed:
            alpha = float(spec.fixed['alpha'])
        else:
            alpha = float(rng.uniform(1.0, 3.0)) if outside else float(rng.uniform(0.0, 1.0))
            if outside and alpha == 1.0:
                alpha = 2.0
        return {'alpha': alpha}, a, b, check_loewner_heinz(a, b, alpha, tol_scale)

    if inequality_id is InequalityId.FURUTA:
        a, b = _pair(rng, dim)
        p = float(rng.uniform(1.1, 4.0))
        r = float(rng.uniform(0.0, 2.0))
        q_edge = (p + r) / (1.0 + r)
        q = float(rng.uniform(1.0, q_edge)) if outside else q_edge + float(rng.uniform(0.0, 2.0))
        fp = FurutaParams(p, max(q, 1.0), r)
        side = FurutaSide.B_SIDE if rng.random() < 0.5 else FurutaSide.A_SIDE
        return {**fp.to_dict(), 'side': side.value}, a, b, check_furuta(a, b, fp, side, tol_scale)

    if inequality_id is InequalityId.GRAND_FURUTA:
        a, b = _pair(rng, dim)
        t = float(rng.uniform(0.25, 1.0))
        r = float(rng.uniform(0.0, t)) if outside else t + float(rng.uniform(0.0, 2.0))
        gp = GrandFurutaParams(t, float(rng.uniform(1.0, 3.0)), float(rng.uniform(1.0, 3.0)), r)
        return gp.to_dict(), a, b, check_grand_furuta(a, b, gp, tol_scale)

    # theorem21-r
    if spec.probe == "remark22":
        p = ConstructionParams(2, 2, 2, 0.5, 0.5)
        raw = SymMatrix.diag([1.0, 2.0])
        a = matrix_power(raw, p.exponent_base / p.n)
        b = SymMatrix.ones(2)
    else:
        if outside:
            p = _sample_invalid_construction(rng)
        else:
            p = _sample_valid_construction(rng, 4)
        a = random_pd(rng, dim, 0.5, 4.0)
        b = random_psd(rng, dim, int(rng.integers(1, dim + 1)))
    outcome = solve_construction(a, b, p, tol_scale)
    return p.to_dict(), a, b, outcome.psd


def _sample_invalid_construction(rng: np.random.Generator) -> ConstructionParams:
    while True:
        m, n, k = (int(v) for v in rng.integers(1, 5, size=3))
        t = float(rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]))
        condition = check_r_condition(ConstructionParams(m, n, k, t, 0.0))
        floor = -(m - t) * k + 0.05
        if math.isfinite(condition.required_r):
            low = max(condition.required_r - 2.0, floor)
            if low >= condition.required_r:
                continue
            r = float(rng.uniform(low, condition.required_r))
        else:
            r = float(rng.uniform(max(0.0, floor), 3.0))
        return ConstructionParams(m, n, k, t, r)


def counterexample_search(inequality_id: InequalityId, spec: SearchSpec, trials: int, seed: int,
                          workers: Optional[int] = None,
                          tol_scale: Optional[float] = None) -> Optional[InequalityWitness]:
    """
    Sample parameters per spec and return the violation with the lowest trial
    index, or None. A violation needs min eigenvalue < -1e-6 * scale.
    """
    inequality_id = InequalityId(inequality_id)
    if inequality_id not in SEARCHABLE:
        raise InvalidSearchSpec(f"{inequality_id.value} has no counterexample search")
    if spec.probe is not None and inequality_id is not InequalityId.THEOREM21_R:
        raise InvalidSearchSpec(f"probe {spec.probe!r} only applies to theorem21-r")
    if trials < 1:
        raise InvalidParameters("trials must be at least 1")
    _check_fixed_region(inequality_id, spec)
    if spec.probe is not None:
        trials = 1
    workers = config.DEFAULT_WORKERS if workers is None else workers
    low, high = spec.dims

    def run_one(i: int) -> Optional[InequalityWitness]:
        rng = trial_rng(seed, i)
        dim = int(rng.integers(low, high + 1))
        try:
            parameters, a, b, report = _sample_witness_candidate(inequality_id, spec, rng, dim, tol_scale)
        except OperatorEquationError as e:
            logger.debug(f"Search trial {i} skipped: {type(e).__name__}: {str(e)}")
            return None
        if report.normalized_min < -WITNESS_TOL:
            return InequalityWitness(inequality_id, parameters, a, b,
                                     report.min_eigenvalue, report.scale, seed, i)
        return None

    if workers <= 1:
        for i in range(trials):
            witness = run_one(i)
            if witness is not None:
                logger.info(f"Witness for {inequality_id.value} at trial {i}: "
                            f"min eigenvalue {witness.min_eigenvalue:.6e}")
                return witness
        return None
    for witness in _map_trials(run_one, trials, workers):
        if witness is not None:
            logger.info(f"Witness for {inequality_id.value} at trial {witness.trial}: "
                        f"min eigenvalue {witness.min_eigenvalue:.6e}")
            return witness
    return None


def replay_witness(witness: InequalityWitness, tol_scale: Optional[float] = None) -> PsdReport:
    """Re-evaluate the stored matrices and parameters"""
    params = dict(witness.parameters)
    a, b = witness.a, witness.b
    if witness.inequality_id is InequalityId.LOEWNER_HEINZ:
        return check_loewner_heinz(a, b, params['alpha'], tol_scale)
    if witness.inequality_id is InequalityId.FURUTA:
        side = FurutaSide(params.pop('side'))
        return check_furuta(a, b, FurutaParams(**params), side, tol_scale)
    if witness.inequality_id is InequalityId.GRAND_FURUTA:
        return check_grand_furuta(a, b, GrandFurutaParams(**params), tol_scale)
    if witness.inequality_id is InequalityId.THEOREM21_R:
        return solve_construction(a, b, ConstructionParams(**params), tol_scale).psd
    raise InvalidSearchSpec(f"cannot replay {witness.inequality_id.value}")
