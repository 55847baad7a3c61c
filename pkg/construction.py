"""
Special right-hand sides for which the operator equation

    sum_{j=1}^{n} A^{n-j} X A^{j-1} = B

has a positive semidefinite solution, the condition on r that guarantees
it, and the closed-form solution for diagonal A with an all-ones B.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from equation import (
    EquationInstance,
    Solution,
    apply_lhs,
    denominator_matrix,
    solve_spectral,
)
from errors import (
    BNotPsd,
    DegenerateExponent,
    InvalidParameters,
    NonPositiveEigenvalue,
    NotPositiveDefinite,
)
from matcore import (
    PsdReport,
    PsdVerdict,
    SymMatrix,
    check_psd,
    gram_factor,
    gram_power,
    matrix_power,
    require_same_dim,
    spectral_decompose,
    symmetric_from_product,
)

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-12


@dataclass(frozen=True)
class ConstructionParams:
    """(m, n, k, t, r) with m, n, k positive integers and t in [0, 1]"""
    m: int
    n: int
    k: int
    t: float
    r: float

    def __post_init__(self):
        for label in ('m', 'n', 'k'):
            value = getattr(self, label)
            if int(value) != value or value < 1:
                raise InvalidParameters(f"{label} must be a positive integer, got {value}")
            object.__setattr__(self, label, int(value))
        t, r = float(self.t), float(self.r)
        if not (0.0 <= t <= 1.0):
            raise InvalidParameters(f"t must lie in [0, 1], got {t}")
        if not math.isfinite(r):
            raise InvalidParameters(f"r must be finite, got {r}")
        object.__setattr__(self, 't', t)
        object.__setattr__(self, 'r', r)

    @property
    def exponent_base(self) -> float:
        """(m - t) k + r"""
        return (self.m - self.t) * self.k + self.r

    @property
    def s(self) -> float:
        """n / ((m - t) k + r), the exponent that maps the raw base back to A"""
        return self.n / self.require_base()

    def require_base(self) -> float:
        base = self.exponent_base
        if base <= 0:
            raise DegenerateExponent(f"(m - t) k + r must be positive, got {base}")
        return base

    def with_r(self, r: float) -> "ConstructionParams":
        return ConstructionParams(self.m, self.n, self.k, self.t, r)

    def to_dict(self) -> dict:
        return {'m': self.m, 'n': self.n, 'k': self.k, 't': self.t, 'r': self.r}


class RBranch(str, Enum):
    N_GEQ = "NGeq"
    M_GEQ = "MGeq"
    BOUNDARY = "Boundary"
    UNDEFINED = "Undefined"


@dataclass(frozen=True)
class RCondition:
    branch: RBranch
    required_r: float
    valid: bool

    def to_dict(self) -> dict:
        return {
            'branch': self.branch.value,
            'required_r': self.required_r if math.isfinite(self.required_r) else None,
            'valid': self.valid,
        }


def check_r_condition(p: ConstructionParams) -> RCondition:
    """
    Lower bound on r for a positive semidefinite solution:
    r >= t when (1-t)n >= (m-t)k, otherwise
    r >= max(((m-t)k - (1-t)n)/(n-1), t) with n >= 2.
    For n = 1 on the second branch no bound exists and the result is Undefined.
    """
    n_side = (1.0 - p.t) * p.n
    m_side = (p.m - p.t) * p.k
    if math.isclose(n_side, m_side, rel_tol=BOUNDARY_TOL, abs_tol=BOUNDARY_TOL):
        required, branch = p.t, RBranch.BOUNDARY
    elif n_side > m_side:
        required, branch = p.t, RBranch.N_GEQ
    elif p.n >= 2:
        required, branch = max((m_side - n_side) / (p.n - 1), p.t), RBranch.M_GEQ
    else:
        return RCondition(RBranch.UNDEFINED, math.inf, False)
    return RCondition(branch, required, p.r >= required)


def check_theorem_a_condition(m: int, n: int, r: float) -> RCondition:
    """The t = 0, k = 1 case in its own form: r >= 0 if n >= m, r >= (m-n)/(n-1) if m >= n >= 2"""
    if n == m:
        return RCondition(RBranch.BOUNDARY, 0.0, r >= 0.0)
    if n > m:
        return RCondition(RBranch.N_GEQ, 0.0, r >= 0.0)
    if n >= 2:
        required = (m - n) / (n - 1)
        return RCondition(RBranch.M_GEQ, required, r >= required)
    return RCondition(RBranch.UNDEFINED, math.inf, False)


def _require_pd_eigenvalues(a: SymMatrix) -> np.ndarray:
    eigenvalues = spectral_decompose(a).eigenvalues
    report = check_psd(a)
    if report.verdict is not PsdVerdict.POSITIVE_DEFINITE:
        raise NotPositiveDefinite(f"A must be positive definite, min eigenvalue is {report.min_eigenvalue:.6e}")
    return eigenvalues


def rhs_kernel(eigenvalues: np.ndarray, p: ConstructionParams, s: float) -> np.ndarray:
    """
    Entrywise multiplier of the right-hand side in A's eigenbasis, with every
    exponent of A scaled by s (s = n/((m-t)k+r) for the substituted form,
    s = 1 for the raw form).
    """
    a = np.asarray(eigenvalues, dtype=float)
    outer = a ** (0.5 * (p.r - p.t) * s)
    middle = denominator_matrix(a ** ((p.m - p.t) * s), p.k)
    inner = denominator_matrix(a ** s, p.m)
    return np.outer(outer, outer) * middle * inner


def build_rhs(a: SymMatrix, b: SymMatrix, p: ConstructionParams) -> SymMatrix:
    """
    Right-hand side of the special equation, with s = n/((m-t)k+r):

        A^{rs/2} { sum_i A^{(m-t)s(k-i)} [A^{-ts/2} (sum_j A^{s(m-j)} B A^{s(j-1)}) A^{-ts/2}]
                   A^{(m-t)s(i-1)} } A^{rs/2}

    A is decomposed once and every power is a scalar map of its eigenvalues.
    The r-condition is not enforced here.
    """
    require_same_dim(a, b)
    s = p.s
    eigenvalues = _require_pd_eigenvalues(a)
    decomposition = spectral_decompose(a)
    b_tilde = decomposition.to_basis(b)
    return decomposition.from_basis(b_tilde * rhs_kernel(eigenvalues, p, s))


def build_rhs_raw(a: SymMatrix, b: SymMatrix, p: ConstructionParams) -> Tuple[SymMatrix, SymMatrix]:
    """
    The identity before substituting A: returns (G, rhs) with
    G = A^{((m-t)k+r)/n} and
    rhs = A^{r/2} {sum_i A^{(m-t)(k-i)} [A^{-t/2} (sum_j A^{m-j} B A^{j-1}) A^{-t/2}] A^{(m-t)(i-1)}} A^{r/2}.
    Built from explicit matrix products so it stays independent of build_rhs.
    """
    require_same_dim(a, b)
    base = p.require_base()
    _require_pd_eigenvalues(a)
    g = matrix_power(a, base / p.n)
    lemma_sum = apply_lhs(a, p.m, b)
    shift = matrix_power(a, -0.5 * p.t).entries
    inner = symmetric_from_product(shift, lemma_sum.entries, shift)
    outer = apply_lhs(matrix_power(a, p.m - p.t), p.k, inner)
    half_r = matrix_power(a, 0.5 * p.r).entries
    rhs = symmetric_from_product(half_r, outer.entries, half_r)
    return g, rhs


def theorem_a_rhs(a: SymMatrix, b: SymMatrix, m: int, n: int, r: float) -> SymMatrix:
    """
    Right-hand side of the t = 0, k = 1 equation coded on its own:
    A^{nr/(2(m+r))} (sum_i A^{n(m-i)/(m+r)} B A^{n(i-1)/(m+r)}) A^{nr/(2(m+r))}.
    """
    require_same_dim(a, b)
    if m + r <= 0:
        raise DegenerateExponent(f"m + r must be positive, got {m + r}")
    total = np.zeros((a.dim, a.dim))
    for i in range(1, m + 1):
        left = matrix_power(a, n * (m - i) / (m + r)).entries
        right = matrix_power(a, n * (i - 1) / (m + r)).entries
        total += left @ b.entries @ right
    edge = matrix_power(a, n * r / (2 * (m + r))).entries
    return symmetric_from_product(edge, total, edge)


def closed_form_diagonal(eigs: Sequence[float], p: ConstructionParams) -> SymMatrix:
    """
    Solution for A = diag(eigs) and B = all-ones:

        X[p][q] = (a_p a_q)^{(r-t)/2} (sum_i a_p^{(m-t)(k-i)} a_q^{(m-t)(i-1)})
                  (sum_j a_p^{m-j} a_q^{j-1}) / sum_j a_p^{c(n-j)} a_q^{c(j-1)}

    with c = ((m-t)k+r)/n.
    """
    a = np.asarray(list(eigs), dtype=float)
    if a.size == 0:
        raise InvalidParameters("at least one eigenvalue is required")
    if not np.all(np.isfinite(a)) or np.any(a <= 0):
        raise NonPositiveEigenvalue(f"eigenvalues must be positive, got {a.tolist()}")
    c = p.require_base() / p.n
    numerator = rhs_kernel(a, p, 1.0)
    return SymMatrix(numerator / denominator_matrix(a ** c, p.n))


class ConstructionOutcome(NamedTuple):
    solution: Solution
    psd: PsdReport
    condition: RCondition


def solve_construction(a: SymMatrix, b: SymMatrix, p: ConstructionParams,
                       tol_scale: Optional[float] = None,
                       require_psd_b: bool = True) -> ConstructionOutcome:
    """
    Build the special right-hand side for (A, B), solve with base A and n
    summands, and certify the solution. With a valid r the solution must be
    positive semidefinite; with an invalid r any verdict may come out.
    """
    if require_psd_b:
        b_report = check_psd(b, tol_scale)
        if not b_report.is_psd:
            raise BNotPsd(f"B must be positive semidefinite, min eigenvalue is {b_report.min_eigenvalue:.6e}")
    condition = check_r_condition(p)
    if not condition.valid:
        logger.warning(f"r = {p.r} violates the r-condition ({condition.branch.value}, "
                       f"required {condition.required_r}); the solution may be indefinite")
    rhs = build_rhs(a, b, p)
    solution = solve_spectral(EquationInstance(a, p.n, rhs, tol_scale))
    report = check_psd(solution.x, tol_scale)
    if condition.valid and require_psd_b and not report.is_psd:
        logger.error(f"Valid parameters {p.to_dict()} gave an indefinite solution "
                     f"(min eigenvalue {report.min_eigenvalue:.3e}); inputs are likely ill-conditioned")
    return ConstructionOutcome(solution, report, condition)


def curve_factor(a: SymMatrix, b: SymMatrix, p: ConstructionParams, x: float,
                 tol_scale: Optional[float] = None) -> np.ndarray:
    """F with F F^T = A^{r/2} (A^{-t/2} (A + xB)^m A^{-t/2})^k A^{r/2}"""
    require_same_dim(a, b)
    shifted = SymMatrix(a.entries + x * b.entries)
    g1 = matrix_power(a, -0.5 * p.t, tol_scale).entries @ matrix_power(shifted, 0.5 * p.m, tol_scale).entries
    w = gram_factor(g1, p.k, tol_scale)
    f = matrix_power(a, 0.5 * p.r, tol_scale).entries @ w
    return f


def y_curve(a: SymMatrix, b: SymMatrix, p: ConstructionParams, x: float,
            tol_scale: Optional[float] = None) -> SymMatrix:
    """
    Y(x) = (A^{r/2} (A^{-t/2} (A + xB)^m A^{-t/2})^k A^{r/2})^{1/n}.
    Y(0) is the raw base G, and Y'(0) solves the raw equation.
    """
    return gram_power(curve_factor(a, b, p, x, tol_scale), 1.0 / p.n, tol_scale)


def y_derivative(a: SymMatrix, b: SymMatrix, p: ConstructionParams, h: float = 1e-5,
                 tol_scale: Optional[float] = None) -> SymMatrix:
    """Central difference of y_curve at x = 0"""
    forward = y_curve(a, b, p, h, tol_scale)
    backward = y_curve(a, b, p, -h, tol_scale)
    return SymMatrix((forward.entries - backward.entries) / (2.0 * h))
