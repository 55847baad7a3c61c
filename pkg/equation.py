"""
Solvers for the linear matrix equation

    sum_{j=1}^{n} A^{n-j} X A^{j-1} = B

with A symmetric positive definite. The spectral solver is the production
path; the stacked Kronecker system is an independent oracle kept alongside it.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np
import scipy.linalg

from errors import (
    DimTooLarge,
    InvalidParameters,
    NotPositiveDefinite,
    NumericallySingular,
    SingularDenominator,
)
from matcore import (
    PsdReport,
    PsdVerdict,
    SymMatrix,
    check_psd,
    require_same_dim,
    spectral_decompose,
)

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-9
KRONECKER_MAX_DIM = 32
KRONECKER_MAX_COND = 1e14
DENOMINATOR_FLOOR = 1e-300


class SolveMethod(str, Enum):
    SPECTRAL = "Spectral"
    KRONECKER_ORACLE = "KroneckerOracle"


def _require_summands(n: int) -> int:
    if int(n) != n or n < 1:
        raise InvalidParameters(f"number of summands must be a positive integer, got {n}")
    return int(n)


@dataclass(frozen=True)
class EquationInstance:
    """A positive definite, n >= 1 and B of the same size as A"""
    a: SymMatrix
    n: int
    b: SymMatrix
    tol_scale: Optional[float] = None
    a_report: Optional[PsdReport] = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'n', _require_summands(self.n))
        require_same_dim(self.a, self.b)
        report = check_psd(self.a, self.tol_scale)
        if report.verdict is not PsdVerdict.POSITIVE_DEFINITE:
            raise NotPositiveDefinite(
                f"A must be positive definite, min eigenvalue is {report.min_eigenvalue:.6e}"
            )
        object.__setattr__(self, 'a_report', report)

    @property
    def dim(self) -> int:
        return self.a.dim


@dataclass(frozen=True)
class Solution:
    x: SymMatrix
    residual_fro: float
    method: SolveMethod

    def to_dict(self) -> dict:
        return {'residual_fro': self.residual_fro, 'method': self.method.value}


def integer_powers(a: np.ndarray, highest: int) -> list:
    """[I, A, A^2, ..., A^highest] by repeated multiplication"""
    powers = [np.eye(a.shape[0])]
    for _ in range(highest):
        powers.append(powers[-1] @ a)
    return powers


def apply_lhs(a: SymMatrix, n: int, x: SymMatrix) -> SymMatrix:
    """sum_{j=1}^{n} A^{n-j} X A^{j-1}, symmetrized"""
    n = _require_summands(n)
    require_same_dim(a, x)
    powers = integer_powers(a.entries, n - 1)
    total = np.zeros_like(x.entries)
    for j in range(1, n + 1):
        total += powers[n - j] @ x.entries @ powers[j - 1]
    return SymMatrix(total)


def denominator(x: float, y: float, n: int) -> float:
    """
    d(x, y) = sum_{j=1}^{n} x^{n-j} y^{j-1} by direct summation.
    The closed form (x^n - y^n)/(x - y) cancels badly for x close to y.
    """
    n = _require_summands(n)
    return float(sum(x ** (n - j) * y ** (j - 1) for j in range(1, n + 1)))


def denominator_matrix(values: np.ndarray, n: int) -> np.ndarray:
    """Entrywise d(values[p], values[q]) for every pair"""
    n = _require_summands(n)
    values = np.asarray(values, dtype=float)
    j = np.arange(1, n + 1)
    left = values[:, None, None] ** (n - j)
    right = values[None, :, None] ** (j - 1)
    return (left * right).sum(axis=2)


def residual_norm(a: SymMatrix, n: int, x: SymMatrix, b: SymMatrix) -> float:
    return (apply_lhs(a, n, x) - b).frobenius_norm()


def _finish(inst: EquationInstance, x: SymMatrix, method: SolveMethod) -> Solution:
    residual = residual_norm(inst.a, inst.n, x, inst.b)
    limit = RESIDUAL_TOL * max(1.0, inst.b.frobenius_norm())
    if residual > limit:
        logger.warning(f"{method.value} solve residual {residual:.3e} exceeds {limit:.3e}")
    return Solution(x, residual, method)


def solve_spectral(inst: EquationInstance) -> Solution:
    """
    Solve in the eigenbasis of A. With A = V diag(a) V^T the equation
    decouples into X~[p][q] = B~[p][q] / d(a_p, a_q).
    """
    decomposition = spectral_decompose(inst.a)
    d = denominator_matrix(decomposition.eigenvalues, inst.n)
    if np.min(d) <= DENOMINATOR_FLOOR:
        raise SingularDenominator(f"eigenbasis denominator underflows: min {np.min(d):.3e}")
    b_tilde = decomposition.to_basis(inst.b)
    x = decomposition.from_basis(b_tilde / d)
    return _finish(inst, x, SolveMethod.SPECTRAL)


def stacked_operator(a: SymMatrix, n: int) -> np.ndarray:
    """
    Matrix K of the map X -> sum A^{n-j} X A^{j-1} acting on row-major vec(X).
    vec(P X Q) = (P kron Q^T) vec(X), and A is symmetric.
    """
    powers = integer_powers(a.entries, n - 1)
    size = a.dim * a.dim
    k = np.zeros((size, size))
    for j in range(1, n + 1):
        k += np.kron(powers[n - j], powers[j - 1])
    return k


def solve_kronecker(inst: EquationInstance) -> Solution:
    """Dense dim^2 x dim^2 oracle solve through an LU factorization"""
    if inst.dim > KRONECKER_MAX_DIM:
        raise DimTooLarge(f"stacked system limited to dim <= {KRONECKER_MAX_DIM}, got {inst.dim}")
    k = stacked_operator(inst.a, inst.n)
    condition = np.linalg.cond(k)
    if not np.isfinite(condition) or condition > KRONECKER_MAX_COND:
        raise NumericallySingular(f"stacked system condition estimate {condition:.3e}")
    lu, piv = scipy.linalg.lu_factor(k)
    vec_x = scipy.linalg.lu_solve((lu, piv), inst.b.entries.reshape(-1))
    x = SymMatrix(vec_x.reshape(inst.dim, inst.dim))
    return _finish(inst, x, SolveMethod.KRONECKER_ORACLE)


def solve(a: SymMatrix, n: int, b: SymMatrix, method: SolveMethod = SolveMethod.SPECTRAL,
          tol_scale: Optional[float] = None) -> Solution:
    inst = EquationInstance(a, n, b, tol_scale)
    if method is SolveMethod.KRONECKER_ORACLE:
        return solve_kronecker(inst)
    return solve_spectral(inst)
