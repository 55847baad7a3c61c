"""
Dense real symmetric matrix arithmetic for the operator equation toolkit.

Everything else in the package is built on the helpers here: spectral
decomposition, fractional matrix powers, positive semidefiniteness
certificates and the Loewner order.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Optional, Tuple

import numpy as np
import scipy.linalg

import config
from errors import (
    ConvergenceFailure,
    DimMismatch,
    FractionalPowerOfIndefinite,
    NegativePowerOfSingular,
    NonFinite,
)

logger = logging.getLogger(__name__)

RECONSTRUCTION_TOL = 1e-12


class SymMatrix:
    """
    Immutable dense real symmetric matrix.

    The input is averaged with its transpose on construction, so
    entries[i][j] == entries[j][i] holds exactly for every stored value.
    """

    def __init__(self, entries, name: Optional[str] = None):
        if isinstance(entries, SymMatrix):
            entries = entries.entries
        arr = np.array(entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimMismatch(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise DimMismatch("matrix dimension must be at least 1")
        if not np.all(np.isfinite(arr)):
            raise NonFinite("matrix contains NaN or Inf entries")
        self.raw_asymmetry = float(np.max(np.abs(arr - arr.T)))
        arr = 0.5 * (arr + arr.T)
        arr.flags.writeable = False
        self._entries = arr
        self._spectral = None
        self.name = name

    @classmethod
    def identity(cls, dim: int) -> "SymMatrix":
        return cls(np.eye(dim))

    @classmethod
    def diag(cls, values: Iterable[float]) -> "SymMatrix":
        return cls(np.diag(np.asarray(list(values), dtype=float)))

    @classmethod
    def ones(cls, dim: int) -> "SymMatrix":
        return cls(np.ones((dim, dim)))

    @classmethod
    def zeros(cls, dim: int) -> "SymMatrix":
        return cls(np.zeros((dim, dim)))

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    def to_array(self) -> np.ndarray:
        """Writable copy of the entries"""
        return np.array(self._entries)

    def frobenius_norm(self) -> float:
        return float(np.linalg.norm(self._entries, "fro"))

    def spectral_norm(self) -> float:
        return float(np.max(np.abs(spectral_decompose(self).eigenvalues)))

    def __add__(self, other: "SymMatrix") -> "SymMatrix":
        require_same_dim(self, other)
        return SymMatrix(self._entries + other._entries)

    def __sub__(self, other: "SymMatrix") -> "SymMatrix":
        require_same_dim(self, other)
        return SymMatrix(self._entries - other._entries)

    def __mul__(self, scalar: float) -> "SymMatrix":
        return SymMatrix(self._entries * float(scalar))

    __rmul__ = __mul__

    def __repr__(self) -> str:
        label = f" {self.name!r}" if self.name else ""
        return f"SymMatrix{label}(dim={self.dim})"


def require_same_dim(*matrices: SymMatrix) -> None:
    dims = {m.dim for m in matrices}
    if len(dims) != 1:
        raise DimMismatch(f"matrix dimensions differ: {sorted(dims)}")


def symmetric_from_product(*factors: np.ndarray) -> SymMatrix:
    """Multiply a chain of arrays and symmetrize the result"""
    result = factors[0]
    for factor in factors[1:]:
        result = result @ factor
    return SymMatrix(result)


def relative_error(value, reference) -> float:
    """Frobenius distance scaled by max(1, |reference|)"""
    value = value.entries if isinstance(value, SymMatrix) else np.asarray(value, dtype=float)
    reference = reference.entries if isinstance(reference, SymMatrix) else np.asarray(reference, dtype=float)
    diff = np.linalg.norm(value - reference)
    return float(diff / max(1.0, np.linalg.norm(reference)))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in nondecreasing order with orthonormal eigenvector columns"""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T

    def apply(self, values: np.ndarray) -> SymMatrix:
        """Spectral function with the given values on the eigenvectors"""
        v = self.eigenvectors
        return SymMatrix((v * values) @ v.T)

    def to_basis(self, m: SymMatrix) -> np.ndarray:
        """Entries of m in this eigenbasis"""
        v = self.eigenvectors
        return v.T @ m.entries @ v

    def from_basis(self, arr: np.ndarray) -> SymMatrix:
        v = self.eigenvectors
        return SymMatrix(v @ arr @ v.T)


def spectral_decompose(m: SymMatrix) -> SpectralDecomposition:
    """
    Eigendecomposition of a symmetric matrix.
    The result is cached on the matrix since SymMatrix values never change.
    """
    if m._spectral is not None:
        return m._spectral
    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(m.entries)
    except (np.linalg.LinAlgError, ValueError) as e:
        raise ConvergenceFailure(f"symmetric eigensolver failed: {str(e)}") from e
    eigenvalues.flags.writeable = False
    eigenvectors.flags.writeable = False
    decomposition = SpectralDecomposition(eigenvalues, eigenvectors)
    m._spectral = decomposition
    return decomposition


def tolerance_for(eigenvalues: np.ndarray, tol_scale: Optional[float] = None,
                  reference_norm: float = 0.0) -> Tuple[float, float]:
    """Return (tolerance, scale) with scale = max(1, spectral norm, reference_norm)"""
    if tol_scale is None:
        tol_scale = config.DEFAULT_TOL_SCALE
    scale = max(1.0, float(np.max(np.abs(eigenvalues))), float(reference_norm))
    return tol_scale * scale, scale


def _is_integer(alpha: float) -> bool:
    return float(alpha).is_integer()


def _power_of_eigenvalues(lam: np.ndarray, alpha: float, tol: float, what: str) -> np.ndarray:
    lowest = float(lam[0]) if lam.size else 0.0
    if alpha < 0:
        if lowest <= tol:
            raise NegativePowerOfSingular(
                f"{what}^{alpha} needs a positive definite matrix, min eigenvalue is {lowest:.3e}"
            )
        return lam ** alpha
    if not _is_integer(alpha):
        if lowest < -tol:
            raise FractionalPowerOfIndefinite(
                f"{what}^{alpha} needs a positive semidefinite matrix, min eigenvalue is {lowest:.3e}"
            )
        if lowest < 0:
            logger.debug(f"Clamping eigenvalues down to {lowest:.3e} for {what}^{alpha}")
            lam = np.clip(lam, 0.0, None)
    return lam ** alpha


def matrix_power(m: SymMatrix, alpha: float, tol_scale: Optional[float] = None) -> SymMatrix:
    """
    Fractional power via the spectral decomposition: V diag(lambda^alpha) V^T.

    Eigenvalues in [-tol, 0] are treated as zero for non-integer alpha >= 0.
    """
    alpha = float(alpha)
    if alpha == 0.0:
        return SymMatrix.identity(m.dim)
    if alpha == 1.0:
        return m
    decomposition = spectral_decompose(m)
    tol, _ = tolerance_for(decomposition.eigenvalues, tol_scale)
    powered = _power_of_eigenvalues(decomposition.eigenvalues, alpha, tol, "M")
    return decomposition.apply(powered)


def gram_factor(f: np.ndarray, beta: float, tol_scale: Optional[float] = None) -> np.ndarray:
    """
    Return W with W W^T = (F F^T)^beta, built from the SVD of F.

    Working with the factor keeps small eigenvalues of F F^T accurate to the
    precision of the singular values of F instead of their squares.
    """
    f = np.asarray(f, dtype=float)
    rows = f.shape[0]
    u, sigma, _ = scipy.linalg.svd(f, full_matrices=True)
    squares = np.zeros(rows)
    squares[:sigma.size] = sigma ** 2
    tol, _ = tolerance_for(squares, tol_scale)
    # squares are nonincreasing, the power helper wants the smallest first
    powered = _power_of_eigenvalues(squares[::-1], 0.5 * float(beta), tol, "F F^T")[::-1]
    return u * powered


def gram_power(f: np.ndarray, alpha: float, tol_scale: Optional[float] = None) -> SymMatrix:
    """(F F^T)^alpha from the SVD of F"""
    w = gram_factor(f, alpha, tol_scale)
    return SymMatrix(w @ w.T)


class PsdVerdict(str, Enum):
    POSITIVE_DEFINITE = "PositiveDefinite"
    POSITIVE_SEMIDEFINITE = "PositiveSemidefinite"
    INDEFINITE = "Indefinite"


@dataclass(frozen=True)
class PsdReport:
    verdict: PsdVerdict
    min_eigenvalue: float
    tolerance_used: float
    scale: float = 1.0

    @property
    def is_psd(self) -> bool:
        return self.verdict is not PsdVerdict.INDEFINITE

    @property
    def normalized_min(self) -> float:
        """Minimum eigenvalue divided by the scale the tolerance was built from"""
        return self.min_eigenvalue / self.scale

    def to_dict(self) -> dict:
        return {
            'verdict': self.verdict.value,
            'min_eigenvalue': self.min_eigenvalue,
            'tolerance_used': self.tolerance_used,
            'scale': self.scale,
        }


def verdict_for(min_eigenvalue: float, tol: float) -> PsdVerdict:
    if min_eigenvalue > tol:
        return PsdVerdict.POSITIVE_DEFINITE
    if min_eigenvalue >= -tol:
        return PsdVerdict.POSITIVE_SEMIDEFINITE
    return PsdVerdict.INDEFINITE


def check_psd(m: SymMatrix, tol_scale: Optional[float] = None,
              reference_norm: float = 0.0) -> PsdReport:
    """
    Positive semidefiniteness certificate.

    tolerance_used = tol_scale * max(1, |M|_2, reference_norm); callers that
    compare two large sides pass the size of those sides as reference_norm.
    """
    eigenvalues = spectral_decompose(m).eigenvalues
    tol, scale = tolerance_for(eigenvalues, tol_scale, reference_norm)
    lowest = float(eigenvalues[0])
    return PsdReport(verdict_for(lowest, tol), lowest, tol, scale)


def loewner_ge(a: SymMatrix, b: SymMatrix, tol_scale: Optional[float] = None) -> PsdReport:
    """A >= B in the Loewner order, i.e. A - B positive semidefinite"""
    require_same_dim(a, b)
    return check_psd(a - b, tol_scale)


def difference_report(lhs: SymMatrix, rhs: SymMatrix, tol_scale: Optional[float] = None) -> PsdReport:
    """check_psd(lhs - rhs) with the tolerance scaled by the larger side"""
    require_same_dim(lhs, rhs)
    reference = max(lhs.spectral_norm(), rhs.spectral_norm())
    return check_psd(lhs - rhs, tol_scale, reference_norm=reference)


# Random inputs for suites and tests

LOEWNER_EPSILON = 0.01


def _gram_of_random(rng: np.random.Generator, rows: int, dim: int) -> np.ndarray:
    c = rng.standard_normal((rows, dim)) / np.sqrt(rows)
    return c.T @ c


def gen_loewner_pair(seed: int, dim: int) -> Tuple[SymMatrix, SymMatrix]:
    """
    Deterministic pair with A >= B >= 0 and A > 0:
    B = C^T C, A = B + D^T D + 0.01 I.
    """
    if dim < 1:
        raise DimMismatch("dimension must be at least 1")
    rng = np.random.default_rng(seed)
    b = _gram_of_random(rng, 2 * dim, dim)
    gap = _gram_of_random(rng, 2 * dim, dim)
    a = b + gap + LOEWNER_EPSILON * np.eye(dim)
    return SymMatrix(a, name="A"), SymMatrix(b, name="B")


def random_orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def random_pd(rng: np.random.Generator, dim: int, low: float = 0.5, high: float = 4.0) -> SymMatrix:
    """Q diag(lambda) Q^T with lambda uniform in [low, high]"""
    q = random_orthogonal(rng, dim)
    eigenvalues = rng.uniform(low, high, size=dim)
    return SymMatrix((q * eigenvalues) @ q.T)


def random_psd(rng: np.random.Generator, dim: int, rank: Optional[int] = None) -> SymMatrix:
    """C^T C with C of shape (rank, dim)"""
    if rank is None:
        rank = dim
    c = rng.standard_normal((rank, dim)) / np.sqrt(dim)
    return SymMatrix(c.T @ c)


def random_symmetric(rng: np.random.Generator, dim: int) -> SymMatrix:
    return SymMatrix(rng.standard_normal((dim, dim)))
