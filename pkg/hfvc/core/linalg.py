"""
Dense linear-algebra contracts shared by the model, the solver and the benchmark.

Every basis returned here is stored *by rows*: ``null_rows(A)`` has orthonormal rows spanning
NULL(A), ``row_basis(A)`` has orthonormal rows spanning ROW(A). All ranks are numerical ranks
taken relative to the largest singular value (see `RankTol`).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

import hfvc
from hfvc.exceptions import (
	DimensionMismatchError,
	InconsistentSystemError,
	NonFiniteInputError,
	NumericalFailure,
	UndefinedInputError,
)
from hfvc.setup.config import MIN_NORM_RESIDUAL_TOL, RANK_TOL


@dataclass(frozen=True)
class RankTol:
	relative_tol: float = RANK_TOL

	def __post_init__(self):
		if not self.relative_tol > 0:
			hfvc.throw(f"relative_tol must be positive, got {self.relative_tol}")

	def threshold(self, sigma_max: float) -> float:
		return self.relative_tol * sigma_max


DEFAULT_TOL = RankTol()


@dataclass(frozen=True)
class Svd:
	U: np.ndarray
	s: np.ndarray  # descending, length min(rows, cols)
	Vt: np.ndarray

	@property
	def sigma_max(self) -> float:
		return float(self.s[0]) if self.s.size else 0.0

	def rank(self, tol: RankTol = DEFAULT_TOL) -> int:
		return int(np.count_nonzero(self.s > tol.threshold(self.sigma_max)))


def as_matrix(A, name: str = "A") -> np.ndarray:
	"""Coerce `A` into a finite 2-D float array. 1-D input is read as a single row."""
	A = np.asarray(A, dtype=float)
	if A.ndim == 1:
		A = A.reshape(1, -1)
	if A.ndim != 2:
		hfvc.throw(f"{name} must be a matrix, got {A.ndim} dimensions", DimensionMismatchError)
	if not np.all(np.isfinite(A)):
		hfvc.throw(f"{name} has non-finite entries", NonFiniteInputError)
	return A


def svd(A) -> Svd:
	"""Full SVD, A = U diag(s) Vt, singular values sorted descending."""
	A = as_matrix(A)
	m, n = A.shape
	if m == 0 or n == 0:
		return Svd(np.eye(m), np.zeros(0), np.eye(n))

	try:
		U, s, Vt = scipy.linalg.svd(A, full_matrices=True, check_finite=False, lapack_driver="gesdd")
	except np.linalg.LinAlgError:
		# gesdd occasionally fails to converge where the QR-iteration driver succeeds
		try:
			U, s, Vt = scipy.linalg.svd(A, full_matrices=True, check_finite=False, lapack_driver="gesvd")
		except np.linalg.LinAlgError as e:
			hfvc.throw(f"SVD did not converge: {e}", NumericalFailure)
	return Svd(U, s, Vt)


def rank(A, tol: RankTol = DEFAULT_TOL) -> int:
	return svd(A).rank(tol)


def null_rows(A, tol: RankTol = DEFAULT_TOL) -> np.ndarray:
	"""Orthonormal rows spanning NULL(A); cols(A) - rank(A) rows."""
	decomposition = svd(A)
	return decomposition.Vt[decomposition.rank(tol) :].copy()


def row_basis(A, tol: RankTol = DEFAULT_TOL) -> np.ndarray:
	"""Orthonormal rows spanning ROW(A); rank(A) rows."""
	decomposition = svd(A)
	return decomposition.Vt[: decomposition.rank(tol)].copy()


def cond2(A, tol: RankTol = DEFAULT_TOL) -> float:
	"""
	2-norm condition number sigma_max / sigma_min.

	Returns ``math.inf`` when sigma_min falls below ``tol`` relative to sigma_max.
	"""
	decomposition = svd(A)
	sigma_max = decomposition.sigma_max
	if sigma_max == 0.0:
		hfvc.throw("condition number of a zero (or empty) matrix is undefined", UndefinedInputError)

	sigma_min = float(decomposition.s[-1])
	if sigma_min <= tol.threshold(sigma_max):
		return np.inf
	return sigma_max / sigma_min


def min_norm_solve(A, b, tol: RankTol = DEFAULT_TOL) -> np.ndarray:
	"""
	Minimum 2-norm x with Ax = b.

	Raises InconsistentSystemError (carrying the residual norm) when
	||Ax - b|| exceeds 1e-8 (1 + ||b||).
	"""
	A = as_matrix(A)
	b = np.asarray(b, dtype=float).reshape(-1)
	if b.shape[0] != A.shape[0]:
		hfvc.throw(f"rhs has {b.shape[0]} entries, matrix has {A.shape[0]} rows", DimensionMismatchError)
	if not np.all(np.isfinite(b)):
		hfvc.throw("rhs has non-finite entries", NonFiniteInputError)

	decomposition = svd(A)
	r = decomposition.rank(tol)
	U, s, Vt = decomposition.U, decomposition.s, decomposition.Vt
	x = Vt[:r].T @ ((U[:, :r].T @ b) / s[:r])

	residual = float(np.linalg.norm(A @ x - b))
	if residual > MIN_NORM_RESIDUAL_TOL * (1.0 + float(np.linalg.norm(b))):
		hfvc.throw(
			f"system is inconsistent (residual {residual:.3e})",
			InconsistentSystemError,
			residual=residual,
		)
	return x
