"""
Small dense convex QP:

    minimize    1/2 x'Hx + g'x
    subject to  A_eq x  = b_eq
                A_in x <= b_in

Solved by a primal active-set method started from a phase-1 point (HiGHS LP through
scipy). Every returned solution carries its KKT residuals so callers can verify it.
"""

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.optimize import linprog

import hfvc
from hfvc.core import linalg
from hfvc.core.linalg import RankTol
from hfvc.exceptions import DimensionMismatchError, NumericalFailure, ValidationError
from hfvc.setup.config import QP_DUAL_FEAS_TOL, QP_KKT_TOL, QP_MAX_ITER, QP_SYMMETRY_TOL

log = hfvc.logger("qp")


class QpStatus(str, Enum):
	OPTIMAL = "optimal"
	INFEASIBLE = "infeasible"
	MAX_ITER = "max_iter"
	UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class QpProblem:
	H: np.ndarray
	g: np.ndarray
	A_eq: np.ndarray
	b_eq: np.ndarray
	A_in: np.ndarray
	b_in: np.ndarray

	@classmethod
	def build(cls, H, g=None, A_eq=None, b_eq=None, A_in=None, b_in=None) -> "QpProblem":
		H = np.atleast_2d(np.asarray(H, dtype=float))
		n = H.shape[1]
		g = np.zeros(n) if g is None else g
		A_eq = np.zeros((0, n)) if A_eq is None else A_eq
		b_eq = np.zeros(0) if b_eq is None else b_eq
		A_in = np.zeros((0, n)) if A_in is None else A_in
		b_in = np.zeros(0) if b_in is None else b_in
		return cls(H, g, A_eq, b_eq, A_in, b_in)

	def __post_init__(self):
		H = np.atleast_2d(np.asarray(self.H, dtype=float))
		n = H.shape[1]
		if H.shape != (n, n):
			hfvc.throw(f"H must be square, got {H.shape}", DimensionMismatchError)

		def matrix(name, value):
			value = np.asarray(value, dtype=float)
			if not value.size:
				return np.zeros((0, n))
			if value.ndim == 1 and value.shape[0] == n:
				return value[None, :]
			if value.ndim != 2 or value.shape[1] != n:
				hfvc.throw(f"{name} has shape {value.shape}, H has {n} columns", DimensionMismatchError)
			return value

		def vector(name, value, length):
			value = np.asarray(value, dtype=float).reshape(-1)
			if value.shape[0] != length:
				hfvc.throw(f"{name} has {value.shape[0]} entries, expected {length}", DimensionMismatchError)
			return value

		A_eq = matrix("A_eq", self.A_eq)
		A_in = matrix("A_in", self.A_in)
		g = vector("g", self.g, n)
		b_eq = vector("b_eq", self.b_eq, A_eq.shape[0])
		b_in = vector("b_in", self.b_in, A_in.shape[0])

		for name, value in (("H", H), ("g", g), ("A_eq", A_eq), ("b_eq", b_eq), ("A_in", A_in), ("b_in", b_in)):
			if not np.all(np.isfinite(value)):
				hfvc.throw(f"{name} has non-finite entries", ValidationError)

		scale = max(1.0, float(np.abs(H).max(initial=0.0)))
		if np.abs(H - H.T).max(initial=0.0) > QP_SYMMETRY_TOL * scale:
			hfvc.throw("H is not symmetric", ValidationError)
		H = 0.5 * (H + H.T)
		if n and np.linalg.eigvalsh(H)[0] < -QP_SYMMETRY_TOL * scale:
			hfvc.throw("H is not positive semidefinite", ValidationError)

		for name, value in (("H", H), ("g", g), ("A_eq", A_eq), ("b_eq", b_eq), ("A_in", A_in), ("b_in", b_in)):
			object.__setattr__(self, name, value)

	@property
	def n(self) -> int:
		return self.H.shape[0]

	def objective(self, x) -> float:
		x = np.asarray(x, dtype=float)
		return float(0.5 * x @ self.H @ x + self.g @ x)

	def lagrangian(self, x, y, z) -> float:
		return self.objective(x) + float(y @ (self.A_eq @ x - self.b_eq)) + float(z @ (self.A_in @ x - self.b_in))


@dataclass(frozen=True)
class KktResiduals:
	primal_eq: float
	primal_in: float
	stationarity: float
	complementarity: float
	dual_min: float

	def ok(self, tol: float = QP_KKT_TOL, dual_tol: float = QP_DUAL_FEAS_TOL) -> bool:
		return (
			self.primal_eq <= tol
			and self.primal_in <= tol
			and self.stationarity <= tol
			and self.complementarity <= tol
			and self.dual_min >= -dual_tol
		)


def kkt_residuals(problem: QpProblem, x, y, z) -> KktResiduals:
	slack = problem.A_in @ x - problem.b_in
	stationarity = problem.H @ x + problem.g + problem.A_eq.T @ y + problem.A_in.T @ z
	return KktResiduals(
		primal_eq=float(np.abs(problem.A_eq @ x - problem.b_eq).max(initial=0.0)),
		primal_in=float(max(0.0, slack.max(initial=0.0))),
		stationarity=float(np.abs(stationarity).max(initial=0.0)),
		complementarity=float(np.abs(z * slack).max(initial=0.0)),
		dual_min=float(z.min(initial=0.0)),
	)


@dataclass(frozen=True)
class QpSolution:
	x: np.ndarray
	eq_multipliers: np.ndarray
	in_multipliers: np.ndarray
	status: QpStatus
	iterations: int = 0
	objective: float = np.nan
	violation: float = 0.0  # lower bound on constraint violation when infeasible
	active_set: tuple = field(default_factory=tuple)
	kkt: KktResiduals | None = None

	@property
	def optimal(self) -> bool:
		return self.status == QpStatus.OPTIMAL


@dataclass(frozen=True)
class QpLimits:
	max_iter: int = QP_MAX_ITER
	max_time_s: float | None = None

	def __post_init__(self):
		if self.max_iter < 1:
			hfvc.throw(f"max_iter must be at least 1, got {self.max_iter}")


class ActiveSetSolver:
	"""Primal active-set method with a null-space step on the working set."""

	def __init__(self, limits: QpLimits | None = None, tol: RankTol | None = None, feas_tol: float = 1e-9):
		self.limits = limits or QpLimits()
		self.tol = tol or linalg.DEFAULT_TOL
		self.feas_tol = feas_tol

	def solve(self, problem: QpProblem) -> QpSolution:
		E, e, to_original, residual = self.reduce_equalities(problem)
		if residual is not None:
			return self.infeasible(problem, residual)

		x, violation = self.phase_one(problem, E, e)
		if violation is not None:
			return self.infeasible(problem, violation, x)

		return self.phase_two(problem, x, E, to_original)

	def reduce_equalities(self, problem: QpProblem):
		"""Replace A_eq x = b_eq by an orthonormal, full-row-rank equivalent E x = e."""
		decomposition = linalg.svd(problem.A_eq)
		r = decomposition.rank(self.tol)
		U_r, s_r, Vt_r = decomposition.U[:, :r], decomposition.s[:r], decomposition.Vt[:r]
		E = Vt_r
		e = (U_r.T @ problem.b_eq) / s_r

		residual = float(np.linalg.norm(problem.A_eq @ (E.T @ e) - problem.b_eq))
		if residual > self.feas_tol * (1.0 + float(np.linalg.norm(problem.b_eq))):
			return E, e, None, residual

		# multipliers of E map back to the original rows through U_r diag(1/s_r)
		to_original = U_r / s_r
		return E, e, to_original, None

	def phase_one(self, problem: QpProblem, E, e):
		n = problem.n
		if problem.A_in.shape[0] == 0:
			return E.T @ e, None

		m = problem.A_in.shape[0]
		c = np.zeros(n + 1)
		c[-1] = 1.0
		A_ub = np.hstack([problem.A_in, -np.ones((m, 1))])
		A_eq = np.hstack([E, np.zeros((E.shape[0], 1))]) if E.shape[0] else None
		b_eq = e if E.shape[0] else None
		bounds = [(None, None)] * n + [(0.0, None)]

		result = linprog(c, A_ub=A_ub, b_ub=problem.b_in, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
		if result.status != 0 or result.x is None:
			hfvc.throw(f"phase-1 LP failed: {result.message}", NumericalFailure)

		x, t = result.x[:n], float(result.x[-1])
		if t > self.feas_tol * (1.0 + float(np.abs(problem.b_in).max(initial=0.0))):
			return x, t
		return x, None

	def phase_two(self, problem: QpProblem, x, E, to_original) -> QpSolution:
		H, g, A_in, b_in = problem.H, problem.g, problem.A_in, problem.b_in
		m = A_in.shape[0]
		working: list[int] = []
		started = time.perf_counter()
		status = QpStatus.MAX_ITER
		y_reduced = np.zeros(E.shape[0])
		z = np.zeros(m)

		iteration = 0
		for iteration in range(1, self.limits.max_iter + 1):
			if self.limits.max_time_s is not None and time.perf_counter() - started > self.limits.max_time_s:
				break

			grad = H @ x + g
			A_w = np.vstack([E, A_in[working]]) if working else E
			p, is_ray = self.step(H, grad, A_w, problem.n)

			if not is_ray and np.linalg.norm(p) <= 1e-12 * (1.0 + np.linalg.norm(x)):
				multipliers = self.multipliers(A_w, grad)
				y_reduced = multipliers[: E.shape[0]]
				z_w = multipliers[E.shape[0] :]
				if not working or z_w.min() >= -QP_DUAL_FEAS_TOL:
					z = np.zeros(m)
					z[working] = np.maximum(z_w, 0.0)
					status = QpStatus.OPTIMAL
					break
				working.pop(int(np.argmin(z_w)))
				continue

			alpha, blocking = self.ratio_test(A_in, b_in, x, p, working, is_ray)
			if blocking is None and is_ray:
				log.debug("unbounded descent ray after %d iterations", iteration)
				status = QpStatus.UNBOUNDED
				break
			x = x + alpha * p
			if blocking is not None:
				working.append(blocking)

		y = to_original @ y_reduced if to_original.size else np.zeros(problem.A_eq.shape[0])
		kkt = kkt_residuals(problem, x, y, z)
		if status == QpStatus.OPTIMAL and not kkt.ok():
			log.warning("active-set solution misses KKT tolerances: %s", kkt)
		return QpSolution(
			x=x,
			eq_multipliers=y,
			in_multipliers=z,
			status=status,
			iterations=iteration,
			objective=problem.objective(x),
			active_set=tuple(sorted(working)),
			kkt=kkt,
		)

	def step(self, H, grad, A_w, n):
		"""Minimize the quadratic model over NULL(A_w); returns (step, is_descent_ray)."""
		Z = linalg.null_rows(A_w, self.tol) if A_w.shape[0] else np.eye(n)
		if Z.shape[0] == 0:
			return np.zeros(n), False

		H_r = Z @ H @ Z.T
		g_r = Z @ grad
		decomposition = linalg.svd(H_r)
		r = decomposition.rank(self.tol)
		U, s, Vt = decomposition.U, decomposition.s, decomposition.Vt
		u = -(Vt[:r].T @ ((U[:, :r].T @ g_r) / s[:r]))

		flat = Vt[r:]
		ray = flat.T @ (flat @ g_r)
		if np.linalg.norm(ray) > 1e-10 * (1.0 + np.linalg.norm(g_r)):
			# zero curvature along a descent direction
			return -(Z.T @ ray), True
		return Z.T @ u, False

	@staticmethod
	def multipliers(A_w, grad):
		if A_w.shape[0] == 0:
			return np.zeros(0)
		solution, *_ = np.linalg.lstsq(A_w.T, -grad, rcond=None)
		return solution

	@staticmethod
	def ratio_test(A_in, b_in, x, p, working, is_ray):
		alpha = np.inf if is_ray else 1.0
		blocking = None
		if A_in.shape[0] == 0:
			return alpha, blocking

		rates = A_in @ p
		slack = b_in - A_in @ x
		threshold = 1e-12 * (1.0 + np.linalg.norm(p))
		active = set(working)
		for i in np.flatnonzero(rates > threshold):
			if i in active:
				continue
			candidate = max(slack[i], 0.0) / rates[i]
			if candidate < alpha:
				alpha, blocking = candidate, int(i)
		return alpha, blocking

	@staticmethod
	def infeasible(problem: QpProblem, violation: float, x=None) -> QpSolution:
		log.debug("QP infeasible, violation lower bound %.3e", violation)
		return QpSolution(
			x=np.full(problem.n, np.nan) if x is None else x,
			eq_multipliers=np.zeros(problem.A_eq.shape[0]),
			in_multipliers=np.zeros(problem.A_in.shape[0]),
			status=QpStatus.INFEASIBLE,
			violation=float(violation),
		)


def qp_solve(problem: QpProblem, limits: QpLimits | None = None) -> QpSolution:
	return ActiveSetSolver(limits).solve(problem)
