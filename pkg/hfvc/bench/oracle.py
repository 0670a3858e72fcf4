"""
Reference computations used to falsify the solver: exhaustive active-set enumeration
for small QPs, and random admissible velocity controls to compare crashing indexes against.
"""

from dataclasses import dataclass
from itertools import combinations

import numpy as np

import hfvc
from hfvc.bench.generator import random_orthonormal_rows
from hfvc.core import linalg
from hfvc.core.linalg import RankTol
from hfvc.core.qp import QpProblem
from hfvc.ochs.velocity import crashing_index, free_robot_motions, jcg_rank_condition
from hfvc.utils import stack_rows

log = hfvc.logger("bench")

FEASIBILITY_TOL = 1e-9


@dataclass(frozen=True)
class EnumeratedOptimum:
	x: np.ndarray
	objective: float
	active: tuple


def brute_force_qp(problem, tol: float = FEASIBILITY_TOL) -> EnumeratedOptimum | None:
	"""
	Minimize over every candidate active set: solve the equality-constrained KKT system
	with the chosen inequalities held tight and keep the best feasible stationary point.

	Exponential in the number of inequalities; only meant for small fuzzed problems.
	Returns None when no candidate is feasible.
	"""
	n = problem.n
	m_in = problem.A_in.shape[0]
	scale = 1.0 + np.abs(problem.b_in).max(initial=0.0) + np.abs(problem.b_eq).max(initial=0.0)
	best = None
	for size in range(min(m_in, n) + 1):
		for active in combinations(range(m_in), size):
			A = stack_rows(problem.A_eq, problem.A_in[list(active)], cols=n)
			b = np.concatenate([problem.b_eq, problem.b_in[list(active)]])
			m = A.shape[0]
			K = np.block([[problem.H, A.T], [A, np.zeros((m, m))]])
			rhs = np.concatenate([-problem.g, b])
			sol = np.linalg.lstsq(K, rhs, rcond=None)[0]
			if np.linalg.norm(K @ sol - rhs) > 1e-8 * (1.0 + np.linalg.norm(rhs)):
				continue

			x = sol[:n]
			if np.abs(problem.A_eq @ x - problem.b_eq).max(initial=0.0) > tol * scale:
				continue
			if (problem.A_in @ x - problem.b_in).max(initial=0.0) > tol * scale:
				continue
			objective = problem.objective(x)
			if best is None or objective < best.objective:
				best = EnumeratedOptimum(x=x, objective=objective, active=active)
	return best


def random_feasible_qp(rng, n: int, m_eq: int, m_in: int) -> QpProblem:
	"""A strictly convex QP with a known interior point."""
	M = rng.standard_normal((n, n))
	H = M.T @ M + 0.1 * np.eye(n)
	g = rng.standard_normal(n)
	x_feasible = rng.standard_normal(n)
	A_eq = rng.standard_normal((m_eq, n))
	A_in = rng.standard_normal((m_in, n))
	b_eq = A_eq @ x_feasible
	b_in = A_in @ x_feasible + np.abs(rng.standard_normal(m_in))
	return QpProblem.build(H, g, A_eq, b_eq, A_in, b_in)


def admissible_directions(model, mode: str = "minimal", tol: RankTol = linalg.DEFAULT_TOL) -> np.ndarray:
	"""
	Orthonormal rows spanning every admissible velocity control: Ū itself in maximal
	mode, K Ū (motions keeping the goal's null space uncontrolled) in minimal mode.
	"""
	U_bar = free_robot_motions(model.J, model.dof, tol)
	if mode == "maximal":
		return U_bar
	N = linalg.null_rows(stack_rows(model.J, model.G, cols=model.n), tol)
	K = linalg.null_rows(N @ U_bar.T, tol)
	return K @ U_bar


def sample_controls_in(basis, rows: int, count: int, rng) -> list[np.ndarray]:
	"""`count` random orthonormal `rows`-row matrices inside ROW(basis)."""
	basis = np.asarray(basis, dtype=float)
	if rows == 0 or count <= 0:
		return []
	return [random_orthonormal_rows(rng, rows, basis.shape[0]) @ basis for _ in range(count)]


def sample_alternative_controls(
	model, C, count: int, rng, mode: str = "minimal", tol: RankTol = linalg.DEFAULT_TOL
) -> list[np.ndarray]:
	"""
	Random velocity controls with as many rows as `C` that also enforce the goal.

	When the admissible space has exactly rows(C) dimensions every sample is a rotation of `C`.
	"""
	C = np.asarray(C, dtype=float).reshape(-1, model.n)
	if count <= 0 or C.shape[0] == 0:
		return []

	basis = admissible_directions(model, mode, tol)
	if basis.shape[0] < C.shape[0]:
		hfvc.throw(f"admissible space has {basis.shape[0]} rows, fewer than the {C.shape[0]} controlled")
	if basis.shape[0] == C.shape[0]:
		log.debug("admissible space is unique up to rotation")

	alternatives = []
	for _attempt in range(10):
		for candidate in sample_controls_in(basis, C.shape[0], count - len(alternatives), rng):
			if jcg_rank_condition(model.J, candidate, model.G, tol):
				alternatives.append(candidate)
		if len(alternatives) == count:
			break
	return alternatives


def oracle_gap(model, C, index: float, count: int, rng, mode: str = "minimal") -> float | None:
	"""Best crashing index among sampled alternatives minus `index`; negative means the solver was beaten."""
	alternatives = sample_alternative_controls(model, C, count, rng, mode)
	if not alternatives:
		return None
	best = min(crashing_index(model.J, candidate) for candidate in alternatives)
	return float(best - index)
