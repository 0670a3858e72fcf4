"""
Velocity stage: choose the velocity-controlled directions C and their magnitudes w_av,
then complete them into the actuated-space transform R_a.
"""

import numpy as np
import scipy.linalg

import hfvc
from hfvc.core import linalg
from hfvc.core.linalg import RankTol
from hfvc.exceptions import InconsistentSystemError, InfeasibleGoal, UndefinedInputError
from hfvc.model.body import DofPartition
from hfvc.ochs.solution import ControlAxes, SolveOptions, VelocityControl
from hfvc.utils import normalize_rows, stack_rows

log = hfvc.logger("ochs")


def crashing_index(J, C, tol: RankTol = linalg.DEFAULT_TOL) -> float:
	"""
	cond2 of [row_basis(J); C with unit rows].

	1 when C is orthogonal to the constraints, +inf when some velocity command
	fights a contact constraint.
	"""
	C = linalg.as_matrix(C, "C")
	if C.shape[0] == 0:
		hfvc.throw("crashing index needs at least one velocity-controlled row", UndefinedInputError)
	if np.any(np.linalg.norm(C, axis=1) == 0.0):
		hfvc.throw("crashing index is undefined for a zero control row", UndefinedInputError)

	J = np.asarray(J, dtype=float).reshape(-1, C.shape[1])
	stacked = np.vstack([linalg.row_basis(J, tol), normalize_rows(C)])
	if stacked.shape[0] > stacked.shape[1]:
		return np.inf
	return linalg.cond2(stacked, tol)


def free_robot_motions(J, dof: DofPartition, tol: RankTol = linalg.DEFAULT_TOL) -> np.ndarray:
	"""Ū: orthonormal rows spanning the actuated parts of the motions allowed by J v = 0."""
	J = np.asarray(J, dtype=float).reshape(-1, dof.n)
	U = linalg.null_rows(J, tol)
	basis = linalg.row_basis(U[:, dof.actuated], tol)
	U_bar = np.zeros((basis.shape[0], dof.n))
	U_bar[:, dof.actuated] = basis
	return U_bar


def jcg_rank_condition(J, C, G, tol: RankTol = linalg.DEFAULT_TOL) -> bool:
	n = G.shape[1]
	JC = stack_rows(J, C, cols=n)
	return linalg.rank(JC, tol) == linalg.rank(stack_rows(JC, G, cols=n), tol)


def order_by_conditioning(K, U_bar, J, tol: RankTol = linalg.DEFAULT_TOL) -> np.ndarray:
	"""
	Rotate the rows of K within their span so that leading rows map (through Ū) to the
	directions farthest from ROW(J).

	The first k rows are a k-dim choice of directions. solve_velocity passes K with
	exactly n_av rows once the rank test holds, so there this just fixes the row order.
	"""
	J_hat = linalg.row_basis(J, tol)
	n = U_bar.shape[1]
	M = K @ U_bar @ (np.eye(n) - J_hat.T @ J_hat)
	return linalg.svd(M).U.T @ K


def infeasible(reason: str, message: str):
	log.debug("infeasible goal (%s): %s", reason, message)
	hfvc.throw(message, InfeasibleGoal, reason=reason)


def solve_velocity(model, opts: SolveOptions | None = None) -> VelocityControl:
	opts = opts or SolveOptions()
	tol = opts.rank_tol
	J, G, b_G, n = model.J, model.G, model.b_G, model.n
	JG = stack_rows(J, G, cols=n)

	n_av_min = linalg.rank(JG, tol) - linalg.rank(J, tol)
	U_bar = free_robot_motions(J, model.dof, tol)
	if U_bar.shape[0] < n_av_min:
		infeasible(
			"necessary_condition",
			f"the robot has {U_bar.shape[0]} free motion(s) but the goal needs {n_av_min} velocity-controlled direction(s)",
		)
	if not jcg_rank_condition(J, U_bar, G, tol):
		infeasible("rank_condition", "the goal moves directions that no robot motion can drive")

	if not opts.minimal:
		C = U_bar
	elif n_av_min == 0:
		C = np.zeros((0, n))
	else:
		N = linalg.null_rows(JG, tol)
		K = linalg.null_rows(N @ U_bar.T, tol)
		if K.shape[0] < n_av_min:
			infeasible("K_deficient", f"only {K.shape[0]} admissible direction(s) for {n_av_min} required")
		K = order_by_conditioning(K, U_bar, J, tol)
		C = K[:n_av_min] @ U_bar
		if not jcg_rank_condition(J, C, G, tol):
			infeasible("rank_condition", "no velocity control of minimal dimension enforces the goal")

	try:
		v_star = linalg.min_norm_solve(JG, np.concatenate([np.zeros(J.shape[0]), b_G]), tol)
	except InconsistentSystemError as e:
		infeasible("no_special_solution", f"goal contradicts the contact constraints (residual {e.residual:.3e})")

	w_av = C @ v_star
	log.debug("velocity stage: n_av=%d of %d free motions", C.shape[0], U_bar.shape[0])
	return VelocityControl(n_av=C.shape[0], C=C, w_av=w_av, U_bar=U_bar, v_star=v_star)


def complete_axes(C, dof: DofPartition, tol: RankTol = linalg.DEFAULT_TOL) -> ControlAxes:
	"""Expand the actuated block of C into the orthogonal R_a = [force rows; R_C] and T = diag(I_u, R_a)."""
	C = np.asarray(C, dtype=float).reshape(-1, dof.n)
	if np.abs(C[:, dof.unactuated]).max(initial=0.0) > 0.0:
		hfvc.throw("velocity-controlled rows must not touch unactuated coordinates")

	R_C = C[:, dof.actuated]
	if R_C.shape[0] > dof.n_a:
		hfvc.throw(f"{R_C.shape[0]} velocity-controlled rows exceed {dof.n_a} actuated DOF")
	R_a = np.vstack([linalg.null_rows(R_C, tol), R_C])
	T = scipy.linalg.block_diag(np.eye(dof.n_u), R_a)
	return ControlAxes(n_af=dof.n_a - R_C.shape[0], R_a=R_a, T=T)
