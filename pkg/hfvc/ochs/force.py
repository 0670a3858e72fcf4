import numpy as np

import hfvc
from hfvc.core.qp import QpLimits, QpProblem, QpStatus, qp_solve
from hfvc.exceptions import GuardInfeasible, NumericalFailure
from hfvc.ochs.solution import ForceControl

log = hfvc.logger("ochs")


def force_problem(model, R_a) -> QpProblem:
	"""
	QP over x = [λ; η_a] with cost λ'λ + η_a'η_a.

	Force balance J'.T λ + f + F = 0 and the guards are written with the actuator
	force f = [0_u; R_a.T η_a].
	"""
	dof, ell = model.dof, model.lambda_dim
	actuation = np.zeros((dof.n, dof.n_a))
	actuation[dof.actuated] = R_a.T

	A_eq = np.hstack([model.Jf.T, actuation])
	Lambda = model.guard.Lambda
	A_in = np.hstack([Lambda[:, :ell], Lambda[:, ell:][:, dof.actuated] @ R_a.T])
	return QpProblem.build(2 * np.eye(ell + dof.n_a), None, A_eq, -model.F, A_in, model.guard.b_Lambda)


def solve_force(model, R_a, n_af: int, limits: QpLimits | None = None) -> ForceControl:
	problem = force_problem(model, R_a)
	solution = qp_solve(problem, limits)

	if solution.status == QpStatus.INFEASIBLE:
		hfvc.throw(
			f"contact modes cannot be maintained (violation >= {solution.violation:.3e})",
			GuardInfeasible,
			violation=solution.violation,
		)
	if solution.status == QpStatus.MAX_ITER:
		hfvc.throw(
			f"force QP hit the iteration cap after {solution.iterations} iterations",
			NumericalFailure,
			stage="force",
			reason="qp_max_iter",
		)
	if solution.status != QpStatus.OPTIMAL:
		hfvc.throw(f"force QP ended with status {solution.status.value}", NumericalFailure, stage="force")
	if not solution.kkt.ok():
		hfvc.throw(f"force QP solution fails its KKT check: {solution.kkt}", NumericalFailure, stage="force")

	ell = model.lambda_dim
	lam, eta_a = solution.x[:ell], solution.x[ell:]
	log.debug("force stage: |λ|=%.4g |η_a|=%.4g in %d iterations", np.linalg.norm(lam), np.linalg.norm(eta_a), solution.iterations)
	return ForceControl(eta_af=eta_a[:n_af], eta_a=eta_a, lam=lam, qp=solution)
