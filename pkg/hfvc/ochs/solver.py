import numpy as np

import hfvc
from hfvc.ochs.force import solve_force
from hfvc.ochs.solution import HfvcSolution, SolveOptions
from hfvc.ochs.velocity import complete_axes, crashing_index, solve_velocity
from hfvc.utils import stopwatch

log = hfvc.logger("ochs")


def ochs_solve(model, opts: SolveOptions | None = None) -> HfvcSolution:
	"""
	Optimally-conditioned hybrid servoing: velocity stage, axis completion, force stage.

	Raises InfeasibleGoal (stage "velocity"), GuardInfeasible (stage "force") or
	NumericalFailure.
	"""
	opts = opts or SolveOptions()

	with stopwatch() as velocity_time:
		velocity = solve_velocity(model, opts)
		axes = complete_axes(velocity.C, model.dof, opts.rank_tol)

	with stopwatch() as force_time:
		force = solve_force(model, axes.R_a, axes.n_af, opts.qp_limits)

	index = crashing_index(model.J, velocity.C, opts.rank_tol) if velocity.n_av else 1.0
	if np.isfinite(index) and index > opts.ill_conditioned_threshold:
		log.info("ill-conditioned solution, crashing index %.3g", index)

	return HfvcSolution(
		n_av=velocity.n_av,
		n_af=axes.n_af,
		C=velocity.C,
		R_a=axes.R_a,
		T=axes.T,
		w_av=velocity.w_av,
		eta_af=force.eta_af,
		crashing_index=float(index),
		timings={"velocity_us": velocity_time["us"], "force_us": force_time["us"]},
		lam=force.lam,
		eta_a=force.eta_a,
	)
