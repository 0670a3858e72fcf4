"""Residual checks that a solved HFVC honours the goal, the algebra and the force balance."""

from dataclasses import dataclass, field

import numpy as np

from hfvc.core import linalg
from hfvc.setup.config import (
	GOAL_INCLUSION_NULL_TOL,
	GOAL_INCLUSION_SOLUTION_TOL,
	GUARD_SLACK_TOL,
	NEWTON_RESIDUAL_TOL,
	ORTHONORMALITY_TOL,
)
from hfvc.utils import stack_rows


@dataclass
class CheckReport:
	residuals: dict = field(default_factory=dict)
	limits: dict = field(default_factory=dict)

	def add(self, name: str, residual: float, limit: float):
		self.residuals[name] = float(residual)
		self.limits[name] = float(limit)

	def failures(self) -> list[str]:
		return [name for name, value in self.residuals.items() if not value <= self.limits[name]]

	@property
	def ok(self) -> bool:
		return not self.failures()


def goal_null_residual(model, C) -> float:
	"""‖G N.T‖ with N = null_rows([J; C]): the goal must vanish on every uncontrolled motion."""
	if model.G.shape[0] == 0:
		return 0.0
	N = linalg.null_rows(stack_rows(model.J, C, cols=model.n))
	if N.shape[0] == 0:
		return 0.0
	return float(np.linalg.norm(model.G @ N.T, 2))


def goal_solution_residual(model, C, w_av) -> float:
	"""‖G v° - b_G‖ for the min-norm v° with [J; C] v° = [0; w_av]."""
	JC = stack_rows(model.J, C, cols=model.n)
	rhs = np.concatenate([np.zeros(model.J.shape[0]), w_av])
	v = np.linalg.lstsq(JC, rhs, rcond=None)[0] if JC.shape[0] else np.zeros(model.n)
	return float(np.linalg.norm(model.G @ v - model.b_G))


def orthonormality_residual(A) -> float:
	A = np.asarray(A, dtype=float)
	if A.shape[0] == 0:
		return 0.0
	return float(np.abs(A @ A.T - np.eye(A.shape[0])).max())


def check_solution(model, solution, minimal: bool | None = None) -> CheckReport:
	report = CheckReport()
	C = solution.C
	report.add("goal_inclusion_null", goal_null_residual(model, C), GOAL_INCLUSION_NULL_TOL)
	report.add("goal_inclusion_solution", goal_solution_residual(model, C, solution.w_av), GOAL_INCLUSION_SOLUTION_TOL)
	report.add("C_orthonormal", orthonormality_residual(C), ORTHONORMALITY_TOL)
	report.add("R_a_orthonormal", orthonormality_residual(solution.R_a), ORTHONORMALITY_TOL)
	report.add("T_orthonormal", orthonormality_residual(solution.T), ORTHONORMALITY_TOL)
	report.add("C_unactuated", np.abs(C[:, model.dof.unactuated]).max(initial=0.0), 0.0)
	report.add("T_last_rows", np.abs(solution.T[solution.T.shape[0] - solution.n_av :] - C).max(initial=0.0), 0.0)
	report.add("dimension_split", abs(solution.n_av + solution.n_af - model.dof.n_a), 0.0)

	if minimal:
		expected = linalg.rank(stack_rows(model.J, model.G, cols=model.n)) - linalg.rank(model.J)
		report.add("minimal_dimension", abs(solution.n_av - expected), 0.0)

	if solution.lam is not None:
		f = np.zeros(model.n)
		f[model.dof.actuated] = solution.R_a.T @ solution.eta_a
		newton = model.Jf.T @ solution.lam + f + model.F
		report.add("newton", np.abs(newton).max(initial=0.0), NEWTON_RESIDUAL_TOL)
		slack = model.guard.slack(solution.lam, f)
		report.add("guard_violation", max(0.0, -slack.min(initial=0.0)), GUARD_SLACK_TOL)
	return report
