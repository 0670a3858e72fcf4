# Exit codes are read by hfvc.commands to map failures onto process status.

from contextlib import contextmanager


class HfvcError(Exception):
	exit_code = 3
	stage: str | None = None

	def __str__(self):
		message = super().__str__()
		if self.stage:
			return f"[{self.stage}] {message}"
		return message


class ValidationError(HfvcError):
	exit_code = 1
	pointer: str | None = None

	def __str__(self):
		message = super().__str__()
		if self.pointer is not None:
			return f"{self.pointer or '/'}: {message}"
		return message


class NonFiniteInputError(ValidationError):
	pass


class DimensionMismatchError(ValidationError):
	pass


class UndefinedInputError(ValidationError):
	pass


class InfeasibilityError(HfvcError):
	exit_code = 2
	reason: str | None = None


class InconsistentSystemError(InfeasibilityError):
	reason = "inconsistent_system"
	residual: float | None = None


class InfeasibleGoal(InfeasibilityError):
	"""
	The goal cannot be met by any velocity control.

	`reason` names the test that failed: necessary_condition, rank_condition,
	K_deficient or no_special_solution.
	"""

	stage = "velocity"


class GuardInfeasible(InfeasibilityError):
	"""The contact modes cannot be maintained: the force QP has no feasible point."""

	stage = "force"
	reason = "guard_infeasible"
	violation: float | None = None


class NumericalFailure(HfvcError):
	exit_code = 3
	reason = "numerical_failure"


class GoalRedundancyWarning(UserWarning):
	pass


INFEASIBLE_GOAL_REASONS = ("necessary_condition", "rank_condition", "K_deficient", "no_special_solution")


@contextmanager
def at_pointer(pointer: str):
	"""Attach `pointer` to ValidationErrors raised inside the block that carry none yet."""
	try:
		yield
	except ValidationError as e:
		if e.pointer is None:
			e.pointer = pointer
		raise
