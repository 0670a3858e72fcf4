# Copyright (c) 2024, hfvc contributors
# For license information, please see license.txt

import warnings
from dataclasses import dataclass, field

import numpy as np

import hfvc
from hfvc.core import linalg
from hfvc.core.linalg import RankTol
from hfvc.exceptions import DimensionMismatchError, GoalRedundancyWarning
from hfvc.model.body import BodyLayout, DofPartition
from hfvc.model.contact import assemble_jacobians
from hfvc.model.guards import GuardConditions, build_guards
from hfvc.setup.config import N_MIN, RIDGE_COUNT

log = hfvc.logger("model")


def frozen_array(value, shape) -> np.ndarray:
	value = np.array(value, dtype=float).reshape(shape)
	value.setflags(write=False)
	return value


@dataclass(frozen=True)
class SystemModel:
	"""
	Everything the solver needs about one quasi-static contact configuration.

	J v = 0 are the contact velocity constraints, G v = b_G the goal,
	J'.T λ + f + F = 0 the force balance and `guard` the mode-keeping inequalities.
	"""

	dof: DofPartition
	J: np.ndarray
	Jf: np.ndarray
	G: np.ndarray
	b_G: np.ndarray
	F: np.ndarray
	guard: GuardConditions
	lambda_dim: int
	labels: dict = field(default_factory=dict, compare=False)

	def __post_init__(self):
		n = self.dof.n
		object.__setattr__(self, "J", frozen_array(self.J, (-1, n)))
		object.__setattr__(self, "Jf", frozen_array(self.Jf, (-1, n)))
		object.__setattr__(self, "G", frozen_array(self.G, (-1, n)))
		object.__setattr__(self, "b_G", frozen_array(self.b_G, (-1,)))
		object.__setattr__(self, "F", frozen_array(self.F, (-1,)))
		self.validate()

	def validate(self):
		n = self.dof.n
		for name in ("J", "Jf", "G", "b_G", "F"):
			if not np.all(np.isfinite(getattr(self, name))):
				hfvc.throw(f"{name} has non-finite entries")
		if self.Jf.shape[0] != self.lambda_dim:
			hfvc.throw(f"J' has {self.Jf.shape[0]} rows, expected lambda_dim={self.lambda_dim}", DimensionMismatchError)
		if self.b_G.shape[0] != self.G.shape[0]:
			hfvc.throw(f"b_G has {self.b_G.shape[0]} entries, G has {self.G.shape[0]} rows", DimensionMismatchError)
		if self.F.shape[0] != n:
			hfvc.throw(f"F has {self.F.shape[0]} entries, expected {n}", DimensionMismatchError)
		if self.guard.Lambda.shape[1] != self.lambda_dim + n:
			hfvc.throw("guard matrix must span [λ; f]", DimensionMismatchError)

	@property
	def n(self) -> int:
		return self.dof.n

	@classmethod
	def from_matrices(cls, J, G, b_G, n_u: int, n_a: int, F=None, Jf=None, guard=None) -> "SystemModel":
		"""Model given directly by its matrices; without J' there are no contact forces."""
		dof = DofPartition(n_u, n_a)
		n = dof.n
		Jf = np.zeros((0, n)) if Jf is None else np.asarray(Jf, dtype=float).reshape(-1, n)
		if guard is None:
			guard = GuardConditions(np.zeros((0, Jf.shape[0] + n)), np.zeros(0))
		return cls(
			dof=dof,
			J=np.zeros((0, n)) if J is None or not np.size(J) else np.asarray(J, dtype=float).reshape(-1, n),
			Jf=Jf,
			G=np.zeros((0, n)) if G is None or not np.size(G) else np.asarray(G, dtype=float).reshape(-1, n),
			b_G=np.asarray(b_G, dtype=float).reshape(-1),
			F=np.zeros(n) if F is None else F,
			guard=guard,
			lambda_dim=Jf.shape[0],
		)


def build_goal(G, b_G, J, tol: RankTol = linalg.DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
	"""
	Validate the goal G v = b_G against the contact constraints J.

	A goal row that is already implied by the contacts (or by other goal rows) is
	redundant; this emits a GoalRedundancyWarning and is not an error.
	"""
	J = np.asarray(J, dtype=float)
	n = J.shape[1]
	G = np.asarray(G, dtype=float).reshape(-1, n) if np.size(G) else np.zeros((0, n))
	b_G = np.asarray(b_G, dtype=float).reshape(-1)

	if G.shape[0] > n:
		hfvc.throw(f"goal has {G.shape[0]} rows but only {n} DOF", DimensionMismatchError, pointer="/goal/rows")
	if b_G.shape[0] != G.shape[0]:
		hfvc.throw(
			f"goal rhs has {b_G.shape[0]} entries, goal has {G.shape[0]} rows", DimensionMismatchError, pointer="/goal/rhs"
		)

	if G.shape[0]:
		stacked = linalg.rank(np.vstack([J, G]), tol)
		expected = linalg.rank(J, tol) + G.shape[0]
		if stacked < expected:
			message = f"goal has {expected - stacked} redundant row(s): rank([J;G]) = {stacked} < rank(J) + rows(G) = {expected}"
			log.warning(message)
			warnings.warn(message, GoalRedundancyWarning, stacklevel=2)
	return G, b_G


def build_model(
	bodies,
	contacts,
	goal_rows=None,
	goal_rhs=None,
	external_force=None,
	n_min: float = N_MIN,
	ridge_count: int = RIDGE_COUNT,
) -> SystemModel:
	layout = bodies if isinstance(bodies, BodyLayout) else BodyLayout(bodies)
	J, Jf, lambda_dim = assemble_jacobians(layout, contacts)
	G, b_G = build_goal(
		goal_rows if goal_rows is not None else np.zeros((0, layout.n)),
		goal_rhs if goal_rhs is not None else np.zeros(0),
		J,
	)
	F = np.zeros(layout.n) if external_force is None else np.asarray(external_force, dtype=float).reshape(-1)
	if F.shape[0] != layout.n:
		hfvc.throw(
			f"external force has {F.shape[0]} entries, expected {layout.n}",
			DimensionMismatchError,
			pointer="/external_force",
		)

	guard = build_guards(contacts, n_min=n_min, ridge_count=ridge_count, n=layout.n)
	labels = {"bodies": {name: (s.start, s.stop) for name, s in layout.columns.items()}}
	return SystemModel(layout.partition, J, Jf, G, b_G, F, guard, lambda_dim, labels)
