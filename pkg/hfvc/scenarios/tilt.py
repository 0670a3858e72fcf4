"""
Block tilting: a hand presses on the top of a cube and rolls it forward about the
edge it stands on. All three contacts (hand-object and two table corners) stick.

Generalized velocity v = [object body twist (6), hand linear velocity (3)];
state q = [object position (3), object quaternion (4), hand position (3)].
"""

from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.linalg

import hfvc
from hfvc.exceptions import HfvcError
from hfvc.model.body import DofPartition
from hfvc.model.contact import ContactPoint
from hfvc.model.guards import build_guards
from hfvc.model.system import SystemModel
from hfvc.ochs.solution import HfvcSolution, SolveOptions
from hfvc.ochs.solver import ochs_solve
from hfvc.scenarios.kinematics import (
	check_unit,
	inverse_adjoint,
	quat_from_axis_angle,
	quat_rate_map,
	quat_rotation_jacobian,
	quat_to_matrix,
)
from hfvc.setup.config import (
	RIDGE_COUNT,
	TILT_ANGLE,
	TILT_AXIS,
	TILT_BLOCK_EDGE,
	TILT_BLOCK_MASS,
	TILT_COLUMNS,
	TILT_GRAVITY,
	TILT_HAND_OFFSET,
	TILT_MU_HAND,
	TILT_MU_TABLE,
	TILT_N_MIN,
	TILT_RATE,
	TILT_STEPS,
)
from hfvc.utils import csv_text, format_float

log = hfvc.logger("tilt")

CONTACT_TOL = 1e-6


@dataclass(frozen=True)
class TiltParams:
	edge: float = TILT_BLOCK_EDGE
	mass: float = TILT_BLOCK_MASS
	gravity: float = TILT_GRAVITY
	mu_hand: float = TILT_MU_HAND
	mu_table: float = TILT_MU_TABLE
	n_min: float = TILT_N_MIN
	rate: float = TILT_RATE
	angle: float = TILT_ANGLE
	steps: int = TILT_STEPS
	axis: tuple = TILT_AXIS
	hand_offset: float = TILT_HAND_OFFSET
	hand_weight: tuple = (0.0, 0.0, 0.0)
	ridge_count: int = RIDGE_COUNT

	def __post_init__(self):
		object.__setattr__(self, "axis", tuple(float(v) for v in self.axis))
		object.__setattr__(self, "hand_weight", tuple(float(v) for v in self.hand_weight))
		self.validate()

	def validate(self):
		axis = np.asarray(self.axis)
		if axis.shape != (3,) or not np.all(np.isfinite(axis)) or np.linalg.norm(axis) < 1e-12:
			hfvc.throw(f"tilt axis must be a non-zero 3-vector, got {self.axis}", pointer="/axis")
		unit = axis / np.linalg.norm(axis)
		if np.linalg.norm(unit - [0.0, 1.0, 0.0]) > 1e-9:
			hfvc.throw("tilt axis must point along +y, the table contact edge", pointer="/axis")
		if not self.edge > 0:
			hfvc.throw("block edge must be positive", pointer="/edge")
		if not self.mass >= 0 or not self.gravity >= 0:
			hfvc.throw("mass and gravity must be non-negative", pointer="/mass")
		for name in ("mu_hand", "mu_table", "n_min"):
			if not getattr(self, name) >= 0:
				hfvc.throw(f"{name} must be non-negative", pointer=f"/{name}")
		if self.steps < 1:
			hfvc.throw("steps must be at least 1", pointer="/steps")
		if not -0.5 <= self.hand_offset <= 0.5:
			hfvc.throw("hand_offset must lie on the top face, within [-0.5, 0.5]", pointer="/hand_offset")
		if len(self.hand_weight) != 3:
			hfvc.throw("hand_weight must have 3 entries", pointer="/hand_weight")

	@property
	def unit_axis(self) -> np.ndarray:
		axis = np.asarray(self.axis)
		return axis / np.linalg.norm(axis)

	@property
	def hand_point(self) -> np.ndarray:
		"""Hand contact on the top face, object coordinates (origin at the block centre)."""
		a = self.edge
		return np.array([self.hand_offset * a, 0.0, a / 2])

	@property
	def table_points(self) -> np.ndarray:
		"""Front bottom corners, object coordinates."""
		a = self.edge
		return np.array([[a / 2, -a / 2, -a / 2], [a / 2, a / 2, -a / 2]])

	@property
	def pivot(self) -> np.ndarray:
		"""World point on the line of contact; the block starts axis-aligned with its base on z = 0."""
		return np.array([self.edge / 2, 0.0, 0.0])

	def table_contacts_world(self) -> np.ndarray:
		return self.table_points + np.array([0.0, 0.0, self.edge / 2])

	def to_dict(self) -> dict:
		return asdict(self)


@dataclass(frozen=True)
class TiltState:
	p_object: np.ndarray
	q_object: np.ndarray
	p_hand: np.ndarray

	def __post_init__(self):
		object.__setattr__(self, "p_object", np.asarray(self.p_object, dtype=float).reshape(3))
		object.__setattr__(self, "q_object", check_unit(self.q_object))
		object.__setattr__(self, "p_hand", np.asarray(self.p_hand, dtype=float).reshape(3))

	@classmethod
	def at(cls, params: TiltParams, theta: float) -> "TiltState":
		"""The block rotated by `theta` about the contact edge, hand still on its contact point."""
		q_tilt = quat_from_axis_angle(params.unit_axis, theta)
		R = quat_to_matrix(q_tilt)
		p_object = params.pivot + R @ (np.array([0.0, 0.0, params.edge / 2]) - params.pivot)
		return cls(p_object, q_tilt, p_object + R @ params.hand_point)

	@property
	def rotation(self) -> np.ndarray:
		return quat_to_matrix(self.q_object)

	def as_vector(self) -> np.ndarray:
		return np.concatenate([self.p_object, self.q_object, self.p_hand])


def velocity_map(state: TiltState) -> np.ndarray:
	"""Omega(q), 10x9: q_dot = Omega @ v."""
	return scipy.linalg.block_diag(state.rotation, quat_rate_map(state.q_object), np.eye(3))


def constraint_jacobian(params: TiltParams, state: TiltState) -> np.ndarray:
	"""
	d Phi / d q for Phi = [p_H - (R p_hc + p_O); R p_tc,i + p_O - p_tc,i (world)], 9x10.

	The hand block is written so that its multiplier is the force on the hand.
	"""
	J_phi = np.zeros((9, 10))
	J_phi[0:3, 0:3] = -np.eye(3)
	J_phi[0:3, 3:7] = -quat_rotation_jacobian(state.q_object, params.hand_point)
	J_phi[0:3, 7:10] = np.eye(3)
	for i, point in enumerate(params.table_points):
		rows = slice(3 + 3 * i, 6 + 3 * i)
		J_phi[rows, 0:3] = np.eye(3)
		J_phi[rows, 3:7] = quat_rotation_jacobian(state.q_object, point)
	return J_phi


def check_state(params: TiltParams, state: TiltState):
	R = state.rotation
	hand_gap = np.linalg.norm(R @ params.hand_point + state.p_object - state.p_hand)
	if hand_gap > CONTACT_TOL:
		hfvc.throw(f"hand is {hand_gap:.3g} m away from its contact point")
	table = params.table_contacts_world()
	for i, point in enumerate(params.table_points):
		gap = np.linalg.norm(R @ point + state.p_object - table[i])
		if gap > CONTACT_TOL:
			hfvc.throw(f"table corner {i + 1} is {gap:.3g} m away from its contact point")


def goal_body_twist(params: TiltParams, state: TiltState) -> tuple[np.ndarray, np.ndarray]:
	"""G = [I_6 0] and b_G = Ad(g^-1) (-w x p_tc, w) * rate, the body twist of the tilt."""
	omega = params.unit_axis
	spatial = np.concatenate([-np.cross(omega, params.pivot), omega]) * params.rate
	b_G = inverse_adjoint(state.rotation, state.p_object) @ spatial
	G = np.hstack([np.eye(6), np.zeros((6, 3))])
	return G, b_G


def tilt_contacts(params: TiltParams, state: TiltState) -> list[ContactPoint]:
	"""Contacts for the guard rows: hand cone in the object frame, table cones in the world frame."""
	R = state.rotation
	table = params.table_contacts_world()
	up = np.array([0.0, 0.0, 1.0])
	return [
		ContactPoint(state.p_hand, R[:, 2], ("hand", "object"), mu=params.mu_hand, tangent=R[:, 0]),
		*(
			ContactPoint(table[i], up, ("object", "table"), mu=params.mu_table, tangent=[1.0, 0.0, 0.0])
			for i in range(2)
		),
	]


def tilt_model(params: TiltParams, state: TiltState) -> SystemModel:
	check_state(params, state)
	J = constraint_jacobian(params, state) @ velocity_map(state)
	G, b_G = goal_body_twist(params, state)

	weight = state.rotation.T @ np.array([0.0, 0.0, -params.mass * params.gravity])
	F = np.concatenate([weight, np.zeros(3), params.hand_weight])
	guard = build_guards(tilt_contacts(params, state), n_min=params.n_min, ridge_count=params.ridge_count, n=9)
	return SystemModel(
		dof=DofPartition(n_u=6, n_a=3),
		J=J,
		Jf=J,
		G=G,
		b_G=b_G,
		F=F,
		guard=guard,
		lambda_dim=9,
		labels={"scenario": "tilt"},
	)


@dataclass(frozen=True)
class TiltStep:
	step: int
	theta: float
	model: SystemModel = field(repr=False)
	solution: HfvcSolution = field(repr=False)

	@property
	def hand_force(self) -> np.ndarray:
		"""Force-controlled part of the hand command in world coordinates."""
		return self.solution.force_command()

	@property
	def y_fraction(self) -> float:
		force = self.hand_force
		norm = np.linalg.norm(force)
		return float(abs(force[1]) / norm) if norm > 0 else 0.0

	@property
	def min_guard_slack(self) -> float:
		f = np.zeros(9)
		f[6:] = self.solution.R_a.T @ self.solution.eta_a
		return float(self.model.guard.slack(self.solution.lam, f).min())

	def record(self) -> dict:
		s = self.solution
		row = {
			"step": self.step,
			"theta": self.theta,
			"status": s.status,
			"n_av": s.n_av,
			"n_af": s.n_af,
			"crashing_index": s.crashing_index,
			"w_av": s.w_av[0] if s.n_av == 1 else float(np.linalg.norm(s.w_av)),
		}
		for k in range(2):
			row[f"eta_af_{k + 1}"] = s.eta_af[k] if k < s.n_af else None
		force = self.hand_force
		row.update(
			{
				"force_x": force[0],
				"force_y": force[1],
				"force_z": force[2],
				"y_fraction": self.y_fraction,
				"min_guard_slack": self.min_guard_slack,
			}
		)
		return row


def tilt_angles(params: TiltParams) -> np.ndarray:
	return np.linspace(0.0, params.angle, params.steps)


def run_tilt(params: TiltParams | None = None, opts: SolveOptions | None = None) -> list[TiltStep]:
	"""
	Solve the hybrid control at every step of the tilt. The state follows the exact
	rotation about the contact edge. A failing step stops the run; the error carries `step`.
	"""
	params = params or TiltParams()
	steps = []
	for k, theta in enumerate(tilt_angles(params)):
		state = TiltState.at(params, theta)
		try:
			model = tilt_model(params, state)
			solution = ochs_solve(model, opts)
		except HfvcError as e:
			e.step = k
			log.error("tilt step %d (theta %.4f) failed: %s", k, theta, e)
			raise
		steps.append(TiltStep(k, float(theta), model, solution))
		log.debug("tilt step %d: n_av=%d crashing index %.3g", k, solution.n_av, solution.crashing_index)
	return steps


def tilt_csv(steps) -> str:
	def cell(value):
		if isinstance(value, str | int) and not isinstance(value, bool):
			return str(value)
		return format_float(value)

	records = (step.record() for step in steps)
	return csv_text(TILT_COLUMNS, ([cell(record[c]) for c in TILT_COLUMNS] for record in records))
