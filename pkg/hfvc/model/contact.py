# Copyright (c) 2024, hfvc contributors
# For license information, please see license.txt

"""
Point contacts and the velocity / force Jacobians they induce.

Conventions: the contact normal points into `body_a`; the relative velocity is
v_a(x) - v_b(x); λ is the force exerted on `body_a` (and its opposite on `body_b`).
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

import hfvc
from hfvc.exceptions import DimensionMismatchError, ValidationError, at_pointer
from hfvc.model.body import BodyKind, BodyLayout
from hfvc.setup.config import TANGENCY_TOL, UNIT_NORMAL_TOL
from hfvc.utils import normalize_rows

log = hfvc.logger("model")


class ContactMode(str, Enum):
	STICKING = "sticking"
	SLIDING = "sliding"


@dataclass(frozen=True)
class ContactPoint:
	position: np.ndarray
	normal: np.ndarray
	pair: tuple[str, str]
	mode: ContactMode = ContactMode.STICKING
	mu: float = 0.0
	direction: np.ndarray | None = None  # sliding direction of body_a relative to body_b
	tangent: np.ndarray | None = None  # first axis of the local frame

	def __post_init__(self):
		object.__setattr__(self, "mode", ContactMode(self.mode))
		object.__setattr__(self, "position", np.asarray(self.position, dtype=float).reshape(-1))
		object.__setattr__(self, "normal", np.asarray(self.normal, dtype=float).reshape(-1))
		object.__setattr__(self, "pair", tuple(self.pair))
		for name in ("direction", "tangent"):
			value = getattr(self, name)
			if value is not None:
				object.__setattr__(self, name, np.asarray(value, dtype=float).reshape(-1))
		self.validate()

	def validate(self):
		self.validate_geometry()
		self.validate_friction()
		self.validate_mode()

	def validate_geometry(self):
		if self.position.shape[0] not in (2, 3):
			hfvc.throw(f"contact position must have 2 or 3 entries, got {self.position.shape[0]}", DimensionMismatchError)
		if self.normal.shape != self.position.shape:
			hfvc.throw("contact normal and position differ in dimension", DimensionMismatchError)
		if not (np.all(np.isfinite(self.position)) and np.all(np.isfinite(self.normal))):
			hfvc.throw("contact geometry has non-finite entries")
		if abs(np.linalg.norm(self.normal) - 1.0) > UNIT_NORMAL_TOL:
			hfvc.throw(f"contact normal must be a unit vector, has norm {np.linalg.norm(self.normal):.15g}")
		if len(self.pair) != 2 or self.pair[0] == self.pair[1]:
			hfvc.throw(f"contact pair must name two distinct bodies, got {self.pair}")
		if self.tangent is not None:
			self.check_tangent(self.tangent, "tangent")

	def validate_friction(self):
		if not self.mu >= 0:
			hfvc.throw(f"friction coefficient must be non-negative, got {self.mu}")

	def validate_mode(self):
		if self.mode == ContactMode.SLIDING:
			if self.direction is None:
				hfvc.throw("sliding contact needs a sliding direction")
			self.check_tangent(self.direction, "direction")
		elif self.direction is not None:
			hfvc.throw("only sliding contacts take a sliding direction")

	def check_tangent(self, value, name):
		if value.shape != self.normal.shape:
			hfvc.throw(f"contact {name} and normal differ in dimension", DimensionMismatchError)
		if abs(np.linalg.norm(value) - 1.0) > UNIT_NORMAL_TOL:
			hfvc.throw(f"contact {name} must be a unit vector")
		if abs(value @ self.normal) > TANGENCY_TOL:
			hfvc.throw(f"contact {name} must be orthogonal to the normal")

	@property
	def dim(self) -> int:
		return self.position.shape[0]

	@property
	def sticking(self) -> bool:
		return self.mode == ContactMode.STICKING

	@property
	def lambda_dim(self) -> int:
		return self.dim if self.sticking else 1

	def frame(self) -> np.ndarray:
		"""
		Rotation R_c whose columns are the local axes (tangents first, normal last).

		Local force components are R_c.T @ λ.
		"""
		n = self.normal
		if self.dim == 2:
			t = self.tangent if self.tangent is not None else np.array([-n[1], n[0]])
			return np.column_stack([t, n])

		t1 = self.tangent if self.tangent is not None else self.direction
		if t1 is None:
			# least-aligned world axis, lowest index on ties
			axis = np.eye(3)[int(np.argmin(np.abs(n)))]
			t1 = axis - (axis @ n) * n
			t1 = t1 / np.linalg.norm(t1)
		t2 = np.cross(n, t1)
		return np.column_stack([t1, t2, n])

	def relative_velocity_map(self, layout: BodyLayout) -> np.ndarray:
		body_a, body_b = self.pair
		return layout.point_velocity_map(body_a, self.position) - layout.point_velocity_map(body_b, self.position)

	def constraint_rows(self, layout: BodyLayout) -> np.ndarray:
		"""Rows of J: normal plus tangents when sticking, normal only when sliding."""
		P = self.relative_velocity_map(layout)
		if not self.sticking:
			return (self.normal @ P).reshape(1, -1)
		R_c = self.frame()
		return np.vstack([R_c[:, -1] @ P, *(R_c[:, k] @ P for k in range(self.dim - 1))])

	def force_rows(self, layout: BodyLayout) -> np.ndarray:
		"""Rows of J': world force axes when sticking, the friction-folded normal when sliding."""
		P = self.relative_velocity_map(layout)
		if self.sticking:
			return P
		return ((self.normal - self.mu * self.direction) @ P).reshape(1, -1)


def check_contacts(layout: BodyLayout, contacts):
	for i, contact in enumerate(contacts):
		if contact.dim != layout.dim:
			hfvc.throw(
				f"contact {i} is {contact.dim}-D in a {layout.dim}-D scene", DimensionMismatchError, pointer=f"/contacts/{i}"
			)
		with at_pointer(f"/contacts/{i}/pair"):
			kinds = [layout.body(name).kind for name in contact.pair]
		if all(kind == BodyKind.ENVIRONMENT for kind in kinds):
			hfvc.throw(
				f"contact {i} joins two environment bodies and constrains nothing",
				ValidationError,
				pointer=f"/contacts/{i}/pair",
			)


def assemble_jacobians(bodies, contacts) -> tuple[np.ndarray, np.ndarray, int]:
	"""
	Stack the velocity constraint J and the force transmission J' of all contacts.

	J rows are scaled to unit norm; J' rows keep force units so λ stays physical.
	"""
	layout = bodies if isinstance(bodies, BodyLayout) else BodyLayout(bodies)
	check_contacts(layout, contacts)

	n = layout.n
	J = [np.zeros((0, n))]
	Jf = [np.zeros((0, n))]
	for contact in contacts:
		J.append(contact.constraint_rows(layout))
		Jf.append(contact.force_rows(layout))

	J = normalize_rows(np.vstack(J))
	Jf = np.vstack(Jf)
	log.debug("assembled J %s and J' %s from %d contacts", J.shape, Jf.shape, len(contacts))
	return J, Jf, Jf.shape[0]
