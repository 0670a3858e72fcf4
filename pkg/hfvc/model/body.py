# Copyright (c) 2024, hfvc contributors
# For license information, please see license.txt

from dataclasses import dataclass
from enum import Enum

import numpy as np

import hfvc
from hfvc.exceptions import DimensionMismatchError, ValidationError


class BodyKind(str, Enum):
	PLANAR = "planar"
	SPATIAL = "spatial"
	POINT = "point"
	ENVIRONMENT = "environment"


@dataclass(frozen=True)
class DofPartition:
	"""Generalized coordinates are ordered [unactuated | actuated]."""

	n_u: int
	n_a: int

	def __post_init__(self):
		if self.n_u < 0:
			hfvc.throw(f"n_u must be non-negative, got {self.n_u}")
		if self.n_a < 1:
			hfvc.throw(f"at least one actuated DOF is required, got n_a={self.n_a}")

	@property
	def n(self) -> int:
		return self.n_u + self.n_a

	@property
	def actuated(self) -> slice:
		return slice(self.n_u, self.n)

	@property
	def unactuated(self) -> slice:
		return slice(0, self.n_u)

	def selector(self) -> np.ndarray:
		"""S_a: the n x n matrix that zeroes the unactuated columns."""
		S = np.eye(self.n)
		S[: self.n_u, : self.n_u] = 0.0
		return S


@dataclass(frozen=True)
class Body:
	name: str
	kind: BodyKind
	actuated: bool = False
	origin: tuple | None = None

	def __post_init__(self):
		object.__setattr__(self, "kind", BodyKind(self.kind))
		if not self.name:
			hfvc.throw("body name must not be empty")
		if self.kind == BodyKind.ENVIRONMENT and self.actuated:
			hfvc.throw(f"environment body '{self.name}' cannot be actuated")

	@property
	def planar(self) -> bool:
		return self.kind == BodyKind.PLANAR

	def dof(self, dim: int) -> int:
		if self.kind == BodyKind.PLANAR:
			return 3
		if self.kind == BodyKind.SPATIAL:
			return 6
		if self.kind == BodyKind.POINT:
			return dim
		return 0

	def origin_in(self, dim: int) -> np.ndarray:
		if self.origin is None:
			return np.zeros(dim)
		origin = np.asarray(self.origin, dtype=float).reshape(-1)
		if origin.shape[0] != dim:
			hfvc.throw(
				f"origin of body '{self.name}' has {origin.shape[0]} entries, expected {dim}", DimensionMismatchError
			)
		return origin

	def point_velocity_map(self, x, dim: int) -> np.ndarray:
		"""
		P with v(x) = P @ twist for the point `x` rigidly attached to this body.

		Planar twists are (vx, vy, omega); spatial twists are (v_origin, omega) in world
		coordinates; point bodies move by pure translation.
		"""
		x = np.asarray(x, dtype=float)
		if self.kind == BodyKind.ENVIRONMENT:
			return np.zeros((dim, 0))
		if self.kind == BodyKind.POINT:
			return np.eye(dim)

		r = x - self.origin_in(dim)
		if self.kind == BodyKind.PLANAR:
			return np.array([[1.0, 0.0, -r[1]], [0.0, 1.0, r[0]]])
		return np.hstack([np.eye(3), -skew(r)])


def skew(r) -> np.ndarray:
	"""Cross-product matrix: skew(r) @ u == np.cross(r, u)."""
	return np.array([[0.0, -r[2], r[1]], [r[2], 0.0, -r[0]], [-r[1], r[0], 0.0]])


class BodyLayout:
	"""Column layout of the generalized velocity: unactuated bodies first, each group in declaration order."""

	def __init__(self, bodies):
		self.bodies = {}
		for body in bodies:
			if body.name in self.bodies:
				hfvc.throw(f"duplicate body name '{body.name}'")
			self.bodies[body.name] = body

		self.dim = self.scene_dim()
		self.columns = {}
		offset = 0
		for actuated in (False, True):
			for body in self.bodies.values():
				if body.actuated != actuated:
					continue
				self.columns[body.name] = slice(offset, offset + body.dof(self.dim))
				offset += body.dof(self.dim)

		n_a = sum(b.dof(self.dim) for b in self.bodies.values() if b.actuated)
		self.partition = DofPartition(n_u=offset - n_a, n_a=n_a)

	def scene_dim(self) -> int:
		kinds = {b.kind for b in self.bodies.values()}
		if BodyKind.PLANAR in kinds and BodyKind.SPATIAL in kinds:
			hfvc.throw("planar and spatial bodies cannot share a scene", ValidationError)
		return 2 if BodyKind.PLANAR in kinds else 3

	@property
	def n(self) -> int:
		return self.partition.n

	def body(self, name: str) -> Body:
		if name not in self.bodies:
			hfvc.throw(f"unknown body '{name}'")
		return self.bodies[name]

	def point_velocity_map(self, name: str, x) -> np.ndarray:
		"""dim x n block mapping the generalized velocity to the velocity of point `x` on body `name`."""
		body = self.body(name)
		P = np.zeros((self.dim, self.n))
		if body.kind != BodyKind.ENVIRONMENT:
			P[:, self.columns[name]] = body.point_velocity_map(x, self.dim)
		return P

	def body_goal(self, name: str, twist) -> tuple[np.ndarray, np.ndarray]:
		"""
		Goal rows commanding the twist of body `name`.

		`twist` has one entry per body coordinate; ``None`` leaves that coordinate free.
		"""
		body = self.body(name)
		if body.kind == BodyKind.ENVIRONMENT:
			hfvc.throw(f"environment body '{name}' has no coordinates to command")
		dof = body.dof(self.dim)
		if len(twist) != dof:
			hfvc.throw(f"twist for body '{name}' has {len(twist)} entries, expected {dof}", DimensionMismatchError)

		start = self.columns[name].start
		commanded = [(k, float(value)) for k, value in enumerate(twist) if value is not None]
		rows = np.zeros((len(commanded), self.n))
		for row, (k, _value) in enumerate(commanded):
			rows[row, start + k] = 1.0
		return rows, np.array([value for _k, value in commanded])
