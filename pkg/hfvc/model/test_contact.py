# Copyright (c) 2024, hfvc contributors
# See license.txt

import numpy as np
from scipy.spatial.transform import Rotation

from hfvc.core import linalg
from hfvc.exceptions import ValidationError
from hfvc.model.body import Body, BodyLayout, skew
from hfvc.model.contact import ContactMode, ContactPoint, assemble_jacobians
from hfvc.tests.utils import HfvcTestCase


def planar_bodies():
	return [Body("block", "planar"), Body("ground", "environment"), Body("pusher", "point", actuated=True)]


def unit(v):
	v = np.asarray(v, dtype=float)
	return v / np.linalg.norm(v)


def random_tangent(rng, normal):
	t = rng.standard_normal(3)
	t -= (t @ normal) * normal
	return t / np.linalg.norm(t)


def world_point_velocity(v, columns, body, x):
	"""Independent rigid-body point velocity for spatial or point bodies."""
	if body.kind == "environment":
		return np.zeros(3)
	twist = v[columns[body.name]]
	if body.kind == "point":
		return twist
	return twist[:3] + np.cross(twist[3:], x - body.origin_in(3))


class TestBodyLayout(HfvcTestCase):
	def test_unactuated_columns_come_first(self):
		layout = BodyLayout([Body("finger", "spatial", actuated=True), Body("object", "spatial"), Body("ground", "environment")])
		self.assertEqual(layout.columns["object"], slice(0, 6))
		self.assertEqual(layout.columns["finger"], slice(6, 12))
		self.assertEqual((layout.partition.n_u, layout.partition.n_a), (6, 6))

	def test_point_bodies_follow_scene_dimension(self):
		self.assertEqual(BodyLayout(planar_bodies()).n, 5)
		self.assertEqual(BodyLayout([Body("hand", "point", actuated=True)]).n, 3)

	def test_rejects_bad_layouts(self):
		with self.assertRaises(ValidationError):
			BodyLayout([Body("a", "planar", actuated=True), Body("b", "spatial")])
		with self.assertRaises(ValidationError):
			BodyLayout([Body("a", "point", actuated=True), Body("a", "point", actuated=True)])
		with self.assertRaises(ValidationError):
			BodyLayout([Body("object", "spatial")])
		with self.assertRaises(ValidationError):
			Body("ground", "environment", actuated=True)

	def test_selector_zeroes_unactuated_columns(self):
		partition = BodyLayout(planar_bodies()).partition
		self.assertAllClose(partition.selector(), np.diag([0.0, 0.0, 0.0, 1.0, 1.0]))

	def test_body_goal_rows(self):
		layout = BodyLayout([Body("object", "spatial"), Body("hand", "point", actuated=True)])
		G, b_G = layout.body_goal("object", [0.1, 0.2, 0.3, 0.4, 0.5, 0.6])
		self.assertAllClose(G, np.hstack([np.eye(6), np.zeros((6, 3))]))
		self.assertAllClose(b_G, [0.1, 0.2, 0.3, 0.4, 0.5, 0.6])

		G, b_G = layout.body_goal("hand", [None, 1.0, None])
		self.assertAllClose(G, [[0, 0, 0, 0, 0, 0, 0, 1, 0]])
		self.assertAllClose(b_G, [1.0])

	def test_skew_matches_cross_product(self):
		r, u = self.rng.standard_normal(3), self.rng.standard_normal(3)
		self.assertAllClose(skew(r) @ u, np.cross(r, u), atol=1e-14)


class TestContactPoint(HfvcTestCase):
	def test_rejects_non_unit_normal(self):
		with self.assertRaises(ValidationError):
			ContactPoint([0.0, 0.0, 0.0], [0.0, 0.0, 2.0], ("a", "b"))

	def test_rejects_negative_friction(self):
		with self.assertRaises(ValidationError):
			ContactPoint([0.0, 0.0, 0.0], [0.0, 0.0, 1.0], ("a", "b"), mu=-0.1)

	def test_sliding_direction_must_be_tangent(self):
		with self.assertRaises(ValidationError):
			ContactPoint([0.0, 0.0], [0.0, 1.0], ("a", "b"), ContactMode.SLIDING, 0.5, direction=[0.0, 1.0])
		with self.assertRaises(ValidationError):
			ContactPoint([0.0, 0.0], [0.0, 1.0], ("a", "b"), ContactMode.SLIDING, 0.5)
		with self.assertRaises(ValidationError):
			ContactPoint([0.0, 0.0], [0.0, 1.0], ("a", "b"), ContactMode.STICKING, 0.5, direction=[1.0, 0.0])

	def test_frame_is_a_right_handed_rotation_ending_in_the_normal(self):
		for _ in range(20):
			normal = unit(self.rng.standard_normal(3))
			R_c = ContactPoint(np.zeros(3), normal, ("a", "b")).frame()
			self.assertAllClose(R_c.T @ R_c, np.eye(3), atol=1e-12)
			self.assertAlmostEqual(np.linalg.det(R_c), 1.0, places=12)
			self.assertAllClose(R_c[:, 2], normal, atol=1e-15)

	def test_declared_tangent_fixes_the_frame(self):
		contact = ContactPoint(np.zeros(3), [0.0, 0.0, 1.0], ("a", "b"), tangent=[0.0, 1.0, 0.0])
		self.assertAllClose(contact.frame(), [[0, -1, 0], [1, 0, 0], [0, 0, 1]], atol=1e-15)


class TestAssembleJacobians(HfvcTestCase):
	def test_planar_sticking_contact_adds_two_rows(self):
		contact = ContactPoint([0.5, 0.0], [0.0, 1.0], ("block", "ground"), mu=0.5)
		J, Jf, lambda_dim = assemble_jacobians(planar_bodies(), [contact])
		self.assertEqual(J.shape, (2, 5))
		self.assertEqual(Jf.shape, (2, 5))
		self.assertEqual(lambda_dim, 2)

	def test_planar_sliding_contact_adds_one_row(self):
		contact = ContactPoint([0.5, 0.0], [0.0, 1.0], ("block", "ground"), "sliding", 0.5, direction=[1.0, 0.0])
		J, Jf, lambda_dim = assemble_jacobians(planar_bodies(), [contact])
		self.assertEqual(J.shape, (1, 5))
		self.assertEqual(lambda_dim, 1)
		# r = (0.5, 0): the friction-folded normal (-0.5, 1) acting at r
		self.assertAllClose(Jf, [[-0.5, 1.0, 0.5, 0.0, 0.0]])

	def test_block_tilting_scene_is_nine_by_nine(self):
		L = 0.075
		bodies = [Body("object", "spatial", origin=(0.0, 0.0, L / 2)), Body("table", "environment"), Body("hand", "point", actuated=True)]
		contacts = [
			ContactPoint([L / 2, -L / 2, 0.0], [0.0, 0.0, 1.0], ("object", "table"), mu=0.6),
			ContactPoint([L / 2, L / 2, 0.0], [0.0, 0.0, 1.0], ("object", "table"), mu=0.6),
			ContactPoint([L / 4, 0.0, L], [0.0, 0.0, 1.0], ("hand", "object"), mu=0.8),
		]
		J, Jf, lambda_dim = assemble_jacobians(bodies, contacts)
		self.assertEqual(J.shape, (9, 9))
		self.assertEqual(lambda_dim, 9)
		self.assertEqual(linalg.rank(J), 8)

	def test_rows_of_J_have_unit_norm(self):
		bodies = [Body("object", "spatial", origin=(0.2, 0.1, 0.3)), Body("finger", "spatial", actuated=True)]
		contacts = [ContactPoint(self.rng.uniform(-1, 1, 3), unit(self.rng.standard_normal(3)), ("object", "finger")) for _ in range(3)]
		J, _Jf, _ = assemble_jacobians(bodies, contacts)
		self.assertAllClose(np.linalg.norm(J, axis=1), np.ones(J.shape[0]), atol=1e-12)

	def test_sticking_constraints_zero_the_relative_point_velocity(self):
		for _ in range(20):
			bodies = [
				Body("object", "spatial", origin=tuple(self.rng.uniform(-1, 1, 3))),
				Body("ground", "environment"),
				Body("finger", "spatial", actuated=True, origin=tuple(self.rng.uniform(-1, 1, 3))),
				Body("tip", "point", actuated=True),
			]
			layout = BodyLayout(bodies)
			pairs = [("object", "ground"), ("object", "finger"), ("object", "tip"), ("finger", "tip")]
			contacts = [
				ContactPoint(self.rng.uniform(-1, 1, 3), unit(self.rng.standard_normal(3)), pairs[int(self.rng.integers(4))])
				for _ in range(3)
			]
			J, _Jf, _ = assemble_jacobians(layout, contacts)
			N = linalg.null_rows(J)
			v = N.T @ self.rng.standard_normal(N.shape[0])
			for contact in contacts:
				a, b = (layout.body(name) for name in contact.pair)
				relative = world_point_velocity(v, layout.columns, a, contact.position) - world_point_velocity(
					v, layout.columns, b, contact.position
				)
				self.assertAllClose(relative, np.zeros(3), atol=1e-9)

	def test_force_rows_transmit_a_point_force(self):
		origin = np.array([0.1, -0.2, 0.3])
		bodies = [Body("object", "spatial", origin=tuple(origin)), Body("hand", "point", actuated=True)]
		x = np.array([0.5, 0.5, 0.0])
		contact = ContactPoint(x, [0.0, 0.0, 1.0], ("object", "hand"), mu=0.5)
		_J, Jf, _ = assemble_jacobians(bodies, [contact])
		lam = self.rng.standard_normal(3)
		wrench = Jf.T @ lam
		self.assertAllClose(wrench[:3], lam, atol=1e-14)
		self.assertAllClose(wrench[3:6], np.cross(x - origin, lam), atol=1e-14)
		self.assertAllClose(wrench[6:], -lam, atol=1e-14)

	def test_rotating_the_world_preserves_the_constraint_rank(self):
		Q = Rotation.from_rotvec(self.rng.standard_normal(3)).as_matrix()
		bodies = [Body("object", "spatial"), Body("finger", "point", actuated=True), Body("ground", "environment")]
		points = self.rng.uniform(-1, 1, (3, 3))
		normals = [unit(self.rng.standard_normal(3)) for _ in range(3)]
		pairs = [("object", "ground"), ("object", "ground"), ("object", "finger")]
		original = [ContactPoint(p, n, pair) for p, n, pair in zip(points, normals, pairs, strict=True)]
		rotated = [ContactPoint(Q @ p, Q @ n, pair) for p, n, pair in zip(points, normals, pairs, strict=True)]
		self.assertEqual(linalg.rank(assemble_jacobians(bodies, original)[0]), linalg.rank(assemble_jacobians(bodies, rotated)[0]))

	def test_rejects_environment_pairs_and_unknown_bodies(self):
		bodies = planar_bodies() + [Body("wall", "environment")]
		with self.assertRaises(ValidationError) as ctx:
			assemble_jacobians(bodies, [ContactPoint([0.0, 0.0], [0.0, 1.0], ("ground", "wall"))])
		self.assertEqual(ctx.exception.pointer, "/contacts/0/pair")

		with self.assertRaises(ValidationError) as ctx:
			assemble_jacobians(bodies, [ContactPoint([0.0, 0.0], [0.0, 1.0], ("block", "table"))])
		self.assertEqual(ctx.exception.pointer, "/contacts/0/pair")

	def test_no_contacts_gives_empty_matrices(self):
		J, Jf, lambda_dim = assemble_jacobians(planar_bodies(), [])
		self.assertEqual(J.shape, (0, 5))
		self.assertEqual(Jf.shape, (0, 5))
		self.assertEqual(lambda_dim, 0)
