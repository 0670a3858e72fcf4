import dataclasses

import numpy as np

from hfvc.core import linalg
from hfvc.exceptions import GuardInfeasible, ValidationError
from hfvc.model.body import skew
from hfvc.ochs.checks import check_solution
from hfvc.ochs.velocity import free_robot_motions
from hfvc.scenarios.kinematics import quat_integrate, quat_to_matrix
from hfvc.scenarios.tilt import (
	TiltParams,
	TiltState,
	constraint_jacobian,
	goal_body_twist,
	run_tilt,
	tilt_csv,
	tilt_model,
	velocity_map,
)
from hfvc.setup.config import TILT_COLUMNS
from hfvc.tests.utils import HfvcTestCase

PARAMS = TiltParams()


def point_rows(R, point):
	"""World velocity of an object-fixed point as a map of the body twist."""
	return np.hstack([R, -R @ skew(point)])


class TestTiltParams(HfvcTestCase):
	def test_zero_axis(self):
		with self.assertRaises(ValidationError) as ctx:
			TiltParams(axis=(0.0, 0.0, 0.0))
		self.assertEqual(ctx.exception.pointer, "/axis")

	def test_other_fields(self):
		for kwargs, pointer in (({"mu_hand": -0.1}, "/mu_hand"), ({"steps": 0}, "/steps"), ({"edge": 0.0}, "/edge")):
			with self.assertRaises(ValidationError) as ctx:
				TiltParams(**kwargs)
			self.assertEqual(ctx.exception.pointer, pointer)

	def test_axis_is_normalized(self):
		self.assertAllClose(TiltParams(axis=(0.0, 2.0, 0.0)).unit_axis, [0.0, 1.0, 0.0])


class TestKinematicMaps(HfvcTestCase):
	def test_velocity_map_at_identity(self):
		state = TiltState([0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], PARAMS.hand_point)
		Omega = velocity_map(state)
		self.assertEqual(Omega.shape, (10, 9))
		self.assertAllClose(Omega[:3, :3], np.eye(3))
		self.assertAllClose(Omega[3:7, 3:6], 0.5 * np.vstack([np.zeros(3), np.eye(3)]))
		self.assertAllClose(Omega[7:, 6:], np.eye(3))
		self.assertAllClose(Omega[:3, 3:], np.zeros((3, 6)))

	def test_velocity_map_rotated_block(self):
		state = TiltState.at(PARAMS, 0.3)
		self.assertAllClose(velocity_map(state)[:3, :3], quat_to_matrix(state.q_object))

	def test_velocity_map_integrates(self):
		dt = 1e-5
		state = TiltState.at(PARAMS, 0.4)
		v = self.rng.standard_normal(9)
		R = state.rotation
		moved = np.concatenate(
			[
				state.p_object + R @ v[:3] * dt,
				quat_integrate(state.q_object, v[3:6], dt),
				state.p_hand + v[6:] * dt,
			]
		)
		self.assertAllClose(state.as_vector() + velocity_map(state) @ v * dt, moved, atol=1e-8)

	def test_jacobian_matches_point_kinematics(self):
		for theta in (0.0, 0.2, 0.7):
			state = TiltState.at(PARAMS, theta)
			R = state.rotation
			J = constraint_jacobian(PARAMS, state) @ velocity_map(state)
			hand = np.hstack([-point_rows(R, PARAMS.hand_point), np.eye(3)])
			self.assertAllClose(J[:3], hand, atol=1e-12)
			for i, point in enumerate(PARAMS.table_points):
				self.assertAllClose(J[3 + 3 * i : 6 + 3 * i], np.hstack([point_rows(R, point), np.zeros((3, 3))]), atol=1e-12)

	def test_free_motion_keeps_every_contact(self):
		state = TiltState.at(PARAMS, 0.25)
		model = tilt_model(PARAMS, state)
		R = state.rotation
		for v in linalg.null_rows(model.J):
			for point in PARAMS.table_points:
				self.assertAllClose(point_rows(R, point) @ v[:6], np.zeros(3), atol=1e-8)
			self.assertAllClose(v[6:], point_rows(R, PARAMS.hand_point) @ v[:6], atol=1e-8)


class TestGoal(HfvcTestCase):
	def test_identity_pose_keeps_the_spatial_twist(self):
		state = TiltState([0.0, 0.0, 0.0], [1.0, 0.0, 0.0, 0.0], PARAMS.hand_point)
		G, b_G = goal_body_twist(PARAMS, state)
		omega = np.array([0.0, 1.0, 0.0])
		self.assertAllClose(b_G, np.concatenate([-np.cross(omega, PARAMS.pivot), omega]) * PARAMS.rate)
		self.assertAllClose(G, np.hstack([np.eye(6), np.zeros((6, 3))]))

	def test_zero_rate(self):
		_, b_G = goal_body_twist(dataclasses.replace(PARAMS, rate=0.0), TiltState.at(PARAMS, 0.3))
		self.assertAllClose(b_G, np.zeros(6))

	def test_axis_points_stay_still(self):
		state = TiltState.at(PARAMS, 0.5)
		_, b_G = goal_body_twist(PARAMS, state)
		R = state.rotation
		for point in (PARAMS.pivot, PARAMS.pivot + [0.0, 0.3, 0.0]):
			y = R.T @ (point - state.p_object)
			self.assertAllClose(R @ (b_G[:3] + np.cross(b_G[3:], y)), np.zeros(3), atol=1e-12)


class TestTiltModel(HfvcTestCase):
	def test_initial_configuration(self):
		model = tilt_model(PARAMS, TiltState.at(PARAMS, 0.0))
		self.assertEqual(model.J.shape, (9, 9))
		self.assertEqual(linalg.rank(model.J), 8)
		self.assertEqual(free_robot_motions(model.J, model.dof).shape[0], 1)

	def test_inconsistent_state(self):
		state = TiltState.at(PARAMS, 0.1)
		moved = TiltState(state.p_object, state.q_object, state.p_hand + [0.0, 0.0, 0.01])
		with self.assertRaises(ValidationError):
			tilt_model(PARAMS, moved)

	def test_table_cones_use_the_exact_ridges(self):
		model = tilt_model(PARAMS, TiltState.at(PARAMS, 0.3))
		Lambda = model.guard.Lambda
		for i in range(8):
			d = np.array([np.sin(np.pi * i / 4), np.cos(np.pi * i / 4), 0.0])
			self.assertAllClose(Lambda[9 + i, 3:6], d - PARAMS.mu_table * np.array([0.0, 0.0, 1.0]), atol=1e-12)
		self.assertAllClose(Lambda[17, 3:6], [0.0, 0.0, -1.0])

	def test_hand_cone_lives_in_the_object_frame(self):
		state = TiltState.at(PARAMS, 0.3)
		model = tilt_model(PARAMS, state)
		normal_row = model.guard.Lambda[8, :3]
		self.assertAllClose(normal_row, -state.rotation[:, 2], atol=1e-12)

	def test_static_block_rests_on_the_table(self):
		params = dataclasses.replace(PARAMS, rate=0.0)
		[step] = run_tilt(dataclasses.replace(params, steps=1))
		lam = step.solution.lam
		weight = params.mass * params.gravity
		self.assertAlmostEqual(lam[5] + lam[8] - lam[2], weight, places=6)
		self.assertGreaterEqual(state_normal(step), params.n_min - 1e-6)


def state_normal(step):
	R = TiltState.at(PARAMS, step.theta).rotation
	return (R.T @ step.solution.lam[:3])[2]


class TestRunTilt(HfvcTestCase):
	def test_full_tilt(self):
		steps = run_tilt(PARAMS)
		self.assertEqual(len(steps), 50)
		self.assertAlmostEqual(steps[-1].theta, np.pi / 4)
		for step in steps:
			self.assertEqual((step.solution.n_av, step.solution.n_af), (1, 2))
			self.assertLessEqual(step.y_fraction, 0.05)
			self.assertGreaterEqual(step.min_guard_slack, -1e-6)
			self.assertTrue(check_solution(step.model, step.solution, minimal=True).ok)

	def test_quaternion_stays_unit_along_the_trajectory(self):
		for theta in np.linspace(0.0, PARAMS.angle, 200):
			self.assertAlmostEqual(np.linalg.norm(TiltState.at(PARAMS, theta).q_object), 1.0, places=12)

	def test_rate_scales_the_velocity_command(self):
		slow = run_tilt(dataclasses.replace(PARAMS, steps=5))
		fast = run_tilt(dataclasses.replace(PARAMS, steps=5, rate=PARAMS.rate * 1.5))
		for a, b in zip(slow, fast):
			self.assertAllClose(b.solution.w_av, 1.5 * a.solution.w_av, atol=1e-12, rtol=1e-12)

	def test_records(self):
		[step] = run_tilt(dataclasses.replace(PARAMS, steps=1))
		record = step.record()
		self.assertEqual(record["status"], "solved")
		self.assertEqual(record["n_af"], 2)
		self.assertIsNotNone(record["eta_af_2"])

	def test_frictionless_contacts_fail_at_the_first_step(self):
		params = dataclasses.replace(PARAMS, mu_hand=0.0, mu_table=0.0)
		with self.assertRaises(GuardInfeasible) as ctx:
			run_tilt(params)
		self.assertEqual(ctx.exception.step, 0)

	def test_csv(self):
		lines = tilt_csv(run_tilt(dataclasses.replace(PARAMS, steps=3))).splitlines()
		self.assertEqual(lines[0], ",".join(TILT_COLUMNS))
		self.assertEqual(len(lines), 4)
		first = dict(zip(TILT_COLUMNS, lines[1].split(",")))
		self.assertEqual((first["step"], first["theta"], first["status"], first["n_av"]), ("0", "0", "solved", "1"))
