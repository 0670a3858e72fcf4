# Copyright (c) 2024, hfvc contributors
# For license information, please see license.txt

"""
Rigid-body kinematics for the scenarios.

Quaternions are scalar-first (w, x, y, z) with the Hamilton product. Twists are
ordered (linear, angular).
"""

import numpy as np

import hfvc
from hfvc.model.body import skew

UNIT_QUATERNION_TOL = 1e-10


def check_unit(q) -> np.ndarray:
	q = np.asarray(q, dtype=float).reshape(-1)
	if q.shape != (4,):
		hfvc.throw(f"quaternion must have 4 entries, got {q.shape[0]}")
	if abs(np.linalg.norm(q) - 1.0) > UNIT_QUATERNION_TOL:
		hfvc.throw(f"quaternion must have unit norm, has {np.linalg.norm(q):.15g}")
	return q


def quat_multiply(a, b) -> np.ndarray:
	w1, x1, y1, z1 = a
	w2, x2, y2, z2 = b
	return np.array(
		[
			w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
			w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
			w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
			w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
		]
	)


def quat_from_axis_angle(axis, angle: float) -> np.ndarray:
	axis = np.asarray(axis, dtype=float)
	axis = axis / np.linalg.norm(axis)
	return np.concatenate([[np.cos(angle / 2)], np.sin(angle / 2) * axis])


def quat_to_matrix(q) -> np.ndarray:
	w, x, y, z = check_unit(q)
	return np.array(
		[
			[w * w + x * x - y * y - z * z, 2 * (x * y - w * z), 2 * (x * z + w * y)],
			[2 * (x * y + w * z), w * w - x * x + y * y - z * z, 2 * (y * z - w * x)],
			[2 * (x * z - w * y), 2 * (y * z + w * x), w * w - x * x - y * y + z * z],
		]
	)


def quat_rate_map(q) -> np.ndarray:
	"""E(q), 4x3: q_dot = E(q) @ omega_body, i.e. q_dot = q * (0, omega) / 2."""
	w, x, y, z = check_unit(q)
	return 0.5 * np.array(
		[
			[-x, -y, -z],
			[w, -z, y],
			[z, w, -x],
			[-y, x, w],
		]
	)


def quat_rotation_jacobian(q, p) -> np.ndarray:
	"""3x4 derivative of R(q) @ p with respect to (w, x, y, z)."""
	q = np.asarray(q, dtype=float)
	p = np.asarray(p, dtype=float)
	w, v = q[0], q[1:]
	d_w = 2 * w * p + 2 * np.cross(v, p)
	d_v = -2 * np.outer(p, v) + 2 * (v @ p) * np.eye(3) + 2 * np.outer(v, p) - 2 * w * skew(p)
	return np.column_stack([d_w, d_v])


def quat_integrate(q, omega_body, dt: float) -> np.ndarray:
	"""Exact update for a constant body angular velocity over `dt`."""
	omega_body = np.asarray(omega_body, dtype=float)
	speed = np.linalg.norm(omega_body)
	if speed == 0.0:
		return np.asarray(q, dtype=float).copy()
	return quat_multiply(q, quat_from_axis_angle(omega_body, speed * dt))


def adjoint(R, p) -> np.ndarray:
	"""Ad_g for g = (R, p) acting on (v, omega) twists."""
	Ad = np.zeros((6, 6))
	Ad[:3, :3] = R
	Ad[:3, 3:] = skew(p) @ R
	Ad[3:, 3:] = R
	return Ad


def inverse_adjoint(R, p) -> np.ndarray:
	"""Ad of g^-1 = (R.T, -R.T p)."""
	R = np.asarray(R, dtype=float)
	return adjoint(R.T, -R.T @ np.asarray(p, dtype=float))
