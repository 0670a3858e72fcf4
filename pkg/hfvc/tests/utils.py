import unittest

import numpy as np


class HfvcTestCase(unittest.TestCase):
	"""Base class for hfvc tests: seeded generator plus array assertions."""

	seed = 20210301

	def setUp(self):
		self.rng = np.random.default_rng(self.seed)

	def assertAllClose(self, actual, expected, atol=1e-10, rtol=0.0, msg=None):
		actual = np.asarray(actual, dtype=float)
		expected = np.asarray(expected, dtype=float)
		self.assertEqual(actual.shape, expected.shape, msg or "shape mismatch")
		if not np.allclose(actual, expected, atol=atol, rtol=rtol):
			diff = np.max(np.abs(actual - expected)) if actual.size else 0.0
			self.fail(msg or f"arrays differ (max abs diff {diff:.3e})\n{actual}\n!=\n{expected}")

	def assertOrthonormalRows(self, A, atol=1e-10):
		A = np.asarray(A, dtype=float)
		self.assertAllClose(A @ A.T, np.eye(A.shape[0]), atol=atol, msg="rows are not orthonormal")

	def assertSameRowSpace(self, A, B, atol=1e-8):
		"""Row spaces agree: each matrix's rows are reproduced by projecting onto the other."""
		A = np.atleast_2d(np.asarray(A, dtype=float))
		B = np.atleast_2d(np.asarray(B, dtype=float))
		for X, Y in ((A, B), (B, A)):
			P = np.linalg.pinv(Y) @ Y
			self.assertAllClose(X @ P, X, atol=atol, msg="row spaces differ")
