# Copyright (c) 2024, hfvc contributors
# For license information, please see license.txt

from dataclasses import dataclass

import numpy as np

import hfvc
from hfvc.setup.config import N_MIN, RIDGE_COUNT


@dataclass(frozen=True)
class GuardConditions:
	"""Inequalities Lambda @ [λ; f] <= b_Lambda that keep every contact in its mode."""

	Lambda: np.ndarray
	b_Lambda: np.ndarray
	n_min: float = N_MIN

	def __post_init__(self):
		if self.Lambda.shape[0] != self.b_Lambda.shape[0]:
			hfvc.throw("guard matrix and rhs differ in row count")

	@property
	def rows(self) -> int:
		return self.Lambda.shape[0]

	def slack(self, lam, f) -> np.ndarray:
		"""b_Lambda - Lambda @ [λ; f]; non-negative where the guards hold."""
		return self.b_Lambda - self.Lambda @ np.concatenate([lam, f])


def ridge_directions(ridge_count: int) -> np.ndarray:
	angles = 2 * np.pi * np.arange(ridge_count) / ridge_count
	return np.column_stack([np.sin(angles), np.cos(angles), np.zeros(ridge_count)])


def local_rows(contact, n_min: float, ridge_count: int) -> tuple[np.ndarray, np.ndarray]:
	"""Guard rows on the contact's own λ block, written in its local frame."""
	if not contact.sticking:
		# λ is the scalar normal magnitude
		return np.array([[-1.0]]), np.array([-n_min])

	mu = contact.mu
	if contact.dim == 2:
		# local λ = [tangential, normal]
		rows = np.array([[1.0, -mu], [-1.0, -mu], [0.0, -1.0]])
	else:
		z = np.array([0.0, 0.0, 1.0])
		cone = ridge_directions(ridge_count) - mu * z
		rows = np.vstack([cone, -z])
	rhs = np.zeros(rows.shape[0])
	rhs[-1] = -n_min
	return rows @ contact.frame().T, rhs


def build_guards(contacts, n_min: float = N_MIN, ridge_count: int = RIDGE_COUNT, n: int = 0) -> GuardConditions:
	"""
	Friction-cone and normal-force guard rows for all contacts.

	Sticking 3D contacts get a `ridge_count`-sided polyhedral cone, planar sticking
	contacts the two exact cone edges, every contact a lower bound `n_min` on its normal
	force. The matrix spans [λ; f] with f of length `n`; the f columns are zero.
	"""
	if ridge_count < 3:
		hfvc.throw(f"ridge_count must be at least 3, got {ridge_count}")
	if not n_min >= 0:
		hfvc.throw(f"n_min must be non-negative, got {n_min}")

	lambda_dim = sum(c.lambda_dim for c in contacts)
	blocks, rhs = [], []
	offset = 0
	for contact in contacts:
		if not contact.mu >= 0:
			hfvc.throw(f"friction coefficient must be non-negative, got {contact.mu}")
		rows, b = local_rows(contact, n_min, ridge_count)
		block = np.zeros((rows.shape[0], lambda_dim + n))
		block[:, offset : offset + contact.lambda_dim] = rows
		blocks.append(block)
		rhs.append(b)
		offset += contact.lambda_dim

	if not blocks:
		return GuardConditions(np.zeros((0, n)), np.zeros(0), n_min)
	return GuardConditions(np.vstack(blocks), np.concatenate(rhs), n_min)
