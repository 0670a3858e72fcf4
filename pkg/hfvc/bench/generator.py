import dataclasses

import numpy as np

from hfvc.core import linalg
from hfvc.model.body import Body, BodyKind, BodyLayout
from hfvc.model.contact import ContactMode, ContactPoint
from hfvc.model.system import SystemModel, build_model
from hfvc.setup.config import BOX_HALF_WIDTH, RIDGE_COUNT

OBJECT = "object"
GROUND = "ground"


def problem_rng(seed: int, cell_index: int, problem_index: int, stream: int = 0) -> np.random.Generator:
	"""Independent generator per problem; `stream` separates the oracle draws from the problem draws."""
	return np.random.default_rng(np.random.SeedSequence((seed, cell_index, problem_index, stream)))


def unit(v) -> np.ndarray:
	return v / np.linalg.norm(v)


def random_direction(rng, dim: int) -> np.ndarray:
	while True:
		v = rng.standard_normal(dim)
		if np.linalg.norm(v) > 1e-6:
			return unit(v)


def random_tangent(rng, normal) -> np.ndarray:
	if normal.shape[0] == 2:
		return np.array([-normal[1], normal[0]]) * rng.choice([-1.0, 1.0])
	while True:
		d = rng.standard_normal(3)
		d -= (d @ normal) * normal
		if np.linalg.norm(d) > 1e-6:
			return unit(d)


def random_contact(rng, pair, sliding: bool, dim: int, mu_range) -> ContactPoint:
	"""Contact at a uniform point of the unit box, normal uniform on the half sphere facing the object origin."""
	position = rng.uniform(-BOX_HALF_WIDTH, BOX_HALF_WIDTH, dim)
	normal = random_direction(rng, dim)
	if normal @ -position < 0:
		normal = -normal
	mu = float(rng.uniform(*mu_range))
	direction = random_tangent(rng, normal) if sliding else None
	mode = ContactMode.SLIDING if sliding else ContactMode.STICKING
	return ContactPoint(position, normal, pair, mode=mode, mu=mu, direction=direction)


def random_orthonormal_rows(rng, rows: int, cols: int) -> np.ndarray:
	if rows == 0:
		return np.zeros((0, cols))
	Q, _ = np.linalg.qr(rng.standard_normal((cols, rows)))
	return Q.T


def sample_goal(cfg, model: SystemModel, layout: BodyLayout, rng) -> tuple[np.ndarray, np.ndarray]:
	"""
	Goal on the object twist, consistent with the contacts by construction.

	Rows are random orthonormal combinations of the object motions the contacts allow;
	b_G = G v_t for a target v_t drawn from NULL(J).
	"""
	n = model.n
	obj = layout.columns[OBJECT]
	N = linalg.null_rows(model.J)
	B = linalg.row_basis(N[:, obj])
	k = B.shape[0]
	if k == 0:
		return np.zeros((0, n)), np.zeros(0)

	rows = k if cfg.goal_dim == "max" else int(rng.integers(1, k + 1))
	G = np.zeros((rows, n))
	G[:, obj] = random_orthonormal_rows(rng, rows, k) @ B
	v_t = N.T @ rng.standard_normal(N.shape[0])
	return G, G @ v_t


def finger_weights(cfg, layout: BodyLayout, fingers) -> np.ndarray:
	"""Self weight of every finger along -y (planar) or -z (spatial), carried through its linear coordinates."""
	F = np.zeros(layout.n)
	for name in fingers:
		F[layout.columns[name].start + layout.dim - 1] = -cfg.finger_weight
	return F


def generate_problem(cfg, cell, rng) -> SystemModel:
	"""
	One random problem of `cell`: a rigid object touching the ground and `cell.fingers`
	rigid fingers. Deterministic given the generator state.
	"""
	kind = BodyKind.PLANAR if cell.family == "planar" else BodyKind.SPATIAL
	dim = cell.dim

	contacts = [
		random_contact(rng, (OBJECT, GROUND), mode == "s", dim, cfg.mu_range) for mode in cell.env_modes
	]
	fingers = []
	for k in range(cell.fingers):
		name = f"finger_{k + 1}"
		touching = [
			random_contact(rng, (OBJECT, name), False, dim, cfg.mu_range) for _ in range(cell.contacts_per_finger)
		]
		origin = np.mean([c.position for c in touching], axis=0)
		fingers.append(Body(name, kind, actuated=True, origin=tuple(origin)))
		contacts.extend(touching)

	layout = BodyLayout([Body(OBJECT, kind), Body(GROUND, BodyKind.ENVIRONMENT), *fingers])
	model = build_model(
		layout,
		contacts,
		external_force=finger_weights(cfg, layout, [f.name for f in fingers]),
		n_min=cfg.n_min,
		ridge_count=RIDGE_COUNT,
	)
	G, b_G = sample_goal(cfg, model, layout, rng)
	labels = {**model.labels, "cell": cell.label}
	return dataclasses.replace(model, G=G, b_G=b_G, labels=labels)
