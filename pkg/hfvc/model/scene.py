# Copyright (c) 2024, hfvc contributors
# For license information, please see license.txt

"""
Scene files (schema_version 1).

	{
		"schema_version": 1,
		"bodies": [{"name": "object", "kind": "spatial", "actuated": false, "origin": [0, 0, 0]}],
		"contacts": [{"position": [...], "normal": [...], "pair": ["object", "ground"],
		              "mode": "sticking" | "sliding", "mu": 0.5, "direction": [...], "tangent": [...]}],
		"goal": {"rows": [[...]], "rhs": [...], "bodies": [{"body": "object", "twist": [0, 0, 1, null, null, null]}]},
		"external_force": [...],
		"guard": {"n_min": 0.5, "ridge_count": 8}
	}

Every validation error carries the JSON pointer of the offending value.
"""

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

import hfvc
from hfvc.exceptions import at_pointer
from hfvc.model.body import Body, BodyKind, BodyLayout
from hfvc.model.contact import ContactMode, ContactPoint
from hfvc.model.system import SystemModel, build_model
from hfvc.setup.config import N_MIN, RIDGE_COUNT

SCHEMA_VERSION = 1

SCENE_KEYS = {"schema_version", "name", "bodies", "contacts", "goal", "external_force", "guard"}
BODY_KEYS = {"name", "kind", "actuated", "origin"}
CONTACT_KEYS = {"position", "normal", "pair", "mode", "mu", "direction", "tangent"}
GOAL_KEYS = {"rows", "rhs", "bodies"}
BODY_GOAL_KEYS = {"body", "twist"}
GUARD_KEYS = {"n_min", "ridge_count"}


@dataclass(frozen=True)
class Scene:
	bodies: list
	contacts: list
	goal_rows: list = field(default_factory=list)
	goal_rhs: list = field(default_factory=list)
	body_goals: list = field(default_factory=list)
	external_force: list | None = None
	n_min: float = N_MIN
	ridge_count: int = RIDGE_COUNT
	name: str | None = None

	def goal(self, layout: BodyLayout) -> tuple[np.ndarray, np.ndarray]:
		rows = [np.asarray(self.goal_rows, dtype=float).reshape(-1, layout.n)]
		rhs = [np.asarray(self.goal_rhs, dtype=float).reshape(-1)]
		for i, (body, twist) in enumerate(self.body_goals):
			with at_pointer(f"/goal/bodies/{i}"):
				G, b = layout.body_goal(body, twist)
			rows.append(G)
			rhs.append(b)
		return np.vstack(rows), np.concatenate(rhs)

	def build(self) -> SystemModel:
		with at_pointer("/bodies"):
			layout = BodyLayout(self.bodies)
		if self.goal_rows and any(len(row) != layout.n for row in self.goal_rows):
			hfvc.throw(f"goal rows must have {layout.n} entries", pointer="/goal/rows")
		G, b_G = self.goal(layout)
		with at_pointer(""):
			return build_model(
				layout,
				self.contacts,
				goal_rows=G,
				goal_rhs=b_G,
				external_force=self.external_force,
				n_min=self.n_min,
				ridge_count=self.ridge_count,
			)


def expect(value, kind, pointer: str, what: str):
	if kind is float:
		ok = isinstance(value, int | float) and not isinstance(value, bool) and math.isfinite(value)
	elif kind is int:
		ok = isinstance(value, int) and not isinstance(value, bool)
	else:
		ok = isinstance(value, kind)
	if not ok:
		hfvc.throw(f"expected {what}, got {type(value).__name__}", pointer=pointer)
	return value


def expect_keys(obj, allowed, required, pointer: str):
	expect(obj, dict, pointer, "an object")
	for key in obj:
		if key not in allowed:
			hfvc.throw(f"unknown key '{key}'", pointer=f"{pointer}/{key}")
	for key in required:
		if key not in obj:
			hfvc.throw(f"missing required key '{key}'", pointer=f"{pointer}/{key}")


def expect_vector(value, pointer: str, length: int | None = None, allow_null: bool = False) -> list:
	expect(value, list, pointer, "an array")
	if length is not None and len(value) != length:
		hfvc.throw(f"expected {length} entries, got {len(value)}", pointer=pointer)
	for i, entry in enumerate(value):
		if allow_null and entry is None:
			continue
		expect(entry, float, f"{pointer}/{i}", "a finite number")
	return value


def parse_body(obj, pointer: str) -> Body:
	expect_keys(obj, BODY_KEYS, ("name", "kind"), pointer)
	expect(obj["name"], str, f"{pointer}/name", "a string")
	kind = expect(obj["kind"], str, f"{pointer}/kind", "a string")
	if kind not in {k.value for k in BodyKind}:
		hfvc.throw(f"unknown body kind '{kind}'", pointer=f"{pointer}/kind")
	actuated = expect(obj.get("actuated", False), bool, f"{pointer}/actuated", "a boolean")
	origin = obj.get("origin")
	if origin is not None:
		origin = tuple(expect_vector(origin, f"{pointer}/origin"))
	with at_pointer(pointer):
		return Body(obj["name"], BodyKind(kind), actuated, origin)


def parse_contact(obj, pointer: str) -> ContactPoint:
	expect_keys(obj, CONTACT_KEYS, ("position", "normal", "pair"), pointer)
	position = expect_vector(obj["position"], f"{pointer}/position")
	normal = expect_vector(obj["normal"], f"{pointer}/normal")
	pair = expect(obj["pair"], list, f"{pointer}/pair", "an array")
	if len(pair) != 2:
		hfvc.throw("pair must name exactly two bodies", pointer=f"{pointer}/pair")
	for i, name in enumerate(pair):
		expect(name, str, f"{pointer}/pair/{i}", "a body name")

	mode = expect(obj.get("mode", "sticking"), str, f"{pointer}/mode", "a string")
	if mode not in {m.value for m in ContactMode}:
		hfvc.throw(f"unknown contact mode '{mode}'", pointer=f"{pointer}/mode")
	mu = expect(obj.get("mu", 0.0), float, f"{pointer}/mu", "a finite number")
	direction = obj.get("direction")
	if direction is not None:
		direction = expect_vector(direction, f"{pointer}/direction")
	tangent = obj.get("tangent")
	if tangent is not None:
		tangent = expect_vector(tangent, f"{pointer}/tangent")

	with at_pointer(pointer):
		return ContactPoint(position, normal, tuple(pair), ContactMode(mode), float(mu), direction, tangent)


def parse_goal(obj, pointer: str) -> tuple[list, list, list]:
	expect_keys(obj, GOAL_KEYS, (), pointer)
	rows = expect(obj.get("rows", []), list, f"{pointer}/rows", "an array")
	for i, row in enumerate(rows):
		expect_vector(row, f"{pointer}/rows/{i}")
	rhs = expect_vector(obj.get("rhs", []), f"{pointer}/rhs")
	if len(rhs) != len(rows):
		hfvc.throw(f"rhs has {len(rhs)} entries, goal has {len(rows)} rows", pointer=f"{pointer}/rhs")

	body_goals = []
	for i, entry in enumerate(expect(obj.get("bodies", []), list, f"{pointer}/bodies", "an array")):
		entry_pointer = f"{pointer}/bodies/{i}"
		expect_keys(entry, BODY_GOAL_KEYS, ("body", "twist"), entry_pointer)
		expect(entry["body"], str, f"{entry_pointer}/body", "a body name")
		twist = expect_vector(entry["twist"], f"{entry_pointer}/twist", allow_null=True)
		body_goals.append((entry["body"], twist))
	return rows, rhs, body_goals


def parse_scene(document) -> Scene:
	expect_keys(document, SCENE_KEYS, ("schema_version", "bodies"), "")
	if document["schema_version"] != SCHEMA_VERSION:
		hfvc.throw(
			f"unsupported schema_version {document['schema_version']!r}, expected {SCHEMA_VERSION}",
			pointer="/schema_version",
		)

	bodies = [parse_body(b, f"/bodies/{i}") for i, b in enumerate(expect(document["bodies"], list, "/bodies", "an array"))]
	contacts = [
		parse_contact(c, f"/contacts/{i}")
		for i, c in enumerate(expect(document.get("contacts", []), list, "/contacts", "an array"))
	]
	goal_rows, goal_rhs, body_goals = parse_goal(document.get("goal", {}), "/goal")

	external_force = document.get("external_force")
	if external_force is not None:
		external_force = expect_vector(external_force, "/external_force")

	guard = document.get("guard", {})
	expect_keys(guard, GUARD_KEYS, (), "/guard")
	n_min = expect(guard.get("n_min", N_MIN), float, "/guard/n_min", "a finite number")
	ridge_count = expect(guard.get("ridge_count", RIDGE_COUNT), int, "/guard/ridge_count", "an integer")

	name = document.get("name")
	if name is not None:
		expect(name, str, "/name", "a string")

	return Scene(bodies, contacts, goal_rows, goal_rhs, body_goals, external_force, float(n_min), ridge_count, name)


def load_scene(source) -> Scene:
	"""Parse a scene from a path, a JSON string or an already-decoded document."""
	if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
		try:
			source = Path(source).read_text()
		except OSError as e:
			hfvc.throw(f"cannot read scene file: {e}", pointer="")
	if isinstance(source, str | bytes):
		try:
			source = json.loads(source)
		except json.JSONDecodeError as e:
			hfvc.throw(f"malformed JSON at line {e.lineno} column {e.colno}: {e.msg}", pointer="")
	return parse_scene(source)


def load_model(source) -> SystemModel:
	return load_scene(source).build()
