"""
Configuration files for `hfvc bench` and `hfvc tilt`.

A configuration file is a JSON object whose keys are the fields of BenchConfig or
TiltParams. Precedence: command-line flags, then the file, then hfvc.setup.config.
"""

import dataclasses
import json
from pathlib import Path

import hfvc
from hfvc.bench.cells import BenchConfig
from hfvc.scenarios.tilt import TiltParams
from hfvc.utils import content_hash, to_jsonable


def read_config(path) -> dict:
	try:
		text = Path(path).read_text()
	except OSError as e:
		hfvc.throw(f"cannot read configuration file: {e}", pointer="")
	try:
		document = json.loads(text)
	except json.JSONDecodeError as e:
		hfvc.throw(f"malformed JSON at line {e.lineno} column {e.colno}: {e.msg}", pointer="")
	if not isinstance(document, dict):
		hfvc.throw("configuration must be a JSON object", pointer="")
	return document


def check_value(field: dataclasses.Field, value):
	pointer = f"/{field.name}"
	default = field.default
	if value is None:
		if default is not None:
			hfvc.throw("must not be null", pointer=pointer)
		return
	if isinstance(default, bool):
		ok = isinstance(value, bool)
	elif isinstance(default, int):
		ok = isinstance(value, int) and not isinstance(value, bool)
	elif isinstance(default, float):
		ok = isinstance(value, int | float) and not isinstance(value, bool)
	elif isinstance(default, str):
		ok = isinstance(value, str)
	else:
		ok = isinstance(value, list | tuple)
	if not ok:
		kind = type(default).__name__ if default is not None else "list"
		hfvc.throw(f"expected {kind}, got {json.dumps(to_jsonable(value))}", pointer=pointer)


def build(cls, document: dict | None = None, overrides: dict | None = None):
	"""
	Instantiate the frozen dataclass `cls` from a decoded file and flag overrides.

	Unknown keys raise ValidationError pointing at the key. Overrides whose value is
	None are treated as unset.
	"""
	fields = {f.name: f for f in dataclasses.fields(cls)}
	values = {}
	for key, value in (document or {}).items():
		if key not in fields:
			hfvc.throw(f"unknown key {key!r}", pointer=f"/{key}")
		check_value(fields[key], value)
		values[key] = value
	values.update({k: v for k, v in (overrides or {}).items() if v is not None})
	return cls(**values)


def load(cls, path=None, **overrides):
	return build(cls, read_config(path) if path else None, overrides)


def bench_config(path=None, **overrides) -> BenchConfig:
	return load(BenchConfig, path, **overrides)


def tilt_params(path=None, **overrides) -> TiltParams:
	return load(TiltParams, path, **overrides)


def config_hash(config) -> str:
	"""SHA-256 of the effective configuration, keys sorted."""
	return content_hash(json.dumps(to_jsonable(config.to_dict()), sort_keys=True))
