import csv
import hashlib
import io
import json
import math
import time
from contextlib import contextmanager

import numpy as np


def normalize_rows(A: np.ndarray) -> np.ndarray:
	"""Scale each row of `A` to unit 2-norm. Zero rows are left untouched."""
	A = np.asarray(A, dtype=float)
	if A.size == 0:
		return A.copy()
	norms = np.linalg.norm(A, axis=1)
	norms[norms == 0.0] = 1.0
	return A / norms[:, None]


def stack_rows(*blocks: np.ndarray, cols: int) -> np.ndarray:
	"""vstack that tolerates 0-row blocks."""
	parts = [np.asarray(b, dtype=float).reshape(-1, cols) for b in blocks]
	return np.vstack(parts) if parts else np.zeros((0, cols))


@contextmanager
def stopwatch():
	"""
	Measure wall-clock time of the wrapped block in microseconds.

	>>> with stopwatch() as elapsed:
	...     pass
	>>> elapsed["us"] >= 0
	True
	"""
	elapsed = {"us": 0.0}
	start = time.perf_counter_ns()
	try:
		yield elapsed
	finally:
		elapsed["us"] = (time.perf_counter_ns() - start) / 1000.0


def format_float(value) -> str:
	if value is None:
		return ""
	value = float(value)
	if math.isnan(value):
		return "nan"
	if math.isinf(value):
		return "inf" if value > 0 else "-inf"
	return f"{value:.12g}"


def to_jsonable(value):
	"""Convert numpy containers and non-finite floats into JSON-safe values."""
	if isinstance(value, dict):
		return {k: to_jsonable(v) for k, v in value.items()}
	if isinstance(value, list | tuple):
		return [to_jsonable(v) for v in value]
	if isinstance(value, np.ndarray):
		return to_jsonable(value.tolist())
	if isinstance(value, np.integer):
		return int(value)
	if isinstance(value, float | np.floating):
		value = float(value)
		if math.isinf(value):
			return "inf" if value > 0 else "-inf"
		if math.isnan(value):
			return "nan"
		return value
	return value


def dump_json(payload) -> str:
	return json.dumps(to_jsonable(payload), indent=2)


def content_hash(text: str | bytes) -> str:
	if isinstance(text, str):
		text = text.encode()
	return hashlib.sha256(text).hexdigest()


def csv_text(columns, rows) -> str:
	"""Render `rows` (sequences of already formatted cells) under a header line."""
	buffer = io.StringIO()
	writer = csv.writer(buffer, lineterminator="\n")
	writer.writerow(columns)
	writer.writerows(rows)
	return buffer.getvalue()
