import json
import tempfile
from pathlib import Path

from hfvc.bench.cells import BenchConfig
from hfvc.exceptions import ValidationError
from hfvc.scenarios.tilt import TiltParams
from hfvc.setup import settings
from hfvc.setup.config import BENCH_PROBLEMS_PER_CELL, TILT_STEPS
from hfvc.tests.utils import HfvcTestCase


class TestSettings(HfvcTestCase):
	def setUp(self):
		super().setUp()
		self.tmp = tempfile.TemporaryDirectory()

	def tearDown(self):
		self.tmp.cleanup()

	def write(self, document, name="config.json"):
		path = Path(self.tmp.name) / name
		path.write_text(document if isinstance(document, str) else json.dumps(document))
		return path

	def assertPointer(self, pointer, fn, *args, **kwargs):
		with self.assertRaises(ValidationError) as ctx:
			fn(*args, **kwargs)
		self.assertEqual(ctx.exception.pointer, pointer)

	def test_defaults(self):
		self.assertEqual(settings.bench_config(), BenchConfig())
		self.assertEqual(settings.tilt_params().steps, TILT_STEPS)

	def test_file_values(self):
		cfg = settings.bench_config(self.write({"seed": 9, "families": ["spatial"], "mu_range": [0.5, 0.5]}))
		self.assertEqual(cfg.seed, 9)
		self.assertEqual(cfg.families, ("spatial",))
		self.assertEqual(cfg.mu_range, (0.5, 0.5))
		self.assertEqual(cfg.problems_per_cell, BENCH_PROBLEMS_PER_CELL)

	def test_flags_override_the_file(self):
		path = self.write({"rate": 0.2, "steps": 4})
		params = settings.tilt_params(path, rate=0.9, steps=None)
		self.assertEqual((params.rate, params.steps), (0.9, 4))

	def test_integers_are_accepted_for_floats(self):
		self.assertEqual(settings.tilt_params(self.write({"mu_hand": 1})).mu_hand, 1)

	def test_unknown_key(self):
		self.assertPointer("/speed", settings.tilt_params, self.write({"speed": 1.0}))

	def test_wrong_types(self):
		self.assertPointer("/steps", settings.tilt_params, self.write({"steps": "many"}))
		self.assertPointer("/steps", settings.tilt_params, self.write({"steps": 2.5}))
		self.assertPointer("/check", settings.bench_config, self.write({"check": 1}))
		self.assertPointer("/families", settings.bench_config, self.write({"families": "planar"}))

	def test_values_are_validated(self):
		self.assertPointer("/workers", settings.bench_config, self.write({"workers": 0}))
		self.assertPointer("/axis", settings.tilt_params, self.write({"axis": [0, 0, 0]}))

	def test_cells_may_be_null(self):
		self.assertIsNone(settings.bench_config(self.write({"cells": None})).cells)

	def test_malformed_files(self):
		self.assertPointer("", settings.bench_config, self.write("{\"seed\": "))
		self.assertPointer("", settings.bench_config, self.write("[1, 2]"))
		self.assertPointer("", settings.bench_config, Path(self.tmp.name) / "absent.json")

	def test_config_hash_follows_the_effective_values(self):
		self.assertEqual(settings.config_hash(TiltParams()), settings.config_hash(TiltParams()))
		self.assertNotEqual(settings.config_hash(TiltParams()), settings.config_hash(TiltParams(rate=0.1)))
