import csv
import json
import os
import tempfile
from pathlib import Path

from click.testing import CliRunner

import hfvc
from hfvc.commands import main
from hfvc.commands.manifest import RunManifest
from hfvc.fixtures import fixture_path
from hfvc.setup.config import RECORD_COLUMNS, TILT_COLUMNS
from hfvc.tests.utils import HfvcTestCase


class CommandTestCase(HfvcTestCase):
	def setUp(self):
		super().setUp()
		self.runner = CliRunner()
		self.tmp = tempfile.TemporaryDirectory()
		self.dir = Path(self.tmp.name)

	def tearDown(self):
		self.tmp.cleanup()

	def invoke(self, *args, input=None):
		return self.runner.invoke(main, [str(a) for a in args], input=input)

	def read_csv(self, path):
		with open(path, newline="") as f:
			return list(csv.DictReader(f))


class TestSolve(CommandTestCase):
	def test_free_robot(self):
		out = self.dir / "solution.json"
		result = self.invoke("solve", fixture_path("free_robot"), "--out", out)
		self.assertEqual(result.exit_code, 0, result.output)
		solution = json.loads(out.read_text())
		self.assertEqual(solution["status"], "solved")
		self.assertEqual(solution["scene"], "free_robot")
		self.assertAlmostEqual(solution["crashing_index"], 1.0)
		self.assertEqual(solution["manifest"]["command"], "solve")
		self.assertEqual(solution["manifest"]["version"], hfvc.__version__)
		self.assertEqual(len(solution["manifest"]["config_hash"]), 64)

	def test_rotation_about_the_pinned_line_is_infeasible(self):
		out = self.dir / "solution.json"
		result = self.invoke("solve", fixture_path("diamond_rotate"), "--out", out)
		self.assertEqual(result.exit_code, 2, result.output)
		solution = json.loads(out.read_text())
		self.assertEqual(solution["status"], "infeasible")
		self.assertEqual(solution["reason"], "rank_condition")
		self.assertEqual(solution["stage"], "velocity")

	def test_truncated_json(self):
		scene = self.dir / "truncated.json"
		scene.write_text(fixture_path("free_robot").read_text()[:40])
		result = self.invoke("solve", scene)
		self.assertEqual(result.exit_code, 1)
		self.assertIn("malformed JSON", result.output)

	def test_missing_file(self):
		self.assertEqual(self.invoke("solve", self.dir / "absent.json").exit_code, 1)

	def test_schema_errors_carry_the_pointer(self):
		document = json.loads(fixture_path("free_robot").read_text())
		document["schema_version"] = 2
		scene = self.dir / "scene.json"
		scene.write_text(json.dumps(document))
		result = self.invoke("solve", scene)
		self.assertEqual(result.exit_code, 1)
		self.assertIn("/schema_version", result.output)

	def test_reads_stdin(self):
		out = self.dir / "solution.json"
		result = self.invoke("solve", "-", "--out", out, input=fixture_path("free_robot").read_text())
		self.assertEqual(result.exit_code, 0, result.output)
		manifest = json.loads(out.read_text())["manifest"]
		self.assertIsNone(manifest["config_path"])
		self.assertIsNotNone(manifest["config_hash"])

	def test_bad_flag_is_an_input_error(self):
		self.assertEqual(self.invoke("solve", fixture_path("free_robot"), "--mode", "widest").exit_code, 1)


class TestBench(CommandTestCase):
	def run_bench(self, out, *extra):
		args = ("bench", "--family", "planar", "--problems", 10, "--seed", 7, "--out", out, *extra)
		result = self.invoke(*args)
		self.assertEqual(result.exit_code, 0, result.output)
		return out

	def test_writes_records_summary_and_manifest(self):
		out = self.run_bench(self.dir / "run")
		records = self.read_csv(out / "records.csv")
		self.assertEqual(len(records), 60)
		self.assertEqual(tuple(records[0]), RECORD_COLUMNS)

		summary = json.loads((out / "summary.json").read_text())
		for row in ("Total", "Solved", "Average Crashing Index", "ill-conditioned solutions", "Velocity Time(ms)"):
			self.assertIn(row, summary["overall"])
		self.assertEqual(summary["overall"]["Total"], 60)

		manifest = json.loads((out / "manifest.json").read_text())
		self.assertEqual(manifest["seed"], 7)
		self.assertIsNotNone(manifest["finished_at"])

	def test_same_seed_same_records(self):
		first = json.loads((self.run_bench(self.dir / "a") / "summary.json").read_text())
		second = json.loads((self.run_bench(self.dir / "b") / "summary.json").read_text())
		self.assertEqual(first["digest"], second["digest"])

	def test_maximal_mode_never_uses_fewer_velocity_rows(self):
		minimal = self.read_csv(self.run_bench(self.dir / "min", "--mode", "minimal") / "records.csv")
		maximal = self.read_csv(self.run_bench(self.dir / "max", "--mode", "maximal") / "records.csv")
		for a, b in zip(minimal, maximal):
			if a["status"] == "solved" and b["status"] == "solved":
				self.assertGreaterEqual(int(b["n_av"]), int(a["n_av"]))

	def test_cells_filter(self):
		out = self.run_bench(self.dir / "run", "--cells", "planar/ss/*")
		cells = {record["cell"] for record in self.read_csv(out / "records.csv")}
		self.assertEqual(cells, {"planar/ss/1x1", "planar/ss/1x2"})

	def test_config_file_and_flag_precedence(self):
		config = self.dir / "bench.json"
		config.write_text(json.dumps({"seed": 3, "problems_per_cell": 2, "families": ["planar"]}))
		out = self.dir / "run"
		result = self.invoke("bench", "--config", config, "--seed", 5, "--out", out)
		self.assertEqual(result.exit_code, 0, result.output)
		self.assertEqual(json.loads((out / "summary.json").read_text())["seed"], 5)
		self.assertEqual(len(self.read_csv(out / "records.csv")), 12)
		self.assertEqual(json.loads((out / "manifest.json").read_text())["config_path"], str(config))

	def test_unknown_config_key(self):
		config = self.dir / "bench.json"
		config.write_text(json.dumps({"problems": 2}))
		result = self.invoke("bench", "--config", config, "--out", self.dir / "run")
		self.assertEqual(result.exit_code, 1)
		self.assertIn("/problems", result.output)

	def test_unmatched_cells(self):
		result = self.invoke("bench", "--family", "planar", "--cells", "spatial/*", "--out", self.dir / "run")
		self.assertEqual(result.exit_code, 1)


class TestTilt(CommandTestCase):
	def run_tilt(self, *extra):
		out = self.dir / "tilt.csv"
		result = self.invoke("tilt", "--out", out, *extra)
		self.assertEqual(result.exit_code, 0, result.output)
		return self.read_csv(out)

	def test_default_trajectory(self):
		rows = self.run_tilt()
		self.assertEqual(len(rows), 50)
		self.assertEqual(tuple(rows[0]), TILT_COLUMNS)
		self.assertTrue(all(row["status"] == "solved" for row in rows))
		self.assertTrue(all((row["n_av"], row["n_af"]) == ("1", "2") for row in rows))
		manifest = json.loads((self.dir / "tilt.csv.manifest.json").read_text())
		self.assertEqual(manifest["command"], "tilt")

	def test_zero_rate(self):
		rows = self.run_tilt("--rate", 0, "--steps", 5)
		self.assertEqual(len(rows), 5)
		self.assertTrue(all(float(row["w_av"]) == 0.0 for row in rows))

	def test_zero_axis(self):
		result = self.invoke("tilt", "--axis", 0, 0, 0, "--out", self.dir / "tilt.csv")
		self.assertEqual(result.exit_code, 1)
		self.assertIn("/axis", result.output)

	def test_config_file(self):
		config = self.dir / "tilt.json"
		config.write_text(json.dumps({"steps": 3, "mu_hand": 1.0}))
		self.assertEqual(len(self.run_tilt("--config", config)), 3)

	def test_frictionless_contacts(self):
		result = self.invoke("tilt", "--mu-hand", 0, "--mu-table", 0, "--out", self.dir / "tilt.csv")
		self.assertEqual(result.exit_code, 2)
		self.assertIn("step 0", result.output)

	def test_streams_to_stdout(self):
		result = self.invoke("tilt", "--steps", 2)
		self.assertEqual(result.exit_code, 0, result.output)
		self.assertIn(",".join(TILT_COLUMNS), result.output)


class TestSelftest(CommandTestCase):
	def test_selected_suites_pass(self):
		report = self.dir / "report.json"
		result = self.invoke("selftest", "--suite", "crashing_index", "--suite", "underactuation", "--out", report)
		self.assertEqual(result.exit_code, 0, result.output)
		self.assertIn("PASS crashing_index", result.output)
		suites = json.loads(report.read_text())["suites"]
		self.assertEqual([s["name"] for s in suites], ["crashing_index", "underactuation"])


class TestManifest(HfvcTestCase):
	def test_round_trip_fields(self):
		manifest = RunManifest.begin("bench", "cfg.json", 4, "abc").finish()
		data = manifest.to_dict()
		self.assertEqual((data["command"], data["config_path"], data["seed"]), ("bench", "cfg.json", 4))
		self.assertLessEqual(data["started_at"], data["finished_at"])

	def test_hashes_the_input_file(self):
		with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as f:
			f.write("{}")
		try:
			first = RunManifest.begin("solve", f.name, input_path=f.name).config_hash
			second = RunManifest.begin("solve", f.name, input_path=f.name).config_hash
		finally:
			os.unlink(f.name)
		self.assertEqual(first, second)
		self.assertEqual(len(first), 64)
