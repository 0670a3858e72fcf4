"""
`hfvc` command line: solve a scene file, run the randomized benchmark, run the block-tilting
scenario, or run the invariant suites.

Exit status: 0 success, 1 invalid input, 2 infeasible model, 3 numerical or internal failure.
"""

import sys
from functools import wraps
from pathlib import Path

import click

import hfvc
from hfvc.bench.cells import GOAL_DIMS
from hfvc.bench.harness import run_benchmark
from hfvc.commands.manifest import RunManifest
from hfvc.commands.selftest import SCALES, SUITES, run_selftest
from hfvc.exceptions import HfvcError, InfeasibilityError
from hfvc.model.scene import load_scene
from hfvc.ochs.solution import SolveOptions
from hfvc.ochs.solver import ochs_solve
from hfvc.scenarios.tilt import run_tilt, tilt_csv
from hfvc.setup import settings
from hfvc.setup.config import BENCH_FAMILIES, DEFAULT_VELOCITY_DIM_MODE, VELOCITY_DIM_MODES
from hfvc.utils import content_hash, dump_json

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_FAILED = 3


class HfvcGroup(click.Group):
	def invoke(self, ctx):
		try:
			return super().invoke(ctx)
		except click.UsageError as e:
			# exit 2 means an infeasible model
			e.exit_code = EXIT_INPUT
			raise


def reports_errors(fn):
	"""Print HfvcErrors to stderr and exit with the error's code."""

	@wraps(fn)
	def wrapper(*args, **kwargs):
		try:
			return fn(*args, **kwargs)
		except HfvcError as e:
			step = getattr(e, "step", None)
			prefix = f"step {step}: " if step is not None else ""
			click.secho(f"{type(e).__name__}: {prefix}{e}", err=True, fg="red")
			sys.exit(e.exit_code)

	return wrapper


def emit(text: str, out):
	if out in (None, "-"):
		click.echo(text, nl=not text.endswith("\n"))
	else:
		Path(out).write_text(text)


@click.group(cls=HfvcGroup)
@click.version_option(hfvc.__version__, prog_name=hfvc.__title__)
def main():
	"""Hybrid force-velocity control synthesis."""


@main.command()
@click.argument("scene_file", type=click.Path(dir_okay=False, allow_dash=True))
@click.option("--mode", type=click.Choice(VELOCITY_DIM_MODES), default=DEFAULT_VELOCITY_DIM_MODE, show_default=True)
@click.option("--threshold", type=float, default=None, help="Crashing index above which a solution is ill-conditioned.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Solution JSON file; stdout by default.")
@reports_errors
def solve(scene_file, mode, threshold, out):
	"""Solve the hybrid control of SCENE_FILE ('-' reads stdin)."""
	if scene_file == "-":
		source = click.get_text_stream("stdin").read().encode()
		manifest = RunManifest.begin("solve", config_hash=content_hash(source))
	else:
		source = Path(scene_file)
		manifest = RunManifest.begin("solve", scene_file, input_path=scene_file)
	scene = load_scene(source)
	model = scene.build()
	opts = SolveOptions(velocity_dim_mode=mode)
	if threshold is not None:
		opts = SolveOptions(velocity_dim_mode=mode, ill_conditioned_threshold=threshold)

	try:
		solution = ochs_solve(model, opts)
	except InfeasibilityError as e:
		payload = {
			"scene": scene.name,
			"status": "infeasible",
			"reason": e.reason,
			"stage": e.stage,
			"message": str(e),
		}
		if getattr(e, "violation", None) is not None:
			payload["violation"] = e.violation
		payload["manifest"] = manifest.finish().to_dict()
		emit(dump_json(payload) + "\n", out)
		click.secho(f"infeasible: {e.reason}", err=True, fg="yellow")
		sys.exit(e.exit_code)

	payload = {"scene": scene.name, **solution.to_dict(), "manifest": manifest.finish().to_dict()}
	emit(dump_json(payload) + "\n", out)


@main.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="JSON benchmark config.")
@click.option("--family", "families", type=click.Choice(BENCH_FAMILIES), multiple=True)
@click.option("--problems", type=int, default=None, help="Problems per cell.")
@click.option("--seed", type=int, default=None)
@click.option("--mode", type=click.Choice(VELOCITY_DIM_MODES), default=None)
@click.option("--goal-dim", type=click.Choice(GOAL_DIMS), default=None)
@click.option("--cells", multiple=True, help="Cell label pattern, e.g. 'spatial/ff/*'; repeatable.")
@click.option("--workers", type=int, default=None)
@click.option("--oracle-samples", type=int, default=None, help="Sampled alternative controls per problem.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default="bench-out", show_default=True)
@reports_errors
def bench(config_path, families, problems, seed, mode, goal_dim, cells, workers, oracle_samples, out_dir):
	"""Run the randomized benchmark; writes records.csv, summary.json and manifest.json."""
	cfg = settings.bench_config(
		config_path,
		families=families or None,
		problems_per_cell=problems,
		seed=seed,
		velocity_dim_mode=mode,
		goal_dim=goal_dim,
		cells=cells or None,
		workers=workers,
		oracle_samples=oracle_samples,
	)
	manifest = RunManifest.begin("bench", config_path, cfg.seed, settings.config_hash(cfg))
	result = run_benchmark(cfg)
	paths = result.write(out_dir)
	paths["manifest"] = manifest.finish().write(Path(out_dir) / "manifest.json")

	overall = result.summary["overall"]
	click.echo(f"solved {overall['Solved']} of {overall['Total']} ({cfg.velocity_dim_mode} velocity control dimension)")
	if overall["Average Crashing Index"] is not None:
		click.echo(f"average crashing index {overall['Average Crashing Index']:.4g}")
	for path in paths.values():
		click.echo(f"wrote {path}")


@main.command()
@click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None, help="JSON tilt parameters.")
@click.option("--steps", type=int, default=None)
@click.option("--rate", type=float, default=None, help="Tilt rate [rad/s].")
@click.option("--mu-hand", type=float, default=None)
@click.option("--mu-table", type=float, default=None)
@click.option("--nmin", "n_min", type=float, default=None, help="Normal force floor [N].")
@click.option("--axis", type=float, nargs=3, default=None, help="Tilt axis in world coordinates.")
@click.option("--out", type=click.Path(dir_okay=False), default="-", show_default=True, help="Per-step CSV.")
@reports_errors
def tilt(config_path, steps, rate, mu_hand, mu_table, n_min, axis, out):
	"""Tilt a block about its front edge and report the hybrid control at every step."""
	params = settings.tilt_params(
		config_path,
		steps=steps,
		rate=rate,
		mu_hand=mu_hand,
		mu_table=mu_table,
		n_min=n_min,
		axis=axis or None,
	)
	manifest = RunManifest.begin("tilt", config_path, config_hash=settings.config_hash(params))
	trajectory = run_tilt(params)

	emit(tilt_csv(trajectory), out)
	manifest.finish()
	if out == "-":
		click.echo(manifest.to_json(), err=True)
	else:
		manifest.write(f"{out}.manifest.json")


@main.command()
@click.option("--scale", type=click.Choice(tuple(SCALES)), default="desk", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--suite", "suites", type=click.Choice(tuple(SUITES)), multiple=True, help="Run only these suites.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="JSON report.")
@reports_errors
def selftest(scale, seed, suites, out):
	"""Run the invariant suites; exits 0 only when every suite passes."""
	manifest = RunManifest.begin("selftest", seed=seed)
	results = run_selftest(scale, seed, suites or None)
	for result in results:
		label = "PASS" if result.passed else "FAIL"
		click.secho(
			f"{label} {result.name}: {result.checked} checked in {result.seconds:.2f} s",
			fg="green" if result.passed else "red",
		)
		for failure in result.failures[:10]:
			click.echo(f"  {failure}")
		if len(result.failures) > 10:
			click.echo(f"  ... {len(result.failures) - 10} more")

	if out:
		report = {"scale": scale, "suites": [r.to_dict() for r in results], "manifest": manifest.finish().to_dict()}
		Path(out).write_text(dump_json(report) + "\n")
	sys.exit(EXIT_OK if all(r.passed for r in results) else EXIT_FAILED)
