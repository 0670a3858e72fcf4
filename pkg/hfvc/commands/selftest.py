"""
Invariant suites behind `hfvc selftest`.

Each suite draws its own seeded generator and reports how many cases it checked and which
failed. `desk` sizes finish in seconds; `full` sizes are the acceptance-scale corpus.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

import hfvc
from hfvc.bench.cells import BenchConfig
from hfvc.bench.generator import random_orthonormal_rows
from hfvc.bench.harness import run_benchmark
from hfvc.bench.oracle import brute_force_qp, random_feasible_qp
from hfvc.core import linalg
from hfvc.core.qp import QpStatus, qp_solve
from hfvc.exceptions import InfeasibleGoal
from hfvc.fixtures import fixture_path
from hfvc.model.body import DofPartition
from hfvc.model.scene import load_model
from hfvc.ochs.checks import orthonormality_residual
from hfvc.ochs.solver import ochs_solve
from hfvc.ochs.velocity import complete_axes, crashing_index
from hfvc.scenarios.tilt import run_tilt
from hfvc.setup.config import GUARD_SLACK_TOL, ORACLE_SAMPLES, ORTHONORMALITY_TOL

log = hfvc.logger("selftest")

SCALES = {
	"desk": {
		"linalg": 100,
		"rotation": 100,
		"qp": 50,
		"planar_per_cell": 10,
		"spatial_per_cell": 1,
		"oracle_samples": 20,
	},
	"full": {
		"linalg": 1000,
		"rotation": 1000,
		"qp": 500,
		"planar_per_cell": 100,  # 6 cells
		"spatial_per_cell": 17,  # 72 cells
		"oracle_samples": ORACLE_SAMPLES,
	},
}

ANALYTIC_ANGLES_DEG = (15.0, 30.0, 45.0, 60.0, 75.0)
TILT_Y_FRACTION_MAX = 0.05

SUITES = {}


def suite(name: str):
	def register(fn):
		SUITES[name] = fn
		return fn

	return register


@dataclass
class SuiteResult:
	name: str
	checked: int = 0
	failures: list = field(default_factory=list)
	detail: dict = field(default_factory=dict)
	seconds: float = 0.0

	@property
	def passed(self) -> bool:
		return not self.failures

	def fail(self, message: str):
		self.failures.append(message)

	def to_dict(self) -> dict:
		return {
			"name": self.name,
			"passed": self.passed,
			"checked": self.checked,
			"failures": self.failures,
			"detail": self.detail,
			"seconds": self.seconds,
		}


@suite("linalg")
def linalg_suite(result: SuiteResult, size: dict, rng):
	for i in range(size["linalg"]):
		m, n = (int(v) for v in rng.integers(0, 8, size=2))
		n = max(n, 1)
		r = int(rng.integers(0, min(m, n) + 1))
		A = rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
		N = linalg.null_rows(A)
		B = linalg.row_basis(A)
		scale = 1.0 + np.abs(A).max(initial=0.0)
		result.checked += 1
		if N.shape[0] + B.shape[0] != n or B.shape[0] != r:
			result.fail(f"case {i}: rank {B.shape[0]} and nullity {N.shape[0]} for a rank-{r} {m}x{n} matrix")
		elif max(orthonormality_residual(N), orthonormality_residual(B)) > ORTHONORMALITY_TOL:
			result.fail(f"case {i}: basis rows are not orthonormal")
		elif np.abs(A @ N.T).max(initial=0.0) > 1e-9 * scale or np.abs(B @ N.T).max(initial=0.0) > 1e-10:
			result.fail(f"case {i}: null rows are not annihilated")


@suite("crashing_index")
def crashing_index_suite(result: SuiteResult, size: dict, rng):
	J = np.array([[1.0, 0.0]])
	for degrees in ANALYTIC_ANGLES_DEG:
		theta = math.radians(degrees)
		c = abs(math.cos(theta))
		expected = math.sqrt((1 + c) / (1 - c))
		got = crashing_index(J, [[math.cos(theta), math.sin(theta)]])
		result.checked += 1
		if abs(got - expected) > 1e-8:
			result.fail(f"{degrees:g} deg: index {got:.12g}, expected {expected:.12g}")
	result.checked += 1
	if not math.isinf(crashing_index(J, [[1.0, 0.0]])):
		result.fail("collinear control does not report an infinite index")


@suite("rotation_invariance")
def rotation_suite(result: SuiteResult, size: dict, rng):
	for i in range(size["rotation"]):
		n_u = int(rng.integers(0, 4))
		n_a = int(rng.integers(2, 7))
		dof = DofPartition(n_u, n_a)
		k = int(rng.integers(1, n_a + 1))
		m = int(rng.integers(0, dof.n - k + 1))
		J = rng.standard_normal((m, dof.n))
		C = np.zeros((k, dof.n))
		C[:, dof.actuated] = random_orthonormal_rows(rng, k, n_a)
		axes = complete_axes(C, dof)
		Q = random_orthonormal_rows(rng, k, k)

		result.checked += 1
		if max(orthonormality_residual(C), orthonormality_residual(axes.T)) > ORTHONORMALITY_TOL:
			result.fail(f"case {i}: C or T is not orthonormal")
			continue
		index, rotated = crashing_index(J, C), crashing_index(J, Q @ C)
		if math.isinf(index) != math.isinf(rotated):
			result.fail(f"case {i}: finiteness of the index changes under rotation")
		elif math.isfinite(index) and abs(index - rotated) > 1e-8 * index:
			result.fail(f"case {i}: index {index:.12g} becomes {rotated:.12g} under rotation")


@suite("qp")
def qp_suite(result: SuiteResult, size: dict, rng):
	for i in range(size["qp"]):
		n = int(rng.integers(1, 7))
		problem = random_feasible_qp(rng, n, int(rng.integers(0, min(n, 3))), int(rng.integers(0, 9)))
		solution = qp_solve(problem)
		reference = brute_force_qp(problem)
		result.checked += 1
		if solution.status != QpStatus.OPTIMAL or reference is None:
			result.fail(f"case {i}: status {solution.status.value}")
		elif abs(solution.objective - reference.objective) > 1e-6 * (1 + abs(reference.objective)):
			result.fail(f"case {i}: objective {solution.objective:.12g}, enumeration {reference.objective:.12g}")
		elif not solution.kkt.ok():
			result.fail(f"case {i}: KKT residuals {solution.kkt}")


@suite("underactuation")
def underactuation_suite(result: SuiteResult, size: dict, rng):
	result.checked += 1
	try:
		ochs_solve(load_model(fixture_path("diamond_rotate")))
		result.fail("rotation about the pinned line was solved")
	except InfeasibleGoal as e:
		if e.reason != "rank_condition":
			result.fail(f"rotation about the pinned line failed with {e.reason}, not rank_condition")

	result.checked += 1
	try:
		ochs_solve(load_model(fixture_path("diamond_lift")))
	except InfeasibleGoal as e:
		result.fail(f"lifting the centre of mass failed: {e}")


@suite("corpus")
def corpus_suite(result: SuiteResult, size: dict, rng):
	seed = int(rng.integers(0, 2**31))
	for family in ("planar", "spatial"):
		cfg = BenchConfig(
			families=(family,),
			problems_per_cell=size[f"{family}_per_cell"],
			seed=seed,
			oracle_samples=size["oracle_samples"],
		)
		records = run_benchmark(cfg).records
		solved = [r for r in records if r.status in ("solved", "check_failed")]
		result.checked += len(records)
		for record in records:
			if record.status == "check_failed":
				result.fail(f"{family} {record.problem_id}: failed {record.failed_checks}")
			elif record.oracle_beaten:
				result.fail(f"{family} {record.problem_id}: sampled control beats the solver by {-record.oracle_gap:.3g}")
		velocity_ms = [r.velocity_time_us / 1000.0 for r in solved if r.velocity_time_us is not None]
		force_ms = [r.force_time_us / 1000.0 for r in solved if r.force_time_us is not None]
		result.detail[family] = {
			"problems": len(records),
			"solved": len(solved),
			"median_velocity_ms": float(np.median(velocity_ms)) if velocity_ms else None,
			"median_force_ms": float(np.median(force_ms)) if force_ms else None,
		}


@suite("tilt")
def tilt_suite(result: SuiteResult, size: dict, rng):
	for step in run_tilt():
		result.checked += 1
		solution = step.solution
		if (solution.n_av, solution.n_af) != (1, 2):
			result.fail(f"step {step.step}: n_av={solution.n_av} n_af={solution.n_af}")
		elif step.y_fraction > TILT_Y_FRACTION_MAX:
			result.fail(f"step {step.step}: force command Y-fraction {step.y_fraction:.3g}")
		elif step.min_guard_slack < -GUARD_SLACK_TOL:
			result.fail(f"step {step.step}: guard slack {step.min_guard_slack:.3g}")


def run_selftest(scale: str = "desk", seed: int = 0, names=None) -> list[SuiteResult]:
	if scale not in SCALES:
		hfvc.throw(f"scale must be one of {tuple(SCALES)}, got {scale!r}", pointer="/scale")
	names = list(names or SUITES)
	unknown = [name for name in names if name not in SUITES]
	if unknown:
		hfvc.throw(f"unknown suites {unknown}; choose from {list(SUITES)}", pointer="/suites")

	results = []
	for name in names:
		result = SuiteResult(name)
		start = time.perf_counter()
		try:
			SUITES[name](result, SCALES[scale], np.random.default_rng((seed, list(SUITES).index(name))))
		except Exception as e:
			hfvc.log_error(f"{name}: {e!r}", title="selftest")
			result.fail(f"raised {type(e).__name__}: {e}")
		result.seconds = time.perf_counter() - start
		log.info("%s: %d checked, %d failed", name, result.checked, len(result.failures))
		results.append(result)
	return results
