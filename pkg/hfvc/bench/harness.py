"""
Benchmark harness: generate every problem of the selected cells, solve it, check it,
optionally compare it with sampled alternatives, and aggregate the results per cell,
per family and overall.
"""

import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

import hfvc
from hfvc.bench.cells import BenchCell, BenchConfig
from hfvc.bench.generator import generate_problem, problem_rng
from hfvc.bench.oracle import oracle_gap
from hfvc.exceptions import INFEASIBLE_GOAL_REASONS, GuardInfeasible, HfvcError, InfeasibleGoal, NumericalFailure
from hfvc.ochs.checks import check_solution
from hfvc.ochs.solution import SolveOptions
from hfvc.ochs.solver import ochs_solve
from hfvc.setup.config import ORACLE_GAP_TOL, RECORD_COLUMNS, TIMING_COLUMNS
from hfvc.utils import content_hash, csv_text, dump_json, format_float

log = hfvc.logger("bench")

STATUSES = (
	"solved",
	*INFEASIBLE_GOAL_REASONS,
	"guard_infeasible",
	"qp_max_iter",
	"numerical_error",
	"check_failed",
)


@dataclass
class BenchRecord:
	problem_id: str
	cell: str
	status: str
	n_av: int | None = None
	n_af: int | None = None
	crashing_index: float = math.inf
	velocity_time_us: float | None = None
	force_time_us: float | None = None
	oracle_gap: float | None = None
	failed_checks: list = field(default_factory=list)

	@property
	def solved(self) -> bool:
		return self.status == "solved"

	@property
	def oracle_beaten(self) -> bool:
		return self.oracle_gap is not None and self.oracle_gap < -ORACLE_GAP_TOL * max(1.0, self.crashing_index)

	def row(self, columns=RECORD_COLUMNS) -> list[str]:
		values = []
		for column in columns:
			value = getattr(self, column)
			values.append(format_float(value) if isinstance(value, float) else "" if value is None else str(value))
		return values


def failure_status(error: Exception) -> str:
	if isinstance(error, InfeasibleGoal):
		return error.reason
	if isinstance(error, GuardInfeasible):
		return "guard_infeasible"
	if isinstance(error, NumericalFailure) and error.reason == "qp_max_iter":
		return "qp_max_iter"
	return "numerical_error"


def evaluate(model, cfg: BenchConfig, problem_id: str, cell: str = "", oracle_rng=None) -> BenchRecord:
	"""Solve one model and turn the outcome into a record; failures are recorded, never raised."""
	opts = SolveOptions(
		velocity_dim_mode=cfg.velocity_dim_mode, ill_conditioned_threshold=cfg.ill_conditioned_threshold
	)
	try:
		solution = ochs_solve(model, opts)
	except (HfvcError, np.linalg.LinAlgError) as e:
		status = failure_status(e)
		if status == "numerical_error":
			hfvc.log_error(f"{problem_id}: {e}", title="bench")
		return BenchRecord(problem_id, cell, status)

	record = BenchRecord(
		problem_id,
		cell,
		"solved",
		n_av=solution.n_av,
		n_af=solution.n_af,
		crashing_index=solution.crashing_index,
		velocity_time_us=solution.timings["velocity_us"],
		force_time_us=solution.timings["force_us"],
	)

	if cfg.check:
		report = check_solution(model, solution, minimal=opts.minimal)
		if not report.ok:
			record.status = "check_failed"
			record.failed_checks = report.failures()
			log.warning("%s failed checks %s", problem_id, record.failed_checks)

	if cfg.oracle_samples and solution.n_av and oracle_rng is not None:
		record.oracle_gap = oracle_gap(
			model, solution.C, solution.crashing_index, cfg.oracle_samples, oracle_rng, cfg.velocity_dim_mode
		)
		if record.oracle_beaten:
			log.warning("%s: sampled control beats the solver by %.3g", problem_id, -record.oracle_gap)
	return record


def solve_problem(cfg: BenchConfig, cell: BenchCell, problem_index: int) -> BenchRecord:
	model = generate_problem(cfg, cell, problem_rng(cfg.seed, cell.index, problem_index))
	problem_id = f"{cell.index:02d}-{problem_index:05d}"
	oracle_rng = problem_rng(cfg.seed, cell.index, problem_index, stream=1)
	return evaluate(model, cfg, problem_id, cell.label, oracle_rng)


def solve_task(cfg: BenchConfig, task) -> BenchRecord:
	return solve_problem(cfg, *task)


def collect_records(cfg: BenchConfig) -> list[BenchRecord]:
	tasks = [(cell, i) for cell in cfg.selected_cells() for i in range(cfg.problems_per_cell)]
	log.info("benchmark: %d problems in %d cells, %d worker(s)", len(tasks), len(cfg.selected_cells()), cfg.workers)
	if cfg.workers == 1:
		return [solve_task(cfg, task) for task in tasks]

	chunksize = max(1, len(tasks) // (8 * cfg.workers))
	with ProcessPoolExecutor(max_workers=cfg.workers) as executor:
		return list(executor.map(partial(solve_task, cfg), tasks, chunksize=chunksize))


def mean(values) -> float | None:
	return float(np.mean(values)) if len(values) else None


def table_rows(records, threshold: float) -> dict:
	solved = [r for r in records if r.solved]
	finite = [r.crashing_index for r in solved if math.isfinite(r.crashing_index)]
	velocity_ms = [r.velocity_time_us / 1000.0 for r in solved]
	force_ms = [r.force_time_us / 1000.0 for r in solved]
	gaps = [r.oracle_gap for r in solved if r.oracle_gap is not None]
	return {
		"Total": len(records),
		"Solved": len(solved),
		"Average Crashing Index": mean(finite),
		"ill-conditioned solutions": sum(1 for index in finite if index > threshold),
		"Velocity Time(ms)": {"Average": mean(velocity_ms), "Worst": max(velocity_ms, default=None)},
		"Force Time (ms)": {"Average": mean(force_ms), "Worst": max(force_ms, default=None)},
		"failures": dict(sorted(Counter(r.status for r in records if not r.solved).items())),
		"oracle": {
			"compared": len(gaps),
			"beaten": sum(1 for r in solved if r.oracle_beaten),
			"min_gap": min(gaps, default=None),
		},
	}


def records_csv(records, columns=RECORD_COLUMNS) -> str:
	return csv_text(columns, (record.row(columns) for record in records))


def records_digest(records) -> str:
	"""SHA-256 of the record CSV without the timing columns."""
	return content_hash(records_csv(records, tuple(c for c in RECORD_COLUMNS if c not in TIMING_COLUMNS)))


def summarize(cfg: BenchConfig, records) -> dict:
	threshold = cfg.ill_conditioned_threshold
	by_cell, by_family = {}, {}
	for record in records:
		by_cell.setdefault(record.cell, []).append(record)
		by_family.setdefault(record.cell.split("/")[0], []).append(record)
	return {
		"velocity_dim_mode": cfg.velocity_dim_mode,
		"goal_dim": cfg.goal_dim,
		"seed": cfg.seed,
		"overall": table_rows(records, threshold),
		"families": {family: table_rows(rows, threshold) for family, rows in by_family.items()},
		"cells": {label: table_rows(rows, threshold) for label, rows in by_cell.items()},
		"digest": records_digest(records),
	}


@dataclass
class BenchResult:
	records: list
	summary: dict

	def write(self, out_dir) -> dict:
		out_dir = Path(out_dir)
		out_dir.mkdir(parents=True, exist_ok=True)
		paths = {"records": out_dir / "records.csv", "summary": out_dir / "summary.json"}
		paths["records"].write_text(records_csv(self.records))
		paths["summary"].write_text(dump_json(self.summary) + "\n")
		return paths


def run_benchmark(cfg: BenchConfig) -> BenchResult:
	records = collect_records(cfg)
	summary = summarize(cfg, records)
	overall = summary["overall"]
	log.info("benchmark solved %d of %d", overall["Solved"], overall["Total"])
	return BenchResult(records, summary)
