"""
Randomized test problem families.

Each cell fixes the family (planar or spatial), the environment contact modes
("f" sticking, "s" sliding, one letter per contact), the number of fingers and the
number of (sticking) contacts per finger.
"""

from dataclasses import asdict, dataclass, field
from fnmatch import fnmatchcase

import hfvc
from hfvc.setup.config import (
	BENCH_FAMILIES,
	BENCH_N_MIN,
	BENCH_PROBLEMS_PER_CELL,
	BENCH_SEED,
	DEFAULT_VELOCITY_DIM_MODE,
	FINGER_WEIGHT,
	ILL_CONDITIONED_THRESHOLD,
	MU_RANGE,
	VELOCITY_DIM_MODES,
)

GOAL_DIMS = ("random", "max")

# (environment mode strings, contacts per finger, finger counts) per family
TABLE = {
	"planar": (
		(("f", "s"), (1, 2), (1,)),
		(("ss",), (1, 2), (1,)),
	),
	"spatial": (
		(("f", "s"), (1, 2, 3), (1, 2, 3)),
		(("ff", "fs", "ss"), (1, 2, 3), (1, 2, 3)),
		(("ffs", "fss", "sss"), (1, 2, 3), (1, 2, 3)),
	),
}


@dataclass(frozen=True)
class BenchCell:
	family: str
	env_modes: str
	fingers: int
	contacts_per_finger: int
	index: int = field(default=0, compare=False)

	@property
	def env_contacts(self) -> int:
		return len(self.env_modes)

	@property
	def dim(self) -> int:
		return 2 if self.family == "planar" else 3

	@property
	def body_dof(self) -> int:
		return 3 if self.family == "planar" else 6

	@property
	def n(self) -> int:
		return self.body_dof * (1 + self.fingers)

	@property
	def label(self) -> str:
		return f"{self.family}/{self.env_modes}/{self.fingers}x{self.contacts_per_finger}"


def table_cells(families=BENCH_FAMILIES) -> list[BenchCell]:
	"""All cells of the requested families, indexed in a fixed order independent of the selection."""
	cells = []
	index = 0
	for family in BENCH_FAMILIES:
		for modes, per_finger, finger_counts in TABLE[family]:
			for env_modes in modes:
				for fingers in finger_counts:
					for contacts_per_finger in per_finger:
						if family in families:
							cells.append(BenchCell(family, env_modes, fingers, contacts_per_finger, index))
						index += 1
	return cells


@dataclass(frozen=True)
class BenchConfig:
	families: tuple = BENCH_FAMILIES
	problems_per_cell: int = BENCH_PROBLEMS_PER_CELL
	seed: int = BENCH_SEED
	velocity_dim_mode: str = DEFAULT_VELOCITY_DIM_MODE
	goal_dim: str = "random"
	cells: tuple | None = None  # label patterns, e.g. "planar/ss/*"
	oracle_samples: int = 0
	ill_conditioned_threshold: float = ILL_CONDITIONED_THRESHOLD
	n_min: float = BENCH_N_MIN
	finger_weight: float = FINGER_WEIGHT
	mu_range: tuple = MU_RANGE
	workers: int = 1
	check: bool = True

	def __post_init__(self):
		object.__setattr__(self, "families", tuple(self.families))
		object.__setattr__(self, "mu_range", tuple(float(v) for v in self.mu_range))
		if self.cells is not None:
			object.__setattr__(self, "cells", tuple(self.cells))
		self.validate()

	def validate(self):
		unknown = set(self.families) - set(BENCH_FAMILIES)
		if unknown or not self.families:
			hfvc.throw(f"families must be drawn from {BENCH_FAMILIES}, got {self.families}", pointer="/families")
		if self.problems_per_cell < 1:
			hfvc.throw("problems_per_cell must be at least 1", pointer="/problems_per_cell")
		if self.seed < 0:
			hfvc.throw("seed must be non-negative", pointer="/seed")
		if self.velocity_dim_mode not in VELOCITY_DIM_MODES:
			hfvc.throw(f"velocity_dim_mode must be one of {VELOCITY_DIM_MODES}", pointer="/velocity_dim_mode")
		if self.goal_dim not in GOAL_DIMS:
			hfvc.throw(f"goal_dim must be one of {GOAL_DIMS}", pointer="/goal_dim")
		if self.oracle_samples < 0:
			hfvc.throw("oracle_samples must be non-negative", pointer="/oracle_samples")
		if self.n_min < 0:
			hfvc.throw("n_min must be non-negative", pointer="/n_min")
		if len(self.mu_range) != 2 or not 0 <= self.mu_range[0] <= self.mu_range[1]:
			hfvc.throw(f"mu_range must be [low, high] with 0 <= low <= high, got {self.mu_range}", pointer="/mu_range")
		if self.workers < 1:
			hfvc.throw("workers must be at least 1", pointer="/workers")

	def selected_cells(self) -> list[BenchCell]:
		cells = table_cells(self.families)
		if self.cells is None:
			return cells
		selected = [cell for cell in cells if any(fnmatchcase(cell.label, pattern) for pattern in self.cells)]
		if not selected:
			hfvc.throw(f"no cell matches {list(self.cells)}", pointer="/cells")
		return selected

	def to_dict(self) -> dict:
		return asdict(self)
