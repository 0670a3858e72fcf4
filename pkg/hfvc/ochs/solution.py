from dataclasses import dataclass, field

import numpy as np

import hfvc
from hfvc.core import linalg
from hfvc.core.linalg import RankTol
from hfvc.core.qp import QpLimits, QpSolution
from hfvc.setup.config import DEFAULT_VELOCITY_DIM_MODE, ILL_CONDITIONED_THRESHOLD, VELOCITY_DIM_MODES
from hfvc.utils import to_jsonable


@dataclass(frozen=True)
class SolveOptions:
	velocity_dim_mode: str = DEFAULT_VELOCITY_DIM_MODE
	rank_tol: RankTol = linalg.DEFAULT_TOL
	ill_conditioned_threshold: float = ILL_CONDITIONED_THRESHOLD
	qp_limits: QpLimits = field(default_factory=QpLimits)

	def __post_init__(self):
		if self.velocity_dim_mode not in VELOCITY_DIM_MODES:
			hfvc.throw(f"velocity_dim_mode must be one of {VELOCITY_DIM_MODES}, got {self.velocity_dim_mode!r}")
		if not self.ill_conditioned_threshold > 1:
			hfvc.throw(f"ill_conditioned_threshold must exceed 1, got {self.ill_conditioned_threshold}")

	@property
	def minimal(self) -> bool:
		return self.velocity_dim_mode == "minimal"


@dataclass(frozen=True)
class VelocityControl:
	n_av: int
	C: np.ndarray
	w_av: np.ndarray
	U_bar: np.ndarray
	v_star: np.ndarray


@dataclass(frozen=True)
class ControlAxes:
	n_af: int
	R_a: np.ndarray
	T: np.ndarray


@dataclass(frozen=True)
class ForceControl:
	eta_af: np.ndarray
	eta_a: np.ndarray
	lam: np.ndarray
	qp: QpSolution

	def actuator_force(self, R_a) -> np.ndarray:
		"""f_a = R_a.T @ η_a, the actuator force in the original actuated coordinates."""
		return R_a.T @ self.eta_a


@dataclass(frozen=True)
class HfvcSolution:
	"""
	A hybrid force-velocity control: w = T v and η = T f, where the last n_av rows of T
	are velocity-controlled (targets `w_av`) and the n_af rows before them, inside the
	actuated block, are force-controlled (targets `eta_af`).
	"""

	n_av: int
	n_af: int
	C: np.ndarray
	R_a: np.ndarray
	T: np.ndarray
	w_av: np.ndarray
	eta_af: np.ndarray
	crashing_index: float
	timings: dict
	lam: np.ndarray | None = None
	eta_a: np.ndarray | None = None
	status: str = "solved"

	def ill_conditioned(self, threshold: float = ILL_CONDITIONED_THRESHOLD) -> bool:
		return bool(np.isfinite(self.crashing_index) and self.crashing_index > threshold)

	def force_command(self) -> np.ndarray:
		"""Force-controlled part of the actuator force, R_af.T @ η_af, in actuated coordinates."""
		return self.R_a[: self.n_af].T @ self.eta_af

	def to_dict(self) -> dict:
		return to_jsonable(
			{
				"status": self.status,
				"n_av": self.n_av,
				"n_af": self.n_af,
				"crashing_index": self.crashing_index,
				"C": self.C,
				"R_a": self.R_a,
				"w_av": self.w_av,
				"eta_af": self.eta_af,
				"contact_forces": self.lam if self.lam is not None else [],
				"timings": {"velocity_us": self.timings.get("velocity_us"), "force_us": self.timings.get("force_us")},
			}
		)
