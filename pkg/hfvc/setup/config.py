"""
Default constants for the solver, the benchmark harness and the block-tilting scenario.

Everything here can be overridden through JSON configuration files or command-line flags;
see hfvc.setup.settings.
"""

import math

# Linear algebra
RANK_TOL = 1e-9  # relative to the largest singular value
MIN_NORM_RESIDUAL_TOL = 1e-8  # scaled by (1 + ||b||)

# Quadratic programming
QP_MAX_ITER = 200
QP_KKT_TOL = 1e-6
QP_DUAL_FEAS_TOL = 1e-8
QP_SYMMETRY_TOL = 1e-10

# Contact model
N_MIN = 0.5  # normal-force floor [N]
RIDGE_COUNT = 8  # sides of the polyhedral friction cone in 3D
UNIT_NORMAL_TOL = 1e-12
TANGENCY_TOL = 1e-10

# Solver
VELOCITY_DIM_MODES = ("minimal", "maximal")
DEFAULT_VELOCITY_DIM_MODE = "minimal"
ILL_CONDITIONED_THRESHOLD = 100.0
GOAL_INCLUSION_NULL_TOL = 1e-8
GOAL_INCLUSION_SOLUTION_TOL = 1e-6
ORTHONORMALITY_TOL = 1e-10
NEWTON_RESIDUAL_TOL = 1e-6
GUARD_SLACK_TOL = 1e-6

# Benchmark
BENCH_FAMILIES = ("planar", "spatial")
BENCH_PROBLEMS_PER_CELL = 100
BENCH_SEED = 0
MU_RANGE = (0.3, 1.0)
BOX_HALF_WIDTH = 0.5  # contact positions sampled in the unit box
ORACLE_SAMPLES = 200
ORACLE_GAP_TOL = 1e-6
BENCH_N_MIN = 0.0
FINGER_WEIGHT = 1.0  # per-finger self weight carried by the actuators [N]

# CSV column order for benchmark records
RECORD_COLUMNS = (
	"problem_id",
	"cell",
	"status",
	"n_av",
	"n_af",
	"crashing_index",
	"velocity_time_us",
	"force_time_us",
	"oracle_gap",
)
TIMING_COLUMNS = ("velocity_time_us", "force_time_us")

# Block tilting (75 mm wooden cube)
TILT_BLOCK_EDGE = 0.075  # [m]
TILT_BLOCK_MASS = 0.25  # [kg]
TILT_GRAVITY = 9.81  # [m/s^2]
TILT_MU_HAND = 0.8
TILT_MU_TABLE = 0.6
TILT_N_MIN = 0.5  # [N]
TILT_RATE = 0.5  # [rad/s]
TILT_ANGLE = math.pi / 4  # total tilt [rad]
TILT_STEPS = 50
TILT_AXIS = (0.0, 1.0, 0.0)
TILT_HAND_OFFSET = 0.25  # hand contact along the top face, as a fraction of the edge, toward the pivot

# CSV column order for tilt steps
TILT_COLUMNS = (
	"step",
	"theta",
	"status",
	"n_av",
	"n_af",
	"crashing_index",
	"w_av",
	"eta_af_1",
	"eta_af_2",
	"force_x",
	"force_y",
	"force_z",
	"y_fraction",
	"min_guard_slack",
)
