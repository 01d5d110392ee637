from dotenv import load_dotenv
import os

load_dotenv()


def _env_int(name: str, default: int) -> int:
    value = os.environ.get(name, "")
    try:
        return int(value) if value.strip() else default
    except ValueError:
        return default


class Config:
    LOGGER_LEVEL = os.environ.get("LOGGER_LEVEL", "INFO")
    LOG_FILE = os.environ.get("PTLAB_LOG_FILE", "ptlab.log")

    ## Parallel workers; 0 or unset means all available cores
    PTLAB_JOBS = _env_int("PTLAB_JOBS", 0)

    ## Fixed default seed so identical invocations give identical bytes
    DEFAULT_SEED = _env_int("PTLAB_DEFAULT_SEED", 20240917)

    CSV_SIGNIFICANT_DIGITS = 12
    CSV_FLOAT_FORMAT = "%.12g"

    ## Exact integers are reported up to this bound, log-scale beyond it
    EXACT_COUNT_LIMIT = 2 ** 128

    ## Enumeration guards for the brute-force oracles
    BLOCK_ENUM_MAX_N = 24
    TREE_ENUM_MAX_NODES = 2 ** 15
    TREE_ENUM_MAX_COUNT = 10 ** 6
    TREE_UNIFORM_MAX_K = 512

    ## Basis pursuit
    BP_RESIDUAL_TOL = 1e-8
    BP_CHANGE_TOL = 1e-10
    BP_MAX_ITER = 50_000
    BP_PENALTY = 1.0
    BP_POLISH_THRESHOLD = 1e-6
    BP_CERTIFY_RESIDUAL = 1e-6

    SURVIVAL_MARGIN = 1e-9
    SUCCESS_TOLERANCE = 1e-4

    ## Face census
    FACE_ENUM_BUDGET = 10 ** 6
    CENSUS_SIGMA = 3.0

    ## Threshold curves
    THRESHOLD_TAU = 2.0 * 2.718281828459045
    RHO_CEILING = 0.5
    # empirical columns are compared only where ln(1/(delta sqrt(pi))) >= this
    COMPARABLE_LOG_Z = 1.0
    FIXED_POINT_MAX_ITER = 10_000
    FIXED_POINT_DAMPING = 0.5
    FIXED_POINT_TOL = 1e-13
    MAX_OPERATOR_GRID = 64

    ## Phase diagrams
    SOLVER_CALL_WARNING = 10 ** 5
    DEFAULT_GRID_RHO_MAX = 0.55

    SVG_HASH_SALT = "ptlab"
