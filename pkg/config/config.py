import os

from dotenv import load_dotenv

load_dotenv()

# =========================================================
# APPLICATION CONFIGURATION
# =========================================================
APP_TITLE = "Precision Indifference Lab"

# =========================================================
# BASE DIRECTORY
# =========================================================
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS_DIR = os.path.join(BASE_DIR, "configs")

# =========================================================
# OUTPUT CONFIGURATION
# =========================================================
OUTPUT_DIR = os.getenv("PIL_OUTPUT_DIR", os.path.join(BASE_DIR, "results"))
SWEEP_CSV = "sweep.csv"
SWEEP_JSON = "sweep.json"
CSV_FLOAT_FORMAT = "%.12e"

# =========================================================
# LOGGING CONFIGURATION
# =========================================================
LOG_DIR = os.getenv("PIL_LOG_DIR", os.path.join(BASE_DIR, "logs"))
LOG_LEVEL = os.getenv("PIL_LOG_LEVEL", "INFO")

# =========================================================
# KERNEL CONFIGURATION
# =========================================================
DEFAULT_LAMBDA = 2.0
# series expansions replace the closed form below these |t|
PHI_SERIES_THRESHOLD = 1e-6
PHI_PRIME_SERIES_THRESHOLD = 1e-4
# tail-contribution tolerance that fixes the truncation radius
TRUNCATION_TOL = float(os.getenv("PIL_TRUNCATION_TOL", "1e-8"))
C_PHI_QUAD_RADIUS = 4096.0
C_PHI_QUAD_NODES = 16
C_PHI_PRIME_RADIUS = 1024.0
C_PHI_PRIME_CELL_SAMPLES = 33
C_PHI_DPRIME_SCAN_POINTS = 10_000
CONV_POINTS_PER_NYQUIST = 64

# =========================================================
# SIGNAL CONFIGURATION
# =========================================================
MIN_NYQUIST_DRAWS = 16
GUARD_INTERVALS = 8
PAD_INTERVALS = 24
GENERATOR_POWER = 6
GENERATOR_BANDWIDTH = 0.9
SUP_POINTS_PER_NYQUIST = 32
TONE_FREQUENCY = 0.1

# =========================================================
# NOISE CONFIGURATION
# =========================================================
SIGMA_FLOOR_MULT = 1.1
SIGMA_SEARCH_LO = 1e-3
SIGMA_SEARCH_HI = 1e3
NOISE_STREAM = 0
DITHER_STREAM = 1

# =========================================================
# SOLVER CONFIGURATION
# =========================================================
EXACT_TOL = 1e-8
NOISY_TOL_SCALE = 0.01
MAX_ITERS_MARGIN = 10
MAX_ITERS_CAP = 10_000

# =========================================================
# HARNESS CONFIGURATION
# =========================================================
DEFAULT_K = 64
DEFAULT_AMPLITUDE = 0.9
DEFAULT_SIGMA_W = 0.0
DEFAULT_N_LIST = (4, 8, 16, 32, 64, 128, 256)
# smallest N entering slope fits and the ratio spread
DEFAULT_FIT_N_MIN = 1
DEFAULT_TRIALS = 400
MIN_TRIALS = 30
DEFAULT_GRID_DENSITY = 4
DEFAULT_SEED = 20240607
DEFAULT_METHODS = ("frame", "onebit")
MAX_FAILED_FRACTION = 0.01
DISTORTION_FLOOR = 1e-10
SLOPE_BAND = (-1.2, -0.8)
RATIO_SPREAD_MAX = 2.5
WORKERS = int(os.getenv("PIL_WORKERS", "1"))
