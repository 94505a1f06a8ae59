"""Application-wide constants and default values."""

# Package Metadata
TOOL_NAME = "eigenstrain"
TOOL_VERSION = "1.0.0"
REPORT_SCHEMA_VERSION = 1

# Unit Conversions (files use MPa, mm, GPa; everything internal is SI)
MPA = 1.0e6
GPA = 1.0e9
MM = 1.0e-3
MM_PER_M = 1000.0  # exact, used for file conversions

# Tensor Storage
VOIGT_LABELS = ("xx", "yy", "zz", "xy", "yz", "xz")
VOIGT_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (0, 2))
N_VOIGT = 6

# Finite Element Configuration
DEFAULT_GAUSS_ORDER = 2
DEFAULT_CG_RTOL = 1e-10
DEFAULT_CG_MAX_ITER_FACTOR = 20  # times the node count
DEFAULT_ASSEMBLY_CHUNK = 4096  # cells per assembly chunk
N_RIGID_MODES = 6
MIN_CELLS_PER_AXIS = 2
MIN_INCOMPATIBILITY_CELLS = 4

# Least Squares Configuration
DEFAULT_SVD_RCOND = 1e-10
CONDITION_WARNING_THRESHOLD = 1e12

# Axisymmetric Configuration
DEFAULT_POLY_ORDER = 5  # order-4 polynomials
DEFAULT_D0_ORDER = 2
RHS_TOLERANCE = 1e-12

# Levenberg-Marquardt Configuration
LM_INITIAL_DAMPING = 1e-3
LM_DAMPING_INCREASE = 10.0
LM_DAMPING_DECREASE = 10.0
LM_MAX_DAMPING = 1e16
LM_STEP_TOLERANCE = 1e-10
LM_COST_TOLERANCE = 1e-12
LM_MAX_ITERATIONS = 200
D0_CHECK_POINTS = 101

# Maxwell Basis Configuration
DEFAULT_Z_ORDER = 3
DEFAULT_PLANE_TERMS = 4
DEFAULT_DIAGNOSTICS_GRID = 17
DIAGNOSTICS_TOLERANCE = 1e-8

# Decomposition Configuration
EQUILIBRIUM_WARNING_TOLERANCE = 1e-6

# Longitudinal Ray Transform Configuration
DEFAULT_RAY_STEP_FRACTION = 0.5  # of the smallest cell edge
SEGMENT_GAUSS_POINTS = 3
DIRECTION_TOLERANCE = 1e-12

# Output Configuration
DEFAULT_OUTPUT_DIR = "results"
CSV_FLOAT_FORMAT = "%.17g"
SVG_HASH_SALT = "eigenstrain"

# Logging Configuration
DEFAULT_LOG_LEVEL = "INFO"
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Text Truncation Limits
MAX_LOG_DISPLAY_LENGTH = 500

# CLI Exit Codes
EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2
EXIT_IO = 3

SUBCOMMANDS = (
    "axisym-forward",
    "axisym-fit",
    "axisym-fit-d0",
    "cube-fit",
    "decompose",
    "lrt-sim",
    "link-check",
)
