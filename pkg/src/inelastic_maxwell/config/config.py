import os
from pathlib import Path

# Base paths
BASE_DIR = Path(__file__).resolve().parent.parent.parent.parent
DATA_DIR = os.path.join(BASE_DIR, "data")
CONFIG_DIR = os.path.join(DATA_DIR, "configs")
CROSS_SECTION_DIR = os.path.join(DATA_DIR, "cross_sections")

# Default output directory, overridable per shell session
OUTPUT_DIR_ENV = "INELASTIC_MAXWELL_OUTPUT_DIR"
OUTPUT_DIR = os.environ.get(OUTPUT_DIR_ENV, os.path.join(BASE_DIR, "outputs"))

# Optimal transport
ASSIGNMENT_CAP = 5000  # largest N handed to the exact assignment solver
LP_ATOM_CAP = 64  # largest atom count handed to the transportation LP
MARGINAL_TOL = 1e-10
WEIGHT_SUM_TOL = 1e-12
ENTROPIC_REG = 1e-2

# Collision kernels
UNIT_TOL = 1e-12
CUTOFF_TOL = 1e-8
INVERSE_CDF_POINTS = 4096
QUAD_TOL = 1e-12

# Particle dynamics
THETA_FLOOR = 1e-12
MAX_EVENTS_PER_STEP = 0.1  # dtau * per-particle collision rate
SNAPSHOT_MAGIC = b"IMAXSNAP"
SNAPSHOT_VERSION = 1

# Verification
SLACK_FACTOR = 3.0
EQUALITY_TOL = 1e-12

# Experiment families and suites
FAMILIES = ["homogeneous", "diffusive", "selfsimilar", "cutoff", "kac"]
INITIAL_RECIPES = ["gaussian", "uniform-cube", "two-point", "dirac", "file"]
SUITES = ["gain", "flow", "diffusive", "cross-section", "kac", "moments", "lemmas", "all"]

# API Configuration
API_HOST = "0.0.0.0"
API_PORT = 8000
API_TITLE = "Inelastic Maxwell API"
API_DESCRIPTION = (
    "Contraction constants, moment calculus and exact W2 distances "
    "for inelastic Maxwell and Kac models."
)
API_VERSION = "1.0.0"

# Logging Configuration
LOG_LEVEL = os.environ.get("INELASTIC_MAXWELL_LOG_LEVEL", "INFO")
