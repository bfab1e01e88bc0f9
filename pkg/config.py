import os

# Package metadata
VERSION = "1.0.0"

# Logging
LOG_LEVEL = os.environ.get("PANDA_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s | %(levelname)s | %(message)s"
LOG_DATEFMT = "%H:%M:%S"

# Model defaults
# Options: "gaussian", "bernoulli", "poisson", "exponential", "negative_binomial"
DEFAULT_FAMILY = os.environ.get("PANDA_FAMILY", "gaussian")
DEFAULT_DISPERSION = 1.0
DEFAULT_NB_FAILURES = 5

# Noise scheme defaults
# Options: "bridge", "l0", "lasso", "ridge", "elastic_net", "adaptive_lasso",
#          "scad", "group_lasso", "fused_ridge", "fused_lasso"
DEFAULT_SCHEME = os.environ.get("PANDA_SCHEME", "bridge")
DEFAULT_LAMBDA = 1.0
DEFAULT_GAMMA = 1.0
DEFAULT_SCAD_A = 3.7
DEFAULT_EN_SIGMA2 = 0.0
DEFAULT_ADAPTIVE_GAMMA = 0.1

# |theta| floor inside variance formulas; must stay below DEFAULT_TAU0
DEFAULT_EPS_THETA = float(os.environ.get("PANDA_EPS_THETA", "1e-4"))

# Algorithm defaults
DEFAULT_N_E = int(os.environ.get("PANDA_N_E", "100"))
DEFAULT_M = int(os.environ.get("PANDA_M", "20"))
DEFAULT_R = int(os.environ.get("PANDA_R", "20"))
DEFAULT_MAX_ITER = int(os.environ.get("PANDA_MAX_ITER", "200"))
DEFAULT_TAU = float(os.environ.get("PANDA_TAU", "1e-3"))
DEFAULT_TAU0 = float(os.environ.get("PANDA_TAU0", "0.01"))
# Options: "relchange", "ztest", "both"
DEFAULT_CONVERGENCE = os.environ.get("PANDA_CONVERGENCE", "relchange")
# Options: "large_ne", "large_m"
DEFAULT_ZTEST_REGIME = "large_ne"
DEFAULT_ALPHA = 0.05
MAX_FIT_RETRIES = 1

# Initial estimate
INIT_RIDGE_LAMBDA = 1.0

# IRLS settings
IRLS_MAX_ITER = 100
IRLS_TOL = 1e-8
IRLS_MAX_HALVINGS = 30

# Tuning and simulation
DEFAULT_FOLDS = 5
DEFAULT_REPLICATES = 100
N_JOBS = int(os.environ.get("PANDA_N_JOBS", "1"))

# Inference: warn when n_e exceeds this fraction of n
NE_REGIME_FRACTION = 0.2

# CLI
DEFAULT_OUTPUT_DIR = os.environ.get("PANDA_OUTPUT_DIR", "panda_out")
