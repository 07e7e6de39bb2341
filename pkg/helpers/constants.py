import sys

RNG_NAME = "PCG64-SeedSequence/1"

# Tolerances
STOCHASTIC_TOL = 1e-12
PERRON_TOL = 1e-10
DIVERGENCE_THRESHOLD = 1e100
FLOAT_MAX = sys.float_info.max

# Default probability range for randomly assigned neighbour-sampling probabilities
SAMPLING_PROB_RANGE = (0.2, 1.0)

# CSV schemas
RUN_COLUMNS = ["run", "iter", "msd_lin", "msd_db"]
LOCAL_RUN_COLUMNS = ["run", "iter", "t", "msd_lin", "msd_db"]
AGGREGATE_COLUMNS = ["iter", "msd_db_mean", "msd_db_std"]
THEORY_COLUMN = "msd_db_theory"

# Report keys, in emission order
REPORT_KEYS = [
    "msd_lin",
    "msd_db",
    "msd_form",
    "msd_recursion_lin",
    "msd_recursion_db",
    "msd_adjoint_lin",
    "msd_adjoint_db",
    "gamma",
    "mu_max",
    "msd_bound",
    "admissible",
    "rho",
    "alpha0",
    "K",
    "M",
    "T",
    "mu",
    "mode",
    "exact",
    "max_std_error",
    "limit_point_drift",
    "config_digest",
]
