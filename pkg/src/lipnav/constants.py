"""Constants used throughout lipnav."""

# Float-mode LP tolerances
FEAS_TOL = 1e-9
GAP_TOL = 1e-7

# Generators refuse to build spaces larger than this
DEFAULT_POINT_CAP = 4096

# Violations listed per report before truncation
DEFAULT_MAX_VIOLATIONS = 256

# Bumped whenever a report field changes meaning
REPORT_SCHEMA_VERSION = "1.0"

# Numpy int64 is used for scaled distance arithmetic below this bound
INT64_SAFE_BOUND = 2**62
