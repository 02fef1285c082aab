import os

# Grid and quadrature defaults
DEFAULT_GRID_N = int(os.getenv("INEQ_GRID_N", "256"))
DEFAULT_RULE = os.getenv("INEQ_RULE", "simpson")

# Tolerances
TOL_HYP = float(os.getenv("INEQ_TOL_HYP", "1e-9"))
TOL_INEQ = float(os.getenv("INEQ_TOL_INEQ", "1e-8"))
REL_GAP_FLOOR = float(os.getenv("INEQ_REL_GAP_FLOOR", "1e-300"))

# Sharpness search
SEARCH_RESTARTS = int(os.getenv("INEQ_SEARCH_RESTARTS", "8"))
SEARCH_SHRINKS = int(os.getenv("INEQ_SEARCH_SHRINKS", "6"))

# Output
REPORT_DIR = os.getenv("INEQ_REPORT_DIR", "reports")
LOG_LEVEL = os.getenv("INEQ_LOG_LEVEL", "INFO")
SHOW_PROGRESS = os.getenv("INEQ_SHOW_PROGRESS", "0") == "1"
