"""
CLI Configuration for rv.
"""

import os
from pathlib import Path

from dotenv import load_dotenv

# Load environment from project root
PROJECT_ROOT = Path(__file__).resolve().parent.parent
load_dotenv(PROJECT_ROOT / ".env")

# =============================================================================
# OUTPUT
# =============================================================================

# Indent of JSON reports written to stdout or --json
JSON_INDENT: int = int(os.getenv("RV_JSON_INDENT", "2"))

# Rows shown in the per-pair stretch table
TOP_PAIRS_SHOWN: int = 10

# =============================================================================
# DEFAULT POLICIES
# =============================================================================

M0E_ORDERING: str = "gonzalez"
CONNECTED_M0E_ORDERING: str = "given"

# =============================================================================
# BENCH
# =============================================================================

# Random-tree sizes (doubling, so consecutive timings give a linearity ratio)
BENCH_TREE_SIZES: list[int] = [
    int(x) for x in os.getenv("RV_BENCH_SIZES", "62500,125000,250000").split(",")
]

# Complete-binary-tree heights
BENCH_BTREE_HEIGHTS: list[int] = [14, 15, 16, 17]

BENCH_REPEATS: int = 5
