"""
Process-wide defaults, read once from the environment (.env supported).
"""
import os

from dotenv import load_dotenv

load_dotenv()

# ===== CONFIG =====
RANK_TOL = float(os.getenv("CALDERON_RANK_TOL", "1e-8"))
OUTPUT_DIR = os.getenv("CALDERON_OUTPUT_DIR", "_results")
LOG_FILE = os.getenv("CALDERON_LOG_FILE") or None
MAX_WORKERS = int(os.getenv("CALDERON_MAX_WORKERS", "4"))
DEFAULT_SEED = int(os.getenv("CALDERON_DEFAULT_SEED", "20240917"))
