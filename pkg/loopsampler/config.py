"""Process-wide settings read from the environment."""
import os
from pathlib import Path

LOG_LEVEL = os.getenv("LOOPSAMPLER_LOG_LEVEL", "INFO").upper()
DISABLE_JIT = os.getenv("LOOPSAMPLER_DISABLE_JIT") == "1"

UNITARITY_TOL = float(os.getenv("LOOPSAMPLER_UNITARITY_TOL", "1e-10"))
CLOSURE_TOL = float(os.getenv("LOOPSAMPLER_CLOSURE_TOL", "1e-8"))

SCHEMA_DIR = Path(
    os.getenv("LOOPSAMPLER_SCHEMA_DIR", os.path.join(os.path.dirname(__file__), "schemas"))
)

# Source defaults for a 10-bin loop
DEFAULT_SLOTS = 10
DEFAULT_BIN_NS = 13.0
DEFAULT_LOOPS = 5
