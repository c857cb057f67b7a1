"""Configuration for the Rado-number and density-increment toolkit."""
import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

VERSION = "0.1.0"

# Seeds and output
DEFAULT_SEED = int(os.getenv("RADO_SEED", "0"))
OUTPUT_DIR = Path(os.getenv("RADO_OUTPUT_DIR", "output"))
LOG_FILE = os.getenv("RADO_LOG_FILE")

# Numeric tolerances
COMPLEX_TOL = 1e-9  # approximate complex/real comparisons
SPECTRUM_TOL = 1e-12  # boundary ties in large-spectrum thresholds
PROBABILITY_TOL = 1e-12  # weights of a probability measure must sum to 1 within this
MEMBERSHIP_TOL = 1e-12  # |gamma(x) - 1| <= width boundary slack
MIN_WIDTH = 1e-300  # widths below every nonzero |gamma(x) - 1| give the same Bohr set
GAME_GAP_TOL = 1e-6  # duality gap accepted for non-exact game values
ROUNDING_SLACK = 0.25  # FFT integer counts must sit this close to an integer

# Budgets
EXACT_GAME_SUPPORT = 64  # exact rational game values up to this support size
RETRY_BUDGET = 32
REGULAR_GRID = 64
DISSOCIATION_EXACT_LIMIT = 20
ASCENT_ITERATIONS = 12
INSTANCE_ATTEMPTS = 40  # generator draws per requested instance

# Tracer defaults
CD1_EXPONENT = 8.0  # exponent multiplier in the (delta / 2 r d |a||b|)^(C d) count threshold
TOY_BREADTH = 8  # spectral candidates tried per kernel-intersection step
TOY_CODIM_BUDGET = 4  # codimension allowed for one spectral increment
