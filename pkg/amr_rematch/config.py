"""
Configuration and Environment Setup for the AMR Rematch Toolkit
"""

import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Frame generalization (PropBank -> generalized frame TSV)
AMR_FRAMES = os.getenv("AMR_FRAMES") or None

# Run configuration
DEFAULT_SEED = int(os.getenv("AMR_REMATCH_SEED", "42"))
DEFAULT_JOBS = int(os.getenv("AMR_REMATCH_JOBS", "1"))
LOG_LEVEL = os.getenv("AMR_REMATCH_LOG_LEVEL", "INFO")
LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

# Penman parsing
DEFAULT_INVERT_NORMALIZE = True
INVERSE_ROLE_EXCEPTIONS = (":consist-of", ":prep-out-of", ":prep-on-behalf-of")
DEFAULT_SERIALIZE_INDENT = -1  # penman's adaptive indentation; None for one line

# Motif configuration
MOTIF_KINDS = ("attribute", "instance", "relation")
DEFAULT_MOTIF_KINDS = frozenset(MOTIF_KINDS)

# Metric configuration
METRIC_NAMES = ("rematch", "labels", "smatch")
DEFAULT_METRIC = "rematch"
DEFAULT_SMATCH_RESTARTS = 4
SMATCH_EXACT_LIMIT = 5040  # 7! injective alignments
DEFAULT_CANDIDATES = "all"  # Options: "all", "label"
SCORE_DECIMALS = 4

# RARE configuration
DEFAULT_LEVELS = tuple(i / 8 for i in range(9))
DEFAULT_SPLIT = (0.8, 0.1, 0.1)
MAX_ATTEMPTS_PER_EDGE = 100
SPLIT_NAMES = ("train", "dev", "test")
STATS_FILE = "stats.json"

# Benchmark configuration
DEFAULT_BENCH_PAIRS = 200
FIT_MIN_LOG10_N = 1.5

# Synthetic corpus configuration
SYNTH_MIN_SIZE = 5
SYNTH_MAX_SIZE = 1000
SYNTH_CORPUS_SIZE = 300


def get_dataset_name_from_file(corpus_file: str) -> str:
    """
    Generate a clean dataset name based on the corpus file name.

    Args:
        corpus_file: Path to the Penman corpus file

    Returns:
        Dataset name string
    """
    # Extract filename without extension
    filename = os.path.splitext(os.path.basename(corpus_file))[0]
    # Clean filename for use as dataset name (remove special chars, replace with underscore)
    clean_name = "".join(c if c.isalnum() else "_" for c in filename)
    return f"rare_{clean_name}"
