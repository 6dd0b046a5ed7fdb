import os

from dotenv import load_dotenv

load_dotenv()


# Search budgets for the constructive procedures
SEARCH_LIMITS = {
    "max_depth": int(os.getenv("ODESC_MAX_DEPTH", "64")),
    "max_offset": int(os.getenv("ODESC_MAX_OFFSET", str(1 << 16))),
    "max_preimage_depth": int(os.getenv("ODESC_MAX_PREIMAGE_DEPTH", "14")),
    "max_candidates": int(os.getenv("ODESC_MAX_CANDIDATES", str(1 << 16))),
}

# Defaults for experiment parameters missing from a config
SIMULATION_DEFAULTS = {
    "n_max": 20,
    "horizon": 4096,
    "trials": 100,
    "seed": 0,
    "depth": 4,
    "depth_cap": int(os.getenv("ODESC_DEPTH_CAP", "64")),
    "threads": int(os.getenv("ODESC_THREADS", "1")),
}

# Verbosity is read from ODESC_LOG (debug, info, warning, error)
LOGGING = {
    "level": os.getenv("ODESC_LOG", "warning").upper(),
    "datefmt": "%H:%M:%S",
}
