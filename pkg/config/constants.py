"""
Constants and static values for the twist quantizer
"""

# Default truncation order of hbar series
DEFAULT_TRUNCATION_ORDER = 6

# Generator name reserved for hbar inside polynomial rings
HBAR_SYMBOL = "hbar"

# Word length bound for L-infinity checks
DEFAULT_WORD_LENGTH_BOUND = 4

# Solver ansatz: PBW degree allowed at hbar^n is DEFAULT_SCHEDULE_FACTOR * n
DEFAULT_SCHEDULE_FACTOR = 2

# Built-in twists
BUILTIN_TWISTS = ["trivial", "abelian", "jordanian"]

# How a problem obtains its twist
TWIST_MODES = {
    "BUILTIN": "builtin",
    "SOLVE": "solve",
    "IMPORTED": "imported",
}

# Process exit codes
EXIT_CODES = {
    "PASS": 0,
    "CHECK_FAILED": 1,
    "USAGE": 2,
}

# Verification checks in report order
CHECK_NAMES = [
    "lie_algebra",
    "cybe",
    "cobracket_cocycle",
    "action_morphism",
    "poisson_action",
    "twist_cocycle",
    "counit_normalization",
    "classical_limit",
    "jk_coherence",
    "twisted_coproduct_iterates",
]

# HTTP status codes
HTTP_STATUS = {
    "BAD_REQUEST": 400,
    "INTERNAL_SERVER_ERROR": 500
}

# Logging format shared by all entry points
LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

# Logging levels
LOG_LEVELS = {
    "DEBUG": "debug",
    "INFO": "info",
    "WARNING": "warning",
    "ERROR": "error",
}

# Report format version written into every report
REPORT_VERSION = 1
