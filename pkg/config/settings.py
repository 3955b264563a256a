"""
Configuration management for the twist quantizer
Centralized settings with environment variable support
"""

import os
from typing import Dict, Any

from dotenv import load_dotenv

from config.constants import DEFAULT_TRUNCATION_ORDER, DEFAULT_WORD_LENGTH_BOUND

# Default configuration values
DEFAULT_CONFIG = {
    "truncation_order": DEFAULT_TRUNCATION_ORDER,  # hbar-adic truncation N, arithmetic is mod hbar^(N+1)
    "seed": 0,
    "max_degree": 2,
    "sample_degree": 5,
    "word_length_bound": DEFAULT_WORD_LENGTH_BOUND,
    "degree_schedule": "",  # "n:deg,n:deg" overrides the default 2n
    "coherence_max_k": 3,
    "coherence_max_l": 2,
    "sample_count": 4,
    "log_level": "INFO",
    "log_file": "quantizer.log",
    "host": "127.0.0.1",
    "port": 8000,
}

ENV_PREFIX = "QUANT_"


class Config:
    """Configuration manager with environment variable override support"""

    def __init__(self):
        self._config = DEFAULT_CONFIG.copy()
        self._load_from_env()

        if self.get("truncation_order") < 1:
            raise ValueError("Truncation order must be a positive integer")

    def _load_from_env(self):
        """Load configuration from environment variables"""
        for key in self._config:
            env_value = os.getenv(f"{ENV_PREFIX}{key.upper()}")
            if env_value is not None:
                # Type conversion based on default value type
                default_type = type(self._config[key])
                if default_type == bool:
                    self._config[key] = env_value.lower() in ('true', '1', 'yes', 'on')
                elif default_type == int:
                    self._config[key] = int(env_value)
                elif default_type == float:
                    self._config[key] = float(env_value)
                else:
                    self._config[key] = env_value

    def get(self, key: str, default=None) -> Any:
        """Get configuration value"""
        return self._config.get(key, default)

    def set(self, key: str, value: Any):
        """Set configuration value"""
        if key in self._config:
            self._config[key] = value

    def get_degree_schedule(self) -> Dict[int, int]:
        """Get the solver degree schedule as an order -> PBW degree mapping"""
        return parse_degree_schedule(self.get("degree_schedule", ""))

    def to_dict(self) -> Dict[str, Any]:
        """Return configuration as dictionary"""
        return self._config.copy()


def parse_degree_schedule(text: str) -> Dict[int, int]:
    """Parse ``"2:4,3:7"`` into ``{2: 4, 3: 7}``.

    Raises:
        ValueError: on malformed entries.
    """
    schedule = {}
    for item in (text or "").split(','):
        item = item.strip()
        if not item:
            continue
        order, _, degree = item.partition(':')
        if not degree:
            raise ValueError(f"Malformed schedule entry '{item}', expected n:deg")
        schedule[int(order)] = int(degree)
    return schedule


load_dotenv()

# Global configuration instance
config = Config()
