"""
Configuration management for the Welch equation toolkit
"""
import os
from typing import Tuple
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()


def _parse_budget(raw: str) -> Tuple[int, int]:
    """Parse WELCH_BUDGET as "<max_modulus>" or "<max_modulus>:<max_grid>"."""
    parts = raw.strip().split(":")
    if len(parts) not in (1, 2) or not all(part.strip().isdigit() for part in parts):
        raise ValueError(f"WELCH_BUDGET must look like '10000' or '10000:10000000', got {raw!r}")
    max_modulus = int(parts[0])
    max_grid = int(parts[1]) if len(parts) == 2 else int(os.getenv("WELCH_MAX_GRID", "10000000"))
    return max_modulus, max_grid


class Settings:
    """Application settings loaded from environment variables"""

    def __init__(self):
        # Logging
        self.log_level: str = os.getenv("LOG_LEVEL", "WARNING")
        self.log_file: str = os.getenv("LOG_FILE", "")

        # Input bound on p (trial division and factoring stay cheap below it)
        self.max_prime: int = int(os.getenv("WELCH_MAX_PRIME", "10000"))

        # Oracle scan budget
        self.max_modulus: int = int(os.getenv("WELCH_MAX_MODULUS", "10000"))
        self.max_grid: int = int(os.getenv("WELCH_MAX_GRID", "10000000"))
        budget = os.getenv("WELCH_BUDGET", "")
        if budget.strip():
            self.max_modulus, self.max_grid = _parse_budget(budget)

        # Sampled invariant checks
        self.seed: int = int(os.getenv("WELCH_SEED", "0"))

    def validate_settings(self) -> bool:
        """Validate that all numeric bounds are usable"""
        return all(bound > 0 for bound in (self.max_prime, self.max_modulus, self.max_grid))

    def budget(self):
        """Default oracle scan budget built from these settings"""
        from app.services.oracle import ScanBudget

        return ScanBudget(max_modulus=self.max_modulus, max_grid=self.max_grid)

    def __repr__(self) -> str:
        return (
            f"Settings("
            f"log_level='{self.log_level}', "
            f"log_file='{self.log_file}', "
            f"max_prime={self.max_prime}, "
            f"max_modulus={self.max_modulus}, "
            f"max_grid={self.max_grid}, "
            f"seed={self.seed}"
            f")"
        )


# Global settings instance
settings = Settings()
