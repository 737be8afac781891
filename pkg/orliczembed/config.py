"""
Configuration management for orliczembed.
Handles logging setup, loading/saving settings and XDG directory setup.
"""

import json
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from pathlib import Path

from .errors import UsageError

# --- XDG Standard Directories ---
CONFIG_DIR = Path.home() / ".config" / "orliczembed"
DATA_DIR = Path.home() / ".local" / "share" / "orliczembed"
LOG_DIR = DATA_DIR / "logs"
CONFIG_FILE = CONFIG_DIR / "config.json"
LOG_FILE = LOG_DIR / "orliczembed.log"

CAPS_ENV = "ORLICZ_EMBED_CAPS"

# Exact-enumeration caps: single n! <= 8!, double (n!)^2 <= 6!^2, triple (n!)^3 <= 5!^3,
# materialized psi rows n <= 3, exact sign enumeration 2^(2n) for n <= 8.
DEFAULT_CAPS = {"single": 8, "double": 6, "triple": 5, "psi": 3, "signs": 8}

# --- Logging Configuration ---
logger = logging.getLogger("OrliczEmbed")
logger.setLevel(logging.DEBUG)

log_format = logging.Formatter(
    "%(asctime)s [%(levelname)s] %(message)s", datefmt="%Y-%m-%d %H:%M:%S"
)

# Console handler on stderr: stdout carries reports
console_handler = logging.StreamHandler(sys.stderr)
console_handler.setLevel(logging.INFO)
console_handler.setFormatter(log_format)
logger.addHandler(console_handler)

# File handler (rotation: 5 files of 1MB max)
try:
    CONFIG_DIR.mkdir(parents=True, exist_ok=True)
    LOG_DIR.mkdir(parents=True, exist_ok=True)
    file_handler = RotatingFileHandler(
        LOG_FILE, maxBytes=1 * 1024 * 1024, backupCount=5, encoding="utf-8"
    )
    file_handler.setLevel(logging.DEBUG)
    file_handler.setFormatter(log_format)
    logger.addHandler(file_handler)
except OSError as e:
    logger.warning(f"File logging disabled ({e})")


def log(message, level="info"):
    """Log a message with the specified level."""
    if level == "debug":
        logger.debug(message)
    elif level == "warning":
        logger.warning(message)
    elif level == "error":
        logger.error(message)
    else:
        logger.info(message)


def parse_caps(text):
    """
    Parse a caps override such as "single=9,triple=6".

    Args:
        text: Comma separated key=value pairs.

    Returns:
        dict of cap name to integer.
    """
    caps = {}
    for item in filter(None, (part.strip() for part in text.split(","))):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in DEFAULT_CAPS:
            raise UsageError(f"Invalid {CAPS_ENV} entry: {item!r}")
        try:
            caps[key] = int(value)
        except ValueError as exc:
            raise UsageError(f"Invalid {CAPS_ENV} value for {key}: {value!r}") from exc
        if caps[key] < 1:
            raise UsageError(f"{CAPS_ENV} cap {key} must be >= 1")
    return caps


class Config:
    """Toolkit configuration singleton."""

    def __init__(self):
        # Default values
        self.caps = dict(DEFAULT_CAPS)
        self.threads = 1
        self.block_size = 4096
        self.mc_samples = 100_000
        self.distortion_samples = 100
        self.perm_samples = 20_000
        self.seed = 0
        self.grid_points = 100
        self.instances = 50

    def to_dict(self):
        return {
            "caps": dict(self.caps),
            "threads": self.threads,
            "block_size": self.block_size,
            "mc_samples": self.mc_samples,
            "distortion_samples": self.distortion_samples,
            "perm_samples": self.perm_samples,
            "seed": self.seed,
            "grid_points": self.grid_points,
            "instances": self.instances,
        }

    def load(self):
        """Load configuration from file, then apply the caps environment override."""
        needs_save = False
        try:
            if CONFIG_FILE.exists():
                with open(CONFIG_FILE, "r") as f:
                    data = json.load(f)

                self.caps.update(data.get("caps", {}))
                self.threads = data.get("threads", self.threads)
                self.block_size = data.get("block_size", self.block_size)
                self.mc_samples = data.get("mc_samples", self.mc_samples)
                self.distortion_samples = data.get("distortion_samples", self.distortion_samples)
                self.perm_samples = data.get("perm_samples", self.perm_samples)
                self.seed = data.get("seed", self.seed)
                self.grid_points = data.get("grid_points", self.grid_points)
                self.instances = data.get("instances", self.instances)

                log(f"Configuration loaded from {CONFIG_FILE}", "debug")

                # Migration: rewrite when new keys are missing
                if set(self.to_dict()) - set(data) or set(DEFAULT_CAPS) - set(data.get("caps", {})):
                    log("Updating config file with new fields")
                    needs_save = True
            else:
                log(f"No config file found at {CONFIG_FILE}, creating with defaults", "debug")
                needs_save = True
        except Exception as e:
            log(f"Error loading config: {e}", "error")
            needs_save = True

        if needs_save:
            self.save()

        self.apply_env()

    def apply_env(self, environ=None):
        """Apply ORLICZ_EMBED_CAPS on top of the current caps."""
        environ = os.environ if environ is None else environ
        text = environ.get(CAPS_ENV)
        if not text:
            return
        overrides = parse_caps(text)
        self.caps.update(overrides)
        log(f"Enumeration caps overridden by {CAPS_ENV}: {overrides} (results may take long)",
            "warning")

    def save(self):
        """Save configuration to file."""
        try:
            with open(CONFIG_FILE, "w") as f:
                json.dump(self.to_dict(), f, indent=4)
            log("Configuration saved.", "debug")
        except Exception as e:
            log(f"Error saving config: {e}", "error")


# Global config instance
config = Config()
