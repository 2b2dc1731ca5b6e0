import json
import logging
import zlib
from pathlib import Path
from typing import Dict, Any, Union

import numpy as np
import yaml

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(level: int = logging.INFO) -> logging.Logger:
    """Setup logging configuration to stderr only.

    stdout is reserved for reports and circuit files.
    """
    logging.basicConfig(
        level=level,
        format=LOG_FORMAT,
        handlers=[logging.StreamHandler()],
    )

    return logging.getLogger("mqsynth")


def ensure_directory(path: Union[str, Path]) -> Path:
    """Ensure directory exists and return Path object."""
    dir_path = Path(path)
    dir_path.mkdir(parents=True, exist_ok=True)
    return dir_path


def load_config_file(file_path: Union[str, Path]) -> Dict[str, Any]:
    """Load a YAML or JSON config file (JSON is read through the YAML parser)."""
    try:
        with open(file_path, "r") as f:
            data = yaml.safe_load(f)
        if not isinstance(data, dict):
            logging.error(f"Config file {file_path} does not hold a mapping")
            return {}
        return data
    except Exception as e:
        logging.error(f"Failed to load config file {file_path}: {e}")
        return {}


def stable_key(*parts: Any) -> int:
    """Deterministic 32-bit key for a tuple of JSON-serializable parts."""
    text = json.dumps(parts, sort_keys=True, default=str)
    return zlib.crc32(text.encode("utf-8"))


def seeded_rng(seed: int, *parts: Any) -> np.random.Generator:
    """Generator seeded from the run seed plus a job key, independent of scheduling."""
    return np.random.default_rng([int(seed), stable_key(*parts)])
