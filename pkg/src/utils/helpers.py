"""
Utility Functions
=================

Helper functions shared by the riskscope modules.
"""

import os
import sys
import json
import yaml
from typing import Dict, Any, Optional
from pathlib import Path
import numpy as np
from loguru import logger


def load_config(config_path: str = "config.yaml") -> Dict[str, Any]:
    """Load configuration from YAML file with environment variable substitution."""
    with open(config_path, 'r') as f:
        config = yaml.safe_load(f) or {}

    def substitute_env_vars(obj):
        if isinstance(obj, str):
            if obj.startswith('${') and obj.endswith('}'):
                env_var = obj[2:-1]
                default = None
                if ':' in env_var:
                    env_var, default = env_var.split(':', 1)
                value = os.getenv(env_var, default)
                # "4" -> 4, "true" -> True, strings stay strings
                return yaml.safe_load(value) if value is not None else None
            return obj
        elif isinstance(obj, dict):
            return {k: substitute_env_vars(v) for k, v in obj.items()}
        elif isinstance(obj, list):
            return [substitute_env_vars(item) for item in obj]
        return obj

    return substitute_env_vars(config)


def setup_logging(level: str = "INFO", log_file: Optional[str] = None) -> None:
    """Configure logging."""
    logger.remove()
    logger.add(
        lambda msg: print(msg, end="", file=sys.stderr),
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | {message}",
        level=level
    )
    if log_file:
        logger.add(log_file, rotation="10 MB", retention="1 week", level=level)


def max_workers(default: int = 4) -> int:
    """Worker cap for thread pools, read from ``RISKSCOPE_THREADS``."""
    value = os.getenv("RISKSCOPE_THREADS")
    if value is None:
        return default
    try:
        return max(1, int(value))
    except ValueError:
        logger.warning(f"Ignoring non-integer RISKSCOPE_THREADS={value!r}")
        return default


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy containers and scalars to JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(item) for item in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def save_json(payload: Dict[str, Any], filepath: str) -> None:
    """Save a document to JSON with a stable layout."""
    Path(filepath).parent.mkdir(parents=True, exist_ok=True)
    with open(filepath, 'w') as f:
        json.dump(to_jsonable(payload), f, indent=2, sort_keys=True)
        f.write("\n")
    logger.info(f"Saved {filepath}")


def load_json(filepath: str) -> Dict[str, Any]:
    """Load a JSON document."""
    with open(filepath, 'r') as f:
        return json.load(f)


__all__ = ['load_config', 'setup_logging', 'max_workers', 'to_jsonable', 'save_json', 'load_json']
