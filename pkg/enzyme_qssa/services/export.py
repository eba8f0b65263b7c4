import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, Union

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
HASH_PREFIX = "# manifest_hash="


def manifest_hash(manifest: Dict[str, Any]) -> str:
    """Stable fingerprint of a manifest, written into every CSV it produced."""
    canonical = json.dumps(manifest, sort_keys=True, default=str)
    return hashlib.md5(canonical.encode()).hexdigest()


def write_csv(frame: pd.DataFrame, path: Union[str, Path], manifest: Dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as handle:
        handle.write(f"{HASH_PREFIX}{manifest_hash(manifest)}\n")
        frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def read_csv(path: Union[str, Path]) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def read_manifest_hash(path: Union[str, Path]) -> str:
    with open(path) as handle:
        first = handle.readline().strip()
    if not first.startswith(HASH_PREFIX):
        raise ValueError(f"{path} has no manifest hash header")
    return first[len(HASH_PREFIX):]


def write_json(payload: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")
    logger.info(f"Wrote {path}")
    return path
