"""Canonical serialization, stable config hashing, artifact files, and auditing.

Every experiment emits one JSON artifact containing its full configuration,
the SHA-256 hash of that configuration under a canonical serialization, the
metrics payload, and provenance (UTC timestamp, component versions). The
auditor re-derives the hash from the embedded config and checks basic
stochasticity invariants on any metrics tagged as probability objects.

The hash covers the config subtree only -- never metrics or timestamps -- so
identical configurations always map to identical hashes and filenames.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

REQUIRED_FIELDS = (
    "artifact_type",
    "config",
    "config_hash",
    "metrics",
    "created_at_utc",
    "versions",
)

# metrics keys with these suffixes are audited as probability objects
DISTRIBUTION_SUFFIX = "_distribution"
ROWS_SUFFIX = "_rows"
STOCHASTICITY_TOLERANCE = 1e-9


def _check_tree(value, path: str = "$") -> None:
    if value is None or isinstance(value, (str, bool, int)):
        return
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite number at {path}: {value!r}")
        return
    if isinstance(value, dict):
        for k, v in value.items():
            if not isinstance(k, str):
                raise ValueError(f"non-string map key at {path}: {k!r}")
            _check_tree(v, f"{path}.{k}")
        return
    if isinstance(value, list):
        for i, v in enumerate(value):
            _check_tree(v, f"{path}[{i}]")
        return
    raise ValueError(f"unsupported value kind at {path}: {type(value).__name__}")


def canonical_serialize(value) -> bytes:
    """Stable UTF-8 JSON bytes: sorted keys, no whitespace, shortest decimals.

    Accepts only maps with string keys, lists, strings, booleans, finite
    numbers, and null. Integers and floats are distinct value kinds and are
    never coerced into each other.
    """
    _check_tree(value)
    return json.dumps(
        value,
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
        allow_nan=False,
    ).encode("utf-8")


def config_hash(config) -> str:
    """Lowercase SHA-256 hex digest of the canonical config serialization."""
    return hashlib.sha256(canonical_serialize(config)).hexdigest()


def to_jsonable(value):
    """Recursively convert numpy scalars/arrays into plain JSON-ready values."""
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    return value


@dataclass
class ArtifactRecord:
    """Config + hash + metrics + provenance, ready for canonical writing."""

    artifact_type: str
    config: dict
    config_hash: str
    metrics: dict
    created_at_utc: str
    versions: dict

    def to_dict(self) -> dict:
        return {
            "artifact_type": self.artifact_type,
            "config": self.config,
            "config_hash": self.config_hash,
            "metrics": self.metrics,
            "created_at_utc": self.created_at_utc,
            "versions": self.versions,
        }

    def validate(self) -> None:
        if self.config_hash != config_hash(self.config):
            raise ValueError("config_hash does not match the embedded config")
        _check_tree(self.metrics, "$.metrics")

    @property
    def filename(self) -> str:
        return f"{self.artifact_type}_{self.config_hash[:12]}.json"


def component_versions() -> dict:
    from agencykit import __version__

    return {
        "python": sys.version.split()[0],
        "numpy": np.__version__,
        "agencykit": __version__,
    }


def make_artifact(artifact_type: str, config: dict, metrics: dict) -> ArtifactRecord:
    """Assemble a record, hashing the config and stamping provenance."""
    config = to_jsonable(config)
    metrics = to_jsonable(metrics)
    return ArtifactRecord(
        artifact_type=artifact_type,
        config=config,
        config_hash=config_hash(config),
        metrics=metrics,
        created_at_utc=datetime.now(timezone.utc).isoformat(),
        versions=component_versions(),
    )


def write_artifact(record: ArtifactRecord, directory: str | Path) -> Path:
    """Atomically write ``<artifact_type>_<hash12>.json`` under ``directory``."""
    record.validate()
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    payload = canonical_serialize(record.to_dict())
    target = directory / record.filename
    fd, tmp_name = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp_name, target)
    except BaseException:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
        raise
    return target


@dataclass
class AuditReport:
    """Per-directory audit outcome; passes iff no failures were recorded."""

    files_checked: int
    failures: list[tuple[str, str, str]] = field(default_factory=list)
    warnings: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures


def _reject_constant(token: str):
    raise ValueError(f"non-finite JSON constant {token!r}")


def _iter_probability_objects(tree, path: str = "$.metrics"):
    if isinstance(tree, dict):
        for k, v in tree.items():
            child = f"{path}.{k}"
            if k.endswith(DISTRIBUTION_SUFFIX) or k.endswith(ROWS_SUFFIX):
                yield child, k, v
            yield from _iter_probability_objects(v, child)
    elif isinstance(tree, list):
        for i, v in enumerate(tree):
            yield from _iter_probability_objects(v, f"{path}[{i}]")


def _check_probability_object(key: str, value) -> str | None:
    """Entries must lie in [0, 1]; distribution vectors and each row sum to 1."""
    arr = np.asarray(value, dtype=np.float64)
    if arr.size == 0:
        return None
    if np.any(arr < -STOCHASTICITY_TOLERANCE) or np.any(arr > 1 + STOCHASTICITY_TOLERANCE):
        return f"entries outside [0, 1] (range [{arr.min()}, {arr.max()}])"
    rows = arr[None, :] if arr.ndim == 1 else arr
    if key.endswith(ROWS_SUFFIX) and arr.ndim == 1:
        rows = arr[None, :]
    sums = rows.sum(axis=-1)
    if np.any(np.abs(sums - 1.0) > STOCHASTICITY_TOLERANCE):
        worst = sums[np.argmax(np.abs(sums - 1.0))]
        return f"row sum {worst!r} deviates from 1"
    return None


def audit(directory: str | Path, strict: bool = True) -> AuditReport:
    """Check every JSON artifact in ``directory`` against the artifact contract.

    Verifies required fields, recomputes each config hash from the embedded
    config, scans tagged probability objects for stochasticity violations, and
    checks filename/hash consistency (a warning instead of a failure when
    ``strict`` is off). Unreadable files become failure entries, not crashes.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"no such directory: {directory}")
    report = AuditReport(files_checked=0)
    for path in sorted(directory.glob("*.json")):
        report.files_checked += 1
        name = str(path)
        try:
            raw = path.read_text(encoding="utf-8")
            record = json.loads(raw, parse_constant=_reject_constant)
        except (OSError, ValueError) as exc:
            report.failures.append((name, "unreadable", str(exc)))
            continue

        missing = [f for f in REQUIRED_FIELDS if f not in record]
        if missing:
            report.failures.append((name, "missing_fields", ", ".join(missing)))
            continue

        try:
            expected = config_hash(record["config"])
        except ValueError as exc:
            report.failures.append((name, "config_not_serializable", str(exc)))
            continue
        if record["config_hash"] != expected:
            report.failures.append(
                (name, "config_hash_mismatch", f"stored {record['config_hash'][:12]}..., recomputed {expected[:12]}...")
            )

        for tree_path, key, value in _iter_probability_objects(record["metrics"]):
            problem = _check_probability_object(key, value)
            if problem is not None:
                report.failures.append((name, "stochasticity", f"{tree_path}: {problem}"))

        expected_name = f"{record['artifact_type']}_{record['config_hash'][:12]}.json"
        if path.name != expected_name:
            entry = (name, "filename_hash_prefix", f"expected {expected_name}")
            if strict:
                report.failures.append(entry)
            else:
                report.warnings.append(entry)
    return report
