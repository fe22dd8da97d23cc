"""Run manifests and seed substream derivation.

Every CLI invocation writes a manifest next to its artifacts: the
command, its configuration, the master seed, the tool version, and a
sha256 digest per output file.  Re-running with the same manifest fields
reproduces byte-identical primary outputs.

All randomness descends from the master seed through named substreams, so
results do not depend on scheduling or on the order experiments run in.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__

__all__ = ["RunManifest", "substream", "sha256_digest"]


def sha256_digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _label_int(label: str) -> int:
    return int.from_bytes(hashlib.sha256(label.encode()).digest()[:8], "big")


def substream(master_seed: int, label: str, index: int = 0) -> np.random.SeedSequence:
    """Deterministic named substream of the master seed."""
    return np.random.SeedSequence([master_seed, _label_int(label), index])


def substream_seed(master_seed: int, label: str, index: int = 0) -> int:
    return int(substream(master_seed, label, index).generate_state(1)[0])


@dataclass
class RunManifest:
    command: str
    config: dict
    master_seed: int | None = None
    tool_version: str = __version__
    outputs: dict[str, str] = field(default_factory=dict)

    def record(self, path: Path, data: bytes) -> None:
        self.outputs[path.name] = sha256_digest(data)

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "config": self.config,
            "master_seed": self.master_seed,
            "tool_version": self.tool_version,
            "outputs": dict(sorted(self.outputs.items())),
        }
        return json.dumps(payload, sort_keys=True, indent=1) + "\n"

    def write(self, directory: Path, stem: str = "run") -> Path:
        path = Path(directory) / f"{stem}.manifest.json"
        path.write_text(self.to_json())
        return path


def write_artifact(directory: Path, name: str, data: bytes,
                   manifest: RunManifest) -> Path:
    """Write one output file and record its digest in the manifest."""
    path = Path(directory) / name
    path.write_bytes(data)
    manifest.record(path, data)
    return path
