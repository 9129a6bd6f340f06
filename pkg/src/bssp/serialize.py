"""Versioned on-disk containers: oracle bundles and run manifests.

An oracle bundle is a single JSON document: a plain header (format
version, n, d, mode, seed lineage) plus the stage tables as base64 raw
little-endian int64 arrays.  Rebuilding the unitary from a bundle replays
an experiment without resampling.
"""
from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ContractViolation
from .sampling import Permutation, SimonsInstance
from .shuffling import (BijectiveShuffling, Shuffling, build_shuffling)
from .unitary import oracle_unitary

FORMAT_VERSION = 1


def _encode(arr: np.ndarray) -> str:
    return base64.b64encode(np.ascontiguousarray(arr, dtype="<i8")
                            .tobytes()).decode("ascii")


def _decode(text: str) -> np.ndarray:
    return np.frombuffer(base64.b64decode(text), dtype="<i8").astype(np.int64)


def bundle_dict(fb: BijectiveShuffling, seed: int) -> dict:
    instance = fb.instance
    return {
        "format_version": FORMAT_VERSION,
        "n": fb.n,
        "d": fb.d,
        "mode": fb.mode,
        "seed": seed,
        "period": instance.period,
        "instance_table": _encode(instance.table),
        "perms": [_encode(p.table) for p in fb.perms],
        "final_prime": _encode(fb.final_prime),
        "zeta": _encode(fb.zeta),
        "eta": _encode(fb.eta),
    }


def write_oracle_bundle(fb: BijectiveShuffling, seed: int, path: str | Path):
    Path(path).write_text(json.dumps(bundle_dict(fb, seed), indent=2))


def read_oracle_bundle(path: str | Path) -> BijectiveShuffling:
    doc = json.loads(Path(path).read_text())
    if doc.get("format_version") != FORMAT_VERSION:
        raise ContractViolation(
            f"unsupported bundle version {doc.get('format_version')!r}")
    instance = SimonsInstance(n=doc["n"], mode=doc["mode"],
                              table=_decode(doc["instance_table"]),
                              period=doc["period"])
    perms = [Permutation(_decode(text)) for text in doc["perms"]]
    shuffled = build_shuffling(doc["d"], instance, perms)
    return BijectiveShuffling(shuffling=shuffled,
                              final_prime=_decode(doc["final_prime"]),
                              zeta=_decode(doc["zeta"]),
                              eta=_decode(doc["eta"]))


@dataclass
class RunManifest:
    """Everything needed to reproduce one command run byte for byte."""

    command: str
    params: dict
    seed: int
    outputs: dict[str, str] = field(default_factory=dict)
    version: int = FORMAT_VERSION

    def to_dict(self) -> dict:
        return {"version": self.version, "command": self.command,
                "seed": self.seed, "params": self.params,
                "outputs": self.outputs}

    def write(self, path: str | Path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    @classmethod
    def read(cls, path: str | Path) -> "RunManifest":
        doc = json.loads(Path(path).read_text())
        if doc.get("version") != FORMAT_VERSION:
            raise ContractViolation(
                f"unsupported manifest version {doc.get('version')!r}")
        return cls(command=doc["command"], params=doc["params"],
                   seed=doc["seed"], outputs=doc.get("outputs", {}))


def _jsonable(value):
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def dump_report(report: dict, path: str | Path):
    Path(path).write_text(json.dumps(report, indent=2, sort_keys=True,
                                     default=_jsonable))
