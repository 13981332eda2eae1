"""Reproducibility plumbing: run manifests and deterministic file output.

Every CLI run writes a manifest next to its outputs recording the
subcommand, all effective parameters (seeds included), SHA-256 digests
of the input files, and the names of the produced files.  Data
artifacts are written atomically and with fixed metadata so a rerun
with the same inputs and flags is byte-identical; the manifest itself
carries a wall-clock timestamp and is the one output exempt from that
guarantee.
"""

from __future__ import annotations

import hashlib
import io
import json
import os
import zipfile
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Mapping

import numpy as np

# Fixed zip entry date; zip cannot represent anything before 1980.
_ZIP_DATE = (1980, 1, 1, 0, 0, 0)

_CHUNK = 1 << 20


@dataclass(frozen=True)
class RunManifest:
    """Record of one CLI run: what ran, on what, producing what."""

    timestamp: str
    version: str
    subcommand: str
    parameters: dict
    inputs: dict
    outputs: tuple[str, ...]


def utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path: str | os.PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        while True:
            block = fh.read(_CHUNK)
            if not block:
                break
            digest.update(block)
    return digest.hexdigest()


def build_manifest(
    subcommand: str,
    parameters: Mapping,
    input_paths: Iterable[str | os.PathLike],
    output_names: Iterable[str],
) -> RunManifest:
    from rhetrel import __version__

    inputs = {
        os.fspath(path): sha256_file(path)
        for path in sorted(input_paths, key=os.fspath)
    }
    return RunManifest(
        timestamp=utc_now(),
        version=__version__,
        subcommand=subcommand,
        parameters=dict(parameters),
        inputs=inputs,
        outputs=tuple(output_names),
    )


def manifest_to_json(manifest: RunManifest) -> str:
    payload = {
        "timestamp": manifest.timestamp,
        "version": manifest.version,
        "subcommand": manifest.subcommand,
        "parameters": manifest.parameters,
        "inputs": manifest.inputs,
        "outputs": list(manifest.outputs),
    }
    return json.dumps(payload, indent=2) + "\n"


def manifest_from_json(content: str) -> RunManifest:
    payload = json.loads(content)
    return RunManifest(
        timestamp=str(payload["timestamp"]),
        version=str(payload["version"]),
        subcommand=str(payload["subcommand"]),
        parameters=dict(payload["parameters"]),
        inputs=dict(payload["inputs"]),
        outputs=tuple(payload["outputs"]),
    )


def atomic_write_bytes(path: str | os.PathLike, data: bytes) -> None:
    """Write via a sibling temp file and rename, so readers never see
    a half-written artifact."""
    target = os.fspath(path)
    tmp = target + ".tmp"
    with open(tmp, "wb") as fh:
        fh.write(data)
    os.replace(tmp, target)


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    atomic_write_bytes(path, text.encode("utf-8"))


def save_arrays(path: str | os.PathLike, arrays: Mapping[str, np.ndarray]) -> None:
    """Write an npz-compatible archive with fixed zip metadata.

    np.savez stamps entries with the current time, which breaks
    byte-identical reruns; this writer pins the entry date and stores
    members uncompressed in sorted name order.
    """
    buf = io.BytesIO()
    with zipfile.ZipFile(buf, "w", zipfile.ZIP_STORED) as zf:
        for name in sorted(arrays):
            payload = io.BytesIO()
            np.lib.format.write_array(
                payload, np.asarray(arrays[name]), allow_pickle=False
            )
            info = zipfile.ZipInfo(name + ".npy", date_time=_ZIP_DATE)
            info.compress_type = zipfile.ZIP_STORED
            info.external_attr = 0o644 << 16
            zf.writestr(info, payload.getvalue())
    atomic_write_bytes(path, buf.getvalue())


def load_arrays(path: str | os.PathLike) -> dict[str, np.ndarray]:
    with np.load(path, allow_pickle=False) as data:
        return {name: data[name] for name in data.files}
