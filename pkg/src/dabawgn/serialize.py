"""JSON round-tripping of pmfs and sweep records, plus atomic file writes.

Floats are serialized with Python's shortest round-trip repr, so parsing a
written file reproduces every value bit-exactly.
"""

import json
import os
import tempfile

from .numerics import FinitePmf


def pmf_to_dict(pmf: FinitePmf) -> dict:
    return {
        "locations": [float(x) for x in pmf.locations],
        "probabilities": [float(p) for p in pmf.probabilities],
    }


def pmf_from_dict(data: dict) -> FinitePmf:
    return FinitePmf(data["locations"], data["probabilities"])


def dump_json(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def atomic_write_json(path: str, payload) -> None:
    """Write-temp-then-rename so readers never observe a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(dump_json(payload))
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_json(path: str):
    with open(path) as handle:
        return json.load(handle)
