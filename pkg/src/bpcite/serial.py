"""Canonical JSON helpers shared by every persisted artifact.

Artifacts must be byte-identical across runs with the same inputs and
seed, so everything is written with sorted keys, compact separators, and
raw UTF-8. Floats go through repr and round-trip exactly.
"""

from __future__ import annotations

import json
from pathlib import Path


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def write_json(path: str | Path, obj) -> None:
    Path(path).write_text(canonical_json(obj) + "\n", encoding="utf-8")


def read_json(path: str | Path):
    return json.loads(Path(path).read_text(encoding="utf-8"))
