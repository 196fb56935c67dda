"""Instance files, content hashes and deterministic JSON output."""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

from .errors import InstanceError
from .model import ProblemInstance, validate


def load_instance(path, require_M: bool = False) -> ProblemInstance:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceError([("$", f"malformed JSON: {exc.msg} at line {exc.lineno}")]) from exc
    if not isinstance(raw, dict):
        raise InstanceError([("$", "top level must be an object")])
    return validate(raw, require_M=require_M)


def dump_instance(inst: ProblemInstance, path) -> None:
    Path(path).write_text(canonical_json(inst.to_dict()) + "\n")


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)


def instance_hash(inst: ProblemInstance) -> str:
    """sha256 of the canonical serialization, so equal instances hash equally whatever the file layout."""
    text = json.dumps(inst.to_dict(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()
