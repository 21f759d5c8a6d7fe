"""Deterministic artifact emission: fixed-format CSV/JSON and run manifests.

Every number is written as fixed-precision scientific notation (17
significant digits), so identical inputs produce byte-identical files and
golden-file comparisons are meaningful.  Each artifact carries the hash of
the resolved configuration that produced it: JSON artifacts as a
``config_hash`` field, CSV artifacts as a leading comment line.
"""

import hashlib
import json
import platform
from pathlib import Path

FLOAT_FMT = "%.16e"


def format_number(v) -> str:
    """Fixed-width token for a numeric cell."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int,)):
        return str(v)
    return FLOAT_FMT % float(v)


def _emit(obj, indent, sort_keys):
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return FLOAT_FMT % obj
    if isinstance(obj, dict):
        keys = sorted(obj) if sort_keys else list(obj)
        if not keys:
            return "{}"
        parts = [
            f"{inner}{json.dumps(str(k))}: {_emit(obj[k], indent + 2, sort_keys)}"
            for k in keys
        ]
        return "{\n" + ",\n".join(parts) + f"\n{pad}}}"
    if hasattr(obj, "tolist"):
        obj = obj.tolist()
        if isinstance(obj, (int, float)):
            return _emit(obj, indent, sort_keys)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        parts = [f"{inner}{_emit(v, indent + 2, sort_keys)}" for v in obj]
        return "[\n" + ",\n".join(parts) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj).__name__} deterministically")


def json_text(obj, sort_keys=False) -> str:
    """Canonical JSON text with fixed float formatting."""
    return _emit(obj, 0, sort_keys) + "\n"


def config_hash(config: dict) -> str:
    """Hash of the numerically relevant configuration (output paths excluded)."""
    trimmed = {k: v for k, v in config.items() if k != "output_dir"}
    return hashlib.sha256(
        json_text(trimmed, sort_keys=True).encode()
    ).hexdigest()


def write_json_artifact(path, obj: dict, cfg_hash: str) -> None:
    body = {"config_hash": cfg_hash}
    body.update(obj)
    Path(path).write_text(json_text(body))


def write_csv_artifact(path, header, rows, cfg_hash: str) -> None:
    lines = [f"# config_hash={cfg_hash}", ",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            cells.append(v if isinstance(v, str) else format_number(v))
        lines.append(",".join(cells))
    Path(path).write_text("\n".join(lines) + "\n")


def write_manifest(out_dir, command, config, cfg_hash, artifact_names,
                   wall_time_s, result=None) -> Path:
    import numpy
    import scipy

    from . import __version__

    manifest = {
        "command": command,
        "config": config,
        "config_hash": cfg_hash,
        "artifacts": list(artifact_names),
        "versions": {
            "nucleon_nls": __version__,
            "numpy": numpy.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "wall_time_s": float(wall_time_s),
    }
    if result is not None:
        manifest["result"] = result
    path = Path(out_dir) / "run_manifest.json"
    path.write_text(json_text(manifest))
    return path
