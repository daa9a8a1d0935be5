"""Deterministic CSV / JSON / SVG writers used by the command line."""
from __future__ import annotations

import hashlib
import json
import math
import os

import numpy as np

__all__ = ["ensure_dir", "fmt", "write_csv", "write_json", "write_text", "file_sha256", "svg_figure"]


def ensure_dir(path) -> str:
    try:
        os.makedirs(path, exist_ok=True)
    except OSError as e:
        raise OSError(e.errno, f"cannot create output directory: {e.strerror}", str(path)) from None
    if not os.access(path, os.W_OK):
        raise OSError(13, "output directory is not writable", str(path))
    return str(path)


def fmt(v) -> str:
    """17 significant digits for floats, so every double round-trips."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else f"{float(v):.17g}"
    return str(v)


def _open(path, mode="w"):
    try:
        return open(path, mode, newline="")
    except OSError as e:
        raise OSError(e.errno, f"cannot write output: {e.strerror}", str(path)) from None


def write_csv(path, header, rows) -> str:
    with _open(path) as fh:
        fh.write(",".join(header) + "\n")
        for r in rows:
            fh.write(",".join(fmt(v) for v in r) + "\n")
    return str(path)


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return _jsonable(o.tolist())
    if isinstance(o, (np.bool_, bool)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, (float, np.floating)):
        o = float(o)
        return o if math.isfinite(o) else None
    return o


def write_json(path, obj) -> str:
    with _open(path) as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return str(path)


def write_text(path, text) -> str:
    with _open(path) as fh:
        fh.write(text)
    return str(path)


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def svg_figure(path, draw, figsize=(6, 4.5)) -> str:
    """Render ``draw(fig)`` to SVG with the Agg backend (no timestamps)."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    with matplotlib.rc_context({"svg.hashsalt": "gaugelat"}):
        fig = plt.figure(figsize=figsize)
        try:
            draw(fig)
            fig.tight_layout()
            try:
                fig.savefig(path, format="svg", metadata={"Date": None})
            except OSError as e:
                raise OSError(e.errno, f"cannot write output: {e.strerror}", str(path)) from None
        finally:
            plt.close(fig)
    return str(path)
