"""JSON Lines frame files and CSV velocity fields.

Each frame line looks like::

    {"t": 0.5, "contours": [{"winding": 0, "nodes": [[x1, x2], ...]}, ...],
     "diagnostics": {"area": ..., "vertical_moment": ..., "gamma_star": [...],
                     "max_speed": ..., "m2": ..., "m1_sum": ...}}

Floats are written with 17 significant digits so they round-trip exactly.
"""

from __future__ import annotations

import json
import math
from typing import IO, Iterable

import numpy as np

from .errors import StripVortexError
from .evolution import FrameRecord
from .geometry import PatchSystem, replicate, validate_contour


class FrameWriteError(StripVortexError, OSError):
    def __init__(self, message, frame_index):
        super().__init__(f"{message} (after {frame_index} frames written)")
        self.frame_index = frame_index


def format_float(x) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x} as JSON")
    return format(x, ".17g")


def dumps(obj) -> str:
    """Compact JSON with 17-significant-digit floats."""
    if isinstance(obj, dict):
        return "{" + ",".join(json.dumps(str(k)) + ":" + dumps(v) for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist())
    if isinstance(obj, (bool, np.bool_)) or obj is None or isinstance(obj, str):
        return json.dumps(obj if not isinstance(obj, np.bool_) else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    return format_float(obj)


def frame_to_dict(frame: FrameRecord) -> dict:
    return {
        "t": frame.t,
        "contours": [{"winding": c.winding, "nodes": c.nodes} for c in frame.contours],
        "diagnostics": frame.diagnostics,
    }


def frame_from_dict(obj) -> FrameRecord:
    contours = tuple(
        validate_contour(np.array(c["nodes"], dtype=float), (c["winding"], 0)) for c in obj["contours"]
    )
    diag = dict(obj.get("diagnostics", {}))
    return FrameRecord(float(obj["t"]), contours, diag)


class FrameWriter:
    """Writes frames one line at a time to an open text stream."""

    def __init__(self, stream: IO[str]):
        self.stream = stream
        self.count = 0

    def __call__(self, frame: FrameRecord):
        try:
            self.stream.write(dumps(frame_to_dict(frame)) + "\n")
            self.stream.flush()
        except OSError as exc:
            raise FrameWriteError(str(exc), self.count) from exc
        self.count += 1


def write_frames(frames: Iterable[FrameRecord], destination) -> None:
    """Write frames as JSON Lines to a path or an open text stream."""
    if hasattr(destination, "write"):
        writer = FrameWriter(destination)
        for f in frames:
            writer(f)
        return
    try:
        stream = open(destination, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise FrameWriteError(str(exc), 0) from exc
    with stream:
        write_frames(frames, stream)


def read_frames(source) -> list[FrameRecord]:
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        with open(source, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    return [frame_from_dict(json.loads(line)) for line in lines if line.strip()]


def write_velocity_csv(points, velocities, stream: IO[str]) -> None:
    """CSV with header ``x1,x2,u1,u2``; masked velocities are written as ``nan``."""
    stream.write("x1,x2,u1,u2\n")
    for (x1, x2), (u1, u2) in zip(points, velocities):
        cells = [format_float(x1), format_float(x2)]
        cells += ["nan" if not math.isfinite(v) else format_float(v) for v in (u1, u2)]
        stream.write(",".join(cells) + "\n")


def replicated_frame_dict(frame: FrameRecord, copies: int) -> dict:
    system = PatchSystem(frame.contours, 0.0)
    half = copies // 2
    per_copy = len(frame.contours)
    out = []
    for idx, c in enumerate(replicate(system, copies)):
        out.append({"copy": idx // per_copy - half, "winding": c.winding, "nodes": c.nodes})
    return {"t": frame.t, "copies": copies, "contours": out}
