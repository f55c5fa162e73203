"""Simulation config: JSON parsing, validation and initial-condition presets.

A config is a JSON object::

    {"omega0": 1.0,
     "contours": [{"kind": "circle", "center": [0, 0], "radius": 0.15}],
     "n_nodes": 128, "t_end": 1.0,
     "dt": 0.001, "save_every": 10, "redistribute_every": 20,
     "quadrature": "spectral"}

The last four keys are optional. Contour kinds and their keys:

* ``circle``: ``center``, ``radius``
* ``ellipse``: ``center``, ``semi_axes`` ([horizontal, vertical])
* ``flat_layer``: ``h`` (half-thickness, layer centred on x2 = 0)
* ``perturbed_layer``: ``h``, ``amplitude``, ``mode``
* ``explicit``: ``nodes`` (lifted [[x1, x2], ...]), ``closure`` (default [0, 0])

Every kind except ``explicit`` also accepts a per-contour ``n_nodes``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ConfigError, StripVortexError
from .geometry import PatchSystem, check_separated, validate_contour

KINDS = ("circle", "ellipse", "flat_layer", "perturbed_layer", "explicit")
QUADRATURES = ("spectral", "punctured")

_PRESET_KEYS = {
    "circle": {"center", "radius"},
    "ellipse": {"center", "semi_axes"},
    "flat_layer": {"h"},
    "perturbed_layer": {"h", "amplitude", "mode"},
    "explicit": {"nodes", "closure"},
}
_TOP_KEYS = {"omega0", "contours", "n_nodes", "dt", "t_end", "save_every", "redistribute_every", "quadrature"}
_REQUIRED_TOP = ("omega0", "contours", "n_nodes", "t_end")


@dataclass(frozen=True)
class PresetSpec:
    kind: str
    center: Optional[tuple] = None
    radius: Optional[float] = None
    semi_axes: Optional[tuple] = None
    h: Optional[float] = None
    amplitude: Optional[float] = None
    mode: Optional[int] = None
    nodes: Optional[tuple] = None
    closure: Optional[tuple] = None
    n_nodes: Optional[int] = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for name in ("center", "radius", "semi_axes", "h", "amplitude", "mode", "closure", "n_nodes"):
            value = getattr(self, name)
            if value is not None:
                out[name] = list(value) if isinstance(value, tuple) else value
        if self.nodes is not None:
            out["nodes"] = [list(p) for p in self.nodes]
        return out


@dataclass(frozen=True)
class SimConfig:
    omega0: float
    contours: tuple
    n_nodes: int
    t_end: float
    dt: float = 1e-3
    save_every: int = 10
    redistribute_every: int = 20
    quadrature: str = "spectral"

    def to_dict(self) -> dict:
        return {
            "omega0": self.omega0,
            "contours": [c.to_dict() for c in self.contours],
            "n_nodes": self.n_nodes,
            "t_end": self.t_end,
            "dt": self.dt,
            "save_every": self.save_every,
            "redistribute_every": self.redistribute_every,
            "quadrature": self.quadrature,
        }


def serialize_config(config: SimConfig) -> str:
    return json.dumps(config.to_dict())


# -- validation helpers ------------------------------------------------------

def _number(value, path, *, positive=False, nonneg=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError("expected a number", path)
    value = float(value)
    if not math.isfinite(value):
        raise ConfigError("must be finite", path)
    if positive and value <= 0:
        raise ConfigError("must be > 0", path)
    if nonneg and value < 0:
        raise ConfigError("must be >= 0", path)
    return value


def _integer(value, path, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError("expected an integer", path)
    if minimum is not None and value < minimum:
        raise ConfigError(f"must be >= {minimum}", path)
    return value


def _node_count(value, path):
    n = _integer(value, path, minimum=8)
    if n % 2:
        raise ConfigError(f"must be even, got {n}", path)
    return n


def _pair(value, path):
    if not isinstance(value, list) or len(value) != 2:
        raise ConfigError("expected a list of two numbers", path)
    return tuple(_number(v, f"{path}[{i}]") for i, v in enumerate(value))


def _parse_preset(obj, path) -> PresetSpec:
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", path)
    kind = obj.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {', '.join(KINDS)}", f"{path}.kind")
    allowed = _PRESET_KEYS[kind] | {"kind"} | ({"n_nodes"} if kind != "explicit" else set())
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"unknown key for kind {kind!r}", f"{path}.{key}")
    for key in _PRESET_KEYS[kind] - {"closure"}:
        if key not in obj:
            raise ConfigError("missing required key", f"{path}.{key}")

    kw = {"kind": kind}
    if "n_nodes" in obj:
        kw["n_nodes"] = _node_count(obj["n_nodes"], f"{path}.n_nodes")
    if kind == "circle":
        kw["center"] = _pair(obj["center"], f"{path}.center")
        r = _number(obj["radius"], f"{path}.radius", positive=True)
        if 2.0 * r >= 1.0:
            raise ConfigError(f"radius {r} exceeds the strip half-width 0.5", f"{path}.radius")
        kw["radius"] = r
    elif kind == "ellipse":
        kw["center"] = _pair(obj["center"], f"{path}.center")
        a, b = _pair(obj["semi_axes"], f"{path}.semi_axes")
        if a <= 0 or b <= 0:
            raise ConfigError("semi-axes must be > 0", f"{path}.semi_axes")
        if 2.0 * a >= 1.0:
            raise ConfigError(f"horizontal semi-axis {a} exceeds the strip half-width 0.5", f"{path}.semi_axes")
        kw["semi_axes"] = (a, b)
    elif kind in ("flat_layer", "perturbed_layer"):
        kw["h"] = _number(obj["h"], f"{path}.h", positive=True)
        if kind == "perturbed_layer":
            amp = _number(obj["amplitude"], f"{path}.amplitude")
            if abs(amp) >= kw["h"]:
                raise ConfigError("perturbation amplitude must be smaller than h", f"{path}.amplitude")
            kw["amplitude"] = amp
            kw["mode"] = _integer(obj["mode"], f"{path}.mode", minimum=1)
    else:
        nodes = obj["nodes"]
        if not isinstance(nodes, list):
            raise ConfigError("expected a list of [x1, x2] pairs", f"{path}.nodes")
        kw["nodes"] = tuple(_pair(p, f"{path}.nodes[{i}]") for i, p in enumerate(nodes))
        if len(kw["nodes"]) < 8 or len(kw["nodes"]) % 2:
            raise ConfigError("node count must be even and >= 8", f"{path}.nodes")
        kw["closure"] = _pair(obj.get("closure", [0, 0]), f"{path}.closure")
    return PresetSpec(**kw)


def parse_config(text) -> SimConfig:
    """Parse and fully validate a JSON config (bytes or str)."""
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ConfigError(f"not valid UTF-8: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON: {exc}") from None
    if not isinstance(obj, dict):
        raise ConfigError("top level must be a JSON object")
    for key in obj:
        if key not in _TOP_KEYS:
            raise ConfigError("unknown key", key)
    for key in _REQUIRED_TOP:
        if key not in obj:
            raise ConfigError("missing required key", key)

    if not isinstance(obj["contours"], list):
        raise ConfigError("expected a list", "contours")
    quadrature = obj.get("quadrature", "spectral")
    if quadrature not in QUADRATURES:
        raise ConfigError(f"must be one of {', '.join(QUADRATURES)}", "quadrature")
    config = SimConfig(
        omega0=_number(obj["omega0"], "omega0"),
        contours=tuple(_parse_preset(c, f"contours[{i}]") for i, c in enumerate(obj["contours"])),
        n_nodes=_node_count(obj["n_nodes"], "n_nodes"),
        t_end=_number(obj["t_end"], "t_end", nonneg=True),
        dt=_number(obj.get("dt", 1e-3), "dt", positive=True),
        save_every=_integer(obj.get("save_every", 10), "save_every", minimum=1),
        redistribute_every=_integer(obj.get("redistribute_every", 20), "redistribute_every", minimum=0),
        quadrature=quadrature,
    )
    try:
        build_initial_system(config)
    except StripVortexError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc), "contours") from None
    return config


# -- presets -----------------------------------------------------------------

def _alphas(n):
    return 2.0 * np.pi * np.arange(n) / n


def preset_contours(spec: PresetSpec, n_nodes: int):
    """Contours (already validated) for one preset entry."""
    n = spec.n_nodes or n_nodes
    a = _alphas(n)
    if spec.kind == "circle":
        cx, cy = spec.center
        nodes = np.column_stack([cx + spec.radius * np.cos(a), cy + spec.radius * np.sin(a)])
        return [validate_contour(nodes)]
    if spec.kind == "ellipse":
        cx, cy = spec.center
        sa, sb = spec.semi_axes
        nodes = np.column_stack([cx + sa * np.cos(a), cy + sb * np.sin(a)])
        return [validate_contour(nodes)]
    if spec.kind in ("flat_layer", "perturbed_layer"):
        bump = np.zeros(n)
        if spec.kind == "perturbed_layer":
            bump = spec.amplitude * np.sin(spec.mode * a)
        s = np.arange(n) / n
        bottom = np.column_stack([s - 0.5, -spec.h + bump])
        top = np.column_stack([0.5 - s, spec.h + bump])
        return [validate_contour(bottom, (1.0, 0.0)), validate_contour(top, (-1.0, 0.0))]
    return [validate_contour(np.array(spec.nodes), spec.closure or (0.0, 0.0))]


def build_initial_system(config: SimConfig) -> PatchSystem:
    contours = []
    for spec in config.contours:
        contours.extend(preset_contours(spec, config.n_nodes))
    system = PatchSystem(tuple(contours), config.omega0)
    check_separated(system)
    return system


def flat_layer_config(h=0.25, n_nodes=128, omega0=1.0, t_end=0.0, **kw) -> SimConfig:
    """Shorthand used by tests and examples."""
    return SimConfig(omega0=omega0, contours=(PresetSpec("flat_layer", h=h),), n_nodes=n_nodes, t_end=t_end, **kw)
