"""Scene files: INI documents describing contrasts, incident field and outputs.

Example::

    [scene]
    half_width = 0.6
    n = 128
    k = 5
    incident = plane
    direction = 0

    [shape square]
    kind = polygon
    vertices = -0.5,-0.5; 0.5,-0.5; 0.5,0.5; -0.5,0.5
    q0 = 2

Keys of ``[scene]``: ``half_width``, ``n``, ``k`` or ``k_min``/``k_max``/
``steps``, ``incident`` (``plane``/``point``/``herglotz``), ``direction``
(radians, expressions such as ``pi/4`` allowed), ``source`` (``x, y``),
``density`` (one value or a ``;``-separated list), ``density_samples``,
``farfield_samples``, ``floor`` (``calibrated`` or a number) and output
names ``farfield``, ``snapshot``, ``sweep``. Each ``[shape NAME]`` section
has ``kind`` (``polygon``, ``disk``, ``sector``, ``none``), its geometry
keys, ``q0`` and optionally ``profile`` (an index expression in x, y, r).
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..errors import DomainError
from ..geometry import parse_angle
from .contrast import (ContrastField, disk_contrast, polygon_contrast, sector_contrast,
                       zero_contrast)
from .incident import IncidentField, herglotz, plane_wave, point_source

__all__ = ["Scene", "ShapeSpec", "load_scene", "parse_scene"]


@dataclass
class ShapeSpec:
    name: str
    kind: str
    params: dict

    def build(self, half_width: float, n: int) -> ContrastField:
        p = self.params
        q0 = complex(p.get("q0", "2").replace(" ", ""))
        profile = p.get("profile")
        if self.kind == "none":
            return zero_contrast(half_width, n)
        if self.kind == "polygon":
            return polygon_contrast(_points(p["vertices"]), q0, half_width, n, profile)
        if self.kind == "disk":
            center = _floats(p.get("center", "0, 0"))
            return disk_contrast(center, float(p["radius"]), q0, half_width, n, profile)
        if self.kind == "sector":
            omega, _ = parse_angle(p["omega"])
            return sector_contrast(omega, float(p.get("radius", "0.5")), q0, half_width, n, profile)
        raise DomainError(f"unknown shape kind {self.kind!r} in [shape {self.name}]")


@dataclass
class Scene:
    half_width: float
    n: int
    incident: IncidentField
    shapes: list
    k: Optional[float] = None
    k_range: Optional[tuple] = None
    steps: int = 0
    farfield_samples: int = 256
    floor: object = "calibrated"
    outputs: dict = field(default_factory=dict)

    def shape(self, name: Optional[str] = None) -> ShapeSpec:
        if name is None:
            if len(self.shapes) != 1:
                raise DomainError("scene has several shapes; choose one with --shape")
            return self.shapes[0]
        for s in self.shapes:
            if s.name == name:
                return s
        raise DomainError(f"no shape named {name!r}")

    def contrast(self, name: Optional[str] = None) -> ContrastField:
        return self.shape(name).build(self.half_width, self.n)


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.replace(" ", "").split(",") if x]
    except ValueError:
        raise DomainError(f"expected comma-separated numbers, got {text!r}") from None


def _points(text: str) -> np.ndarray:
    pts = [_floats(chunk) for chunk in text.split(";") if chunk.strip()]
    if any(len(p) != 2 for p in pts):
        raise DomainError("vertices must be 'x,y; x,y; ...'")
    return np.array(pts)


def _incident(sec) -> IncidentField:
    kind = sec.get("incident", "plane").strip()
    if kind == "plane":
        angle, _ = parse_angle(sec.get("direction", "0"))
        return plane_wave(angle)
    if kind == "point":
        return point_source(_floats(sec["source"]))
    if kind == "herglotz":
        vals = [complex(v.strip().replace(" ", "")) for v in sec.get("density", "1").split(";")]
        m = int(sec.get("density_samples", str(max(len(vals), 64))))
        if len(vals) == 1:
            vals = vals * m
        elif len(vals) != m:
            raise DomainError("density list length must equal density_samples")
        return herglotz(np.array(vals))
    raise DomainError(f"unknown incident kind {kind!r}")


def parse_scene(text: str) -> Scene:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";;"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise DomainError(f"scene file is not valid: {exc}") from None
    if "scene" not in cp:
        raise DomainError("scene file needs a [scene] section")
    sec = cp["scene"]
    try:
        half_width = float(sec.get("half_width", "0.6"))
        n = int(sec.get("n", "128"))
        k = float(sec["k"]) if "k" in sec else None
        k_range = (float(sec["k_min"]), float(sec["k_max"])) if "k_min" in sec else None
        steps = int(sec.get("steps", "0"))
        samples = int(sec.get("farfield_samples", "256"))
        floor = sec.get("floor", "calibrated").strip()
        floor = floor if floor == "calibrated" else float(floor)
    except (KeyError, ValueError) as exc:
        raise DomainError(f"bad [scene] entry: {exc}") from None
    shapes = []
    for name in cp.sections():
        if name.startswith("shape"):
            label = name[len("shape"):].strip() or "shape"
            params = dict(cp[name])
            shapes.append(ShapeSpec(label, params.pop("kind", "polygon").strip(), params))
    if not shapes:
        raise DomainError("scene file defines no [shape ...] section")
    outputs = {key: sec[key].strip() for key in ("farfield", "snapshot", "sweep") if key in sec}
    return Scene(half_width, n, _incident(sec), shapes, k, k_range, steps, samples, floor, outputs)


def load_scene(path) -> Scene:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_scene(fh.read())
    except OSError as exc:
        raise DomainError(f"cannot read scene file {path}: {exc.strerror}") from None
