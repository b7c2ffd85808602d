"""Piecewise-constant half-line potentials and the double-well geometry."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

#: Name of each sweepable parameter -> DoubleWellParams field.
SWEEP_PARAMETERS = {
    "D": "inner_barrier_thickness",
    "V": "v3",
    "inner_barrier_height": "v2",
    "inner_well_depth": "v1",
}


@dataclass(frozen=True)
class Segment:
    left_edge: float
    right_edge: float
    height: float

    def __post_init__(self):
        if not self.right_edge > self.left_edge:
            raise ValueError(
                f"segment needs left_edge < right_edge, got "
                f"({self.left_edge}, {self.right_edge})"
            )

    @property
    def width(self) -> float:
        return self.right_edge - self.left_edge


@dataclass(frozen=True)
class PotentialSpec:
    """Hard wall at x = 0, contiguous constant segments, then V = 0.

    An empty segment list is free motion next to the wall.
    """

    segments: Tuple[Segment, ...] = ()
    exterior_potential: float = field(default=0.0, init=False)
    # exact widths when built from widths; edge differences can round
    _widths: Optional[Tuple[float, ...]] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        edge = 0.0
        for i, seg in enumerate(self.segments):
            if seg.left_edge != edge:
                raise ValueError(
                    f"segment {i} starts at {seg.left_edge}, expected {edge}"
                )
            edge = seg.right_edge

    @classmethod
    def from_widths(cls, widths: Sequence[float], heights: Sequence[float]) -> "PotentialSpec":
        if len(widths) != len(heights):
            raise ValueError("widths and heights differ in length")
        segs = []
        left = 0.0
        for w, v in zip(widths, heights):
            segs.append(Segment(left, left + w, v))
            left = left + w
        return cls(tuple(segs), _widths=tuple(float(w) for w in widths))

    @cached_property
    def widths(self) -> np.ndarray:
        if self._widths is not None:
            return np.array(self._widths, dtype=float)
        return np.array([s.width for s in self.segments], dtype=float)

    @cached_property
    def heights(self) -> np.ndarray:
        return np.array([s.height for s in self.segments], dtype=float)

    @cached_property
    def edges(self) -> np.ndarray:
        """All segment edges including 0 and the outer edge."""
        return np.array([0.0] + [s.right_edge for s in self.segments])

    @property
    def extent(self) -> float:
        return self.segments[-1].right_edge if self.segments else 0.0


def segment_at(spec: PotentialSpec, x: float) -> Tuple[Optional[int], float]:
    """Return ``(index, potential)`` of the segment holding *x*.

    Segments are left-open, right-closed, ``]x_i, x_{i+1}]``; x = 0 belongs
    to the first segment. Index is ``None`` in the exterior.
    """
    if x < 0:
        raise ValueError(f"position must be >= 0, got {x}")
    for i, seg in enumerate(spec.segments):
        if x <= seg.right_edge:
            return i, seg.height
    return None, spec.exterior_potential


@dataclass(frozen=True)
class DoubleWellParams:
    """The eight-parameter double square well.

    Inner well ``]0, x1]`` at ``v1``, inner barrier of thickness ``D`` at
    ``v2``, outer well of width ``outer_well_width`` at ``v3`` and outer
    barrier of width ``outer_barrier_width`` at ``v4``.
    """

    v1: float = 0.0
    v2: float = 4.0
    v3: float = 1.04
    v4: float = 4.0
    x1: float = 1.0
    inner_barrier_thickness: float = 2.0
    outer_well_width: float = 1.0
    outer_barrier_width: float = 0.3

    def __post_init__(self):
        for name in ("x1", "outer_well_width", "outer_barrier_width"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.inner_barrier_thickness < 0:
            raise ValueError(
                f"inner barrier thickness must be >= 0, got {self.inner_barrier_thickness}"
            )

    @property
    def D(self) -> float:
        return self.inner_barrier_thickness

    @property
    def V(self) -> float:
        return self.v3

    @property
    def x2(self) -> float:
        return self.x1 + self.inner_barrier_thickness

    @property
    def x3(self) -> float:
        return self.x2 + self.outer_well_width

    @property
    def x4(self) -> float:
        return self.x3 + self.outer_barrier_width

    def get(self, parameter: str) -> float:
        return getattr(self, SWEEP_PARAMETERS[parameter])

    def with_param(self, parameter: str, value: float) -> "DoubleWellParams":
        try:
            name = SWEEP_PARAMETERS[parameter]
        except KeyError:
            raise ValueError(
                f"unknown parameter {parameter!r}; choose from {sorted(SWEEP_PARAMETERS)}"
            ) from None
        return replace(self, **{name: float(value)})

    def to_config(self) -> dict:
        return {
            "v": [self.v1, self.v2, self.v3, self.v4],
            "x1": self.x1,
            "D": self.inner_barrier_thickness,
            "w_outer": self.outer_well_width,
            "w_barrier": self.outer_barrier_width,
        }

    @classmethod
    def from_config(cls, config: dict) -> "DoubleWellParams":
        """Parse the JSON config schema; missing keys take the default model."""
        unknown = set(config) - {"v", "x1", "D", "w_outer", "w_barrier"}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        kwargs = {}
        if "v" in config:
            v = config["v"]
            if not isinstance(v, (list, tuple)) or len(v) != 4:
                raise ValueError("config 'v' must be a list of four heights")
            kwargs.update(v1=float(v[0]), v2=float(v[1]), v3=float(v[2]), v4=float(v[3]))
        for key, name in (("x1", "x1"), ("D", "inner_barrier_thickness"),
                          ("w_outer", "outer_well_width"), ("w_barrier", "outer_barrier_width")):
            if key in config:
                kwargs[name] = float(config[key])
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "DoubleWellParams":
        return cls.from_config(json.loads(text))


def build_double_well(params: DoubleWellParams) -> PotentialSpec:
    """Four segments, or three when the inner barrier has zero thickness."""
    widths = [params.x1, params.inner_barrier_thickness,
              params.outer_well_width, params.outer_barrier_width]
    heights = [params.v1, params.v2, params.v3, params.v4]
    if params.inner_barrier_thickness == 0:
        del widths[1], heights[1]
    return PotentialSpec.from_widths(widths, heights)


def params_from_spec(spec: PotentialSpec) -> DoubleWellParams:
    """Inverse of :func:`build_double_well` for a 4-segment spec."""
    if len(spec.segments) != 4:
        raise ValueError("only a four-segment spec maps back to DoubleWellParams")
    s = spec.segments
    w = spec.widths
    return DoubleWellParams(
        v1=s[0].height, v2=s[1].height, v3=s[2].height, v4=s[3].height,
        x1=float(w[0]), inner_barrier_thickness=float(w[1]),
        outer_well_width=float(w[2]), outer_barrier_width=float(w[3]),
    )


DEFAULT_PARAMS = DoubleWellParams()

__all__ = [
    "DoubleWellParams", "DEFAULT_PARAMS", "PotentialSpec", "SWEEP_PARAMETERS",
    "Segment", "build_double_well", "params_from_spec", "segment_at",
]
