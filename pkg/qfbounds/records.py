"""
JSON records read and written by the command line.
"""

import json
import logging
from dataclasses import asdict
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Type, TypeVar

from pydantic import BaseModel, ConfigDict, Field, model_validator

from .cylinder import CylQuad
from .oracles import DistanceOracle, PairTableOracle, oracle_registry
from .surface import (
    Combinatorics,
    CurvatureClass,
    PolyhedralSurface,
    Triangulation,
    ValidationReport,
)

logger = logging.getLogger(__name__)

R = TypeVar("R", bound=BaseModel)


class CombinatoricsRecord(BaseModel):
    model_config = ConfigDict(extra="ignore")

    vertex_count: int = Field(ge=0)
    triangles: List[Tuple[int, int, int]]

    def to_combinatorics(self) -> Combinatorics:
        return Combinatorics(self.vertex_count, tuple(self.triangles))


class SurfaceRecord(CombinatoricsRecord):
    """{"vertex_count", "triangles": [[i, j, k]], "edge_lengths": [[i, j, len]], "face_curvature"}"""

    edge_lengths: List[Tuple[int, int, float]]
    face_curvature: float = -1.0

    def to_surface(self) -> PolyhedralSurface:
        tri = Triangulation.from_entries(
            self.vertex_count, self.triangles, self.edge_lengths, self.face_curvature
        )
        return PolyhedralSurface(tri)

    @classmethod
    def from_surface(cls, s: PolyhedralSurface) -> "SurfaceRecord":
        return cls(
            vertex_count=s.vertex_count,
            triangles=[list(t) for t in s.triangles],
            edge_lengths=[[u, v, x] for (u, v), x in sorted(s.tri.edge_lengths.items())],
            face_curvature=s.face_curvature,
        )


class OracleRecord(BaseModel):
    """Either an explicit {"pairs": [[i, j, d]]} table or {"builtin": name, "params": {...}}."""

    pairs: Optional[List[Tuple[int, int, float]]] = None
    vertex_count: Optional[int] = Field(default=None, ge=0)
    builtin: Optional[str] = None
    params: Dict[str, Any] = {}

    @model_validator(mode="after")
    def check_source(self):
        if (self.pairs is None) == (self.builtin is None):
            raise ValueError("an oracle record needs exactly one of 'pairs' and 'builtin'")
        return self

    def to_oracle(self) -> DistanceOracle:
        if self.builtin is not None:
            return oracle_registry.build(self.builtin, self.params)
        return PairTableOracle(self.pairs, self.vertex_count)


class CylQuadRecord(BaseModel):
    """Every CylQuad field; the derived ones stay null until the quad is solved."""

    h: float
    l_plus: float
    l_minus: float
    diag: float
    alpha: Optional[float] = None
    l_O: Optional[float] = None
    offset_plus: Optional[float] = None
    offset_minus: Optional[float] = None
    h_plus: Optional[float] = None
    h_minus: Optional[float] = None
    h_O_plus: Optional[float] = None
    h_O_minus: Optional[float] = None
    l_OO_plus: Optional[float] = None
    l_OO_minus: Optional[float] = None
    d: Optional[float] = None
    d_plus: Optional[float] = None
    d_minus: Optional[float] = None
    angle_residual: Optional[float] = None
    offset_residual: Optional[float] = None
    sweep: Optional[str] = None

    def to_quad(self) -> CylQuad:
        return CylQuad(**self.model_dump())

    @classmethod
    def from_quad(cls, q: CylQuad) -> "CylQuadRecord":
        return cls(**asdict(q))


class GenerateRecord(BaseModel):
    translation_length: float = Field(gt=0)
    offset_plus: float
    offset_minus: float
    phase: float = Field(gt=0)


def report_to_dict(report: ValidationReport, cls: Optional[CurvatureClass] = None) -> Dict[str, Any]:
    out: Dict[str, Any] = {
        "clean": report.clean,
        "kinds": report.kinds(),
        "violations": [
            {"kind": v.kind, "location": list(v.location), "message": v.message}
            for v in report.violations
        ],
    }
    if cls is not None:
        out["curvature_class"] = {
            "accepted": cls.accepted,
            "label": cls.label,
            "offending": list(cls.offending),
            "max_cone_angle": cls.max_cone_angle,
        }
    return out


def load_record(path: str, model: Type[R]) -> R:
    """Read a JSON file into a record; OSError and JSONDecodeError pass through."""
    with Path(path).open("r", encoding="utf-8") as f:
        data = json.load(f)
    logger.debug(f"Loaded {model.__name__} from {path}")
    return model.model_validate(data)


def dump_json(payload: Dict[str, Any]) -> str:
    """Canonical rendering: sorted keys, two-space indent, trailing newline."""
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"
