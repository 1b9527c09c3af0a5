"""
Configuration models shared by the library and the command line.
"""

from typing import Any, Dict, Optional

from pydantic import BaseModel, ConfigDict, Field

from qfbounds_project import settings


class ModelConfig(BaseModel):
    """Tolerance and Margulis constant used by model-level invariant checks."""

    model_config = ConfigDict(frozen=True)

    tol_model: float = Field(default=settings.DEFAULT_TOL, gt=0)
    margulis_eps: float = Field(default=settings.DEFAULT_MARGULIS_EPS, gt=0)


class RunConfig(BaseModel):
    """Options of one CLI invocation."""

    model_config = ConfigDict(frozen=True)

    margulis_eps: float = Field(default=settings.DEFAULT_MARGULIS_EPS, gt=0)
    tol: float = Field(default=settings.DEFAULT_TOL, gt=0)
    seed: Optional[int] = Field(default=None, ge=0)
    refinement: int = Field(default=settings.DEFAULT_REFINEMENT, ge=0)
    out: Optional[str] = None
    threads: int = Field(default=1, ge=1)

    def embedded(self) -> Dict[str, Any]:
        # threads never changes a report
        return {
            "eps3": self.margulis_eps,
            "tol": self.tol,
            "seed": self.seed,
            "refinement": self.refinement,
        }


DEFAULT_MODEL = ModelConfig()
