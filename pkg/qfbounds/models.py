"""
Klein and Poincare ball models, and the Klein-model Euclidean homothety.

A homothety of ratio lambda centred at the Klein origin contracts every curve
that stays inside the Euclidean ball of radius rho_B by at most the radial
factor f_lambda(rho_B); the perpendicular factor g_lambda is the weaker of the
two bounds.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .exceptions import DomainViolation
from .hyperboloid import HPoint, Vec4, dist

logger = logging.getLogger(__name__)

CURVE_MAX_SAMPLES = 1 << 20


@dataclass(frozen=True)
class KleinPoint:
    y1: float
    y2: float
    y3: float

    def __post_init__(self):
        for name in ("y1", "y2", "y3"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not self.norm() < 1.0:
            raise DomainViolation(
                f"Klein point ({self.y1}, {self.y2}, {self.y3}) is not inside the unit ball"
            )

    def as_array(self) -> np.ndarray:
        return np.array([self.y1, self.y2, self.y3])

    def norm(self) -> float:
        return math.sqrt(self.y1 * self.y1 + self.y2 * self.y2 + self.y3 * self.y3)

    def scaled(self, factor: float) -> "KleinPoint":
        return KleinPoint(self.y1 * factor, self.y2 * factor, self.y3 * factor)


class HomothetyParams(BaseModel):
    """Ratio lambda of the homothety and Euclidean radius rho_B of the enclosing ball."""

    model_config = ConfigDict(frozen=True, populate_by_name=True)

    lam: float = Field(alias="lambda", gt=0, le=1)
    rho_B: float = Field(gt=0, lt=1)


def to_klein(p: HPoint) -> KleinPoint:
    a = p.array
    return KleinPoint(a[1] / a[0], a[2] / a[0], a[3] / a[0])


def from_klein(k: KleinPoint) -> HPoint:
    y = k.as_array()
    x0 = 1.0 / math.sqrt(1.0 - float(y @ y))
    return HPoint(Vec4(x0, x0 * y[0], x0 * y[1], x0 * y[2]))


def to_poincare(p: HPoint) -> np.ndarray:
    """Poincare ball coordinates x_i / (1 + x0)."""
    a = p.array
    return a[1:] / (1.0 + a[0])


def from_poincare(u) -> HPoint:
    u = np.asarray(u, dtype=float).reshape(3)
    r2 = float(u @ u)
    if not r2 < 1.0:
        raise DomainViolation(f"Poincare point {u.tolist()} is not inside the unit ball")
    denom = 1.0 - r2
    return HPoint(Vec4((1.0 + r2) / denom, *(2.0 * u / denom)))


def klein_distance(a: KleinPoint, b: KleinPoint) -> float:
    return dist(from_klein(a), from_klein(b))


def _check_factor_domain(lam: float, rho: float):
    if not (0.0 < lam <= 1.0):
        raise DomainViolation(f"homothety ratio must lie in (0, 1], got {lam}")
    if not (0.0 <= rho < 1.0):
        raise DomainViolation(f"Klein radius must lie in [0, 1), got {rho}")


def radial_factor(lam: float, rho: float) -> float:
    """f_lambda(rho) = lambda (1 - rho^2) / (1 - lambda^2 rho^2)."""
    _check_factor_domain(lam, rho)
    return lam * (1.0 - rho * rho) / (1.0 - lam * lam * rho * rho)


def perp_factor(lam: float, rho: float) -> float:
    """g_lambda(rho) = lambda sqrt(1 - rho^2) / sqrt(1 - lambda^2 rho^2)."""
    _check_factor_domain(lam, rho)
    return lam * math.sqrt(1.0 - rho * rho) / math.sqrt(1.0 - lam * lam * rho * rho)


def homothety_apply(params: HomothetyParams, p: HPoint) -> HPoint:
    if params.lam == 1.0:
        return p
    k = to_klein(p)
    if k.norm() > params.rho_B:
        raise DomainViolation(
            f"point at Klein radius {k.norm():.6f} is outside the ball of radius {params.rho_B}"
        )
    return from_klein(k.scaled(params.lam))


def curve_length_lower_bound(params: HomothetyParams, length: float) -> float:
    if length < 0:
        raise DomainViolation(f"curve length must be nonnegative, got {length}")
    return radial_factor(params.lam, params.rho_B) * length


def _chord_sum(points: np.ndarray) -> float:
    diff = np.diff(points, axis=0)
    s = -diff[:, 0] ** 2 + np.sum(diff[:, 1:] ** 2, axis=1)
    return float(np.sum(2.0 * np.arcsinh(np.sqrt(np.maximum(s, 0.0)) / 2.0)))


def curve_length(
    path: Callable[[np.ndarray], np.ndarray],
    rel_tol: float = 1e-8,
    initial_samples: int = 64,
    max_samples: Optional[int] = None,
) -> float:
    """Length of a curve on the hyperboloid.

    path maps an array of parameters in [0, 1] to an (n, 4) array of points.
    Geodesic chord sums are refined by doubling until the relative change drops
    below rel_tol.
    """
    max_samples = max_samples or CURVE_MAX_SAMPLES
    n = initial_samples
    previous = _chord_sum(np.asarray(path(np.linspace(0.0, 1.0, n + 1)), dtype=float))
    while n < max_samples:
        n *= 2
        current = _chord_sum(np.asarray(path(np.linspace(0.0, 1.0, n + 1)), dtype=float))
        if abs(current - previous) <= rel_tol * max(abs(current), 1e-300):
            return current
        previous = current
    logger.warning(f"Curve length did not reach relative tolerance {rel_tol} with {n} samples")
    return previous
