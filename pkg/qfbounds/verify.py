"""
Monte-Carlo checks of the cylinder guarantees.

Every check draws instances from the cylinder generator, runs them through the
axis solver and tests one closed-form guarantee. Runs are reproducible: the
per-instance generators are spawned from a single SeedSequence, and the result
only aggregates counts and maxima, so the thread count never changes it.
"""

import logging
import math
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel
from tqdm import tqdm

from .cylinder import (
    CylQuad,
    SituationClass,
    classify,
    generate_cyl,
    h_ort_int,
    midpoint_path_length,
    situation1_threshold,
    situation2_bound,
    solve_axis,
)
from .exceptions import DomainViolation, GeometryError
from .trig import equidistant_length, saccheri_top

logger = logging.getLogger(__name__)

# rounding allowances
SITUATION1_SLACK = 1e-9
ROUNDTRIP_TOL = 1e-7


class Outcome(NamedTuple):
    status: str  # "pass", "fail" or "skip"
    margin: Optional[float] = None


class VerificationResult(BaseModel):
    check: str
    instances: int
    seed: int
    eps3: float
    passed: int
    failed: int
    skipped: int
    max_margin: Optional[float] = None
    worst_instance: Optional[int] = None
    failures: List[int] = []

    @property
    def ok(self) -> bool:
        return self.failed == 0


class MonteCarloCheck(ABC):
    """
    Base class for all Monte-Carlo checks.

    ``sample`` draws one instance or returns None when the draw misses the
    hypotheses of the guarantee. ``evaluate`` returns the verdict and a margin
    that is nonpositive exactly when the guarantee holds.
    """

    name: str = "base_check"
    description: str = "Base check description"
    max_attempts: int = 50

    @abstractmethod
    def sample(self, rng: np.random.Generator, eps3: float) -> Optional[Any]:
        pass

    @abstractmethod
    def evaluate(self, instance: Any, eps3: float) -> Tuple[bool, float]:
        pass

    def run_one(self, seed: np.random.SeedSequence, eps3: float) -> Outcome:
        rng = np.random.default_rng(seed)
        for _ in range(self.max_attempts):
            try:
                instance = self.sample(rng, eps3)
            except GeometryError as e:
                logger.debug(f"{self.name}: draw rejected: {type(e).__name__}: {e}")
                instance = None
            if instance is None:
                continue
            try:
                passed, margin = self.evaluate(instance, eps3)
            except GeometryError as e:
                logger.error(f"{self.name}: evaluation raised {type(e).__name__}: {e}")
                return Outcome("fail")
            return Outcome("pass" if passed else "fail", margin)
        return Outcome("skip")


def _contains_axis_quad(
    rng: np.random.Generator, h_range: Tuple[float, float] = (4.0, 12.0)
) -> CylQuad:
    """A quad with opposite-sign offsets whose longer boundary side has length in [0.1, 0.5]."""
    h = rng.uniform(*h_range)
    share = rng.uniform(0.4, 0.6)
    alpha = rng.uniform(0.5, 0.5 * math.pi)
    offset_plus, offset_minus = share * h, -(1.0 - share) * h
    h_o = math.asinh(math.sin(alpha) * math.sinh(max(offset_plus, -offset_minus)))
    target = math.exp(rng.uniform(math.log(0.1), math.log(0.5)))
    l_o = 2.0 * math.asinh(math.sinh(0.5 * target) / math.cosh(h_o))
    return generate_cyl(
        l_o, offset_plus, offset_minus, alpha, seed=int(rng.integers(2**32)), require_minimal=False
    )


class Situation1Check(MonteCarloCheck):
    name = "situation1"
    description = "ContainsAxis with h above the arcosh threshold has midpoint path length at most eps3."

    def sample(self, rng: np.random.Generator, eps3: float) -> Optional[CylQuad]:
        q = _contains_axis_quad(rng)
        threshold = situation1_threshold(q.l_plus, q.l_minus, eps3)
        if q.h < threshold.value:
            return None
        return q

    def evaluate(self, q: CylQuad, eps3: float) -> Tuple[bool, float]:
        q = solve_axis(q)
        if classify(q) is not SituationClass.CONTAINS_AXIS:
            return False, math.inf
        length = midpoint_path_length(q)
        return length <= eps3 + SITUATION1_SLACK, length - eps3


def _minimal_phase_cosine(l_o: float, offset_plus: float, offset_minus: float) -> float:
    """Largest cos(phase) for which R+0 and R-0 sit at most l_o / 2 apart along the axis.

    The axis shift is atanh(c tanh t+) - atanh(c tanh t-), increasing in c = cos(phase).
    """
    slope = math.tanh(0.5 * l_o)
    t_plus, t_minus = math.tanh(offset_plus), math.tanh(offset_minus)
    spread = t_plus - t_minus
    return 2.0 * slope / (spread + math.sqrt(spread**2 + 4.0 * slope**2 * t_plus * t_minus))


class Situation2Check(MonteCarloCheck):
    name = "situation2"
    description = "AvoidsAxis with type-Cyl minimality has h below the logarithmic bound."

    def sample(self, rng: np.random.Generator, eps3: float) -> Optional[CylQuad]:
        l_o = math.exp(rng.uniform(math.log(1e-3), math.log(1.0)))
        h_plus = rng.uniform(0.1, 6.0)
        h_minus = rng.uniform(0.0, h_plus)
        if h_minus < 1e-6 or h_plus - h_minus < 1e-3:
            return None
        # a larger cos(phase) leaves the cylinder non-minimal
        c_max = min(_minimal_phase_cosine(l_o, h_plus, h_minus), math.cos(0.3))
        alpha = math.acos(rng.uniform(0.0, c_max))
        return generate_cyl(l_o, h_plus, h_minus, alpha, seed=int(rng.integers(2**32)))

    def evaluate(self, q: CylQuad, eps3: float) -> Tuple[bool, float]:
        q = solve_axis(q)
        if classify(q) is not SituationClass.AVOIDS_AXIS:
            return False, math.inf
        margin = q.h - situation2_bound(q.l_plus, q.l_minus)
        return margin < 0, margin


class OrtIntervalCheck(MonteCarloCheck):
    name = "ort-interval"
    description = "A Saccheri quadrilateral with legs above h_ort_int has l_O cosh(h/2) below eps3."

    def sample(self, rng: np.random.Generator, eps3: float) -> Optional[Tuple[float, float]]:
        target = math.exp(rng.uniform(math.log(0.1), math.log(2.0)))
        h = h_ort_int(target, eps3) + rng.uniform(0.01, 3.0)
        l_o = 2.0 * math.asinh(math.sinh(0.5 * target) / math.cosh(h))
        if not h > h_ort_int(saccheri_top(l_o, h), eps3):
            return None
        return l_o, h

    def evaluate(self, instance: Tuple[float, float], eps3: float) -> Tuple[bool, float]:
        l_o, h = instance
        length = equidistant_length(l_o, 0.5 * h)
        return length < eps3, length - eps3


class RoundTripCheck(MonteCarloCheck):
    name = "roundtrip"
    description = "The axis solver recovers the translation length, offsets and angle of a generated cylinder."

    def sample(self, rng: np.random.Generator, eps3: float) -> Optional[Tuple[Dict[str, float], CylQuad]]:
        params = {
            "translation_length": rng.uniform(0.05, 3.0),
            "offset_plus": rng.uniform(-3.0, 3.0),
            "offset_minus": rng.uniform(-3.0, 3.0),
            "phase": rng.uniform(0.3, 0.5 * math.pi),
        }
        if params["offset_plus"] - params["offset_minus"] < 0.05:
            return None
        q = generate_cyl(seed=int(rng.integers(2**32)), require_minimal=False, **params)
        return params, q

    def evaluate(self, instance: Tuple[Dict[str, float], CylQuad], eps3: float) -> Tuple[bool, float]:
        params, q = instance
        solved = solve_axis(q)
        residual = max(
            abs(solved.l_O - params["translation_length"]),
            abs(solved.offset_plus - params["offset_plus"]),
            abs(solved.offset_minus - params["offset_minus"]),
            abs(solved.alpha - params["phase"]),
        )
        return residual <= ROUNDTRIP_TOL, residual - ROUNDTRIP_TOL


class TwoCylinderCheck(MonteCarloCheck):
    name = "two-cylinder"
    description = "Two ContainsAxis cylinders over a shared transversal above both thresholds give two short curves."

    def sample(self, rng: np.random.Generator, eps3: float) -> Optional[Tuple[CylQuad, CylQuad]]:
        first = _contains_axis_quad(rng)
        second = _contains_axis_quad(rng, h_range=(first.h, first.h))
        for q in (first, second):
            if first.h < situation1_threshold(q.l_plus, q.l_minus, eps3).value:
                return None
        return first, second

    def evaluate(self, instance: Tuple[CylQuad, CylQuad], eps3: float) -> Tuple[bool, float]:
        worst = -math.inf
        for q in map(solve_axis, instance):
            if classify(q) is not SituationClass.CONTAINS_AXIS:
                return False, math.inf
            worst = max(worst, midpoint_path_length(q) - eps3)
        return worst <= SITUATION1_SLACK, worst


class CheckRegistry:
    def __init__(self):
        self.checks: Dict[str, MonteCarloCheck] = {}

    def register(self, check: MonteCarloCheck):
        self.checks[check.name] = check

    def get_check(self, name: str) -> Optional[MonteCarloCheck]:
        return self.checks.get(name)

    def names(self) -> List[str]:
        return sorted(self.checks)


def run_check(
    check: MonteCarloCheck,
    instances: int,
    seed: int,
    eps3: float,
    threads: int = 1,
    progress: bool = False,
) -> VerificationResult:
    """Run ``instances`` independent draws of a check and aggregate the verdicts."""
    if instances < 1:
        raise DomainViolation(f"instances must be positive, got {instances}")
    seeds = np.random.SeedSequence(seed).spawn(instances)
    logger.info(f"Running {check.name}: {instances} instances, seed {seed}, {threads} thread(s)")

    def run(s: np.random.SeedSequence) -> Outcome:
        return check.run_one(s, eps3)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        outcomes = list(
            tqdm(
                pool.map(run, seeds),
                total=instances,
                desc=check.name,
                disable=not progress,
                leave=False,
            )
        )

    counts = {"pass": 0, "fail": 0, "skip": 0}
    failures: List[int] = []
    max_margin: Optional[float] = None
    worst_instance: Optional[int] = None
    for index, outcome in enumerate(outcomes):
        counts[outcome.status] += 1
        if outcome.status == "fail":
            failures.append(index)
        if outcome.margin is not None and math.isfinite(outcome.margin):
            if max_margin is None or outcome.margin > max_margin:
                max_margin, worst_instance = outcome.margin, index

    result = VerificationResult(
        check=check.name,
        instances=instances,
        seed=seed,
        eps3=eps3,
        passed=counts["pass"],
        failed=counts["fail"],
        skipped=counts["skip"],
        max_margin=max_margin,
        worst_instance=worst_instance,
        failures=failures,
    )
    if result.failed:
        logger.warning(f"{check.name}: {result.failed} of {instances} instance(s) failed")
    else:
        logger.info(f"{check.name}: {result.passed} passed, {result.skipped} skipped")
    return result


# Global registry
check_registry = CheckRegistry()
for _check in (Situation1Check(), Situation2Check(), OrtIntervalCheck(), RoundTripCheck(), TwoCylinderCheck()):
    check_registry.register(_check)
