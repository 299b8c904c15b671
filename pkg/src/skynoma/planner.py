"""Per-point altitude search against a QoS target.

Sweeps the analytic joint coverage probability over a height grid at each
trajectory point and reports the minimum height meeting the QoS target and
the height maximizing coverage. A full grid sweep is used rather than
bracketing: the LoS probability is a step function of geometry and the
coverage is not monotone in height, so the feasible set need not be an
up-set.
"""

import dataclasses
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

from .analysis import DecodingThresholds, coverage_report
from .channel import LosModel, SystemParams
from .trajectory import TrajectoryPoint

__all__ = [
    "HeightSearchConfig",
    "HeightResult",
    "height_grid",
    "min_height",
    "best_height",
]


@dataclass(frozen=True)
class HeightSearchConfig:
    h_min: float = 25.0
    h_max: float = 300.0
    h_step: float = 1.0
    qos: float = 0.9

    def __post_init__(self):
        if self.h_min >= self.h_max:
            raise ValueError("h_min must be below h_max")
        if self.h_step <= 0:
            raise ValueError("h_step must be positive")
        if not 0 < self.qos < 1:
            raise ValueError("qos must be in (0, 1)")


@dataclass(frozen=True)
class HeightResult:
    """Outcome of one altitude sweep.

    ``min_height`` is None when no grid height meets the QoS target.
    """

    point_index: int
    min_height: Optional[float]
    best_height: float
    best_p_tot: float


def height_grid(cfg: HeightSearchConfig) -> List[float]:
    steps = math.floor((cfg.h_max - cfg.h_min) / cfg.h_step + 1e-9)
    return [cfg.h_min + k * cfg.h_step for k in range(steps + 1)]


def _sweep(params: SystemParams, los: LosModel, point: TrajectoryPoint,
           th: DecodingThresholds, cfg: HeightSearchConfig) -> List[Tuple[float, float]]:
    values = []
    for h in height_grid(cfg):
        report = coverage_report(params, los, dataclasses.replace(point, h=h), th)
        values.append((h, report.p_tot))
    return values


def min_height(params: SystemParams, los: LosModel, point: TrajectoryPoint,
               th: DecodingThresholds, cfg: HeightSearchConfig) -> HeightResult:
    """Smallest grid height meeting the QoS target, plus the grid optimum.

    Evaluates the whole grid (no early exit) so that the best height comes
    from the same sweep and non-monotone coverage cannot hide feasible
    heights.
    """
    values = _sweep(params, los, point, th, cfg)
    feasible = None
    best_h, best_p = values[0]
    for h, p_tot in values:
        if feasible is None and p_tot >= cfg.qos:
            feasible = h
        if p_tot > best_p:
            best_h, best_p = h, p_tot
    return HeightResult(point.n, feasible, best_h, best_p)


def best_height(params: SystemParams, los: LosModel, point: TrajectoryPoint,
                th: DecodingThresholds, cfg: HeightSearchConfig) -> Tuple[float, float]:
    """Grid height maximizing the joint coverage; ties go to the lowest."""
    result = min_height(params, los, point, th, cfg)
    return result.best_height, result.best_p_tot
