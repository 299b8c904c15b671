"""Transmission-point generators for the aerial user.

Two built-in mobility models plus CSV import/export of arbitrary waypoint
lists:

* an Archimedean spiral that sweeps the disk in M rounds, with points
  spaced at equal travel time (equivalently, equal enclosed disk area);
* a seeded random chord walk: straight segments between cell-boundary
  points with a fresh inward heading at every boundary hit, points
  recorded at fixed travel-time intervals.

The CSV schema is ``n,x_m,y_m,h_m`` with a mandatory header row; the
horizontal distance is always recomputed from x/y on import.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, TextIO, Tuple

import numpy as np

__all__ = [
    "TrajectoryPoint",
    "SpiralConfig",
    "ChordWalkConfig",
    "WalkSegment",
    "spiral_point_count",
    "spiral_points",
    "chord_walk_points",
    "chord_walk_path",
    "write_trajectory_csv",
    "read_trajectory_csv",
]

CSV_HEADER = "n,x_m,y_m,h_m"


@dataclass(frozen=True)
class TrajectoryPoint:
    """One transmission point: 1-based index, position and altitude (m)."""

    n: int
    x: float
    y: float
    h: float

    @property
    def r_a(self) -> float:
        """Horizontal distance from the BS projection."""
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class SpiralConfig:
    rounds: int          # full turns from center to cell edge
    speed: float         # m/s
    period: float        # s between transmissions
    cell_radius: float   # m
    height: float        # m

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        if self.speed <= 0 or self.period <= 0:
            raise ValueError("speed and period must be positive")
        if self.cell_radius <= 0:
            raise ValueError("cell_radius must be positive")


@dataclass(frozen=True)
class ChordWalkConfig:
    seed: int
    n_points: int
    speed: float
    period: float
    cell_radius: float
    height: float

    def __post_init__(self):
        if self.n_points < 1:
            raise ValueError("n_points must be >= 1")
        if self.speed <= 0 or self.period <= 0:
            raise ValueError("speed and period must be positive")
        if self.cell_radius <= 0:
            raise ValueError("cell_radius must be positive")


def spiral_point_count(cfg: SpiralConfig) -> int:
    """Number of transmission points along the spiral.

    Arc length of r = (R / 2 pi M) * phi from center to edge, divided by
    the distance travelled per transmission period, floored.
    """
    a = 2.0 * math.pi * cfg.rounds
    arc = cfg.cell_radius * (a * math.sqrt(1.0 + a * a) + math.asinh(a)) / (2.0 * a)
    n = math.floor(arc / (cfg.speed * cfg.period))
    if n < 1:
        raise ValueError("trajectory too short: no transmission points fit")
    return n


def spiral_points(cfg: SpiralConfig) -> List[TrajectoryPoint]:
    """Transmission points on the spiral, equally spaced in travel time.

    Equal time spacing along this spiral gives r[n] = R*sqrt(n/N), so the
    points are also equally spaced in enclosed disk area and the last point
    lies exactly on the cell edge. The azimuth recovers the position on the
    curve itself.
    """
    n_points = spiral_point_count(cfg)
    pts = []
    for n in range(1, n_points + 1):
        r = cfg.cell_radius * math.sqrt(n / n_points)
        phi = 2.0 * math.pi * cfg.rounds * r / cfg.cell_radius
        pts.append(TrajectoryPoint(n, r * math.cos(phi), r * math.sin(phi), cfg.height))
    return pts


@dataclass(frozen=True)
class WalkSegment:
    """One straight leg of the chord walk, from a boundary point inward."""

    x: float
    y: float
    heading_x: float
    heading_y: float
    length: float


def _boundary_exit_distance(x: float, y: float, ux: float, uy: float, radius: float) -> float:
    # Positive root of |p + s u| = R for |p| <= R and unit u.
    proj = x * ux + y * uy
    disc = proj * proj + radius * radius - (x * x + y * y)
    return -proj + math.sqrt(max(disc, 0.0))


def chord_walk_path(cfg: ChordWalkConfig) -> Tuple[List[TrajectoryPoint], List[WalkSegment]]:
    """Chord-walk transmission points plus the underlying straight legs.

    Starts at a seeded uniform point on the cell boundary, heads inward at
    a uniform angle within the open inward half-plane, and turns the same
    way at every boundary hit. Points are recorded every period; a boundary
    turn inside an interval splits it so that the path distance between
    consecutive points is always speed*period.
    """
    rng = np.random.Generator(np.random.Philox(key=np.array(
        [cfg.seed & 0xFFFFFFFFFFFFFFFF, 0], dtype=np.uint64)))
    radius = cfg.cell_radius

    def inward_heading(x: float, y: float) -> Tuple[float, float]:
        # Inward normal is -position/|position|; heading uniform within
        # +-pi/2 of it, which guarantees progress off the boundary.
        normal = math.atan2(-y, -x)
        angle = normal + rng.uniform(-math.pi / 2.0, math.pi / 2.0)
        return math.cos(angle), math.sin(angle)

    start_angle = rng.uniform(0.0, 2.0 * math.pi)
    x = radius * math.cos(start_angle)
    y = radius * math.sin(start_angle)
    ux, uy = inward_heading(x, y)

    points: List[TrajectoryPoint] = []
    segments: List[WalkSegment] = [WalkSegment(x, y, ux, uy, 0.0)]
    step = cfg.speed * cfg.period
    while len(points) < cfg.n_points:
        remaining = step
        while True:
            exit_dist = _boundary_exit_distance(x, y, ux, uy, radius)
            if exit_dist >= remaining:
                x += remaining * ux
                y += remaining * uy
                seg = segments[-1]
                segments[-1] = WalkSegment(seg.x, seg.y, seg.heading_x, seg.heading_y,
                                           seg.length + remaining)
                break
            # Turn at the boundary mid-interval and keep walking.
            x += exit_dist * ux
            y += exit_dist * uy
            remaining -= exit_dist
            seg = segments[-1]
            segments[-1] = WalkSegment(seg.x, seg.y, seg.heading_x, seg.heading_y,
                                       seg.length + exit_dist)
            ux, uy = inward_heading(x, y)
            segments.append(WalkSegment(x, y, ux, uy, 0.0))
        points.append(TrajectoryPoint(len(points) + 1, x, y, cfg.height))
    return points, segments


def chord_walk_points(cfg: ChordWalkConfig) -> List[TrajectoryPoint]:
    return chord_walk_path(cfg)[0]


def write_trajectory_csv(points: Sequence[TrajectoryPoint], stream: TextIO) -> None:
    stream.write(CSV_HEADER + "\n")
    for p in points:
        stream.write(f"{p.n},{p.x!r},{p.y!r},{p.h!r}\n")


def read_trajectory_csv(stream: TextIO,
                        cell_radius: Optional[float] = None) -> List[TrajectoryPoint]:
    """Parse a waypoint CSV; validates the header and index ordering."""
    header = stream.readline().strip()
    if header != CSV_HEADER:
        raise ValueError(f"expected header '{CSV_HEADER}', got '{header}'")
    points = []
    last_n = 0
    for lineno, line in enumerate(stream, start=2):
        line = line.strip()
        if not line:
            continue
        fields = line.split(",")
        if len(fields) != 4:
            raise ValueError(f"line {lineno}: expected 4 fields, got {len(fields)}")
        try:
            n = int(fields[0])
            x, y, h = (float(v) for v in fields[1:])
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        if n <= last_n:
            raise ValueError(f"line {lineno}: point index must be strictly increasing")
        last_n = n
        point = TrajectoryPoint(n, x, y, h)
        if cell_radius is not None and point.r_a > cell_radius * (1.0 + 1e-12):
            raise ValueError(f"line {lineno}: point lies outside the cell")
        points.append(point)
    return points
