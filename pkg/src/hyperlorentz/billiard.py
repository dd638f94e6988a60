"""The Lorentz process: geodesic motion among reflecting disk obstacles.

Collision times are solved exactly: the obstacle center is transported by
the isometry that maps the current state onto the upward vertical geodesic
through (0, 1), where the contact condition

    (x^2 + e^{2u} + y^2) / (2 e^u y) = cosh r

is a quadratic in e^u.  Reflection is the Euclidean mirror across the
tangent of the obstacle's Euclidean realization, which is specular in the
hyperbolic sense because half-plane angles agree with Euclidean angles.

Trajectories are piecewise geodesics, right-continuous in direction at
collision times.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import RegionTooSmallError, RunawayError
from .geometry import (
    TWO_PI,
    Direction,
    Point,
    State,
    ball_area,
    distance_xy,
    flow_angle,
    flow_xy,
    hyp_distance,
    mobius_xy,
    normalizing_coeffs,
)
from .obstacles import ObstacleField, sample_annulus

__all__ = [
    "Obstacle",
    "CollisionEvent",
    "Trajectory",
    "FirstCollision",
    "first_hit",
    "reflect",
    "simulate",
    "free_path",
    "tube_area",
    "position_at",
    "recollision_count",
    "sample_first_collision",
]

#: Quadratic discriminants below this are treated as tangencies, i.e. no hit.
DISC_TOL = 1e-12

#: Default window after a reflection in which re-hits of the same obstacle
#: are discarded as rounding artifacts.
GRAZING_TOL = 1e-9

DEFAULT_MAX_EVENTS = 10**6


@dataclass(frozen=True)
class Obstacle:
    """A reflecting disk: hyperbolic center and hyperbolic radius."""

    center: Point
    radius: float

    def __post_init__(self):
        if not (self.radius > 0.0):
            raise ValueError(f"obstacle radius must be positive, got {self.radius}")


@dataclass(frozen=True)
class CollisionEvent:
    """One reflection: when, where, and how the direction turned."""

    time: float
    impact_point: Point
    pre_dir: Direction
    post_dir: Direction
    deflection: float
    obstacle_index: int

    def __post_init__(self):
        if self.time <= 0.0:
            raise ValueError(f"collision time must be positive, got {self.time}")
        object.__setattr__(self, "deflection", self.deflection % TWO_PI)


@dataclass(frozen=True)
class Trajectory:
    """A piecewise-geodesic path: initial state plus ordered collisions."""

    initial: State
    horizon: float
    events: tuple[CollisionEvent, ...]

    def __post_init__(self):
        if not (self.horizon > 0.0):
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        object.__setattr__(self, "events", tuple(self.events))
        times = [e.time for e in self.events]
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            raise ValueError("collision times must be strictly increasing")
        if times and times[-1] >= self.horizon:
            raise ValueError("collision times must lie strictly before the horizon")


# ---------------------------------------------------------------------------
# Exact collision solving
# ---------------------------------------------------------------------------

def _hit_times(x0, y0, alpha, cx, cy, cosh_r) -> np.ndarray:
    """Forward hit times from state (x0, y0, alpha) against disk centers.

    Returns +inf where the trajectory misses (no real quadratic root
    strictly ahead of the particle, or a tangency).
    """
    a, b, c, d = normalizing_coeffs(x0, y0, alpha)
    tx, ty = mobius_xy(a, b, c, d, cx, cy)
    p = ty * cosh_r
    disc = p * p - (tx * tx + ty * ty)
    ok = disc >= DISC_TOL
    sq = np.sqrt(np.where(ok, disc, 0.0))
    w_lo = p - sq  # roots are real and positive: their product is |center|^2 > 0
    w = np.where(w_lo > 1.0, w_lo, p + sq)
    ok &= w > 1.0
    out = np.full(np.shape(w), np.inf)
    np.log(w, out=out, where=ok)
    return out


def _reflect_angle(ix, iy, alpha_in, cx, cy, radius):
    """Mirror the direction angle across the obstacle tangent at (ix, iy)."""
    ny = iy - cy * np.cosh(radius)
    nx = ix - cx
    norm = np.hypot(nx, ny)
    nx, ny = nx / norm, ny / norm
    vx, vy = np.cos(alpha_in), np.sin(alpha_in)
    dot = vx * nx + vy * ny
    return np.arctan2(vy - 2.0 * dot * ny, vx - 2.0 * dot * nx) % TWO_PI


def first_hit(s: State, ob: Obstacle) -> float | None:
    """Time of the first contact with a single obstacle, or None if missed.

    The state must start strictly outside the obstacle.
    """
    if hyp_distance(s.point, ob.center) <= ob.radius + 1e-9:
        raise ValueError("first_hit requires a state strictly outside the obstacle")
    t = _hit_times(
        s.point.x,
        s.point.y,
        s.dir.alpha,
        np.array([ob.center.x]),
        np.array([ob.center.y]),
        math.cosh(ob.radius),
    )[0]
    return float(t) if math.isfinite(t) else None


def reflect(impact: Point, incoming: Direction, ob: Obstacle) -> Direction:
    """Specular reflection of the incoming direction at a boundary point."""
    if abs(hyp_distance(impact, ob.center) - ob.radius) > 1e-8:
        raise ValueError("impact point does not lie on the obstacle boundary")
    return Direction(
        float(_reflect_angle(impact.x, impact.y, incoming.alpha, ob.center.x, ob.center.y, ob.radius))
    )


def tube_area(t: float, r: float) -> float:
    """Hyperbolic area swept by a disk of radius r moved along a geodesic
    segment of length t: 4*pi*sinh^2(r/2) + 2*t*sinh(r)."""
    if t < 0.0:
        raise ValueError(f"segment length must be nonnegative, got {t}")
    if r <= 0.0:
        raise ValueError(f"tube radius must be positive, got {r}")
    return ball_area(r) + 2.0 * t * math.sinh(r)


# ---------------------------------------------------------------------------
# Event-driven simulation
# ---------------------------------------------------------------------------

def _check_field(s0: State, field: ObstacleField, t_max: float):
    if t_max <= 0.0:
        raise ValueError(f"horizon must be positive, got {t_max}")
    needed = hyp_distance(s0.point, field.region.center) + t_max + field.radius
    if field.region.outer < needed - 1e-9:
        raise RegionTooSmallError(
            f"field region (outer {field.region.outer:g}) cannot cover horizon "
            f"{t_max:g} plus obstacle radius {field.radius:g}"
        )
    if len(field):
        d = distance_xy(field.centers[:, 0], field.centers[:, 1], s0.point.x, s0.point.y)
        if np.any(d <= field.radius):
            raise ValueError("initial point lies inside (or on) an obstacle")


def simulate(
    s0: State,
    field: ObstacleField,
    t_max: float,
    grazing_tol: float = GRAZING_TOL,
    max_events: int = DEFAULT_MAX_EVENTS,
) -> Trajectory:
    """Run the billiard among a fixed obstacle configuration up to t_max.

    Event-driven: repeatedly take the minimum positive exact hit time over
    the candidate obstacles, advance, reflect, and record.  Recollisions
    with any obstacle are allowed; only re-hits of the obstacle just left
    within ``grazing_tol`` are discarded, which removes rounding-induced
    zero-length loops.  Obstacles are pruned by the necessary condition
    d(current, center) <= remaining + r before the exact solve.
    """
    _check_field(s0, field, t_max)
    centers = field.centers
    cx, cy = centers[:, 0], centers[:, 1]
    cosh_r = math.cosh(field.radius)

    x, y, alpha = s0.point.x, s0.point.y, s0.dir.alpha
    t_now = 0.0
    last_idx = -1
    events: list[CollisionEvent] = []
    while len(centers):
        if len(events) >= max_events:
            raise RunawayError(f"exceeded {max_events} collision events before the horizon")
        remaining = t_max - t_now
        if remaining <= 0.0:
            break
        reach = math.cosh(remaining + field.radius)
        cosh_d = ((x - cx) ** 2 + y * y + cy * cy) / (2.0 * y * cy)
        cand = np.flatnonzero(cosh_d <= reach)
        if cand.size == 0:
            break
        th = _hit_times(x, y, alpha, cx[cand], cy[cand], cosh_r)
        if last_idx >= 0:
            pos = np.flatnonzero(cand == last_idx)
            if pos.size and th[pos[0]] <= grazing_tol:
                th[pos[0]] = np.inf
        k = int(np.argmin(th))
        t_star = float(th[k])
        if not math.isfinite(t_star) or t_now + t_star > t_max:
            break
        idx = int(cand[k])
        ix, iy = flow_xy(x, y, alpha, t_star)
        pre_alpha = float(flow_angle(alpha, t_star))
        post_alpha = float(_reflect_angle(ix, iy, pre_alpha, cx[idx], cy[idx], field.radius))
        events.append(
            CollisionEvent(
                time=t_now + t_star,
                impact_point=Point(float(ix), float(iy)),
                pre_dir=Direction(pre_alpha),
                post_dir=Direction(post_alpha),
                deflection=post_alpha - pre_alpha,
                obstacle_index=idx,
            )
        )
        x, y, alpha = float(ix), float(iy), post_alpha
        t_now += t_star
        last_idx = idx
    return Trajectory(s0, t_max, tuple(events))


def free_path(s0: State, field: ObstacleField, t_max: float) -> tuple[float, bool]:
    """Time of the first collision, or (t_max, True) if none before t_max."""
    _check_field(s0, field, t_max)
    if len(field) == 0:
        return t_max, True
    th = _hit_times(
        s0.point.x,
        s0.point.y,
        s0.dir.alpha,
        field.centers[:, 0],
        field.centers[:, 1],
        math.cosh(field.radius),
    )
    t = float(th.min())
    if t <= t_max:
        return t, False
    return t_max, True


def position_at(traj: Trajectory, t: float) -> State:
    """State at time t along the trajectory (right-continuous at events)."""
    if not 0.0 <= t <= traj.horizon:
        raise ValueError(f"time {t} outside [0, {traj.horizon}]")
    times = [e.time for e in traj.events]
    k = bisect_right(times, t)
    if k == 0:
        base, t0 = traj.initial, 0.0
    else:
        ev = traj.events[k - 1]
        base, t0 = State(ev.impact_point, ev.post_dir), ev.time
    x, y = flow_xy(base.point.x, base.point.y, base.dir.alpha, t - t0)
    return State(Point(float(x), float(y)), Direction(float(flow_angle(base.dir.alpha, t - t0))))


def recollision_count(traj: Trajectory) -> int:
    """Number of events that revisit an obstacle hit earlier on the path."""
    seen: set[int] = set()
    count = 0
    for ev in traj.events:
        if ev.obstacle_index in seen:
            count += 1
        seen.add(ev.obstacle_index)
    return count


# ---------------------------------------------------------------------------
# Annealed first-collision sampling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FirstCollision:
    """Outcome of shooting one particle into a fresh obstacle field."""

    time: float
    deflection: float  # nan when censored
    censored: bool


def sample_first_collision(
    lam: float,
    radius: float,
    horizon: float,
    rng: np.random.Generator,
    start: State | None = None,
) -> FirstCollision:
    """First collision against a fresh Poisson field, sampled lazily.

    The enclosing ball of the trajectory is grown annulus by annulus and
    obstacle centers are drawn only as needed: a candidate hit at time t is
    final once every center within t + r of the start has been sampled.
    By Poisson independence over disjoint annuli this is distributed
    exactly as sampling the full ball of radius horizon + r up front, at a
    cost that tracks the free path instead of the horizon.
    """
    if start is None:
        start = State(Point(0.0, 1.0), Direction(0.5 * math.pi))
    x0, y0, alpha0 = start.point.x, start.point.y, start.dir.alpha
    cosh_r = math.cosh(radius)
    step = min(2.0, max(0.25, 1.0 / (2.0 * lam * math.sinh(radius))))

    best_t = math.inf
    best_cx = best_cy = 0.0
    r_prev = radius  # exclusion ball: no center within r of the start
    while True:
        r_next = min(r_prev + step, horizon + radius)
        n = int(rng.poisson(lam * (ball_area(r_next) - ball_area(r_prev))))
        if n:
            pts = sample_annulus(start.point, r_prev, r_next, rng, n)
            th = _hit_times(x0, y0, alpha0, pts[:, 0], pts[:, 1], cosh_r)
            k = int(np.argmin(th))
            if th[k] < best_t:
                best_t = float(th[k])
                best_cx, best_cy = float(pts[k, 0]), float(pts[k, 1])
        if best_t <= r_next - radius or r_next >= horizon + radius:
            break
        r_prev = r_next

    if best_t > horizon:
        return FirstCollision(horizon, math.nan, True)
    ix, iy = flow_xy(x0, y0, alpha0, best_t)
    pre_alpha = float(flow_angle(alpha0, best_t))
    post_alpha = float(_reflect_angle(ix, iy, pre_alpha, best_cx, best_cy, radius))
    return FirstCollision(best_t, (post_alpha - pre_alpha) % TWO_PI, False)
