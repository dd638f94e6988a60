"""Geodesic billiards among Poisson disk obstacles on the Poincare
half-plane, their Markovian random-flight limit, and the Monte Carlo
laboratory that verifies the closed-form laws connecting the two."""

from .billiard import (
    CollisionEvent,
    FirstCollision,
    Obstacle,
    Trajectory,
    first_hit,
    free_path,
    position_at,
    recollision_count,
    reflect,
    sample_first_collision,
    simulate,
    tube_area,
)
from .errors import (
    InfeasibleFieldError,
    RegionTooSmallError,
    RunawayError,
    ValidationError,
)
from .flight import FlightConfig, flight_displacement, sample_deflection, simulate_flight
from .geometry import (
    Direction,
    HypCircle,
    MobiusMap,
    Point,
    State,
    ball_area,
    cayley,
    circle_to_euclidean,
    flow_state,
    geodesic_flow,
    hyp_distance,
    mobius_apply,
    mobius_compose,
    mobius_inverse,
    mobius_transport,
    normalizing_map,
    rotate_direction,
)
from .obstacles import (
    BallRegion,
    ObstacleField,
    PotentialProfile,
    expected_T1,
    nearest_neighbor_tail,
    sample_field,
    sample_uniform_in_ball,
    shot_noise,
)
from .experiments import (
    EXPERIMENTS,
    ExperimentConfig,
    LevelStat,
    Report,
    export_trajectory,
    lambda_for,
    run_experiment,
)
from .stats import bootstrap_half_width_w1, ks_statistic, wasserstein1

__version__ = "0.1.0"
