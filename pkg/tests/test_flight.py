import math

import numpy as np
import pytest
from scipy import stats as sps

from hyperlorentz import (
    Direction,
    FlightConfig,
    Point,
    State,
    flight_displacement,
    hyp_distance,
    ks_statistic,
    mobius_transport,
    position_at,
    sample_deflection,
    simulate_flight,
)
from hyperlorentz.experiments import _derive_rng, deflection_cdf
from util import random_mobius

TWO_PI = 2.0 * math.pi
START = State(Point(0.0, 1.0), Direction(math.pi / 2))


class FixedUniform:
    """Minimal rng stub feeding preset uniforms to sample_deflection."""

    def __init__(self, values):
        self.values = list(values)

    def random(self, size=None):
        if size is None:
            return self.values.pop(0)
        out = self.values[:size]
        del self.values[:size]
        return np.asarray(out)


def test_deflection_inversion_fixed_points():
    assert sample_deflection(FixedUniform([0.5])) == pytest.approx(math.pi, abs=1e-15)
    assert sample_deflection(FixedUniform([0.0])) == 0.0
    assert sample_deflection(FixedUniform([1.0 - 1e-12])) == pytest.approx(TWO_PI, abs=1e-5)
    got = sample_deflection(FixedUniform([0.1, 0.9]), size=2)
    assert got == pytest.approx([4 * math.asin(math.sqrt(0.1)), 4 * math.asin(math.sqrt(0.9))])


def test_deflection_law_ks():
    betas = sample_deflection(_derive_rng(1, 3, 0, 0), 1_000_000)
    assert ks_statistic(betas, deflection_cdf) < 0.002


def test_deflection_mean_and_symmetry():
    betas = sample_deflection(_derive_rng(2, 3, 0, 0), 1_000_000)
    assert betas.mean() == pytest.approx(math.pi, abs=0.003)
    # density is symmetric under beta -> 2*pi - beta
    assert sps.ks_2samp(betas[:200_000], TWO_PI - betas[200_000:400_000]).pvalue > 0.01


def test_flight_zero_rate_limit_is_geodesic():
    cfg = FlightConfig(1e-12, 5.0)
    for i in range(20):
        traj = simulate_flight(START, cfg, _derive_rng(3, 0, 0, i))
        assert traj.events == ()
        assert flight_displacement(traj, 5.0) == pytest.approx(5.0, abs=1e-10)


def test_flight_event_counts_poisson():
    sigma, t, n = 2.0, 3.0, 20_000
    counts = np.empty(n)
    for i in range(n):
        counts[i] = len(simulate_flight(START, FlightConfig(sigma, t), _derive_rng(4, 0, 0, i)).events)
    assert counts.mean() == pytest.approx(sigma * t, rel=0.03)
    assert counts.var(ddof=1) == pytest.approx(sigma * t, rel=0.05)


def test_flight_displacement_bounded_by_time():
    for i in range(300):
        traj = simulate_flight(START, FlightConfig(1.5, 2.0), _derive_rng(5, 0, 0, i))
        for t in (0.5, 1.3, 2.0):
            d = flight_displacement(traj, t)
            assert 0.0 <= d <= t + 1e-9


def test_flight_gap_and_deflection_independence():
    # draw with a huge horizon so no truncation biases the observed pairs
    cfg = FlightConfig(1.0, 60.0)
    g1, g2, betas = [], [], []
    for i in range(6000):
        traj = simulate_flight(START, cfg, _derive_rng(6, 0, 0, i))
        if len(traj.events) >= 2:
            t1 = traj.events[0].time
            t2 = traj.events[1].time
            g1.append(t1)
            g2.append(t2 - t1)
            betas.append(traj.events[0].deflection)
    n = len(g1)
    assert n > 5900
    tau = sps.kendalltau(g1, g2).statistic
    assert abs(tau) < 3.0 * math.sqrt(2.0 / (2.25 * n))  # ~3 sd of Kendall tau under H0
    rho = sps.spearmanr(g1, betas).statistic
    assert abs(rho) < 3.0 / math.sqrt(n)


def test_flight_isometry_invariance_of_displacement():
    rng = np.random.default_rng(7)
    m = random_mobius(rng)
    moved = mobius_transport(m, START)
    cfg = FlightConfig(1.0, 2.0)
    base = np.empty(5000)
    transported = np.empty(5000)
    for i in range(5000):
        base[i] = flight_displacement(simulate_flight(START, cfg, _derive_rng(8, 0, 0, i)), 2.0)
        transported[i] = flight_displacement(
            simulate_flight(moved, cfg, _derive_rng(8, 1, 0, i)), 2.0
        )
    # zero-event runs put an atom at exactly t; round so both samples agree
    # on its location instead of splitting it by ~1e-15 of float noise
    assert sps.ks_2samp(np.round(base, 9), np.round(transported, 9)).pvalue > 0.01


def test_flight_displacement_reproducible_across_seeds():
    cfg = FlightConfig(1.0, 2.0)
    means = []
    for block in (0, 1):
        d = np.empty(20_000)
        for i in range(len(d)):
            d[i] = flight_displacement(simulate_flight(START, cfg, _derive_rng(9, block, 0, i)), 2.0)
        means.append((d.mean(), d.std(ddof=1) / math.sqrt(len(d))))
    (m1, se1), (m2, se2) = means
    assert abs(m1 - m2) < 3.0 * math.hypot(se1, se2)


def test_flight_trajectory_structure():
    traj = simulate_flight(START, FlightConfig(2.0, 4.0), _derive_rng(10, 0, 0, 0))
    assert all(ev.obstacle_index == -1 for ev in traj.events)
    for ev in traj.events:
        assert ev.post_dir.alpha == pytest.approx(
            (ev.pre_dir.alpha + ev.deflection) % TWO_PI, abs=1e-12
        )
    # positions at event times chain through the flow
    for e1, e2 in zip(traj.events, traj.events[1:]):
        s = position_at(traj, (e1.time + e2.time) / 2.0)
        assert hyp_distance(e1.impact_point, s.point) == pytest.approx(
            (e2.time - e1.time) / 2.0, abs=1e-9
        )


def test_flight_config_validation():
    with pytest.raises(ValueError):
        FlightConfig(0.0, 1.0)
    with pytest.raises(ValueError):
        FlightConfig(1.0, -2.0)


def test_flight_event_cap_raises():
    from hyperlorentz import RunawayError

    with pytest.raises(RunawayError):
        simulate_flight(START, FlightConfig(50.0, 10.0), _derive_rng(11, 0, 0, 0), max_events=5)
