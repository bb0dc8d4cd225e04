import math

import numpy as np
import pytest

from noslip.errors import DomainError
from noslip.integrate import EventResult, IntegratorConfig, energy_monitor, integrate_to_event


def test_linear_event_at_one():
    res = integrate_to_event(
        lambda t, y: np.array([1.0]),
        [0.0],
        [(lambda t, y: y[0] - 1.0, 1.0)],
        IntegratorConfig(),
        t_max=5.0,
    )
    assert res.event_id == 0
    assert abs(res.t - 1.0) < 1e-12
    assert abs(res.y[0] - 1.0) < 1e-12


def test_harmonic_energy_drift_100_periods():
    def rhs(t, y):
        return np.array([y[1], -y[0]])

    T = 100 * 2 * math.pi
    res = integrate_to_event(rhs, [1.0, 0.0], [], IntegratorConfig(), t_max=T)
    assert res.timed_out
    E = 0.5 * (res.y[0] ** 2 + res.y[1] ** 2)
    assert abs(E - 0.5) < 1e-8
    # analytic solution oracle
    assert abs(res.y[0] - math.cos(T)) < 1e-6
    assert abs(res.y[1] + math.sin(T)) < 1e-6


def test_self_convergence_order_at_least_4():
    # cap the step so truncation dominates; end error must drop like h^p, p >= 4
    def rhs(t, y):
        return np.array([y[1], -y[0]])

    errs = []
    hs = [0.4, 0.2, 0.1]
    for h in hs:
        cfg = IntegratorConfig(rel_tol=1e-3, abs_tol=1e-6, max_step=h, method="RK45")
        res = integrate_to_event(rhs, [1.0, 0.0], [], cfg, t_max=10.0)
        errs.append(abs(res.y[0] - math.cos(10.0)) + abs(res.y[1] + math.sin(10.0)))
    slope = np.polyfit(np.log(hs), np.log(errs), 1)[0]
    assert slope >= 4.0


def test_event_direction_filters_initial_zero():
    # event function vanishes at t0 but moves away in the filtered direction
    res = integrate_to_event(
        lambda t, y: np.array([1.0]),
        [0.0],
        [(lambda t, y: y[0], -1.0), (lambda t, y: y[0] - 2.0, 1.0)],
        IntegratorConfig(),
        t_max=5.0,
    )
    assert res.event_id == 1
    assert abs(res.t - 2.0) < 1e-12


def test_event_time_in_final_bracket():
    # localized event time reproduces the crossing of the reported state
    def rhs(t, y):
        return np.array([math.cos(t)])

    res = integrate_to_event(
        rhs, [0.0], [(lambda t, y: y[0] - 0.5, 1.0)], IntegratorConfig(), t_max=3.0
    )
    assert abs(math.sin(res.t) - 0.5) < 1e-10
    assert abs(res.y[0] - 0.5) < 1e-10


def test_timeout_result():
    res = integrate_to_event(
        lambda t, y: np.array([0.0]), [0.0], [(lambda t, y: y[0] - 1.0, 0.0)],
        IntegratorConfig(), t_max=2.0,
    )
    assert res.timed_out
    assert res.t == 2.0


def test_t_eval_sampling():
    res = integrate_to_event(
        lambda t, y: np.array([1.0]),
        [0.0],
        [(lambda t, y: y[0] - 1.0, 1.0)],
        IntegratorConfig(),
        t_max=5.0,
        t_eval=np.array([0.25, 0.5, 2.0]),
    )
    # grid points after the event are dropped
    assert list(res.t_grid) == [0.25, 0.5]
    assert np.allclose(res.y_grid[:, 0], [0.25, 0.5], atol=1e-12)


def test_config_validation():
    with pytest.raises(DomainError):
        IntegratorConfig(rel_tol=-1.0)
    with pytest.raises(DomainError):
        IntegratorConfig(method="Euler")
    with pytest.raises(DomainError):
        integrate_to_event(lambda t, y: [0.0], [0.0], [], IntegratorConfig(), t_max=-1.0)


def test_energy_monitor_examples():
    assert energy_monitor([0, 0, 0], [0, 0, 0]) == (0.0, 0.0, 0.0, 0.0)
    e1, e2, e, h = energy_monitor([1, 0, 0], [0, 0, 0], x3=0.0, g=2.0)
    assert (e1, e2, e, h) == (0.5, 0.0, 0.5, 0.5)
    e1, e2, e, h = energy_monitor([0, 0, 1], [0.5, 0, 0], x3=2.0, g=3.0)
    assert abs(e1 - 0.125) < 1e-15
    assert abs(e2 - 0.5) < 1e-15
    assert abs(h - (0.625 + 6.0)) < 1e-15


def test_determinism_bit_identical():
    def rhs(t, y):
        return np.array([y[1], -math.sin(y[0])])

    runs = []
    for _ in range(2):
        res = integrate_to_event(rhs, [1.0, 0.3], [], IntegratorConfig(), t_max=20.0)
        runs.append(res.y.copy())
    assert np.array_equal(runs[0], runs[1])
