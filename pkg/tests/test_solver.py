import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from volterra_decay.certify import certify
from volterra_decay.problem import Family, eval_f
from volterra_decay.solver import (
    BoundReport,
    DivergenceError,
    Grid,
    Trajectory,
    apply_T,
    convolve_exp,
    solve_ode,
    solve_picard,
    verify_bound,
)

from .helpers import make_problem
from .oracles import exp_conv_exp, linear_solution


def test_grid():
    g = Grid(20.0, 4)
    assert g.dt == 5.0
    np.testing.assert_array_equal(g.nodes, [0, 5, 10, 15, 20])
    for bad in [(0.0, 4), (1.0, 0), (1.0, 2.5)]:
        with pytest.raises(ValueError):
            Grid(*bad)


def test_convolve_zero():
    assert np.all(convolve_exp(2.0, np.zeros(11), 0.1) == 0)


def test_convolve_constant():
    dt = 1e-3
    I = convolve_exp(2.0, np.ones(1001), dt)
    exact = (1 - math.exp(-2)) / 2
    assert exact == pytest.approx(0.4323, abs=1e-4)
    assert abs(I[-1] - exact) <= 1e-6
    assert I[0] == 0


def test_convolve_exponential():
    dt = 1e-3
    t = np.arange(1001) * dt
    I = convolve_exp(2.0, np.exp(-t), dt)
    exact = math.exp(-1) - math.exp(-2)
    assert exact == pytest.approx(0.23254, abs=1e-5)
    assert abs(I[-1] - exact) <= 1e-6
    np.testing.assert_allclose(I, exp_conv_exp(t, 2.0, 1.0), atol=1e-6)


def test_convolve_against_quadrature():
    a, dt = 1.5, 0.01
    t = np.arange(301) * dt

    def w(s):
        return np.cos(3 * s) + 0.5j * s

    I = convolve_exp(a, w(t), dt)
    for k in (50, 177, 300):
        tk = t[k]
        re = quad(lambda s: math.exp(-a * (tk - s)) * w(s).real, 0, tk)[0]
        im = quad(lambda s: math.exp(-a * (tk - s)) * w(s).imag, 0, tk)[0]
        assert abs(I[k] - complex(re, im)) <= 2e-4


def test_convolve_second_order():
    def err(n):
        dt = 2.0 / n
        t = np.arange(n + 1) * dt
        return np.max(np.abs(convolve_exp(2.0, np.exp(-t), dt) - exp_conv_exp(t, 2.0, 1.0)))

    ratio = err(200) / err(400)
    assert 3.5 <= ratio <= 4.5


def test_apply_T_zero_nonlinearity():
    p = make_problem(family=Family.ZERO, lam=0.0, b=1)
    g = Grid(5.0, 50)
    u = Trajectory(g, np.linspace(-3, 3, 51))
    np.testing.assert_array_equal(apply_T(p, u).values, eval_f(p.f, g.nodes))


def test_apply_T_of_zero_is_forcing(worked):
    g = Grid(5.0, 50)
    Tu = apply_T(worked, Trajectory(g, np.zeros(51)))
    np.testing.assert_array_equal(Tu.values, eval_f(worked.f, g.nodes))


def test_picard_zero_nonlinearity():
    p = make_problem(family=Family.ZERO, lam=0.0, b=1)
    g = Grid(20.0, 2000)
    res = solve_picard(p, g)
    assert res.converged and res.iterations == 1 and res.final_delta == 0.0
    np.testing.assert_array_equal(res.trajectory.values, eval_f(p.f, g.nodes))


def test_picard_worked_problem(worked, fine_grid):
    res = solve_picard(worked, fine_grid, tol=1e-12)
    assert res.converged and res.iterations <= 25
    assert res.final_delta <= 1e-12
    assert res.trajectory.values[0] == 0.1
    residual = apply_T(worked, res.trajectory).sup_distance(res.trajectory)
    assert residual <= 10 * 1e-12


def test_picard_geometric_rate(worked, fine_grid):
    q = certify(worked).q
    res = solve_picard(worked, fine_grid)
    assert np.all(res.ratios[2:] <= q + 0.1)
    assert np.all(res.ratios <= q)


def test_picard_linear_closed_form():
    p = make_problem(lam=0.5, b=1, family=Family.LINEAR)
    errors = []
    for n in (800, 1600):
        g = Grid(20.0, n)
        exact = linear_solution(g.nodes, 0.5, 0.1, 2.0, 1.0)
        res = solve_picard(p, g)
        assert res.converged
        errors.append(np.max(np.abs(res.trajectory.values - exact)))
    # C dt^2 with C fitted on the coarser grid
    assert errors[0] <= 0.01 * (20 / 800) ** 2
    assert 3.5 <= errors[0] / errors[1] <= 4.5


def test_linear_oracle_hand_derivation():
    # lam=0.5, a=2, A=0.1, a1=1: u = 0.2 e^{-t} - 0.1 e^{-1.5 t}
    t = np.linspace(0, 10, 101)
    np.testing.assert_allclose(
        linear_solution(t, 0.5, 0.1, 2.0, 1.0), 0.2 * np.exp(-t) - 0.1 * np.exp(-1.5 * t), atol=1e-15
    )


def test_picard_reports_non_convergence(worked):
    res = solve_picard(worked, Grid(20.0, 2000), tol=1e-14, max_iter=2)
    assert not res.converged
    assert res.iterations == 2 and res.final_delta > 1e-14


def test_divergence_guard():
    blow_up = make_problem(lam=5.0, b=2, A=1.0, a1=1.0, a=1.0)
    g = Grid(20.0, 2000)
    with pytest.raises(DivergenceError):
        solve_ode(blow_up, g)
    with pytest.raises(DivergenceError):
        solve_picard(blow_up, g)


def test_ode_zero_nonlinearity_reproduces_forcing():
    p = make_problem(family=Family.ZERO, lam=0.0, b=1)
    g = Grid(20.0, 20000)
    u = solve_ode(p, g)
    assert np.max(np.abs(u.values - 0.1 * np.exp(-g.nodes))) <= 1e-10


def test_ode_homogeneous_when_rates_match():
    p = make_problem(family=Family.ZERO, lam=0.0, b=1, A=0.3 - 0.2j, a1=2.0, a=2.0)
    g = Grid(10.0, 10000)
    u = solve_ode(p, g)
    assert np.max(np.abs(u.values - (0.3 - 0.2j) * np.exp(-2 * g.nodes))) <= 1e-10


def test_ode_linear_closed_form_and_order():
    p = make_problem(lam=0.5, b=1, family=Family.LINEAR)
    g = Grid(20.0, 20000)
    exact = linear_solution(g.nodes, 0.5, 0.1, 2.0, 1.0)
    assert np.max(np.abs(solve_ode(p, g).values - exact)) <= 1e-8

    def err(n):
        gg = Grid(20.0, n)
        return np.max(np.abs(solve_ode(p, gg).values - linear_solution(gg.nodes, 0.5, 0.1, 2.0, 1.0)))

    assert 14 <= err(200) / err(400) <= 18


def test_cross_solver_agreement(worked, fine_grid):
    picard = solve_picard(worked, fine_grid).trajectory
    ode = solve_ode(worked, fine_grid)
    assert picard.sup_distance(ode) <= 1e-4
    assert picard.values[0] == ode.values[0] == 0.1


def test_real_parameters_give_real_trajectories(worked):
    g = Grid(10.0, 1000)
    for u in (solve_picard(worked, g).trajectory, solve_ode(worked, g)):
        assert np.all(np.imag(u.values) == 0)


def test_complex_conjugate_symmetry():
    g = Grid(10.0, 2000)
    p = make_problem(lam=0.3 - 0.4j, b=2.5, A=0.2 + 0.1j, a1=0.5, a=3.0, family=Family.MODULUS_POWER)
    pc = make_problem(lam=0.3 + 0.4j, b=2.5, A=0.2 - 0.1j, a1=0.5, a=3.0, family=Family.MODULUS_POWER)
    for solve in (lambda q: solve_picard(q, g).trajectory, lambda q: solve_ode(q, g)):
        np.testing.assert_allclose(solve(pc).values, np.conj(solve(p).values), atol=1e-15)
    assert solve_picard(p, g).trajectory.sup_distance(solve_ode(p, g)) <= 1e-4


def test_verify_bound_examples(worked):
    cert = certify(worked)
    g = Grid(20.0, 200)
    zero = verify_bound(Trajectory(g, np.zeros(201)), cert)
    assert zero.max_ratio == 0 and zero.holds and zero.violated_at is None
    synthetic = Trajectory(g, 2 * np.exp(-cert.p * g.nodes) / cert.R)
    rep = verify_bound(synthetic, cert)
    assert rep.max_ratio == pytest.approx(2.0) and rep.violated_at == 0 and not rep.holds


def test_verify_bound_worked(worked, fine_grid):
    cert = certify(worked)
    rep = verify_bound(solve_ode(worked, fine_grid), cert)
    assert rep.holds and rep.max_ratio <= 1


def test_verify_bound_rejects_failed_certificate():
    cert = certify(make_problem(lam=-0.76))
    with pytest.raises(ValueError):
        verify_bound(Trajectory(Grid(1.0, 1), np.zeros(2)), cert)


def test_bound_report_slack():
    assert BoundReport(1.0 + 5e-7, 3, 1e-6).holds
    assert not BoundReport(1.0 + 5e-7, 3, 0.0).holds


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.filter_too_much])
@given(
    a=st.floats(2.0, 6.0),
    b=st.sampled_from([2, 3, 4]),
    family=st.sampled_from([Family.INTEGER_POWER, Family.MODULUS_POWER]),
    lam=st.complex_numbers(min_magnitude=0.01, max_magnitude=3.0),
    A=st.complex_numbers(max_magnitude=1.0),
    a1=st.floats(0.2, 4.0),
)
def test_certified_decay_property(a, b, family, lam, A, a1):
    p = make_problem(lam=lam, b=b, A=A, a1=a1, a=a, family=family)
    cert = certify(p)
    # shrink the envelopes until the certificate passes
    while not cert.overall:
        lam, A = 0.8 * lam, 0.8 * A
        p = make_problem(lam=lam, b=b, A=A, a1=a1, a=a, family=family)
        cert = certify(p)
    g = Grid(20.0, 4000)
    assert verify_bound(solve_ode(p, g), cert, 1e-6).holds
    assert verify_bound(solve_picard(p, g).trajectory, cert, 1e-6).holds
