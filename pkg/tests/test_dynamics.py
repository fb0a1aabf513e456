import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mlbalance.balance import k_ml
from mlbalance.cycles import cycle_graph
from mlbalance.dynamics import (
    AltafiniPropagator,
    DiffusionTrajectory,
    altafini_evolve,
    altafini_trajectory,
    caputo_discrete,
    caputo_weights,
    consensus_time,
    default_initial_state,
    frac_diffuse,
    frac_trajectory,
    mass_series,
    random_initial_state,
    spread,
)
from mlbalance.graph import all_positive, from_edges, is_balanced, signed_laplacian, switch
from mlbalance.spectral import MLParams

from conftest import signed_graphs


def balanced_signed():
    """A balanced graph that still carries negative edges."""
    g = switch(all_positive(cycle_graph(6, 0)), {0, 1})
    g = from_edges(6, list(g.edges) + [(0, 3, -1), (1, 4, -1)])
    assert is_balanced(g)[0] and g.negative_edges
    return g


class TestAltafini:
    def test_zero_time(self):
        u0 = np.array([0.3, -1.0, 2.5])
        assert np.array_equal(altafini_evolve(cycle_graph(3), u0, 0.0), u0)

    @pytest.mark.parametrize("t", [0.1, 1.0, 3.7])
    def test_two_vertex_closed_form(self, t):
        g = from_edges(2, [(0, 1, 1)])
        e = math.exp(-2 * t)
        assert np.allclose(altafini_evolve(g, [1.0, 0.0], t), [(1 + e) / 2, (1 - e) / 2], rtol=1e-13, atol=1e-15)

    def test_unbalanced_decays(self, petersen):
        u0 = default_initial_state(10)
        for g in petersen.values():
            assert np.linalg.norm(altafini_evolve(g, u0, 200.0)) < 1e-8

    def test_against_expm(self):
        from scipy.linalg import expm

        g = cycle_graph(7, 2)
        u0 = random_initial_state(7, 4)
        assert np.allclose(altafini_evolve(g, u0, 1.3), expm(-1.3 * signed_laplacian(g)) @ u0, rtol=1e-12, atol=1e-14)

    @settings(max_examples=40)
    @given(signed_graphs(), st.floats(0, 5), st.floats(0, 5), st.integers(0, 1000))
    def test_semigroup(self, g, s, t, seed):
        u0 = random_initial_state(g.n, seed)
        a = altafini_evolve(g, altafini_evolve(g, u0, s), t)
        b = altafini_evolve(g, u0, s + t)
        assert np.max(np.abs(a - b)) <= 1e-9

    def test_spread_nonincreasing(self, petersen):
        times = np.linspace(0, 30, 121)
        for g in list(petersen.values()) + [all_positive(petersen["a"])]:
            traj = altafini_trajectory(g, default_initial_state(g.n), times)
            sp = [spread(u) for u in traj.states]
            assert np.all(np.diff(sp) <= 1e-12)

    def test_spread_can_grow_on_balanced_graph(self):
        # polarising camps may first move apart
        g = balanced_signed()
        traj = altafini_trajectory(g, default_initial_state(6), [0.0, 0.25])
        assert spread(traj.states[1]) > spread(traj.states[0])

    def test_dimension_check(self):
        with pytest.raises(ValueError):
            altafini_evolve(cycle_graph(4), [1.0, 2.0], 1.0)
        with pytest.raises(ValueError):
            altafini_evolve(cycle_graph(3), [1.0, 2.0, 3.0], -1.0)


class TestConsensus:
    def test_already_consensual(self):
        g = all_positive(cycle_graph(5, 0))
        res = consensus_time(g, np.full(5, 0.7))
        assert res.t_c == 0.0

    def test_petersen_ordering(self, petersen):
        tc = {k: consensus_time(g).t_c for k, g in petersen.items()}
        assert tc == {"a": 47.0, "b": 26.0, "c": 21.0, "d": 15.0, "e": 12.0}
        assert tc["a"] > tc["b"] > tc["c"] > tc["d"] > tc["e"]

    def test_tolerance_met(self, petersen):
        res = consensus_time(petersen["c"])
        assert res.final_spread < 1e-5
        assert spread(altafini_evolve(petersen["c"], default_initial_state(10), res.t_c)) < 1e-5
        assert spread(altafini_evolve(petersen["c"], default_initial_state(10), res.t_c - 1)) >= 1e-5

    def test_refine(self, petersen):
        g = petersen["d"]
        res = consensus_time(g, refine=True)
        assert 14.0 < res.t_c <= 15.0
        u0 = default_initial_state(10)
        assert spread(altafini_evolve(g, u0, res.t_c)) < 1e-5
        assert spread(altafini_evolve(g, u0, res.t_c - 1e-6)) >= 1e-5

    def test_balanced_dissensus(self):
        res = consensus_time(balanced_signed())
        assert res.t_c is None
        assert res.dissensus
        assert res.final_spread > 1e-5

    def test_t_max(self, petersen):
        res = consensus_time(petersen["a"], t_max=10.0)
        assert res.t_c is None and not res.dissensus
        assert res.trajectory.times[-1] == 10.0

    def test_bad_tolerance(self):
        with pytest.raises(ValueError):
            consensus_time(cycle_graph(3), tolerance=0.0)

    def test_default_state(self):
        assert np.array_equal(default_initial_state(5), [0, 0.25, 0.5, 0.75, 1.0])
        assert np.array_equal(random_initial_state(4, 9), random_initial_state(4, 9))


class TestFractional:
    def test_zero_time(self, petersen):
        u0 = default_initial_state(10)
        assert np.array_equal(frac_diffuse(petersen["b"], 3.0, 0.6, u0, 0.0), u0)

    @pytest.mark.parametrize("t", [0.5, 2.0, 7.0])
    def test_alpha_one_is_altafini(self, petersen, t):
        u0 = default_initial_state(10)
        for g in petersen.values():
            a = frac_diffuse(g, 3.0, 1.0, u0, t)
            b = altafini_evolve(g, u0, t)
            assert np.max(np.abs(a - b)) <= 1e-9 * np.max(np.abs(b))

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8, 1.0])
    def test_chi_zero_recovers_index(self, petersen, alpha):
        # sum over v of E_alpha(t^alpha A)_vv at t = 1, signed over unsigned
        g = petersen["c"]
        n = g.n
        gu = all_positive(g)
        num = sum(frac_diffuse(g, 0.0, alpha, np.eye(n)[v], 1.0)[v] for v in range(n))
        den = sum(frac_diffuse(gu, 0.0, alpha, np.eye(n)[v], 1.0)[v] for v in range(n))
        assert num / den == pytest.approx(k_ml(g, MLParams(alpha, 1.0)).index, rel=1e-8)

    @settings(max_examples=30, deadline=None)
    @given(signed_graphs(min_n=2, max_n=6), st.floats(0.2, 1.0), st.floats(0.0, 4.0),
           st.integers(0, 999), st.floats(-3, 3), st.floats(-3, 3))
    def test_linear(self, g, alpha, t, seed, a, b):
        x = random_initial_state(g.n, seed)
        y = random_initial_state(g.n, seed + 1)
        chi = float(max(g.degrees(), default=0))
        lhs = frac_diffuse(g, chi, alpha, a * x + b * y, t)
        rhs = a * frac_diffuse(g, chi, alpha, x, t) + b * frac_diffuse(g, chi, alpha, y, t)
        assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1.0, np.max(np.abs(rhs)))

    def test_no_semigroup_below_one(self, petersen):
        g = petersen["a"]
        u0 = default_initial_state(10)
        two_step = frac_diffuse(g, 3.0, 0.5, frac_diffuse(g, 3.0, 0.5, u0, 1.0), 1.0)
        assert np.max(np.abs(two_step - frac_diffuse(g, 3.0, 0.5, u0, 2.0))) > 1e-3

    def test_alpha_domain(self):
        with pytest.raises(ValueError):
            frac_diffuse(cycle_graph(3), 1.0, 0.0, np.ones(3), 1.0)
        with pytest.raises(ValueError):
            frac_diffuse(cycle_graph(3), 1.0, 0.5, np.ones(4), 1.0)


class TestMass:
    def test_all_positive_conserves(self, rng):
        g = all_positive(cycle_graph(8, 0))
        u0 = rng.random(8)
        traj = altafini_trajectory(g, u0, np.linspace(0, 20, 41))
        _, deficit = mass_series(traj)
        assert np.max(np.abs(deficit)) <= 1e-9

    def test_unbalanced_loses_all(self, petersen):
        for g in petersen.values():
            mass, _ = mass_series(altafini_trajectory(g, default_initial_state(10), [0.0, 10.0, 100.0]))
            assert abs(mass[-1]) < 1e-6

    def test_decay_rate_is_smallest_laplacian_eigenvalue(self, petersen):
        # signing a decays like exp(-0.2215 t), so it is still above 1e-6 at t = 50
        g = petersen["a"]
        rate = AltafiniPropagator(g).rates[-1]
        assert rate == pytest.approx(0.2215428, abs=1e-6)
        mass, _ = mass_series(altafini_trajectory(g, default_initial_state(10), [0.0, 50.0, 60.0, 80.0]))
        assert mass[1] > 1e-6 > mass[3]
        assert mass[2] / mass[1] == pytest.approx(math.exp(-10 * rate), rel=1e-6)

    def test_balanced_phi1_conserves(self):
        g = balanced_signed()
        phi = AltafiniPropagator(g).vectors[:, -1]
        traj = altafini_trajectory(g, phi, np.linspace(0, 50, 26))
        _, deficit = mass_series(traj)
        assert np.max(np.abs(deficit)) <= 1e-8

    def test_balanced_generic_state_leaks(self):
        g = balanced_signed()
        _, deficit = mass_series(altafini_trajectory(g, default_initial_state(6), [0.0, 5.0]))
        assert abs(deficit[-1]) > 1e-3

    def test_trajectory_csv(self):
        traj = DiffusionTrajectory(np.array([0.0, 1.0]), np.array([[1.0, 0.0], [0.5, 0.5]]))
        assert traj.to_csv() == "time,v0,v1,total_mass\n0,1,0,1\n1,0.5,0.5,1\n"

    def test_trajectory_times_increase(self):
        with pytest.raises(ValueError):
            DiffusionTrajectory(np.array([0.0, 0.0]), np.zeros((2, 2)))

    def test_fractional_trajectory_mass(self, petersen):
        traj = frac_trajectory(petersen["e"], 3.0, 0.7, default_initial_state(10), [0.0, 1.0, 10.0])
        mass, deficit = mass_series(traj)
        assert mass[0] == 5.0
        assert deficit[-1] < 0


def caputo_error(u_prime, exact, alpha, k, t=1.0):
    h = t / k
    samples = [u_prime(j * h) for j in range(k + 1)]
    return abs(caputo_discrete(samples, alpha, h) - exact)


class TestCaputo:
    def test_alpha_one_is_derivative(self):
        samples = [math.cos(0.1 * j) for j in range(11)]
        assert caputo_discrete(samples, 1.0, 0.1) == samples[-1]
        assert np.all(caputo_weights(10, 1.0)[:-1] == 0)

    @pytest.mark.parametrize("k", [1, 4, 32, 256])
    def test_linear_is_exact(self, k):
        # u = t: u' = 1 and the trapezoidal rule integrates the kernel exactly
        assert caputo_error(lambda t: 1.0, 1 / math.gamma(1.5), 0.5, k) <= 1e-14

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
    def test_second_order(self, alpha):
        # u = t^3, D^alpha u = 6 t^(3 - alpha) / Gamma(4 - alpha)
        exact = 6 / math.gamma(4 - alpha)
        errs = [caputo_error(lambda t: 3 * t * t, exact, alpha, k) for k in (16, 32, 64, 128)]
        ratios = np.array(errs[:-1]) / np.array(errs[1:])
        assert np.all(ratios >= 3.5)

    def test_weights_sum(self):
        # weights reproduce the exact kernel integral for u' = 1
        for alpha in (0.2, 0.5, 0.9):
            k = 20
            w = caputo_weights(k, alpha)
            assert math.fsum(w) == pytest.approx((2 - alpha) * k ** (1 - alpha), rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.5, 0.7, 0.95])
    def test_weights_grow_toward_present(self, alpha):
        w = caputo_weights(40, alpha)
        assert np.all(w >= 0)
        assert np.all(np.diff(w[1:]) > 0)
        assert w[0] <= w[-1]

    def test_small_alpha_breaks_ordering(self):
        # below alpha ~ 0.415 the newest past weight exceeds the present weight
        assert caputo_weights(40, 0.3)[-2] > caputo_weights(40, 0.3)[-1]

    def test_validation(self):
        with pytest.raises(ValueError):
            caputo_weights(0, 0.5)
        with pytest.raises(ValueError):
            caputo_discrete([1.0, 1.0], 0.5, 0.0)
