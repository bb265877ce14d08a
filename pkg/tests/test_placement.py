"""SCA subproblems: bound coefficients, global lower bounds, and the
horizontal/vertical solves against brute-force references."""

import numpy as np
import pytest

from uavmec import channel, oracle, placement
from uavmec.channel import ChannelParams
from uavmec.placement import ExpansionPoint
from uavmec.scenario import Box, FleetConfig, generate


def make_ep(q_hat, h_hat, ue_pos, params, model="rician"):
    ue_pos = np.atleast_2d(np.asarray(ue_pos, dtype=float))
    powers = np.full(len(ue_pos), 0.1)
    return ExpansionPoint.at(np.asarray(q_hat, float), h_hat, ue_pos, powers,
                             params, model=model)


def ue_data_for(ep, data_bits=1e6, cycles_per_bit=300.0, cpu_hz=2e9):
    s = len(ep.r_hat)
    bits = np.full(s, data_bits)
    return (bits, cycles_per_bit * bits, np.full(s, 0.1), cpu_hz)


class TestCoefficients:
    def test_positive(self, params, rng):
        for _ in range(50):
            v = rng.uniform(0.05, 1.0)
            dsq = rng.uniform(1600.0, 3e4)
            ce, cq = placement.taylor_coefficients(v, dsq, params.gamma(0.1),
                                                  params)
            assert ce > 0 and cq > 0

    def test_match_rate_partials(self, params, rng):
        # at the expansion point the bound is first-order exact, so its
        # slopes in (v, squared distance) must match the true rate's
        for _ in range(50):
            v_hat = float(rng.uniform(0.05, 0.999))
            d_sq = float(rng.uniform(1600.0, 3e4))
            h = 50.0
            sq_hat = d_sq - h * h
            if sq_hat <= 1.0:
                continue
            gamma = params.gamma(0.1)
            ce, cq = placement.taylor_coefficients(v_hat, d_sq, gamma, params)

            def rate(p):
                return float(channel.outage_rate(p[1], h, p[0], 0.1, params))

            grad = np.array([ce * params.k4
                             * np.exp(-(params.k3 + params.k4 * v_hat)), -cq])
            err = oracle.finite_diff_check(rate, lambda p: grad,
                                           np.array([v_hat, sq_hat]),
                                           step=1e-6, scales=(1.0, d_sq))
            assert err <= 1e-6

    def test_los_coefficient_matches_los_rate_slope(self, params):
        d_sq = 2500.0
        h = 40.0
        gamma = params.gamma(0.1)
        cq = float(placement.los_coefficient(d_sq, gamma, params))

        def rate(p):
            return float(channel.los_rate(p[0], h, 0.1, params))

        err = oracle.finite_diff_check(rate, lambda p: np.array([-cq]),
                                       np.array([d_sq - h * h]),
                                       step=1e-6, scales=(d_sq,))
        assert err <= 1e-6


class TestBounds:
    def test_exact_at_expansion(self, params):
        ep = make_ep([30.0, 40.0], 55.0, [[10.0, 10.0], [80.0, 70.0]], params)
        coeffs = placement.psi_coefficients(ep, params)
        r = placement.r_lb_horizontal(ep.horiz_sq_hat, ep.v_hat, ep, coeffs,
                                      params)
        assert r == pytest.approx(ep.r_hat, rel=1e-14)
        assert placement.v_lb(ep.horiz_sq_hat, ep) == pytest.approx(
            ep.v_hat, rel=1e-14)
        phi = placement.phi_coefficients(ep, params)
        rv = placement.r_lb_vertical(ep.h_hat, ep.v_hat, ep, phi, params)
        assert rv == pytest.approx(ep.r_hat, rel=1e-14)

    def test_sine_bound_hand_value(self, params):
        # expansion at horizontal offset 30, altitude 40 (d = 50, sine 0.8);
        # moving to the UE (offset 0) raises the bound by slope * 900
        ep = make_ep([30.0, 0.0], 40.0, [[0.0, 0.0]], params)
        slope = 40.0 / (2.0 * 2500.0 ** 1.5)
        got = placement.v_lb(0.0, ep)[0]
        assert got == pytest.approx(0.8 + slope * 900.0, rel=1e-12)
        assert got == pytest.approx(0.944)

    def test_never_exceed_true_values(self, small_scenario):
        worst = oracle.bound_domination_sample(small_scenario, 2000, seed=3)
        assert worst <= 1e-9

    def test_domination_sampler_catches_sign_flip(self, small_scenario):
        worst = oracle.bound_domination_sample(small_scenario, 200, seed=3,
                                               flip_sign=True)
        assert worst > 1e-6


class TestTrueTime:
    def test_single_link_arithmetic(self, params):
        t = placement.true_uav_time(
            np.array([50.0, 50.0]), 40.0, np.array([[50.0, 50.0]]),
            np.array([1e6]), np.array([3e8]), np.array([0.1]), 2e9, params)
        assert t == pytest.approx(1e6 / 33675662.955950975 + 0.15, rel=1e-9)

    def test_sums_over_ues(self, params):
        pos = np.array([[10.0, 10.0], [90.0, 90.0]])
        args = (np.array([1e6, 1e6]), np.array([3e8, 3e8]),
                np.array([0.1, 0.1]), 2e9, params)
        both = placement.true_uav_time(np.array([50.0, 50.0]), 60.0, pos, *args)
        parts = [placement.true_uav_time(
            np.array([50.0, 50.0]), 60.0, pos[k:k + 1], args[0][k:k + 1],
            args[1][k:k + 1], args[2][k:k + 1], 2e9, params) for k in range(2)]
        assert both == pytest.approx(sum(parts), rel=1e-12)


class TestHorizontalStep:
    def test_moves_toward_single_ue(self, params):
        box = Box()
        ep = make_ep([90.0, 90.0], 60.0, [[20.0, 20.0]], params)
        sol = placement.solve_horizontal(ep, ue_data_for(ep), box, params)
        assert sol.accepted
        d_old = np.linalg.norm(ep.q_hat - [20.0, 20.0])
        d_new = np.linalg.norm(sol.position - [20.0, 20.0])
        assert d_new < d_old

    def test_fixpoint_reaches_single_ue(self, params):
        box = Box()
        q = np.array([90.0, 90.0])
        for _ in range(40):
            ep = make_ep(q, 60.0, [[20.0, 20.0]], params)
            sol = placement.solve_horizontal(ep, ue_data_for(ep), box, params)
            q = np.asarray(sol.position)
        assert q == pytest.approx([20.0, 20.0], abs=0.5)

    def test_symmetric_pair_ends_on_bisector(self, params):
        box = Box()
        q = np.array([50.0, 90.0])
        pos = [[20.0, 50.0], [80.0, 50.0]]
        for _ in range(40):
            ep = make_ep(q, 60.0, pos, params)
            sol = placement.solve_horizontal(ep, ue_data_for(ep), box, params)
            q = np.asarray(sol.position)
        assert q[0] == pytest.approx(50.0, abs=0.5)

    def test_never_increases_true_time(self, params, rng):
        box = Box()
        for _ in range(15):
            q_hat = rng.uniform(0, 100, size=2)
            h = rng.uniform(40, 80)
            pos = rng.uniform(0, 100, size=(3, 2))
            ep = make_ep(q_hat, h, pos, params)
            data = ue_data_for(ep)
            sol = placement.solve_horizontal(ep, data, box, params)
            t_old = placement.true_uav_time(q_hat, h, pos, *data[:3],
                                            data[3], params)
            t_new = placement.true_uav_time(np.asarray(sol.position), h, pos,
                                            *data[:3], data[3], params)
            assert t_new <= t_old + 1e-9

    def test_los_variant_improves(self, params):
        box = Box()
        ep = make_ep([90.0, 90.0], 60.0, [[20.0, 20.0]], params, model="los")
        data = ue_data_for(ep)
        sol = placement.solve_horizontal(ep, data, box, params, model="los")
        t_old = placement.true_uav_time(ep.q_hat, 60.0, ep.ue_pos, *data[:3],
                                        data[3], params, model="los")
        t_new = placement.true_uav_time(np.asarray(sol.position), 60.0,
                                        ep.ue_pos, *data[:3], data[3], params,
                                        model="los")
        assert t_new <= t_old + 1e-9


class TestVerticalStep:
    def test_overhead_ue_drops_to_floor(self, params):
        box = Box()
        h = 70.0
        for _ in range(30):
            ep = make_ep([50.0, 50.0], h, [[50.0, 50.0]], params)
            sol = placement.solve_vertical(ep, ue_data_for(ep), box, params)
            h = float(sol.position)
        assert h == pytest.approx(box.h_min, abs=0.05)

    def test_fixpoint_matches_fine_grid(self, params):
        # single UE at horizontal offset 30: the altitude trades path loss
        # against elevation angle; compare with a 0.01 m grid
        box = Box()
        pos = np.array([[80.0, 50.0]])
        h = 75.0
        for _ in range(60):
            ep = make_ep([50.0, 50.0], h, pos, params)
            data = ue_data_for(ep)
            sol = placement.solve_vertical(ep, data, box, params)
            h = float(sol.position)
        hs = np.arange(box.h_min, box.h_max + 1e-9, 0.01)
        times = [placement.true_uav_time(np.array([50.0, 50.0]), hh, pos,
                                         *data[:3], data[3], params)
                 for hh in hs]
        h_grid = hs[int(np.argmin(times))]
        assert abs(h - h_grid) <= 0.05

    def test_never_increases_true_time(self, params, rng):
        box = Box()
        for _ in range(15):
            q_hat = rng.uniform(0, 100, size=2)
            h = rng.uniform(40, 80)
            pos = rng.uniform(0, 100, size=(3, 2))
            ep = make_ep(q_hat, h, pos, params)
            data = ue_data_for(ep)
            sol = placement.solve_vertical(ep, data, box, params)
            t_old = placement.true_uav_time(q_hat, h, pos, *data[:3],
                                            data[3], params)
            t_new = placement.true_uav_time(q_hat, float(sol.position), pos,
                                            *data[:3], data[3], params)
            assert t_new <= t_old + 1e-9

    def test_altitude_stays_in_box(self, params, rng):
        box = Box()
        for _ in range(10):
            ep = make_ep(rng.uniform(0, 100, size=2), rng.uniform(40, 80),
                         rng.uniform(0, 100, size=(2, 2)), params)
            sol = placement.solve_vertical(ep, ue_data_for(ep), box, params)
            assert box.h_min - 1e-9 <= float(sol.position) <= box.h_max + 1e-9
