"""Association step: service-time matrix, relaxed LP, and rounding."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from uavmec import association, channel, oracle
from uavmec.optimizer import Deployment
from uavmec.scenario import FleetConfig, Scenario, Ue, generate
from uavmec.channel import ChannelParams


def one_ue_scenario(x, y):
    ue = Ue(x=x, y=y, data_bits=1e6, cycles=3e8)
    return Scenario(ues=(ue,), fleet=FleetConfig(num_uavs=1),
                    channel=ChannelParams(), seed=0)


class TestServiceTimeMatrix:
    def test_single_overhead_link(self):
        # UAV directly above the UE at 40 m: upload 1e6 bits at the known
        # overhead rate plus 3e8 cycles at 2 GHz
        sc = one_ue_scenario(50.0, 50.0)
        dep = Deployment(q=np.array([[50.0, 50.0]]), h=np.array([40.0]))
        t = association.service_time_matrix(sc, dep)
        expected = 1e6 / 33675662.955950975 + 3e8 / 2e9
        assert t.shape == (1, 1)
        assert t[0, 0] == pytest.approx(expected, rel=1e-9)

    def test_los_model_uses_los_rate(self):
        sc = one_ue_scenario(50.0, 50.0)
        dep = Deployment(q=np.array([[20.0, 50.0]]), h=np.array([55.0]))
        t = association.service_time_matrix(sc, dep, model="los")
        r = float(channel.los_rate(900.0, 55.0, 0.1, sc.channel))
        assert t[0, 0] == pytest.approx(1e6 / r + 0.15, rel=1e-12)

    def test_unknown_model_rejected(self):
        sc = one_ue_scenario(50.0, 50.0)
        dep = Deployment(q=np.array([[50.0, 50.0]]), h=np.array([40.0]))
        with pytest.raises(ValueError):
            association.service_time_matrix(sc, dep, model="rayleigh")

    def test_shape_and_positivity(self):
        sc = generate(0, 7, FleetConfig(num_uavs=3))
        dep = Deployment(q=np.array([[10.0, 10.0], [50.0, 50.0], [90.0, 90.0]]),
                         h=np.array([40.0, 60.0, 80.0]))
        t = association.service_time_matrix(sc, dep)
        assert t.shape == (7, 3)
        assert np.all(t > 0)


class TestRelaxedLp:
    def test_single_ue_split_balances_load(self):
        # one UE, two UAVs with times (2, 1): the fractional optimum
        # balances 2 a1 = a2, giving a = (1/3, 2/3) and mu = 2/3
        frac, mu = association.solve_relaxed([[2.0, 1.0]])
        assert mu == pytest.approx(2.0 / 3.0, abs=1e-8)
        assert frac[0] == pytest.approx([1.0 / 3.0, 2.0 / 3.0], abs=1e-8)

    def test_single_uav_serves_everything(self):
        times = np.array([[0.5], [0.25], [1.0]])
        frac, mu = association.solve_relaxed(times)
        assert frac == pytest.approx(np.ones((3, 1)), abs=1e-9)
        assert mu == pytest.approx(1.75, abs=1e-8)

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(0)
        times = rng.uniform(0.1, 2.0, size=(6, 3))
        frac, _ = association.solve_relaxed(times)
        assert frac.sum(axis=1) == pytest.approx(np.ones(6), abs=1e-8)
        assert np.all(frac >= 0)

    @pytest.mark.parametrize("seed", range(10))
    def test_lower_bounds_integer_optimum(self, seed):
        rng = np.random.default_rng(seed)
        times = rng.uniform(0.1, 2.0, size=(5, 3))
        _, mu_frac = association.solve_relaxed(times)
        mu_int, _ = oracle.enumerate_associations(times)
        assert mu_frac <= mu_int + 1e-8

    def test_invalid_times_rejected(self):
        with pytest.raises(ValueError):
            association.solve_relaxed([[1.0, -1.0]])
        with pytest.raises(ValueError):
            association.solve_relaxed([[1.0, np.nan]])


class TestRounding:
    def test_majority_entry_wins(self):
        out = association.round_association([[0.4, 0.6]])
        assert out.tolist() == [[0, 1]]

    def test_first_half_entry_wins_on_even_split(self):
        out = association.round_association([[0.5, 0.5]])
        assert out.tolist() == [[1, 0]]

    def test_argmax_fallback_below_half(self):
        out = association.round_association([[0.3, 0.4, 0.3]])
        assert out.tolist() == [[0, 1, 0]]

    def test_argmax_tie_takes_lowest_index(self):
        out = association.round_association([[0.4, 0.4, 0.2]])
        assert out.tolist() == [[1, 0, 0]]

    def test_binary_input_is_fixed_point(self):
        binary = np.array([[1, 0], [0, 1], [1, 0]], dtype=float)
        assert np.array_equal(association.round_association(binary),
                              binary.astype(int))

    @given(hnp.arrays(np.float64, st.tuples(st.integers(1, 8), st.integers(1, 5)),
                      elements=st.floats(0.0, 1.0)))
    @settings(max_examples=100, deadline=None)
    def test_always_one_hot_rows(self, frac):
        out = association.round_association(frac)
        assert out.shape == frac.shape
        assert np.all(out.sum(axis=1) == 1)
        assert np.all((out == 0) | (out == 1))
