import unittest

import numpy as np

from app.core.model import BernoulliPerFrame, Deterministic, Poisson, TimeTick, Trace
from app.sim.traffic import device_rng, device_traffic, generate_traffic
from tests.factories import make_scenario


class DeviceRngTests(unittest.TestCase):
    def test_same_seed_and_device_give_same_stream(self):
        first = device_rng(7, 3).random(5)
        second = device_rng(7, 3).random(5)
        np.testing.assert_array_equal(first, second)

    def test_devices_draw_independent_streams(self):
        self.assertFalse(np.array_equal(device_rng(7, 1).random(5), device_rng(7, 2).random(5)))


class GenerateTrafficTests(unittest.TestCase):
    def test_poisson_count_matches_rate(self):
        ticks = generate_traffic(Poisson(), 1, 1_000_000_000, device_id=1, rate_per_tick=1e-5)

        self.assertEqual(ticks.dtype, np.int64)
        self.assertTrue(np.all(np.diff(ticks) >= 0))
        self.assertTrue(np.all(ticks < 1_000_000_000))
        self.assertLess(abs(len(ticks) - 10_000), 400)

    def test_poisson_explicit_rate_wins(self):
        ticks = generate_traffic(Poisson(rate_per_s=2000), 1, 1_000_000_000, rate_per_tick=1e-9)
        self.assertLess(abs(len(ticks) - 2_000), 200)

    def test_bernoulli_certain_arrival_lands_once_per_frame(self):
        ticks = generate_traffic(
            BernoulliPerFrame(p=1.0), 5, 1_000_000, frame_offset=200_000, frame_length=400_000
        )
        frames = (ticks - 200_000) // 400_000

        np.testing.assert_array_equal(frames, [0, 1])
        self.assertTrue(np.all(ticks >= 200_000))

    def test_bernoulli_defaults_p_from_rate(self):
        ticks = generate_traffic(
            BernoulliPerFrame(), 2, 2_000_000_000, rate_per_tick=5e-7, frame_length=200_000
        )
        self.assertLess(abs(len(ticks) - 1_000), 100)

    def test_bernoulli_zero_probability_is_silent(self):
        ticks = generate_traffic(BernoulliPerFrame(p=0.0), 1, 10_000_000, frame_length=1_000)
        self.assertEqual(len(ticks), 0)

    def test_deterministic_and_trace(self):
        periodic = generate_traffic(
            Deterministic(period=TimeTick(300), phase=TimeTick(50)), 0, 1_000
        )
        traced = generate_traffic(Trace(ticks=(10, 500, 2_000)), 0, 1_000)

        np.testing.assert_array_equal(periodic, [50, 350, 650, 950])
        np.testing.assert_array_equal(traced, [10, 500])

    def test_device_traffic_places_frames_on_the_class_slot(self):
        scenario = make_scenario(
            [(1, "RP", 100, 2, 1, BernoulliPerFrame(p=1.0))], cycles=(2, 2, 2)
        )
        device = scenario.devices[0]
        ticks = device_traffic(device, scenario.params, 2, 3, 1_800_000)

        np.testing.assert_array_equal((ticks - 200_000) // 400_000, [0, 1, 2, 3])


if __name__ == "__main__":
    unittest.main()
