import unittest

from app.core.errors import ScenarioSemanticError, StateSpaceOverflow
from app.core.model import BernoulliPerFrame
from app.io.scenario_file import parse
from app.metrics.oracle import brute_force_oracle
from app.metrics.summary import summarize
from app.sim.engine import run
from tests.factories import ACCEPTANCE_DIR, make_scenario


def _simulated(scenario):
    _, counters = run(scenario)
    return summarize([counters], confidence=0.99)


class OracleChainTests(unittest.TestCase):
    def test_buffered_single_device_is_served_next_frame(self):
        result = brute_force_oracle(parse(ACCEPTANCE_DIR / "buffered_single.scn"))

        self.assertAlmostEqual(result.adf[1], 1.0)
        self.assertAlmostEqual(result.idle_probability, 0.9)
        self.assertAlmostEqual(result.success_rate[1], 0.1)
        self.assertEqual(result.overflow_mass, 0.0)
        # closed form for Poisson arrivals stays within 5% of the exact Bernoulli value
        self.assertLess(abs(1.026316 - result.adf[1]) / result.adf[1], 0.05)

    def test_no_buffer_pair(self):
        result = brute_force_oracle(parse(ACCEPTANCE_DIR / "oracle_pair.scn"))

        self.assertEqual(result.states, 4)
        self.assertAlmostEqual(result.adf[1], 1.0)
        self.assertGreater(result.adf[2], 1.0)
        self.assertAlmostEqual(
            result.idle_probability, 1.0 - result.success_rate[1] - result.success_rate[2]
        )

    def test_buffered_pair_needs_a_deep_enough_cap(self):
        scenario = parse(ACCEPTANCE_DIR / "oracle_pair_buffered.scn")

        with self.assertRaises(StateSpaceOverflow):
            brute_force_oracle(scenario, queue_cap=1)
        result = brute_force_oracle(scenario, queue_cap=12)
        self.assertEqual(result.states, 13 * 13)
        self.assertAlmostEqual(result.idle_probability, 0.75, places=6)

    def test_preconditions_are_enforced(self):
        bernoulli = BernoulliPerFrame(p=0.1)
        too_many = make_scenario([(i, "RP", 500, 1, i, bernoulli) for i in range(1, 5)])
        poisson = make_scenario([(1, "RP", 500, 1, 1)])
        shared = make_scenario(
            [(1, "RP", 500, 1, 2, bernoulli), (2, "RP", 500, 1, 2, bernoulli)], smsa=True
        )
        long_frame = make_scenario([(1, "RP", 500, 1, 1, bernoulli)], cycles=(1, 1, 2))

        for scenario in (too_many, poisson, shared, long_frame):
            with self.assertRaises(ScenarioSemanticError):
                brute_force_oracle(scenario)


class OracleAgainstSimulationTests(unittest.TestCase):
    def _check(self, name, queue_cap=None, tolerance=0.01):
        scenario = parse(ACCEPTANCE_DIR / name)
        exact = brute_force_oracle(scenario, queue_cap=queue_cap)
        report = _simulated(scenario)

        for device_id, expected in exact.adf.items():
            estimate = report.devices[device_id].adf
            allowed = max(2.0 * estimate.half_width, tolerance)
            self.assertLess(abs(estimate.mean - expected), allowed, msg=f"device {device_id}")
        idle = report.slots[1].idle_fraction.mean
        self.assertLess(abs(idle - exact.idle_probability), tolerance)

    def test_pair_without_buffers(self):
        self._check("oracle_pair.scn")

    def test_triple_with_early_arrivals(self):
        self._check("oracle_triple.scn")

    def test_buffered_pair(self):
        self._check("oracle_pair_buffered.scn", queue_cap=12)

    def test_buffered_single(self):
        self._check("buffered_single.scn")


if __name__ == "__main__":
    unittest.main()
