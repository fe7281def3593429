import unittest

from app.analytic.report import analytic_report
from app.io.scenario_file import parse
from app.metrics.compare import compare
from app.metrics.summary import summarize
from app.sim.replications import run_replications
from tests.factories import ACCEPTANCE_DIR


def _simulate(scenario):
    counters, _ = run_replications(scenario, workers=1, progress=False)
    return summarize(counters)


class AnalysisAgainstSimulationTests(unittest.TestCase):
    def test_exclusive_pair_over_twenty_replications(self):
        scenario = parse(ACCEPTANCE_DIR / "exclusive_pair.scn")
        report = _simulate(scenario)

        self.assertEqual(report.replications, 20)
        self.assertAlmostEqual(report.devices[1].adf.mean, 1.0, delta=1e-6)
        self.assertLess(abs(report.devices[2].adf.mean - 1.117647) / 1.117647, 0.10)
        self.assertTrue(compare(analytic_report(scenario), report).passed)

    def test_buffered_pair_idles_one_slot_in_five(self):
        report = _simulate(parse(ACCEPTANCE_DIR / "idle_pair_buffered.scn"))
        self.assertAlmostEqual(report.slots[1].idle_fraction.mean, 0.8, delta=0.02)

    def test_synccs_frame_length(self):
        scenario = parse(ACCEPTANCE_DIR / "synccs_frame.scn")
        report = _simulate(scenario)

        self.assertLess(abs(report.frame_ticks.mean - 562_500) / 562_500, 0.01)
        self.assertAlmostEqual(analytic_report(scenario).expected_frame, 562_500, places=3)

    def test_shared_minislot_devices_see_equal_delay(self):
        scenario = parse(ACCEPTANCE_DIR / "smsa_pair.scn")
        analytic = analytic_report(scenario)
        report = _simulate(scenario)

        first, second = report.devices[2].adf.mean, report.devices[3].adf.mean
        self.assertLess(abs(first - second) / first, 0.03)
        for device_id in (2, 3):
            expected = analytic.devices[device_id].adf
            self.assertLess(abs(report.devices[device_id].adf.mean - expected) / expected, 0.10)
            self.assertGreater(report.devices[device_id].collided, 0)

        comparison = compare(analytic, report)
        verdicts = {
            row.subject: row.verdict
            for row in comparison.rows
            if row.quantity == "collision_probability"
        }
        self.assertEqual(verdicts["device:2"], "pass")
        self.assertEqual(verdicts["device:3"], "pass")


if __name__ == "__main__":
    unittest.main()
