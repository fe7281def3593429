import dataclasses
import unittest

from app.analytic.report import analytic_report
from app.core.errors import ScenarioValidationError
from app.core.model import BernoulliPerFrame, ClassQos, QosSpec, TimeTick
from app.core.validation import validate_scenario
from tests.factories import make_scenario


def _codes(report, severity="error"):
    return {issue.code for issue in report.issues if issue.severity == severity}


class ValidateScenarioTests(unittest.TestCase):
    def test_valid_scenario_reports_slot_loads(self):
        scenario = make_scenario([(1, "RP", 50, 1, 1), (2, "RP", 50, 1, 2)])
        report = validate_scenario(scenario)

        self.assertTrue(report.ok)
        self.assertAlmostEqual(report.slot_loads[1], 0.02)

    def test_sensing_phase_must_be_shorter_than_transmission(self):
        scenario = make_scenario([], n_m=10, t_m_us=20, t_x_us=150)
        self.assertIn("geometry", _codes(validate_scenario(scenario)))

    def test_cycles_must_divide_each_other(self):
        scenario = make_scenario([], cycles=(2, 5, 10))
        report = validate_scenario(scenario)

        self.assertIn("cycles", _codes(report))
        self.assertIn("protocol.r_R", {issue.where for issue in report.errors})

    def test_qos_bounds_must_increase_with_class(self):
        scenario = make_scenario([])
        swapped = dataclasses.replace(
            scenario,
            qos=QosSpec(hp=scenario.qos.rp, rp=scenario.qos.hp, lp=scenario.qos.lp),
        )
        self.assertIn("qos_order", _codes(validate_scenario(swapped)))

    def test_duplicate_ids_and_missing_assignment_are_errors(self):
        scenario = make_scenario([(1, "HP", 10, 1, 1), (1, "HP", 10, 1, 2)])
        report = validate_scenario(scenario)
        self.assertIn("device_id", _codes(report))
        self.assertIn("assignment", _codes(report))

    def test_minislot_out_of_range_is_an_error(self):
        scenario = make_scenario([(1, "HP", 10, 1, 11)])
        self.assertIn("assignment", _codes(validate_scenario(scenario)))

    def test_shared_minislot_requires_smsa(self):
        devices = [(1, "RP", 10, 1, 2), (2, "RP", 10, 1, 2)]

        self.assertIn("exclusivity", _codes(validate_scenario(make_scenario(devices))))
        self.assertTrue(validate_scenario(make_scenario(devices, smsa=True)).ok)

    def test_shared_minislot_across_classes_is_rejected(self):
        scenario = make_scenario([(1, "HP", 10, 1, 2), (2, "RP", 10, 1, 2)], smsa=True)
        self.assertIn("smsa_class", _codes(validate_scenario(scenario)))

    def test_slot_load_above_one_is_rejected(self):
        scenario = make_scenario([(1, "RP", 3000, 1, 1), (2, "RP", 3000, 1, 2)])
        report = validate_scenario(scenario)

        self.assertIn("load", _codes(report))
        self.assertAlmostEqual(report.slot_loads[1], 1.2)

    def test_sporadic_condition_is_a_warning(self):
        scenario = make_scenario([(1, "HP", 2000, 1, 1)])
        report = validate_scenario(scenario)

        self.assertTrue(report.ok)
        self.assertIn("sporadic", _codes(report, "warning"))

    def test_inconsistent_bernoulli_probability_is_a_warning(self):
        scenario = make_scenario([(1, "RP", 50, 1, 1, BernoulliPerFrame(p=0.5))])
        self.assertIn("traffic_rate", _codes(validate_scenario(scenario), "warning"))

    def test_raise_for_errors_carries_the_report(self):
        scenario = make_scenario([(1, "RP", 3000, 1, 1), (2, "RP", 3000, 1, 2)])
        report = validate_scenario(scenario)

        with self.assertRaises(ScenarioValidationError) as ctx:
            report.raise_for_errors()
        self.assertIs(ctx.exception.report, report)

    def test_qos_checks_use_the_analytic_report(self):
        scenario = make_scenario([(1, "HP", 100, 1, 1), (2, "HP", 100, 1, 2)])
        strict = dataclasses.replace(
            scenario,
            qos=QosSpec(
                hp=ClassQos(TimeTick.from_us(105), 0.0001),
                rp=scenario.qos.rp,
                lp=scenario.qos.lp,
            ),
        )
        report = validate_scenario(strict, analytic_report(strict))

        self.assertTrue(report.ok)
        self.assertIn("qos_delay", _codes(report, "warning"))


if __name__ == "__main__":
    unittest.main()
