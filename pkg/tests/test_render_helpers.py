import unittest

from app.analytic.report import analytic_report
from app.core.validation import ValidationReport
from app.handlers.render_helpers import (
    build_analytic_text,
    build_comparison_text,
    build_validation_text,
)
from app.io.scenario_file import parse
from app.metrics.compare import ComparisonReport, ComparisonRow
from tests.factories import ACCEPTANCE_DIR, SCENARIO_DIR


def _row(quantity, verdict, mandatory=True):
    return ComparisonRow(
        quantity=quantity,
        subject="device:1",
        analytic=1.0,
        simulated=1.02,
        ci_low=1.01,
        ci_high=1.03,
        abs_err=0.02,
        rel_err=0.02,
        verdict=verdict,
        mandatory=mandatory,
    )


class RenderHelpersTests(unittest.TestCase):
    def setUp(self):
        self.scenario = parse(SCENARIO_DIR / "uncontended.scn")

    def test_build_validation_text_lists_issues_and_loads(self):
        report = ValidationReport()
        report.error("load", "slot load 1.2 exceeds 1.0 arrivals per LP cycle", "slot=1")
        report.warn("sporadic", "lambda*T_s is not small", "devices.id=1")
        report.slot_loads[1] = 1.2

        text = build_validation_text(self.scenario, report)

        self.assertIn("has 1 error(s)", text)
        self.assertIn("load", text)
        self.assertIn("warning", text)
        self.assertIn("slot 1: 1.2", text)

    def test_build_validation_text_for_clean_scenario(self):
        text = build_validation_text(self.scenario, ValidationReport())

        self.assertIn(f"uncontended ({self.scenario.identity()}) is valid", text)
        self.assertIn("no occupied slots", text)

    def test_build_analytic_text_shows_devices_and_frame(self):
        scenario = parse(ACCEPTANCE_DIR / "synccs_frame.scn")
        text = build_analytic_text(scenario, analytic_report(scenario))

        self.assertIn("AD-F", text)
        self.assertIn("SyncCS expected frame length 562.500us", text)
        device_rows = [line for line in text.splitlines() if " LP " in line]
        self.assertEqual(len(device_rows), 10)

    def test_build_analytic_text_names_the_smsa_forms_in_use(self):
        scenario = parse(
            ACCEPTANCE_DIR / "smsa_pair.scn", overrides=["analysis.prefactor=own"]
        )
        report = analytic_report(scenario)

        self.assertEqual(report.prefactor, "own")
        self.assertEqual(report.collision_rate, "partner")
        self.assertIn(
            "SMsA forms: prefactor=own collision_rate=partner",
            build_analytic_text(scenario, report),
        )

    def test_build_analytic_text_omits_smsa_forms_without_shared_minislots(self):
        text = build_analytic_text(self.scenario, analytic_report(self.scenario))
        self.assertNotIn("SMsA forms", text)

    def test_build_comparison_text_marks_informational_rows(self):
        report = ComparisonReport(
            scenario_id="abc",
            profile="default",
            rows=[_row("adf", "fail"), _row("ad", "pass", mandatory=False)],
        )

        text = build_comparison_text(self.scenario, report)

        self.assertIn("pass (info)", text)
        self.assertIn("overall: FAIL (1 mandatory quantities outside tolerance)", text)


if __name__ == "__main__":
    unittest.main()
