import io
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest.mock import patch

from app.config import config
from app.io.manifest import INPUT_NAME, read_manifest
from app.io.results import read_results_csv
from app.io.scenario_file import parse
from main import EXIT_FAILED, EXIT_INTERNAL, EXIT_OK, main
from tests.factories import ACCEPTANCE_DIR, SCENARIO_DIR


UNCONTENDED = str(SCENARIO_DIR / "uncontended.scn")


class CliTests(unittest.TestCase):
    def setUp(self):
        self._tmp = TemporaryDirectory()
        self.output = Path(self._tmp.name)
        self.stdout = io.StringIO()

    def tearDown(self):
        self._tmp.cleanup()

    def _main(self, *argv):
        with redirect_stdout(self.stdout), redirect_stderr(io.StringIO()):
            return main([*argv, "--output-dir", str(self.output), "--quiet"])

    def test_validate_accepts_a_shipped_scenario(self):
        self.assertEqual(self._main("validate", UNCONTENDED), EXIT_OK)
        self.assertIn("uncontended", self.stdout.getvalue())

    def test_validate_rejects_an_overloaded_slot(self):
        code = self._main("validate", UNCONTENDED, "--override", "devices.1.lambda_per_s=6000")
        self.assertEqual(code, EXIT_FAILED)

    def test_missing_scenario_file_is_an_internal_failure(self):
        self.assertEqual(self._main("validate", str(self.output / "absent.scn")), EXIT_INTERNAL)

    def test_analyze_writes_results_and_manifest(self):
        self.assertEqual(self._main("analyze", UNCONTENDED), EXIT_OK)

        records = read_results_csv(self.output / "analytic.csv")
        manifest = read_manifest(self.output)
        self.assertIn("adf", {record["quantity"] for record in records})
        self.assertEqual(manifest["command"], "analyze")
        self.assertEqual(manifest["outputs"], ["analytic.csv"])
        self.assertTrue((self.output / INPUT_NAME).exists())

    def test_simulate_exports_the_event_log(self):
        log_path = self.output / "events.jsonl"
        code = self._main(
            "simulate",
            UNCONTENDED,
            "--override",
            "run.horizon_slots=2000",
            "--export-log",
            str(log_path),
        )

        self.assertEqual(code, EXIT_OK)
        self.assertTrue(log_path.read_text(encoding="utf-8").startswith('{"tick":0'))
        self.assertEqual(
            read_manifest(self.output)["outputs"], ["simulation.csv", "events.jsonl"]
        )

    def test_compare_passes_on_a_matching_scenario(self):
        self.assertEqual(self._main("compare", UNCONTENDED), EXIT_OK)

        records = read_results_csv(self.output / "comparison.csv")
        self.assertTrue(records)
        self.assertEqual(read_manifest(self.output)["seeds"], [1])

    def test_compare_fails_when_analysis_and_traffic_disagree(self):
        # the deterministic source keeps its period, the analysis takes the new rate
        code = self._main("compare", UNCONTENDED, "--override", "devices.1.lambda_per_s=1000")
        self.assertEqual(code, EXIT_FAILED)

    def test_unexpected_exception_maps_to_internal_failure(self):
        with patch("app.handlers.analyze.analytic_report", side_effect=RuntimeError("boom")):
            self.assertEqual(self._main("analyze", UNCONTENDED), EXIT_INTERNAL)

    def test_sweep_records_skipped_points(self):
        code = self._main(
            "sweep",
            UNCONTENDED,
            "--axis",
            "devices.1.lambda_per_s=[50, 100, 6000]",
            "--analytic-only",
        )

        self.assertEqual(code, EXIT_OK)
        statuses = [point["status"] for point in read_manifest(self.output)["grid"]]
        self.assertEqual(statuses, ["analytic", "analytic", "skipped"])
        records = read_results_csv(self.output / "sweep.csv")
        self.assertEqual({record["point"] for record in records}, {"0", "1", "2"})

    def test_sweep_manifest_reproduces_the_base_scenario(self):
        axis = "devices.1.lambda_per_s=[50, 100]"
        code = self._main("sweep", UNCONTENDED, "--axis", axis, "--analytic-only")

        self.assertEqual(code, EXIT_OK)
        manifest = read_manifest(self.output)
        base = parse(UNCONTENDED)
        self.assertEqual(manifest["scenario_id"], base.identity())
        self.assertEqual(manifest["seeds"], [1])
        self.assertEqual(manifest["axes"], [axis])
        self.assertEqual(parse(self.output / INPUT_NAME).identity(), base.identity())
        point = parse(UNCONTENDED, overrides=["devices.1.lambda_per_s=50"])
        self.assertEqual(manifest["grid"][0]["scenario_id"], point.identity())

    def test_sweep_skips_points_whose_solver_does_not_converge(self):
        with patch.object(config, "solver_max_iter", 1):
            code = self._main(
                "sweep",
                str(ACCEPTANCE_DIR / "smsa_pair.scn"),
                "--axis",
                "assignment.2.minislot=[3, 2]",
                "--analytic-only",
                "--workers",
                "1",
            )

        self.assertEqual(code, EXIT_OK)
        grid_points = read_manifest(self.output)["grid"]
        self.assertEqual([point["status"] for point in grid_points], ["analytic", "skipped"])
        self.assertIn("did not converge", grid_points[1]["reason"])
        records = read_results_csv(self.output / "sweep.csv")
        self.assertEqual({record["point"] for record in records}, {"0", "1"})

    def test_simulate_twice_with_one_seed_writes_identical_results(self):
        outputs = []
        for run in ("first", "second"):
            directory = self.output / run
            with redirect_stdout(io.StringIO()), redirect_stderr(io.StringIO()):
                code = main(
                    [
                        "simulate",
                        UNCONTENDED,
                        "--override",
                        "run.horizon_slots=2000",
                        "--output-dir",
                        str(directory),
                        "--quiet",
                    ]
                )
            self.assertEqual(code, EXIT_OK)
            outputs.append(directory)

        first, second = outputs
        self.assertEqual(
            (first / "simulation.csv").read_bytes(), (second / "simulation.csv").read_bytes()
        )
        self.assertEqual(read_manifest(first)["seeds"], read_manifest(second)["seeds"])
        self.assertEqual(
            (first / INPUT_NAME).read_bytes(), (second / INPUT_NAME).read_bytes()
        )

    def test_analyze_records_the_smsa_forms_in_the_manifest(self):
        code = self._main(
            "analyze", str(ACCEPTANCE_DIR / "smsa_pair.scn"), "--override", "analysis.prefactor=own"
        )

        self.assertEqual(code, EXIT_OK)
        self.assertEqual(
            read_manifest(self.output)["analysis"],
            {"prefactor": "own", "collision_rate": "partner"},
        )
        self.assertIn("prefactor=own", self.stdout.getvalue())


if __name__ == "__main__":
    unittest.main()
