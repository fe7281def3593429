import json
import math
import unittest
from pathlib import Path
from tempfile import TemporaryDirectory

from app.analytic.report import analytic_report
from app.core.errors import ResultsWriteError
from app.io.manifest import INPUT_NAME, RunManifest, read_manifest, write_manifest
from app.io.results import COLUMNS, ResultRow, analytic_rows, emit_results, read_results_csv
from app.io.scenario_file import parse
from app.utils.formatting import format_interval, format_number, format_table, format_us
from tests.factories import SCENARIO_DIR


class FormattingTests(unittest.TestCase):
    def test_numbers_carry_nine_significant_digits(self):
        self.assertEqual(format_number(1.0 / 3.0), "0.333333333")
        self.assertEqual(format_number(1_117_647.0588), "1117647.06")
        self.assertEqual(format_number(7), "7")
        self.assertEqual(format_number(None), "")
        self.assertEqual(format_number(math.nan), "nan")

    def test_display_helpers(self):
        self.assertEqual(format_us(200_000), "200.000us")
        self.assertEqual(format_interval(math.nan, 1.0), "[-]")
        self.assertEqual(format_table(["a", "bb"], [["xyz", "1"]]), "a    bb\nxyz  1")


class EmitResultsTests(unittest.TestCase):
    def test_no_rows_gives_the_header_only(self):
        with TemporaryDirectory() as tmp:
            path = emit_results([], Path(tmp) / "empty.csv")
            text = path.read_text(encoding="utf-8")

        self.assertEqual(text, ",".join(COLUMNS) + "\n")

    def test_analytic_rows_survive_csv(self):
        report = analytic_report(parse(SCENARIO_DIR / "uncontended.scn"))
        rows = analytic_rows(report)
        with TemporaryDirectory() as tmp:
            path = emit_results(rows, Path(tmp) / "nested" / "analytic.csv")
            records = read_results_csv(path)

        self.assertEqual(len(records), len(rows))
        adf = next(r for r in records if r["quantity"] == "adf")
        self.assertEqual(adf["device_or_slot"], "device:1")
        self.assertEqual(adf["scenario_id"], report.scenario_id)
        self.assertAlmostEqual(adf["analytic"], 1.0)
        self.assertIsNone(adf["simulated"])

    def test_labels_lead_the_header(self):
        row = ResultRow("abc", "adf", "device:1", analytic=1.5, labels={"point": 3})
        with TemporaryDirectory() as tmp:
            path = emit_results([row], Path(tmp) / "sweep.csv")
            header = path.read_text(encoding="utf-8").splitlines()[0]

        self.assertEqual(header, "point," + ",".join(COLUMNS))

    def test_text_format_is_json(self):
        rows = [
            ResultRow("abc", "adf", "device:1", analytic=1.0 / 3.0, simulated=math.nan),
        ]
        with TemporaryDirectory() as tmp:
            path = emit_results(rows, Path(tmp) / "out.json", format="text")
            payload = json.loads(path.read_text(encoding="utf-8"))

        self.assertEqual(payload[0]["analytic"], 0.333333333)
        self.assertIsNone(payload[0]["simulated"])
        self.assertEqual(payload[0]["verdict"], "")

    def test_unwritable_target_raises(self):
        with TemporaryDirectory() as tmp:
            with self.assertRaises(ResultsWriteError):
                emit_results([], Path(tmp))


class ManifestTests(unittest.TestCase):
    def test_manifest_and_effective_scenario_are_written(self):
        scenario = parse(SCENARIO_DIR / "uncontended.scn", overrides=["run.seed=9"])
        manifest = RunManifest(
            command="simulate",
            scenario_id=scenario.identity(),
            scenario_name=scenario.name,
            source="scenarios/uncontended.scn",
            seeds=[9],
            overrides=["run.seed=9"],
        )
        with TemporaryDirectory() as tmp:
            directory = Path(tmp) / "run"
            write_manifest(directory, manifest, scenario)
            stored = read_manifest(directory)
            replayed = parse(directory / INPUT_NAME)

        self.assertEqual(stored["command"], "simulate")
        self.assertEqual(stored["seeds"], [9])
        self.assertIn("numpy_version", stored)
        self.assertEqual(replayed.identity(), scenario.identity())


if __name__ == "__main__":
    unittest.main()
