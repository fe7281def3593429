import unittest
from pathlib import Path
from tempfile import TemporaryDirectory

import numpy as np

from app.core.errors import EngineInvariantError
from app.core.model import Trace
from app.core.schedule import expand_schedule
from app.io.scenario_file import parse
from app.sim.engine import SlotEngine, run
from app.sim.events import EventLog
from app.sim.measure import measure_adf
from tests.factories import ACCEPTANCE_DIR, make_scenario


def _traced_pair(horizon_slots=4):
    # device 1 at mini-slot 1, device 2 at mini-slot 3 (window 9 us, start 18 us)
    return make_scenario(
        [
            (1, "RP", 1000, 1, 1, Trace(ticks=(50_000, 350_000))),
            (2, "RP", 1000, 1, 3, Trace(ticks=(5_000, 360_000))),
        ],
        horizon_slots=horizon_slots,
    )


class SlotEngineTraceTests(unittest.TestCase):
    def test_step_resolves_the_hand_traced_slots(self):
        engine = SlotEngine(_traced_pair(), record=True)
        resolutions = [engine.step() for _ in range(4)]

        self.assertEqual([r.winner for r in resolutions], [3, 1, 1, 3])
        self.assertEqual([r.transmitters for r in resolutions], [(2,), (1,), (1,), (2,)])
        self.assertEqual(resolutions[0].sensing, {1: "empty", 2: "transmit"})
        self.assertEqual(resolutions[2].sensing, {1: "transmit", 2: "busy"})
        self.assertEqual([r.start for r in resolutions], [0, 200_000, 400_000, 600_000])
        self.assertFalse(any(r.collision or r.idle for r in resolutions))

    def test_counters_of_the_hand_traced_run(self):
        _, counters = run(_traced_pair(), record=True)

        np.testing.assert_array_equal(counters.successes.sum(0), [2, 2])
        np.testing.assert_array_equal(counters.adf_sum.sum(0), [2, 3])
        np.testing.assert_array_equal(counters.ad_sum.sum(0), [220_000, 420_000])
        np.testing.assert_array_equal(counters.delay_sum.sum(0), [420_000, 491_000])
        self.assertEqual(counters.elapsed_ticks, 800_000)
        self.assertEqual(int(counters.idle_slots.sum()), 0)

    def test_slot_records_are_ordered_by_tick(self):
        log, _ = run(_traced_pair(horizon_slots=1), record=True)

        self.assertEqual(
            [record.kind for record in log],
            ["slot_start", "arrival", "tx_start", "arrival", "success", "slot_end"],
        )
        self.assertEqual(log.of_kind("tx_start")[0].detail, 3)

    def test_fast_path_matches_recorded_run(self):
        scenario = parse(ACCEPTANCE_DIR / "exclusive_pair.scn", overrides=["run.horizon_slots=5000"])
        _, recorded = run(scenario, record=True)
        _, fast = run(scenario)

        for name in ("arrivals", "successes", "adf_sum", "ad_sum", "idle_slots", "duration"):
            np.testing.assert_array_equal(getattr(recorded, name), getattr(fast, name), err_msg=name)
        self.assertEqual(recorded.elapsed_ticks, fast.elapsed_ticks)
        self.assertLess(fast.processed_slots, recorded.processed_slots)


class ArrivalAdmissionTests(unittest.TestCase):
    def test_newcomer_replaces_waiting_packet_without_buffers(self):
        scenario = make_scenario(
            [(1, "RP", 1000, 1, 1, Trace(ticks=(10_000, 20_000)))], horizon_slots=2
        )
        log, counters = run(scenario, record=True)

        self.assertEqual(int(counters.replacements.sum()), 1)
        self.assertEqual(int(counters.successes.sum()), 1)
        self.assertEqual(float(counters.delay_sum.sum()), 290_000)
        self.assertEqual(log.of_kind("replacement")[0].packet, 0)
        self.assertEqual(log.of_kind("success")[0].packet, 1)

    def test_buffers_keep_every_packet(self):
        scenario = make_scenario(
            [(1, "RP", 1000, 1, 1, Trace(ticks=(10_000, 20_000)))],
            buffered=True,
            horizon_slots=3,
        )
        _, counters = run(scenario)

        self.assertEqual(int(counters.replacements.sum()), 0)
        self.assertEqual(int(counters.successes.sum()), 2)
        self.assertEqual(float(counters.adf_sum.sum()), 3.0)
        self.assertEqual(float(counters.ad_sum.sum()), 420_000)

    def test_arrival_after_the_sensing_window_waits_for_the_next_slot(self):
        # window of mini-slot 3 closes at 9us, its transmission starts at 18us
        scenario = make_scenario(
            [(1, "RP", 1000, 1, 3, Trace(ticks=(5_000, 12_000)))], horizon_slots=2
        )
        log, counters = run(scenario, record=True)

        self.assertEqual(int(counters.replacements.sum()), 0)
        self.assertEqual([event.packet for event in log.of_kind("success")], [0, 1])
        self.assertEqual([event.slot for event in log.of_kind("success")], [0, 1])


class CollisionTests(unittest.TestCase):
    def _shared(self, smsa):
        return make_scenario(
            [
                (1, "RP", 1000, 1, 2, Trace(ticks=(10_000,))),
                (2, "RP", 1000, 1, 2, Trace(ticks=(30_000,))),
            ],
            smsa=smsa,
            horizon_slots=2,
        )

    def test_shared_minislot_collides(self):
        engine = SlotEngine(self._shared(smsa=True))
        engine.step()
        resolution = engine.step()

        self.assertTrue(resolution.collision)
        self.assertEqual(resolution.transmitters, (1, 2))
        self.assertEqual(engine.counters.collision_events, 1)
        np.testing.assert_array_equal(engine.counters.collided.sum(0), [1, 1])
        np.testing.assert_array_equal(engine.counters.successes.sum(0), [0, 0])

    def test_collision_without_smsa_is_an_engine_fault(self):
        with self.assertRaises(EngineInvariantError):
            run(self._shared(smsa=False))

    def test_exclusive_assignment_never_collides(self):
        scenario = parse(ACCEPTANCE_DIR / "zero_collision.scn")
        _, counters = run(scenario)

        self.assertEqual(counters.horizon_slots, 10_000_000)
        self.assertEqual(counters.collision_events, 0)
        self.assertEqual(int(counters.collided.sum()), 0)
        self.assertGreater(int(counters.successes.sum()), 0)


class SyncCsEngineTests(unittest.TestCase):
    def test_idle_slots_end_after_sensing(self):
        scenario = make_scenario(
            [(1, "RP", 1000, 1, 1, Trace(ticks=(250_000,)))], synccs=True, horizon_slots=4
        )
        _, recorded = run(scenario, record=True)
        _, fast = run(scenario)

        self.assertEqual(recorded.elapsed_ticks, 3 * 90_000 + 200_000)
        self.assertEqual(fast.elapsed_ticks, recorded.elapsed_ticks)
        self.assertEqual(int(fast.idle_slots.sum()), 3)


class ConservationTests(unittest.TestCase):
    def test_tampered_counters_fail_the_packet_balance(self):
        _, counters = run(_traced_pair())
        counters.arrivals[0, 0] += 1

        with self.assertRaises(EngineInvariantError):
            counters.check_conservation()


class DeterminismTests(unittest.TestCase):
    def test_same_seed_gives_identical_logs(self):
        scenario = parse(ACCEPTANCE_DIR / "exclusive_pair.scn", overrides=["run.horizon_slots=2000"])
        first, _ = run(scenario, record=True)
        second, _ = run(scenario, record=True)
        other, _ = run(scenario, seed=scenario.run.seed + 1, record=True)

        self.assertEqual(list(first.lines()), list(second.lines()))
        self.assertNotEqual(list(first.lines()), list(other.lines()))

    def test_event_log_survives_jsonl_export(self):
        log, _ = run(_traced_pair(), record=True)
        with TemporaryDirectory() as tmp:
            path = log.to_jsonl(Path(tmp) / "events.jsonl")
            restored = EventLog.from_jsonl(path)
            first_line = path.read_text(encoding="utf-8").splitlines()[0]

        self.assertEqual(restored.records, log.records)
        self.assertTrue(first_line.startswith('{"tick":0,"kind":"slot_start"'))


class MeasureAdfTests(unittest.TestCase):
    def test_log_measurement_matches_online_counters(self):
        scenario = parse(ACCEPTANCE_DIR / "exclusive_pair.scn", overrides=["run.horizon_slots=5000"])
        log, counters = run(scenario, record=True)
        samples = measure_adf(log, expand_schedule(scenario), scenario.params)

        for device_id in (1, 2):
            column = counters.column(device_id)
            self.assertEqual(int(samples[device_id].sum()), int(counters.adf_sum[:, column].sum()))
            self.assertEqual(len(samples[device_id]), int(counters.successes[:, column].sum()))
        self.assertTrue(np.all(samples[1] == 1))


if __name__ == "__main__":
    unittest.main()
