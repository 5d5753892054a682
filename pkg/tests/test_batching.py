import asyncio
import threading
import time
import unittest

from walklab.utils.batching import BatchConfig, TrialProgress, run_batches


class TestBatches(unittest.TestCase):
    def test_ranges_cover_every_trial(self):
        self.assertEqual(BatchConfig(3, 2).batches(10), [(0, 3), (3, 6), (6, 9), (9, 10)])
        self.assertEqual(BatchConfig(0, 2).batches(2), [(0, 1), (1, 2)])

    def test_results_come_back_in_batch_order(self):
        expected = [list(range(s, min(s + 3, 10))) for s in range(0, 10, 3)]
        for workers in (1, 4):
            results = run_batches(10, lambda start, stop: list(range(start, stop)), BatchConfig(3, workers))
            self.assertEqual(results, expected)

    def test_no_trials_no_batches(self):
        self.assertEqual(run_batches(0, lambda start, stop: 1 / 0, BatchConfig(3, 2)), [])

    def test_workers_bound_batches_in_flight(self):
        lock = threading.Lock()
        state = {"running": 0, "peak": 0}

        def batch(start, stop):
            with lock:
                state["running"] += 1
                state["peak"] = max(state["peak"], state["running"])
            time.sleep(0.01)
            with lock:
                state["running"] -= 1
            return stop - start

        self.assertEqual(sum(run_batches(20, batch, BatchConfig(2, 3))), 20)
        self.assertLessEqual(state["peak"], 3)


class TestTrialProgress(unittest.TestCase):
    def test_counts_trials_and_batches(self):
        progress = TrialProgress(10, "walk")

        async def feed():
            await progress.update(4)
            await progress.update(3)

        asyncio.run(feed())
        self.assertEqual((progress.processed, progress.batches_done), (7, 2))
        self.assertAlmostEqual(progress.percentage, 70.0)
        self.assertGreaterEqual(progress.elapsed_time, 0.0)

    def test_empty_total_is_complete(self):
        self.assertEqual(TrialProgress(0).percentage, 100.0)


if __name__ == "__main__":
    unittest.main()
