import math
import time
import unittest

import numpy as np

from qfbounds.exceptions import DomainViolation, InvariantViolation
from qfbounds.verify import (
    CheckRegistry,
    MonteCarloCheck,
    OrtIntervalCheck,
    check_registry,
    run_check,
)

EPS3 = 0.104


class AlwaysRejects(MonteCarloCheck):
    name = "rejects"
    max_attempts = 3

    def sample(self, rng, eps3):
        return None

    def evaluate(self, instance, eps3):
        raise AssertionError("never called")


class FailsOnOdd(MonteCarloCheck):
    name = "odd"

    def sample(self, rng, eps3):
        return int(rng.integers(100))

    def evaluate(self, instance, eps3):
        return instance % 2 == 0, float(instance)


class BreaksOnSomeDraws(MonteCarloCheck):
    name = "breaks"
    max_attempts = 4

    def sample(self, rng, eps3):
        if rng.uniform() < 0.5:
            raise InvariantViolation("drawn point left the hyperboloid")
        return 1.0

    def evaluate(self, instance, eps3):
        return True, -instance


class RegistryTests(unittest.TestCase):
    def test_global_checks(self):
        self.assertEqual(
            check_registry.names(),
            ["ort-interval", "roundtrip", "situation1", "situation2", "two-cylinder"],
        )
        for name in check_registry.names():
            check = check_registry.get_check(name)
            self.assertEqual(check.name, name)
            self.assertTrue(check.description)

    def test_unknown(self):
        self.assertIsNone(CheckRegistry().get_check("situation1"))


class RunCheckTests(unittest.TestCase):
    def test_guarantees_hold(self):
        for name in check_registry.names():
            with self.subTest(check=name):
                result = run_check(check_registry.get_check(name), 40, seed=1234, eps3=EPS3)
                self.assertEqual(result.failed, 0, result.failures)
                self.assertGreater(result.passed, 0)
                self.assertEqual(result.passed + result.skipped, 40)
                self.assertTrue(result.ok)

    def test_closed_form_guarantees_at_scale(self):
        for name in ("situation1", "situation2", "two-cylinder"):
            for seed in (1234, 7):
                with self.subTest(check=name, seed=seed):
                    started = time.perf_counter()
                    result = run_check(check_registry.get_check(name), 500, seed=seed, eps3=EPS3)
                    self.assertLess(time.perf_counter() - started, 30.0)
                    self.assertEqual(result.failed, 0, result.failures)
                    self.assertEqual(result.passed + result.skipped, 500)
                    self.assertGreater(result.passed, 400)

    def test_geometry_errors_while_drawing_are_rejections(self):
        result = run_check(BreaksOnSomeDraws(), 40, seed=3, eps3=EPS3)
        self.assertEqual(result.failed, 0)
        self.assertEqual(result.passed + result.skipped, 40)
        self.assertGreater(result.passed, 25)

    def test_thread_count_does_not_change_result(self):
        check = check_registry.get_check("roundtrip")
        results = [run_check(check, 30, seed=99, eps3=EPS3, threads=t).model_dump() for t in (1, 2, 8)]
        self.assertEqual(results[0], results[1])
        self.assertEqual(results[0], results[2])

    def test_seed_changes_draws(self):
        check = OrtIntervalCheck()
        a = run_check(check, 20, seed=1, eps3=EPS3)
        b = run_check(check, 20, seed=2, eps3=EPS3)
        self.assertNotEqual(a.max_margin, b.max_margin)

    def test_skips_when_no_draw_is_accepted(self):
        result = run_check(AlwaysRejects(), 5, seed=0, eps3=EPS3)
        self.assertEqual(result.skipped, 5)
        self.assertIsNone(result.max_margin)
        self.assertTrue(result.ok)

    def test_failures_are_indexed(self):
        result = run_check(FailsOnOdd(), 50, seed=7, eps3=EPS3)
        self.assertGreater(result.failed, 0)
        self.assertFalse(result.ok)
        self.assertEqual(len(result.failures), result.failed)
        self.assertEqual(result.failures, sorted(result.failures))
        self.assertTrue(math.isfinite(result.max_margin))
        self.assertIn(result.worst_instance, range(50))

    def test_instances_must_be_positive(self):
        with self.assertRaises(DomainViolation):
            run_check(FailsOnOdd(), 0, seed=1, eps3=EPS3)

    def test_run_one_is_deterministic(self):
        check = check_registry.get_check("situation2")
        seed = np.random.SeedSequence(5)
        self.assertEqual(check.run_one(seed, EPS3), check.run_one(seed, EPS3))


if __name__ == "__main__":
    unittest.main()
