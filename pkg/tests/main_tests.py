import contextlib
import csv
import io
import json
import os
import tempfile
import unittest

import numpy as np

import scalesep.__main__ as main
import scalesep._io as _io
import scalesep.gaussian as gaussian
import scalesep.uncertainty as uncertainty


class TestCase(unittest.TestCase):
    def setUp(self):
        self.working_directory = tempfile.TemporaryDirectory()
        self._wd = os.getcwd()
        os.chdir(self.working_directory.name)

    def tearDown(self):
        os.chdir(self._wd)
        self.working_directory.cleanup()

    def run_main(self, *argv):
        """Run the CLI, returning its exit code and everything it wrote to stdout."""
        stdout, stderr = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(stdout), contextlib.redirect_stderr(stderr):
            with self.assertRaises(SystemExit) as cm:
                main.main(list(argv))
        self.stderr = stderr.getvalue()
        return cm.exception.code, stdout.getvalue()

    def write(self, V, path="state.json"):
        _io.write_state(uncertainty.as_dispersion(V), path)
        return path


class TestCheck(TestCase):
    def test_vacuum(self):
        code, out = self.run_main("check", self.write(uncertainty.vacuum(1)), "--debug")
        self.assertEqual(code, main.EXIT_OK)
        report = json.loads(out)
        self.assertTrue(report["physical"])
        self.assertAlmostEqual(report["det_c"], 0)
        self.assertTrue(report["holds"])

    def test_unphysical(self):
        code, out = self.run_main("check", self.write(0.2 * np.eye(2)), "--debug")
        self.assertEqual(code, main.EXIT_UNPHYSICAL)
        report = json.loads(out)
        self.assertFalse(report["physical"])
        self.assertNotIn("holds", report)

    def test_truncated(self):
        with open("state.json", "w") as f:
            f.write('{"n_modes": 1, "cov": [[0.5, 0')
        code, out = self.run_main("check", "state.json")
        self.assertEqual(code, main.EXIT_USAGE)
        self.assertEqual(out, "")
        self.assertIn("state.json", self.stderr)

    def test_missing_file(self):
        code, _ = self.run_main("check", "nothing.json")
        self.assertEqual(code, main.EXIT_USAGE)

    def test_not_finite(self):
        for entry in ("NaN", "Infinity"):
            with open("state.json", "w") as f:
                f.write('{"n_modes": 1, "cov": [[' + entry + ', 0], [0, 0.5]]}')
            for argv in (("check", "state.json"), ("test", "state.json", "--mode", "1")):
                code, out = self.run_main(*argv)
                self.assertEqual(code, main.EXIT_USAGE)
                self.assertEqual(out, "")

    def test_tolerance(self):
        path = self.write(np.diag([0.4999, 0.5]))
        code, out = self.run_main("check", path, "--tol", "1e-9")
        self.assertEqual(code, main.EXIT_UNPHYSICAL)
        self.assertAlmostEqual(json.loads(out)["min_eig"], -5e-5, delta=1e-7)

        code, out = self.run_main("check", path, "--tol", "1e-2")
        self.assertEqual(code, main.EXIT_OK)
        self.assertTrue(json.loads(out)["holds"])

    def test_output_file(self):
        code, out = self.run_main("check", self.write(uncertainty.vacuum(2)), "-o", "report.json")
        self.assertEqual(code, main.EXIT_OK)
        self.assertEqual(out, "")
        with open("report.json") as f:
            self.assertTrue(json.load(f)["physical"])


class TestTest(TestCase):
    def test_pure_gaussian(self):
        code, out = self.run_main("test", self.write(gaussian.pure_covariance((0.5, 0.5, 0.4))), "--debug")
        self.assertEqual(code, main.EXIT_ENTANGLED)
        report = json.loads(out)
        self.assertEqual(report["status"], "ENTANGLED")
        self.assertEqual(report["witness"], [1, 1, 1, -1])
        self.assertAlmostEqual(report["min_det"], -4 / 9, delta=1e-9)
        self.assertAlmostEqual(report["diagnostics"]["coeffs"]["B"], 1 / 9)

    def test_thermal(self):
        code, out = self.run_main("test", self.write(np.eye(4)), "--debug")
        self.assertEqual(code, main.EXIT_OK)
        self.assertEqual(json.loads(out)["status"], "NOT_DETECTED")

    def test_vacuum(self):
        code, _ = self.run_main("test", self.write(uncertainty.vacuum(2)), "--debug")
        self.assertEqual(code, main.EXIT_OK)

    def test_unphysical(self):
        code, out = self.run_main("test", self.write(np.eye(4) / 10), "--debug")
        self.assertEqual(code, main.EXIT_UNPHYSICAL)
        self.assertEqual(json.loads(out)["status"], "UNPHYSICAL")

    def test_mode_vs_rest(self):
        path = self.write(uncertainty.direct_sum(gaussian.pure_covariance((0.5, 0.5, 0.4)), uncertainty.vacuum(1)))
        code, _ = self.run_main("test", path, "--debug")
        self.assertEqual(code, main.EXIT_USAGE)
        self.assertIn("--mode", self.stderr)

        code, out = self.run_main("test", path, "--mode", "2", "--debug")
        self.assertEqual(code, main.EXIT_ENTANGLED)
        self.assertEqual(json.loads(out)["mode"], 2)

        code, _ = self.run_main("test", path, "--mode", "3", "--debug")
        self.assertEqual(code, main.EXIT_OK)

        code, _ = self.run_main("test", path, "--mode", "4", "--debug")
        self.assertEqual(code, main.EXIT_USAGE)

    def test_grid_flags(self):
        path = self.write(gaussian.pure_covariance((0.5, 0.5, 0.4)))
        code, out = self.run_main("test", path, "--grid-xmax", "3", "--grid-points", "7",
                                  "--grid-spacing", "linear", "--tol", "1e-6", "--debug")
        self.assertEqual(code, main.EXIT_ENTANGLED)
        report = json.loads(out)
        self.assertEqual(report["grid"]["x_max"], 3)
        self.assertEqual(report["grid"]["points_per_sign"], 7)
        self.assertEqual(report["grid"]["spacing"], "linear")
        self.assertAlmostEqual(report["tolerance"], 1e-6 * (0.25 / 0.09) ** 2)

    def test_deterministic(self):
        path = self.write(uncertainty.random_physical_state(2, 3))
        first = self.run_main("test", path, "--debug")
        second = self.run_main("test", path)
        self.assertEqual(first, second)


class TestGaussian(TestCase):
    def test_pure(self):
        code, out = self.run_main("gaussian", "pure", "--m11", "0.5", "--m22", "0.5", "--m", "0.4", "-o", "pure.json")
        self.assertEqual(code, main.EXIT_OK)
        self.assertAlmostEqual(json.loads(out)["det_c"], 0, delta=1e-10)
        V = _io.read_state("pure.json")
        self.assertAlmostEqual(V.matrix[1, 1], 2.777778, places=6)

    def test_mix(self):
        code, _ = self.run_main("gaussian", "mix", "--alpha", "0.5", "-o", "mix.json")
        self.assertEqual(code, main.EXIT_OK)
        V = _io.read_state("mix.json")
        np.testing.assert_allclose(V.block(1, 2), np.zeros((2, 2)), atol=1e-15)

    def test_singular(self):
        code, _ = self.run_main("gaussian", "pure", "--m", "0.5", "--m11", "0.5", "--m22", "0.5", "-o", "pure.json")
        self.assertEqual(code, main.EXIT_USAGE)
        self.assertFalse(os.path.exists("pure.json"))

    def test_alpha_out_of_range(self):
        code, _ = self.run_main("gaussian", "mix", "--alpha", "1.5", "-o", "mix.json")
        self.assertEqual(code, main.EXIT_USAGE)


class TestSweepAlpha(TestCase):
    def test_default(self):
        code, out = self.run_main("sweep-alpha")
        self.assertEqual(code, main.EXIT_OK)
        rows = list(csv.DictReader(io.StringIO(out)))
        self.assertEqual(len(rows), 101)

        by_alpha = {float(row["alpha"]): row for row in rows}
        self.assertAlmostEqual(float(by_alpha[0]["det_cx_timereversal"]), -0.444444, places=6)
        self.assertEqual(by_alpha[0]["status"], "ENTANGLED")
        self.assertAlmostEqual(float(by_alpha[0.5]["det_cx_timereversal"]), 0.197531, places=6)
        self.assertEqual(by_alpha[0.5]["status"], "NOT_DETECTED")
        self.assertAlmostEqual(float(by_alpha[0.25]["det_cx_timereversal"]), 0, delta=1e-9)
        self.assertEqual(by_alpha[0.25]["status"], "NOT_DETECTED")

    def test_matches_closed_form(self):
        code, _ = self.run_main("sweep-alpha", "--step", "0.01", "-o", "fig.csv")
        self.assertEqual(code, main.EXIT_OK)
        with open("fig.csv", newline="") as f:
            for row in csv.DictReader(f):
                expected = gaussian.special_case_det(0.5, 0.5, 0.4, float(row["alpha"]))
                self.assertAlmostEqual(float(row["det_cx_timereversal"]), expected, delta=1e-9)

    def test_deterministic(self):
        self.run_main("sweep-alpha", "-o", "a.csv")
        self.run_main("sweep-alpha", "-o", "b.csv")
        with open("a.csv", "rb") as a, open("b.csv", "rb") as b:
            content = a.read()
            self.assertEqual(content, b.read())
        self.assertNotIn(b"\r", content)

    def test_tolerance(self):
        _, strict = self.run_main("sweep-alpha", "--step", "0.25")
        _, loose = self.run_main("sweep-alpha", "--step", "0.25", "--tol", "1")
        self.assertIn("ENTANGLED", strict)
        statuses = [row["status"] for row in csv.DictReader(io.StringIO(loose))]
        self.assertEqual(statuses, ["NOT_DETECTED"] * 5)

    def test_bad_step(self):
        code, _ = self.run_main("sweep-alpha", "--step", "0.7")
        self.assertEqual(code, main.EXIT_USAGE)

    def test_unwritable(self):
        code, _ = self.run_main("sweep-alpha", "-o", os.path.join("missing", "fig.csv"))
        self.assertEqual(code, main.EXIT_USAGE)


class TestTomogram(TestCase):
    def test_vacuum(self):
        code, out = self.run_main("tomogram", self.write(uncertainty.vacuum(1)))
        self.assertEqual(code, main.EXIT_OK)
        result = json.loads(out)
        self.assertEqual(result["method"], "analytic")
        np.testing.assert_allclose(result["cov"], np.eye(2) / 2, atol=1e-9)

    def test_pure_gaussian(self):
        V = gaussian.pure_covariance((0.5, 0.5, 0.4))
        code, out = self.run_main("tomogram", self.write(V))
        self.assertEqual(code, main.EXIT_OK)
        np.testing.assert_allclose(json.loads(out)["cov"], V.matrix, atol=1e-9)

    def test_numeric(self):
        code, out = self.run_main("tomogram", self.write(uncertainty.vacuum(1)), "--numeric")
        self.assertEqual(code, main.EXIT_OK)
        result = json.loads(out)
        self.assertEqual(result["method"], "numeric")
        np.testing.assert_allclose(result["cov"], np.eye(2) / 2, atol=1e-9)

    def test_too_coarse(self):
        code, _ = self.run_main("tomogram", self.write(uncertainty.vacuum(1)), "--numeric", "--points", "3")
        self.assertEqual(code, main.EXIT_USAGE)

    def test_samples(self):
        code, _ = self.run_main("tomogram", self.write(uncertainty.vacuum(2)), "--samples", "samples",
                                "--points", "51", "--cross-points", "11")
        self.assertEqual(code, main.EXIT_OK)
        names = set(os.listdir("samples"))
        for label in ("q1", "p1", "q1+p1", "q2", "p2", "q2+p2", "q1q2", "q1p2", "p1q2", "p1p2"):
            self.assertIn(f"{label}.csv", names)
            self.assertIn(f"{label}.json", names)
        self.assertEqual(_io.read_sampled(os.path.join("samples", "q1.csv")).values.shape, (51,))
        self.assertEqual(_io.read_sampled(os.path.join("samples", "p1q2.csv")).values.shape, (11, 11))


class TestRandom(TestCase):
    def test_deterministic(self):
        for path in ("a.json", "b.json"):
            code, _ = self.run_main("random", "--modes", "3", "--seed", "5", "-o", path)
            self.assertEqual(code, main.EXIT_OK)
        with open("a.json") as a, open("b.json") as b:
            self.assertEqual(a.read(), b.read())
        self.assertEqual(_io.read_state("a.json").n_modes, 3)

    def test_physical(self):
        self.run_main("random", "--seed", "11", "-o", "state.json")
        code, _ = self.run_main("check", "state.json")
        self.assertEqual(code, main.EXIT_OK)


class TestUsage(TestCase):
    def test_no_command(self):
        code, _ = self.run_main()
        self.assertEqual(code, main.EXIT_USAGE)

    def test_missing_argument(self):
        code, _ = self.run_main("test")
        self.assertEqual(code, main.EXIT_USAGE)
        self.assertIn("usage", self.stderr)

    def test_conflicting_flags(self):
        code, _ = self.run_main("test", self.write(uncertainty.vacuum(2)), "--mode", "1", "--two-mode")
        self.assertEqual(code, main.EXIT_USAGE)

    def test_tolerance_only_where_used(self):
        path = self.write(uncertainty.vacuum(1))
        for argv in (("tomogram", path), ("random", "-o", "random.json")):
            code, _ = self.run_main(*argv, "--tol", "1e-3")
            self.assertEqual(code, main.EXIT_USAGE)

    def test_version(self):
        code, out = self.run_main("--version")
        self.assertEqual(code, 0)
        self.assertTrue(out.startswith("scalesep "))


if __name__ == "__main__":
    unittest.main()
