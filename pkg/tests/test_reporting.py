import json
import unittest

import numpy as np

from src.data.problems import default_quadratic, get_problem
from src.linalg.dense_linalg import SymMatrix
from src.linalg.sphere_eig import extreme_pair
from src.models.modified_newton import Method, SolverConfig, minimize
from src.utils.benchmark import BENCH_COLUMNS, BenchRow, bench_frame, run_suite
from src.utils.reporting import (RunReport, bench_payload, config_payload, eig_payload, format_bench, format_solve,
                                 solve_payload, trace_frame)


class TestRunReport(unittest.TestCase):

    def test_solve_report_round_trip_is_byte_identical(self):
        cfg = SolverConfig()
        result = minimize(get_problem('rosenbr'), cfg=cfg)
        report = RunReport(command='solve', config=config_payload(cfg), result=solve_payload(result))
        text = report.to_json()
        again = RunReport.from_json(text)
        self.assertEqual(again.to_json(), text)
        self.assertEqual(again.schema_version, 1)
        self.assertEqual(again.result['iterations'], result.iterations)
        self.assertEqual(len(again.result['trace']), result.iterations)

    def test_config_echo_matches_defaults(self):
        echo = config_payload(SolverConfig.from_settings())
        self.assertEqual((echo['eps'], echo['delta'], echo['Delta']), (1e-5, 1e-8, 1e12))

    def test_eig_payload_round_trip(self):
        lo, hi = extreme_pair(SymMatrix.diag([-1.0, 1.0]))
        text = RunReport(command='eig', config={}, result=eig_payload({'min': lo, 'max': hi})).to_json()
        self.assertEqual(RunReport.from_json(text).to_json(), text)

    def test_non_finite_values_are_written_as_null(self):
        cfg = SolverConfig(method=Method.STEEPEST, max_iter=2)
        result = minimize(get_problem('rosenbr'), cfg=cfg)
        self.assertTrue(np.isnan(result.trace[0].eig_lo))
        text = RunReport(command='solve', config=config_payload(cfg), result=solve_payload(result)).to_json()

        def reject(token):
            raise ValueError(f"non-standard JSON token {token}")

        data = json.loads(text, parse_constant=reject)
        self.assertIsNone(data['result']['trace'][0]['eig_lo'])
        self.assertEqual(RunReport.from_json(text).to_json(), text)

    def test_infinite_result_values(self):
        text = RunReport(command='bench', config={}, result=[{'obj': float('inf'), 'dim': 2}]).to_json()
        self.assertNotIn('Infinity', text)
        self.assertIsNone(json.loads(text)['result'][0]['obj'])

    def test_missing_keys(self):
        with self.assertRaises(ValueError):
            RunReport.from_json('{"command": "solve"}')


class TestTables(unittest.TestCase):

    def test_trace_frame(self):
        result = minimize(default_quadratic())
        frame = trace_frame(result)
        self.assertEqual(len(frame), 1)
        self.assertEqual(frame.loc[0, 'gamma'], 0.0)
        self.assertIn('converged', format_solve(result))

    def test_bench_table_and_csv(self):
        rows = [BenchRow('b', 2, 3, 1e-12, 1e-7, 'converged'), BenchRow('a', 2, 5, 0.0, 0.0, 'converged')]
        frame = bench_frame(rows)
        self.assertEqual(list(frame.columns), BENCH_COLUMNS)
        self.assertTrue(format_bench(rows, csv=True).startswith(','.join(BENCH_COLUMNS)))
        self.assertEqual(bench_payload(rows)[0]['name'], 'b')


class TestBenchmark(unittest.TestCase):

    def test_standard_suite_in_inf_norm(self):
        rows = run_suite('standard', SolverConfig(eps=1e-6, norm_rule='inf'))
        self.assertEqual([r.name for r in rows], sorted(r.name for r in rows))
        self.assertEqual(len(rows), 9)
        for row in rows:
            self.assertTrue(row.converged, msg=row)
        rosenbr = next(r for r in rows if r.name == 'rosenbr')
        self.assertLess(rosenbr.obj, 1e-10)

    def test_unknown_suite(self):
        with self.assertRaises(ValueError):
            run_suite('nosuch')


if __name__ == '__main__':
    unittest.main()
