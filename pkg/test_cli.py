import io
import json
import math
import os
import tempfile
import unittest
from contextlib import redirect_stdout

import numpy as np
import numpy.testing as npt

from cli import main
from matcore import SymMatrix, random_pd
from matrix_io import dump_matrix


def run_cli(*argv):
    out = io.StringIO()
    with redirect_stdout(out):
        code = main([str(arg) for arg in argv])
    return code, out.getvalue()


def run_json(*argv):
    code, text = run_cli(*argv, '--json', '--quiet')
    return code, json.loads(text)


def matrix_of(document):
    return np.array(document['data']).reshape(document['dim'], document['dim'])


class CliTestCase(unittest.TestCase):
    def setUp(self):
        self.tmpdir = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmpdir.cleanup()

    def write(self, name, matrix):
        path = os.path.join(self.tmpdir.name, f"{name}.json")
        dump_matrix(SymMatrix(matrix), path, name=name)
        return path


class SolveCommandTests(CliTestCase):
    def test_identity(self):
        a = self.write('A', np.eye(2))
        b = self.write('B', 2.0 * np.eye(2))
        code, report = run_json('solve', a, b, '--n', 2)
        self.assertEqual(code, 0)
        npt.assert_allclose(matrix_of(report['outputs']['X']), np.eye(2))
        self.assertEqual(report['outputs']['psd']['verdict'], 'PositiveDefinite')
        self.assertTrue(report['inputs']['A'].startswith('sha256:'))

    def test_indefinite_right_side_example(self):
        cube = 2.0 ** (1.0 / 3.0)
        off = 3.0 * 2.0 ** 0.25 + 6.0 * 2.0 ** 0.75
        a = self.write('A', np.diag([1.0, 2.0 * cube]))
        y = self.write('Y', [[4.0, off], [off, 32.0]])
        code, report = run_json('solve', a, y, '--n', 3)
        self.assertEqual(code, 0)
        npt.assert_allclose(sorted(report['outputs']['X_eigenvalues'], reverse=True), [2.9013, 0.1119], atol=5e-5)

    def test_oracle_cross_check(self):
        rng = np.random.default_rng(12)
        a = self.write('A', random_pd(rng, 4).entries)
        b = self.write('B', rng.standard_normal((4, 4)))
        code, report = run_json('solve', a, b, '--n', 4, '--oracle')
        self.assertEqual(code, 0)
        self.assertTrue(report['outputs']['oracle_agrees'])
        self.assertLessEqual(report['outputs']['oracle_relative_error'], 1e-9)

    def test_error_exit_codes(self):
        a = self.write('A', np.diag([1.0, -1.0]))
        b = self.write('B', np.eye(2))
        code, report = run_json('solve', a, b, '--n', 2)
        self.assertEqual(code, 3)
        self.assertEqual(report['outputs']['error']['type'], 'NotPositiveDefinite')

        bad = os.path.join(self.tmpdir.name, 'bad.json')
        with open(bad, 'w') as handle:
            handle.write('{"dim": 2, "data": [1, 2, 3]}')
        code, _ = run_cli('solve', bad, b, '--n', 2, '--quiet')
        self.assertEqual(code, 2)

        c = self.write('C', np.eye(3))
        code, _ = run_cli('solve', b, c, '--n', 2, '--quiet')
        self.assertEqual(code, 2)


class BuildRhsCommandTests(CliTestCase):
    def test_invalid_r_raw_pair(self):
        a = self.write('A', np.diag([1.0, 2.0]))
        b = self.write('B', np.ones((2, 2)))
        code, report = run_json('build-rhs', a, b, '--m', 2, '--n', 2, '--k', 2,
                                '--t', '1/2', '--r', '1/2', '--raw', '--solve')
        self.assertEqual(code, 0)
        outputs = report['outputs']
        root2 = math.sqrt(2.0)
        off = 3.0 + 6.0 * root2
        npt.assert_allclose(matrix_of(outputs['rhs']), [[4.0, off], [off, 16.0 * root2]], rtol=1e-12)
        self.assertEqual(outputs['psd']['verdict'], 'Indefinite')
        self.assertFalse(outputs['r_condition']['valid'])
        self.assertIn('warning', outputs)
        npt.assert_allclose(sorted(outputs['X_eigenvalues'], reverse=True), [5.4007, -0.0372], atol=5e-5)

    def test_trivial_parameters(self):
        rng = np.random.default_rng(3)
        a = self.write('A', random_pd(rng, 3).entries)
        b_matrix = np.diag([1.0, 2.0, 0.5])
        b = self.write('B', b_matrix)
        code, report = run_json('build-rhs', a, b, '--m', 1, '--n', 1, '--k', 1)
        self.assertEqual(code, 0)
        npt.assert_allclose(matrix_of(report['outputs']['rhs']), b_matrix, atol=1e-12)

    def test_theorem_a_mode(self):
        rng = np.random.default_rng(4)
        a = self.write('A', random_pd(rng, 3).entries)
        b = self.write('B', np.ones((3, 3)))
        code, report = run_json('build-rhs', a, b, '--m', 3, '--n', 3, '--k', 1, '--r', '0.5')
        self.assertEqual(code, 0)
        self.assertLessEqual(report['outputs']['theorem_a_relative_error'], 1e-12)
        self.assertTrue(report['outputs']['theorem_a_condition']['valid'])

    def test_indefinite_b_needs_flag(self):
        a = self.write('A', np.eye(2))
        b = self.write('B', np.diag([1.0, -1.0]))
        code, _ = run_cli('build-rhs', a, b, '--m', 1, '--n', 1, '--k', 1, '--quiet')
        self.assertEqual(code, 3)
        code, _ = run_cli('build-rhs', a, b, '--m', 1, '--n', 1, '--k', 1, '--allow-indefinite-b', '--quiet')
        self.assertEqual(code, 0)


class ReproduceCommandTests(CliTestCase):
    def test_all_cases_pass(self):
        code, report = run_json('reproduce', 'all')
        self.assertEqual(code, 0)
        for case_id in ('remark22', 'remark23', 'example21'):
            self.assertTrue(report['outputs'][case_id]['ok'], case_id)

    def test_unit_eigenvalues(self):
        code, report = run_json('reproduce', 'example21', '--eigs', '1,1')
        self.assertEqual(code, 0)
        npt.assert_allclose(matrix_of(report['outputs']['example21']['outputs']['X']), np.ones((2, 2)))

    def test_writes_report_file(self):
        out = os.path.join(self.tmpdir.name, 'report.json')
        code, _ = run_cli('reproduce', 'remark22', '--out', out, '--quiet')
        self.assertEqual(code, 0)
        with open(out) as handle:
            self.assertTrue(json.load(handle)['ok'])


class VerifyAndFuzzCommandTests(CliTestCase):
    def test_verify_loewner_heinz(self):
        code, report = run_json('verify', 'lh', '--trials', 100, '--seed', 7)
        self.assertEqual(code, 0)
        self.assertEqual(report['outputs']['suite']['passed'], 100)
        self.assertEqual(report['seed'], 7)

    def test_verify_is_deterministic(self):
        _, first = run_json('verify', 'grand-furuta', '--trials', 20, '--seed', 7, '--dims', '2..6')
        _, second = run_json('verify', 'grand-furuta', '--trials', 20, '--seed', 7, '--dims', '2..6',
                             '--workers', 3)
        first.pop('elapsed_seconds')
        second.pop('elapsed_seconds')
        first.pop('argv')
        second.pop('argv')
        self.assertEqual(first, second)

    def test_verify_lemma_mode(self):
        code, report = run_json('verify', 'lemma', '--m', 5, '--trials', 50)
        self.assertEqual(code, 0)
        self.assertLessEqual(report['outputs']['suite']['max_relative_error'], 1e-6)

    def test_fuzz_finds_replayable_witness(self):
        code, report = run_json('fuzz', 'lh-alpha2', '--trials', 1000, '--seed', 1)
        self.assertEqual(code, 0)
        witness = report['outputs']['witness']
        self.assertIsNotNone(witness)
        self.assertTrue(report['outputs']['replay_matches'])
        self.assertEqual(witness['parameters']['alpha'], 2.0)

    def test_fuzz_small_r_example(self):
        code, report = run_json('fuzz', 'theorem21-r', '--probe', 'remark22')
        self.assertEqual(code, 0)
        self.assertAlmostEqual(report['outputs']['witness']['min_eigenvalue'], -0.0372, delta=5e-5)

    def test_fuzz_refuses_inside_region(self):
        code, _ = run_cli('fuzz', 'grand-furuta', '--region', 'inside', '--quiet')
        self.assertEqual(code, 2)

    def test_verify_rejects_alpha_outside_unit_interval(self):
        self.assertEqual(run_cli('verify', 'lh', '--alpha', '2', '--quiet')[0], 2)
        self.assertEqual(run_cli('verify', 'lh', '--alpha', '-0.5', '--quiet')[0], 2)
        code, report = run_json('verify', 'lh', '--alpha', '1/2', '--trials', 20)
        self.assertEqual(code, 0)
        self.assertEqual(report['outputs']['suite']['passed'], 20)

    def test_common_options_before_subcommand(self):
        code, text = run_cli('--json', '--quiet', 'reproduce', 'remark22')
        self.assertEqual(code, 0)
        self.assertTrue(json.loads(text)['ok'])

        code, text = run_cli('--seed', 7, '--json', '--quiet', 'verify', 'lh', '--trials', 10)
        self.assertEqual(code, 0)
        self.assertEqual(json.loads(text)['seed'], 7)

        _, text = run_cli('--seed', 3, 'verify', 'lh', '--trials', 10, '--seed', 7, '--json', '--quiet')
        self.assertEqual(json.loads(text)['seed'], 7)

    def test_bad_arguments(self):
        self.assertEqual(run_cli('verify', 'lh', '--dims', '6..2')[0], 2)
        self.assertEqual(run_cli('verify', 'nonsense')[0], 2)
        self.assertEqual(run_cli('fuzz', 'lh', '--alpha', '0.5', '--quiet')[0], 2)


if __name__ == '__main__':
    unittest.main()
